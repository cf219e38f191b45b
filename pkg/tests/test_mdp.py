import random
from fractions import Fraction as F

import pytest

from conftest import mixed, pure, random_distribution
from stochastic_bne.equilibrium import best_response_mdp
from stochastic_bne.errors import DimensionMismatch, EnumerationCapExceeded
from stochastic_bne.exact_numerics import BETA, DenseMatrix, limit_at_one
from stochastic_bne.mdp import (
    DTMDP,
    average_value,
    bellman_surplus_symbolic,
    blackwell_optimal,
    blackwell_threshold,
    cesaro_limit,
    optimal_action_sets,
    optimal_policy,
    policy_count,
    policy_value,
    policy_value_symbolic,
    q_values,
)
from stochastic_bne.models import Player


def _reply_mdp(ex1, p):
    """MDP игрока 2 против f = (p, 1 − p) в состоянии 0."""
    return best_response_mdp(ex1, mixed((p, 1 - p), (1,)), Player.TWO)


def test_single_state_value():
    mdp = DTMDP(((F(1),),), (((F(1),),),))
    assert policy_value(mdp, pure(0), F(1, 2)) == (2,)
    assert policy_value_symbolic(mdp, pure(0)) == (1 / (1 - BETA),)


def test_dtmdp_shape_checks():
    with pytest.raises(DimensionMismatch):
        DTMDP(((1,), (1,)), (((1, 0),),))
    with pytest.raises(DimensionMismatch):
        DTMDP(((1, 2),), (((1,),),))


def test_policy_value_float_and_symbolic_agree(ex1):
    mdp = _reply_mdp(ex1, F(1, 2))
    exact = policy_value(mdp, pure(1, 0), F(1, 2))
    approx = policy_value(mdp, pure(1, 0), 0.5)
    symbolic = policy_value_symbolic(mdp, pure(1, 0))
    assert approx == pytest.approx([float(x) for x in exact])
    assert tuple(v(F(1, 2)) for v in symbolic) == exact


def test_q_values_match_values_on_policy(ex1):
    mdp = _reply_mdp(ex1, F(1, 3))
    v = policy_value(mdp, pure(0, 0), F(3, 4))
    q = q_values(mdp, v, F(3, 4))
    assert q[0][0] == v[0]
    assert q[1][0] == v[1]


def test_optimal_policy_example_one_reply(ex1):
    # p* = (3β + 1)/(7 + 5β) = 5/19 при β = 1/2, p = 1/2 > p*: выгоднее g1
    policy, values = optimal_policy(_reply_mdp(ex1, F(1, 2)), F(1, 2))
    assert policy == pure(0, 0)
    assert values[0] == F(13, 2) / F(1, 2)
    # p = 1/10 < p*: выгоднее уйти в состояние 1
    policy, _ = optimal_policy(_reply_mdp(ex1, F(1, 10)), F(1, 2))
    assert policy == pure(1, 0)


def test_optimal_action_sets_show_ties(ex1):
    beta = F(1, 2)
    p_star = (3 * beta + 1) / (7 + 5 * beta)
    mdp = _reply_mdp(ex1, p_star)
    _, values = optimal_policy(mdp, beta)
    assert optimal_action_sets(mdp, values, beta)[0] == frozenset({0, 1})


def test_blackwell_threshold_of_crossing_reply(ex1):
    # при p = 2/7 выгода ухода (7 − 11β)/(7(1 + β)) меняет знак в 7/11
    mdp = _reply_mdp(ex1, F(2, 7))
    surplus = bellman_surplus_symbolic(mdp, pure(1, 0))
    assert surplus[(0, 0)] == (7 - 11 * BETA) / (7 * (1 + BETA))
    assert surplus[(0, 1)] == 0
    assert blackwell_threshold(mdp, pure(1, 0)) == F(7, 11)


def test_blackwell_optimal_with_certificate(ex1):
    mdp = _reply_mdp(ex1, F(2, 7))
    policy, certificate = blackwell_optimal(mdp)
    assert policy == pure(1, 0)
    assert certificate.threshold == F(7, 11)
    assert len(certificate.comparisons) == policy_count(mdp) == 2
    assert certificate.ties == ()
    optimal, _ = optimal_policy(mdp, F(9, 10))
    assert optimal == policy


def test_blackwell_optimal_rejects_floats_and_cap(ex1):
    with pytest.raises(ValueError):
        blackwell_optimal(DTMDP(((0.5,),), (((1.0,),),)))
    with pytest.raises(EnumerationCapExceeded):
        blackwell_optimal(_reply_mdp(ex1, F(1, 2)), cap=1)


def test_blackwell_optimal_reports_ties():
    mdp = DTMDP(((F(1), F(1)),), (((F(1),), (F(1),)),))
    policy, certificate = blackwell_optimal(mdp)
    assert policy == pure(0)
    assert certificate.ties == (pure(1),)
    assert certificate.threshold == 0


def test_cesaro_limit_periodic_chain():
    star = cesaro_limit(DenseMatrix.from_rows([[0, 1], [1, 0]]))
    assert star.to_rows() == [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]


def test_cesaro_limit_with_transient_state():
    P = DenseMatrix.from_rows([[F(1, 2), F(1, 4), F(1, 4)], [0, 1, 0], [0, 0, 1]])
    star = cesaro_limit(P)
    assert star.to_rows() == [[0, F(1, 2), F(1, 2)], [0, 1, 0], [0, 0, 1]]


def test_cesaro_limit_is_vanishing_discount_limit(ex1):
    mdp = _reply_mdp(ex1, F(1, 3))
    for d in (pure(0, 0), pure(1, 0)):
        symbolic = policy_value_symbolic(mdp, d)
        average = average_value(mdp, d)
        assert tuple(limit_at_one((1 - BETA) * v) for v in symbolic) == average


def test_average_value_of_cycle(ex1):
    # g2 против f = (1/3, 2/3): цикл 0 → 1 → 0, награды 13/3 и 7
    mdp = _reply_mdp(ex1, F(1, 3))
    assert average_value(mdp, pure(1, 0)) == (F(17, 3), F(17, 3))


def _random_mdp(rng, max_states=3, max_actions=3):
    n = rng.randint(1, max_states)
    counts = [rng.randint(1, max_actions) for _ in range(n)]
    rewards = tuple(tuple(F(rng.randint(-5, 10)) for _ in range(k)) for k in counts)
    transitions = tuple(tuple(random_distribution(rng, n) for _ in range(k)) for k in counts)
    return DTMDP(rewards, transitions)


def test_optimal_policy_satisfies_bellman_equation():
    rng = random.Random(7)
    for _ in range(50):
        mdp = _random_mdp(rng)
        beta = F(rng.randint(0, 99), 100)
        policy, values = optimal_policy(mdp, beta)
        q = q_values(mdp, values, beta)
        assert all(values[s] == max(row) for s, row in enumerate(q))
        assert values == policy_value(mdp, policy, beta)


def test_reward_shift_keeps_policy_and_shifts_values():
    rng = random.Random(8)
    for _ in range(50):
        mdp = _random_mdp(rng)
        beta = F(rng.randint(0, 99), 100)
        c = F(rng.randint(-10, 10), rng.randint(1, 5))
        shifted = DTMDP(tuple(tuple(r + c for r in row) for row in mdp.rewards), mdp.transitions)
        policy, values = optimal_policy(mdp, beta)
        shifted_policy, shifted_values = optimal_policy(shifted, beta)
        assert shifted_policy == policy
        assert shifted_values == tuple(v + c / (1 - beta) for v in values)


@pytest.mark.parametrize("k", [4, 8, 12])
def test_blackwell_policy_is_optimal_close_to_one(k):
    rng = random.Random(100 + k)
    beta = 1 - F(1, 2**k)
    for _ in range(30):
        mdp = _random_mdp(rng)
        policy, certificate = blackwell_optimal(mdp)
        if beta <= certificate.threshold:
            continue
        _, optimal_values = optimal_policy(mdp, beta)
        assert policy_value(mdp, policy, beta) == optimal_values


def test_cesaro_limit_is_stochastic_and_invariant():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(1, 4)
        P = DenseMatrix.from_rows([random_distribution(rng, n) for _ in range(n)])
        star = cesaro_limit(P)
        assert (star @ P).to_rows() == star.to_rows()
        assert (P @ star).to_rows() == star.to_rows()
        assert (star @ star).to_rows() == star.to_rows()
        for row in star.to_rows():
            assert sum(row) == 1
            assert all(x >= 0 for x in row)
