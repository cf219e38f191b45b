"""
Марковские процессы принятия решений с дискретным временем (DTMDP).

Значения фиксированной политики (численно и символьно по β), оптимальная
политика по Говарду, Blackwell-оптимальная политика перебором,
предел Чезаро P* и средние значения.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import DimensionMismatch, EnumerationCapExceeded, NotBlackwellOptimal
from .exact_numerics import (
    BETA,
    RATIONALS,
    DenseMatrix,
    Ordering,
    RationalFunction,
    ScalarField,
    compare_near_limit,
    infer_field,
    resolvent_inverse,
    root_free_threshold,
    solve_linear,
)
from .models import (
    ENUMERATION_CAP,
    PureStrategy,
    StationaryStrategy,
    Strategy,
    as_stationary,
    get_float_tolerance,
    is_exact,
)

logger = logging.getLogger(__name__)

Policy = Strategy


@dataclass(frozen=True)
class DTMDP:
    """rewards[s][a], transitions[s][a][s']."""

    rewards: Tuple[tuple, ...]
    transitions: Tuple[tuple, ...]

    def __post_init__(self):
        if len(self.rewards) != len(self.transitions):
            raise DimensionMismatch("rewards and transitions disagree on the state count")
        n = len(self.rewards)
        for s, (r, p) in enumerate(zip(self.rewards, self.transitions)):
            if len(r) != len(p) or not r:
                raise DimensionMismatch(f"state {s}: {len(r)} rewards for {len(p)} transition rows")
            if any(len(row) != n for row in p):
                raise DimensionMismatch(f"state {s}: transition row length differs from {n}")

    @property
    def state_count(self) -> int:
        return len(self.rewards)

    @property
    def action_counts(self) -> Tuple[int, ...]:
        return tuple(len(r) for r in self.rewards)

    def is_exact(self) -> bool:
        values = [x for r in self.rewards for x in r] + [x for p in self.transitions for row in p for x in row]
        return all(is_exact(x) for x in values)


def policy_count(mdp: DTMDP) -> int:
    count = 1
    for n in mdp.action_counts:
        count *= n
    return count


def _rows(mdp: DTMDP, d: Policy) -> StationaryStrategy:
    d = as_stationary(d, mdp.action_counts)
    if d.action_counts() != mdp.action_counts:
        raise DimensionMismatch(f"policy shape {d.action_counts()} vs MDP actions {mdp.action_counts}")
    return d


def induced_chain(mdp: DTMDP, d: Policy) -> Tuple[list, list]:
    """(P_d по строкам, r_d) без привязки к полю."""
    d = _rows(mdp, d)
    n = mdp.state_count
    P, r = [], []
    for s in range(n):
        row = [0] * n
        acc = 0
        for a, w in enumerate(d[s]):
            if w == 0:
                continue
            acc = acc + w * mdp.rewards[s][a]
            for t in range(n):
                row[t] = row[t] + w * mdp.transitions[s][a][t]
        P.append(row)
        r.append(acc)
    return P, r


def _field_for(values: Sequence, beta) -> ScalarField:
    return infer_field(list(values) + [beta])


def policy_value(mdp: DTMDP, d: Policy, beta) -> tuple:
    """v = (I − βP_d)⁻¹ r_d. beta может быть Fraction, float или RationalFunction."""
    P, r = induced_chain(mdp, d)
    field = _field_for([x for row in P for x in row] + list(r), beta)
    n = mdp.state_count
    A = DenseMatrix.from_rows(
        [[(1 if i == j else 0) - beta * P[i][j] for j in range(n)] for i in range(n)], field
    )
    return solve_linear(A, [field.coerce(x) for x in r])


def policy_value_symbolic(mdp: DTMDP, d: Policy) -> Tuple[RationalFunction, ...]:
    """Точное значение политики как рациональная функция от β."""
    if not mdp.is_exact():
        raise ValueError("symbolic policy values need exact rewards and transitions")
    P, r = induced_chain(mdp, d)
    R = resolvent_inverse(DenseMatrix.from_rows(P, RATIONALS))
    return R.apply([RationalFunction.constant(x) for x in r])


def q_values(mdp: DTMDP, values: Sequence, beta) -> List[list]:
    """q(s,a) = r(s,a) + β Σ p(s'|s,a) v(s')."""
    out = []
    for s in range(mdp.state_count):
        row = []
        for a, reward in enumerate(mdp.rewards[s]):
            cont = 0
            for t, p in enumerate(mdp.transitions[s][a]):
                if p != 0:
                    cont = cont + p * values[t]
            row.append(reward + beta * cont)
        out.append(row)
    return out


def _default_tolerance(values: Sequence) -> float:
    return 0 if all(is_exact(x) for x in values) else get_float_tolerance()


def optimal_policy(mdp: DTMDP, beta, tol: Optional[float] = None) -> Tuple[PureStrategy, tuple]:
    """
    Итерация по стратегиям Говарда, старт — все действия 0.
    При улучшении остаёмся на текущем действии, если оно в пределах допуска
    от максимума; иначе берём наименьший индекс среди максимальных.
    """
    policy = [0] * mdp.state_count
    for iteration in itertools.count(1):
        values = policy_value(mdp, PureStrategy(tuple(policy)), beta)
        q = q_values(mdp, values, beta)
        eps = _default_tolerance(list(values) + [beta]) if tol is None else tol
        changed = False
        for s, row in enumerate(q):
            best = max(row)
            if row[policy[s]] >= best - eps:
                continue
            policy[s] = next(a for a, x in enumerate(row) if x >= best - eps)
            changed = True
        if not changed:
            logger.debug("[OK] policy iteration converged after %d steps", iteration)
            return PureStrategy(tuple(policy)), values


def optimal_action_sets(mdp: DTMDP, values: Sequence, beta, tol: Optional[float] = None) -> Tuple[frozenset, ...]:
    """Все действия, на которых достигается максимум в уравнениях оптимальности."""
    q = q_values(mdp, values, beta)
    eps = _default_tolerance(list(values) + [beta]) if tol is None else tol
    return tuple(frozenset(a for a, x in enumerate(row) if x >= max(row) - eps) for row in q)


def bellman_surplus_symbolic(mdp: DTMDP, d: Policy) -> Dict[Tuple[int, int], RationalFunction]:
    """θ_{s,a}(β) = r(s,a) + β Σ p(s'|s,a) v_d(s') − v_d(s)."""
    v = policy_value_symbolic(mdp, d)
    q = q_values(mdp, v, BETA)
    return {(s, a): q[s][a] - v[s] for s in range(mdp.state_count) for a in range(len(q[s]))}


def blackwell_threshold(mdp: DTMDP, d: Policy) -> Fraction:
    """
    β₀ ∈ [0, 1), начиная с которого d оптимальна при всех β ∈ [β₀, 1).
    Знаменатели θ не имеют корней на [0, 1), поэтому достаточно числителей.
    """
    beta0 = Fraction(0)
    for (s, a), theta in bellman_surplus_symbolic(mdp, d).items():
        if theta.is_zero():
            continue
        if compare_near_limit(theta, 0) is Ordering.GREATER:
            raise NotBlackwellOptimal(
                f"deviation to action {a} at state {s} is profitable near β = 1",
                {"state": s, "action": a, "surplus": str(theta)},
            )
        beta0 = max(beta0, root_free_threshold(theta.num))
    return beta0


@dataclass(frozen=True)
class PolicyComparison:
    policy: PureStrategy
    orderings: Tuple[Ordering, ...]


@dataclass(frozen=True)
class BlackwellCertificate:
    """Попарные сравнения лучшей политики со всеми детерминированными политиками."""

    policy: PureStrategy
    values: Tuple[RationalFunction, ...]
    comparisons: Tuple[PolicyComparison, ...]
    ties: Tuple[PureStrategy, ...]
    threshold: Fraction
    remarks: Tuple[str, ...] = field(default=())


def _dominates(a: Sequence[RationalFunction], b: Sequence[RationalFunction]) -> bool:
    strictly = False
    for x, y in zip(a, b):
        order = compare_near_limit(x, y)
        if order is Ordering.LESS:
            return False
        if order is Ordering.GREATER:
            strictly = True
    return strictly


def blackwell_optimal(mdp: DTMDP, cap: int = ENUMERATION_CAP) -> Tuple[PureStrategy, BlackwellCertificate]:
    """Blackwell-оптимальная политика полным перебором детерминированных политик."""
    if not mdp.is_exact():
        raise ValueError("Blackwell optimality needs exact rewards and transitions")
    total = policy_count(mdp)
    if total > cap:
        raise EnumerationCapExceeded(
            f"{total} deterministic policies exceed the cap {cap}", {"count": total, "cap": cap}
        )
    policies = [PureStrategy(tuple(p)) for p in itertools.product(*(range(n) for n in mdp.action_counts))]
    values = {p: policy_value_symbolic(mdp, p) for p in policies}

    best = policies[0]
    for candidate in policies[1:]:
        if _dominates(values[candidate], values[best]):
            best = candidate

    comparisons, ties = [], []
    for p in policies:
        orderings = tuple(compare_near_limit(x, y) for x, y in zip(values[best], values[p]))
        if any(o is Ordering.LESS for o in orderings):
            raise NotBlackwellOptimal(f"policy {best} is dominated by {p} near β = 1")
        comparisons.append(PolicyComparison(p, orderings))
        if p != best and all(o is Ordering.EQUAL for o in orderings):
            ties.append(p)

    threshold = blackwell_threshold(mdp, best)
    logger.info("[OK] Blackwell-optimal policy %s out of %d, β₀ = %s", best, total, threshold)
    remarks = ("ties: " + ", ".join(str(t) for t in ties),) if ties else ()
    return best, BlackwellCertificate(best, values[best], tuple(comparisons), tuple(ties), threshold, remarks)


def _recurrent_classes(P: DenseMatrix) -> List[List[int]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(P.rows))
    graph.add_edges_from(
        (i, j) for i in range(P.rows) for j in range(P.cols) if not P.field.is_zero(P[i, j])
    )
    condensed = nx.condensation(graph)
    classes = [
        sorted(condensed.nodes[c]["members"]) for c in condensed.nodes if condensed.out_degree(c) == 0
    ]
    return sorted(classes)


def cesaro_limit(P: DenseMatrix) -> DenseMatrix:
    """
    P* = lim (1/N) Σ P^k. Структурный расчёт:
    замкнутые классы (networkx), стационарная строка на каждом классе,
    вероятности поглощения для транзиентных состояний.
    """
    if not P.is_square:
        raise DimensionMismatch(f"transition matrix must be square, got {P.rows}x{P.cols}")
    field = P.field
    n = P.rows
    classes = _recurrent_classes(P)
    recurrent = {i for cls in classes for i in cls}
    transient = [i for i in range(n) if i not in recurrent]
    star = [[field.zero()] * n for _ in range(n)]

    stationary: List[tuple] = []
    for cls in classes:
        k = len(cls)
        # π (I − P_CC) = 0 с заменой последнего уравнения на Σπ = 1
        rows = [[(1 if i == j else 0) - P[cls[j], cls[i]] for j in range(k)] for i in range(k)]
        rows[-1] = [1] * k
        rhs = [0] * (k - 1) + [1]
        pi = solve_linear(DenseMatrix.from_rows(rows, field), rhs)
        stationary.append(pi)
        for i in cls:
            for idx, j in enumerate(cls):
                star[i][j] = pi[idx]

    if transient:
        m = len(transient)
        A = DenseMatrix.from_rows(
            [[(1 if a == b else 0) - P[transient[a], transient[b]] for b in range(m)] for a in range(m)], field
        )
        for cls, pi in zip(classes, stationary):
            into = [sum((P[t, j] for j in cls), field.zero()) for t in transient]
            h = solve_linear(A, into)
            for a, t in enumerate(transient):
                for idx, j in enumerate(cls):
                    star[t][j] = star[t][j] + h[a] * pi[idx]

    logger.debug("[INFO] Cesàro limit: %d recurrent classes, %d transient states", len(classes), len(transient))
    return DenseMatrix.from_rows(star, field)


def average_value(mdp: DTMDP, d: Policy) -> tuple:
    """v_ea = P*_d · r_d."""
    P, r = induced_chain(mdp, d)
    field = infer_field([x for row in P for x in row] + list(r))
    star = cesaro_limit(DenseMatrix.from_rows(P, field))
    return star.apply([field.coerce(x) for x in r])

