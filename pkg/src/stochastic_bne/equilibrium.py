"""
Проверка и поиск равновесий Нэша в дискретных дисконтированных играх:
best response как DTMDP, проверка по зазорам Беллмана, перебор чистых
равновесий, вычисление целевой функции и невязок задачи [OP],
проверка равновесия для среднего критерия и смешанное равновесие 2×2
в игре с одним контролирующим игроком.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DimensionMismatch, EnumerationCapExceeded, NoInteriorSolution, NotSingleController
from .exact_numerics import RationalFunction, certified_sign
from .game_core import (
    Controller,
    _pair,
    induced_rewards,
    induced_transition,
    is_single_controller,
    strategy_support,
)
from .mdp import DTMDP, average_value, blackwell_optimal, policy_value, q_values
from .models import (
    ENUMERATION_CAP,
    DiscreteGame,
    Game,
    Player,
    PureStrategy,
    StationaryStrategy,
    Strategy,
    as_stationary,
    get_float_tolerance,
    is_exact,
)

logger = logging.getLogger(__name__)


def best_response_mdp(game: DiscreteGame, opponent_strategy: Strategy, player: Player) -> DTMDP:
    """DTMDP, с которым сталкивается player при фиксированной стратегии соперника."""
    rewards, transitions = mix_opponent(game, opponent_strategy, player)
    return DTMDP(rewards, transitions)


def mix_opponent(game: Game, opponent_strategy: Strategy, player: Player) -> Tuple[tuple, tuple]:
    """
    Награды и законы перехода (вероятности или интенсивности) игрока player,
    усреднённые по стратегии соперника: r[s][a], law[s][a][s'].
    """
    other = player.other
    opp = as_stationary(opponent_strategy, game.actions(other))
    own_counts = game.actions(player)
    if len(opp) != game.state_count or opp.action_counts() != game.actions(other):
        raise DimensionMismatch(
            f"opponent strategy shape {opp.action_counts()} vs game actions {game.actions(other)}"
        )
    table = game.rewards[int(player) - 1]
    n = game.state_count
    rewards, transitions = [], []
    for s in range(n):
        r_s, p_s = [], []
        for a in range(own_counts[s]):
            acc = 0
            row = [0] * n
            for b, w in enumerate(opp[s]):
                if w == 0:
                    continue
                a1, a2 = (a, b) if player is Player.ONE else (b, a)
                acc = acc + w * table[s][a1][a2]
                law = game.law(s, a1, a2)
                for t in range(n):
                    row[t] = row[t] + w * law[t]
            r_s.append(acc)
            p_s.append(tuple(row))
        rewards.append(tuple(r_s))
        transitions.append(tuple(p_s))
    return tuple(rewards), tuple(transitions)


@dataclass(frozen=True)
class Deviation:
    player: Player
    state: int
    action: int
    surplus: object


@dataclass(frozen=True)
class NashReport:
    """
    gaps[player][s] = max_a q(s,a) − v(s) — наибольшая выгода отклонения;
    support_gaps[player][s] = max по действиям из носителя (v(s) − q(s,a)).
    """

    is_nash: bool
    gaps: Dict[Player, tuple]
    support_gaps: Dict[Player, tuple]
    deviation: Optional[Deviation]
    tolerance: float
    values: Dict[Player, tuple] = field(default_factory=dict)
    unit_factor: Optional[object] = None


def _tolerance_for(values: Sequence, tol: Optional[float]) -> float:
    if tol is not None:
        return tol
    return 0 if all(is_exact(x) for x in values) else get_float_tolerance()


def _player_gaps(mdp: DTMDP, own: StationaryStrategy, beta):
    v = policy_value(mdp, own, beta)
    q = q_values(mdp, v, beta)
    gaps, support, best_actions = [], [], []
    for s, row in enumerate(q):
        best_a = max(range(len(row)), key=lambda a: row[a])
        gaps.append(row[best_a] - v[s])
        best_actions.append(best_a)
        supported = [v[s] - row[a] for a in sorted(strategy_support(own, s))]
        support.append(max(supported) if supported else 0)
    return v, tuple(gaps), tuple(support), best_actions


def verify_nash(game: DiscreteGame, f: Strategy, g: Strategy, beta, tol: Optional[float] = None) -> NashReport:
    """(f, g) — равновесие при β, если ни одно одношаговое отклонение не выгодно."""
    f, g = _pair(game, f, g)
    strategies = {Player.ONE: f, Player.TWO: g}
    gaps, support, values = {}, {}, {}
    deviation: Optional[Deviation] = None
    scalars: List = [beta]
    worst = None
    for player in (Player.ONE, Player.TWO):
        mdp = best_response_mdp(game, strategies[player.other], player)
        v, gap, sup, best_actions = _player_gaps(mdp, strategies[player], beta)
        gaps[player], support[player], values[player] = gap, sup, v
        scalars.extend(v)
        scalars.extend(gap)
        for s, x in enumerate(gap):
            if worst is None or x > worst.surplus:
                worst = Deviation(player, s, best_actions[s], x)
    eps = _tolerance_for(scalars, tol)
    is_nash = all(x <= eps for player in gaps for x in gaps[player])
    if not is_nash:
        deviation = worst
        logger.info(
            "[INFO] not Nash at β=%s: %s gains %s by action %d at state %d",
            beta, deviation.player.label, deviation.surplus, deviation.action, deviation.state,
        )
    return NashReport(is_nash, gaps, support, deviation, eps, values)


def pure_profile_count(game: DiscreteGame) -> int:
    count = 1
    for n1, n2 in game.action_counts:
        count *= n1 * n2
    return count


def _pure_strategies(counts: Sequence[int]) -> List[PureStrategy]:
    return [PureStrategy(tuple(p)) for p in itertools.product(*(range(n) for n in counts))]


def enumerate_pure_nash(game: DiscreteGame, beta, cap: int = ENUMERATION_CAP) -> List[Tuple[PureStrategy, PureStrategy]]:
    """Все чистые пары, проходящие verify_nash, в лексикографическом порядке."""
    total = pure_profile_count(game)
    if total > cap:
        raise EnumerationCapExceeded(
            f"{total} pure profiles exceed the cap {cap}", {"count": total, "cap": cap}
        )
    found = []
    for f in _pure_strategies(game.actions(Player.ONE)):
        for g in _pure_strategies(game.actions(Player.TWO)):
            if verify_nash(game, f, g, beta).is_nash:
                found.append((f, g))
    logger.info("[OK] %d pure equilibria among %d profiles at β=%s", len(found), total, beta)
    return sorted(found, key=lambda pair: (pair[0].actions, pair[1].actions))


@dataclass(frozen=True)
class OpPoint:
    """x = (v¹, v², f, g)."""

    v1: tuple
    v2: tuple
    f: StationaryStrategy
    g: StationaryStrategy


@dataclass(frozen=True)
class OpResidual:
    """
    Значение ψ(x) и невязки ограничений (i)–(vi).
    Неравенства записаны в форме «≤ 0», равенства (iii)–(iv) — «= 0».
    """

    objective: object
    best_response_1: Dict[Tuple[int, int], object]
    best_response_2: Dict[Tuple[int, int], object]
    simplex_f: Tuple[object, ...]
    simplex_g: Tuple[object, ...]
    nonnegative_f: Dict[Tuple[int, int], object]
    nonnegative_g: Dict[Tuple[int, int], object]
    tolerance: float = 0

    def max_inequality_residual(self):
        values = (
            list(self.best_response_1.values())
            + list(self.best_response_2.values())
            + list(self.nonnegative_f.values())
            + list(self.nonnegative_g.values())
        )
        return max(values)

    def is_feasible(self) -> bool:
        eps = self.tolerance
        return self.max_inequality_residual() <= eps and all(
            abs(x) <= eps for x in self.simplex_f + self.simplex_g
        )

    def is_optimal(self) -> bool:
        """ψ(x) = 0 и все ограничения выполнены: x соответствует равновесию."""
        return self.is_feasible() and abs(self.objective) <= self.tolerance


def op_point(game: DiscreteGame, f: Strategy, g: Strategy, beta) -> OpPoint:
    f, g = _pair(game, f, g)
    values = []
    for player in (Player.ONE, Player.TWO):
        mdp = best_response_mdp(game, g if player is Player.ONE else f, player)
        values.append(policy_value(mdp, f if player is Player.ONE else g, beta))
    return OpPoint(values[0], values[1], f, g)


def op_evaluate(game: DiscreteGame, beta, x: OpPoint, tol: Optional[float] = None) -> OpResidual:
    """ψ(x) = Σ_k 1ᵀ[v^k − r^k(f,g) − βP(f,g)v^k] и невязки (i)–(vi) ровно в этой записи."""
    n = game.state_count
    if len(x.v1) != n or len(x.v2) != n:
        raise DimensionMismatch("value vectors must have one entry per state")
    f, g = _pair(game, x.f, x.g)
    P = induced_transition(game, f, g)
    objective = 0
    for player, v in ((Player.ONE, x.v1), (Player.TWO, x.v2)):
        r = induced_rewards(game, f, g, player)
        Pv = P.apply(v)
        for s in range(n):
            objective = objective + v[s] - r[s] - beta * Pv[s]

    br1, br2, neg_f, neg_g = {}, {}, {}, {}
    for s, (n1, n2) in enumerate(game.action_counts):
        for a1 in range(n1):
            acc = 0
            for a2, w in enumerate(g[s]):
                cont = sum((p * x.v1[t] for t, p in enumerate(game.transitions[s][a1][a2])), 0)
                acc = acc + w * (game.reward(Player.ONE, s, a1, a2) + beta * cont)
            br1[(s, a1)] = acc - x.v1[s]
            neg_f[(s, a1)] = -f[s][a1]
        for a2 in range(n2):
            acc = 0
            for a1, w in enumerate(f[s]):
                cont = sum((p * x.v2[t] for t, p in enumerate(game.transitions[s][a1][a2])), 0)
                acc = acc + w * (game.reward(Player.TWO, s, a1, a2) + beta * cont)
            br2[(s, a2)] = acc - x.v2[s]
            neg_g[(s, a2)] = -g[s][a2]
    simplex_f = tuple(sum(f[s], 0) - 1 for s in range(n))
    simplex_g = tuple(sum(g[s], 0) - 1 for s in range(n))
    scalars = [objective, beta] + list(br1.values()) + list(br2.values())
    return OpResidual(
        objective=objective,
        best_response_1=br1,
        best_response_2=br2,
        simplex_f=simplex_f,
        simplex_g=simplex_g,
        nonnegative_f=neg_f,
        nonnegative_g=neg_g,
        tolerance=_tolerance_for(scalars, tol),
    )


def verify_average_nash(game: DiscreteGame, f: Strategy, g: Strategy, tol: Optional[float] = None) -> NashReport:
    """
    Равновесие для среднего критерия: средний выигрыш стратегии каждого игрока
    совпадает с оптимальным средним его DTMDP. Оптимум берётся по
    Blackwell-оптимальной политике.
    """
    f, g = _pair(game, f, g)
    strategies = {Player.ONE: f, Player.TWO: g}
    gaps, values = {}, {}
    worst: Optional[Deviation] = None
    scalars: List = []
    for player in (Player.ONE, Player.TWO):
        mdp = best_response_mdp(game, strategies[player.other], player)
        best, _ = blackwell_optimal(mdp)
        optimum = average_value(mdp, best)
        own = average_value(mdp, strategies[player])
        gap = tuple(o - v for o, v in zip(optimum, own))
        gaps[player], values[player] = gap, own
        scalars.extend(gap)
        for s, x in enumerate(gap):
            if worst is None or x > worst.surplus:
                worst = Deviation(player, s, best[s], x)
    eps = _tolerance_for(scalars, tol)
    is_nash = all(x <= eps for player in gaps for x in gaps[player])
    return NashReport(
        is_nash=is_nash,
        gaps=gaps,
        support_gaps={p: tuple(0 for _ in gaps[p]) for p in gaps},
        deviation=None if is_nash else worst,
        tolerance=eps,
        values=values,
    )


def _two_by_two_state(game: DiscreteGame) -> int:
    multi = [s for s, counts in enumerate(game.action_counts) if counts != (1, 1)]
    if len(multi) != 1 or game.action_counts[multi[0]] != (2, 2):
        raise DimensionMismatch(
            "expected exactly one state with 2x2 actions and 1x1 elsewhere",
            {"action_counts": [list(c) for c in game.action_counts]},
        )
    return multi[0]


def _in_unit_interval(x, domain: Tuple[Fraction, Optional[Fraction]]) -> bool:
    if isinstance(x, RationalFunction):
        lo, hi = domain
        return certified_sign(x, lo, hi) in (0, 1) and certified_sign(1 - x, lo, hi) in (0, 1)
    return 0 <= x <= 1


def mixed_ne_single_controller_2x2(
    game: DiscreteGame, beta, domain: Tuple[Fraction, Optional[Fraction]] = (Fraction(0), Fraction(1))
) -> Tuple[StationaryStrategy, StationaryStrategy]:
    """
    Смешанное равновесие игры, где переходами управляет игрок 2,
    а действия есть только в одном состоянии (2×2).

    q — из безразличия игрока 1 на строках наград этого состояния;
    p — из безразличия игрока 2 между двумя детерминированными продолжениями
    (значения аффинны по p, поэтому достаточно p = 0 и p = 1).
    beta может быть рациональной функцией — тогда ответ в замкнутой форме,
    а 0 ≤ p ≤ 1 проверяется для всех значений переменной из domain
    (hi = None: луч); без такого сертификата — NoInteriorSolution.
    """
    controller = is_single_controller(game)
    if controller not in (Controller.PLAYER2, Controller.BOTH):
        raise NotSingleController(
            f"transitions are controlled by {controller.value}, player 2 expected",
            {"controller": controller.value},
        )
    k = _two_by_two_state(game)
    r = game.rewards[0][k]
    denom = (r[0][0] - r[0][1]) - (r[1][0] - r[1][1])
    if denom == 0:
        raise NoInteriorSolution("player 1 is indifferent for every q", {"state": k})
    q = Fraction(r[1][1] - r[0][1]) / denom if is_exact(denom) else (r[1][1] - r[0][1]) / denom
    if not 0 <= q <= 1:
        raise NoInteriorSolution(f"q = {q} is outside [0, 1]", {"state": k, "q": str(q)})

    counts = game.actions(Player.ONE)

    def difference(p_action: int):
        f = PureStrategy(tuple(p_action if s == k else 0 for s in range(game.state_count)))
        mdp = best_response_mdp(game, f.to_stationary(counts), Player.TWO)
        first = policy_value(mdp, PureStrategy(tuple(0 for _ in range(game.state_count))), beta)
        second = policy_value(mdp, PureStrategy(tuple(1 if s == k else 0 for s in range(game.state_count))), beta)
        return first[k] - second[k]

    d1 = difference(0)  # p = 1
    d0 = difference(1)  # p = 0
    if d0 == d1:
        raise NoInteriorSolution("player 2 indifference does not depend on p", {"state": k})
    p = d0 / (d0 - d1)
    if not _in_unit_interval(p, domain):
        raise NoInteriorSolution(f"p = {p} is outside [0, 1]", {"state": k, "p": str(p)})

    def strategy(x) -> StationaryStrategy:
        rows = [(Fraction(1),) if s != k else (x, 1 - x) for s in range(game.state_count)]
        return StationaryStrategy(tuple(rows))

    logger.info("[OK] mixed equilibrium at state %d: p = %s, q = %s", k, p, q)
    return strategy(p), strategy(q)
