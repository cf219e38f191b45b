"""
Проверка корректности игр, индуцированные матрицы и векторы наград,
структурные предикаты (single-controller, аддитивность наград, SIT).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .errors import DimensionMismatch
from .exact_numerics import DenseMatrix, ScalarField, infer_field
from .models import (
    AdditiveDecomposition,
    AdditiveWitness,
    ContinuousGame,
    DiscreteGame,
    Game,
    Player,
    StationaryStrategy,
    Strategy,
    as_stationary,
    format_scalar,
    get_float_tolerance,
    is_exact,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    location: Tuple[int, ...]
    message: str

    def __str__(self) -> str:
        where = ",".join(str(i) for i in self.location)
        return f"({where}): {self.message}" if where else self.message


def _is_zero(value, tol: float) -> bool:
    return value == 0 if is_exact(value) else abs(value) <= tol


def validate(game: Game) -> List[Violation]:
    """Все нарушения инвариантов игры; пустой список — игра корректна."""
    tol = get_float_tolerance()
    violations: List[Violation] = []
    n = game.state_count
    if n == 0:
        return [Violation((), "game has no states")]
    continuous = isinstance(game, ContinuousGame)
    laws = game.rates if continuous else game.transitions

    for i, table in enumerate(game.rewards):
        if len(table) != n:
            violations.append(Violation((), f"rewards p{i + 1}: {len(table)} states, expected {n}"))
    if len(laws) != n:
        violations.append(Violation((), f"{'rates' if continuous else 'transitions'}: {len(laws)} states, expected {n}"))
    if violations:
        return violations

    for s, (n1, n2) in enumerate(game.action_counts):
        if n1 < 1 or n2 < 1:
            violations.append(Violation((s,), f"empty action set ({n1}, {n2})"))
            continue
        for i, table in enumerate(game.rewards):
            if len(table[s]) != n1 or any(len(row) != n2 for row in table[s]):
                violations.append(Violation((s,), f"rewards p{i + 1} do not match actions ({n1}, {n2})"))
        if len(laws[s]) != n1 or any(len(row) != n2 for row in laws[s]):
            violations.append(Violation((s,), f"law table does not match actions ({n1}, {n2})"))
            continue
        for a1 in range(n1):
            for a2 in range(n2):
                row = laws[s][a1][a2]
                loc = (s, a1, a2)
                if len(row) != n:
                    violations.append(Violation(loc, f"row has {len(row)} entries, expected {n}"))
                    continue
                if continuous:
                    violations.extend(_rate_row_violations(loc, s, row, tol))
                else:
                    violations.extend(_probability_row_violations(loc, row, tol))
    return violations


def _probability_row_violations(loc, row, tol) -> List[Violation]:
    out = []
    for t, x in enumerate(row):
        if x < 0 and not _is_zero(x, tol):
            out.append(Violation(loc + (t,), f"negative probability {format_scalar(x)}"))
    total = sum(row, Fraction(0)) if all(is_exact(x) for x in row) else sum(float(x) for x in row)
    if not _is_zero(total - 1, tol):
        out.append(Violation(loc, f"row sum {format_scalar(total)} ≠ 1"))
    return out


def _rate_row_violations(loc, s, row, tol) -> List[Violation]:
    out = []
    off = Fraction(0) if all(is_exact(x) for x in row) else 0.0
    for t, x in enumerate(row):
        if t == s:
            continue
        if x < 0 and not _is_zero(x, tol):
            out.append(Violation(loc + (t,), f"negative rate {format_scalar(x)}"))
        off = off + x
    if not _is_zero(row[s] + off, tol):
        out.append(
            Violation(loc, f"diagonal rate {format_scalar(row[s])} ≠ -{format_scalar(off)}")
        )
    return out


def _check_strategy(game: Game, strategy: StationaryStrategy, player: Player) -> None:
    counts = game.actions(player)
    if len(strategy) != len(counts):
        raise DimensionMismatch(
            f"{player.label} strategy has {len(strategy)} states, game has {len(counts)}"
        )
    for s, row in enumerate(strategy.probabilities):
        if len(row) != counts[s]:
            raise DimensionMismatch(
                f"{player.label} strategy at state {s} has {len(row)} entries, expected {counts[s]}",
                {"player": int(player), "state": s},
            )


def _pair(game: Game, f: Strategy, g: Strategy) -> Tuple[StationaryStrategy, StationaryStrategy]:
    f = as_stationary(f, game.actions(Player.ONE))
    g = as_stationary(g, game.actions(Player.TWO))
    _check_strategy(game, f, Player.ONE)
    _check_strategy(game, g, Player.TWO)
    return f, g


def _mix_law(game: Game, f: StationaryStrategy, g: StationaryStrategy, s: int) -> list:
    laws = game.rates if isinstance(game, ContinuousGame) else game.transitions
    n = game.state_count
    out = [0] * n
    for a1, x in enumerate(f[s]):
        if x == 0:
            continue
        for a2, y in enumerate(g[s]):
            if y == 0:
                continue
            w = x * y
            row = laws[s][a1][a2]
            for t in range(n):
                out[t] = out[t] + w * row[t]
    return out


def _field_of(game: Game, f: StationaryStrategy, g: StationaryStrategy) -> ScalarField:
    laws = game.rates if isinstance(game, ContinuousGame) else game.transitions
    values = [x for row in f.probabilities for x in row] + [x for row in g.probabilities for x in row]
    values += [x for st in laws for r1 in st for r2 in r1 for x in r2]
    return infer_field(values)


def induced_transition(game: DiscreteGame, f: Strategy, g: Strategy) -> DenseMatrix:
    """P(f,g)[s][s'] = Σ f(s,a1) p(s'|s,a1,a2) g(s,a2)."""
    f, g = _pair(game, f, g)
    rows = [_mix_law(game, f, g, s) for s in range(game.state_count)]
    return DenseMatrix.from_rows(rows, _field_of(game, f, g))


def induced_rate_matrix(game: ContinuousGame, f: Strategy, g: Strategy) -> DenseMatrix:
    """Q(f,g) для игры с непрерывным временем."""
    f, g = _pair(game, f, g)
    rows = [_mix_law(game, f, g, s) for s in range(game.state_count)]
    return DenseMatrix.from_rows(rows, _field_of(game, f, g))


def induced_rewards(game: Game, f: Strategy, g: Strategy, player: Player) -> tuple:
    """r^i(s,f,g) = Σ f(s,a1) r^i(s,a1,a2) g(s,a2) для каждого s."""
    f, g = _pair(game, f, g)
    table = game.rewards[int(player) - 1]
    out = []
    for s in range(game.state_count):
        acc = 0
        for a1, x in enumerate(f[s]):
            for a2, y in enumerate(g[s]):
                acc = acc + x * table[s][a1][a2] * y
        out.append(Fraction(acc) if is_exact(acc) else acc)
    return tuple(out)


class Controller(Enum):
    PLAYER1 = "Player1"
    PLAYER2 = "Player2"
    NEITHER = "Neither"
    BOTH = "Both"


def _independent_of(game: Game, player: Player) -> bool:
    laws = game.rates if isinstance(game, ContinuousGame) else game.transitions
    for s, (n1, n2) in enumerate(game.action_counts):
        if player is Player.ONE:
            for a2 in range(n2):
                first = tuple(laws[s][0][a2])
                if any(tuple(laws[s][a1][a2]) != first for a1 in range(1, n1)):
                    return False
        else:
            for a1 in range(n1):
                first = tuple(laws[s][a1][0])
                if any(tuple(laws[s][a1][a2]) != first for a2 in range(1, n2)):
                    return False
    return True


def is_single_controller(game: Game) -> Controller:
    """Кто управляет переходами (интенсивностями): точная проверка независимости."""
    free_of_1 = _independent_of(game, Player.ONE)
    free_of_2 = _independent_of(game, Player.TWO)
    if free_of_1 and free_of_2:
        return Controller.BOTH
    if free_of_1:
        return Controller.PLAYER2
    if free_of_2:
        return Controller.PLAYER1
    return Controller.NEITHER


def check_additive_reward(game: Game, player: Player) -> Union[AdditiveDecomposition, AdditiveWitness]:
    """
    Разложимость r(s,a1,a2) = r₁(s,a1) + r₂(s,a2) для наград игрока player.

    Достаточно проверить прямоугольники с первой строкой и первым столбцом:
    r(a1,a2) + r(0,0) = r(a1,0) + r(0,a2).
    """
    table = game.rewards[int(player) - 1]
    first, second = [], []
    for s, (n1, n2) in enumerate(game.action_counts):
        r = table[s]
        for a1 in range(1, n1):
            for a2 in range(1, n2):
                if r[0][0] + r[a1][a2] != r[0][a2] + r[a1][0]:
                    witness = AdditiveWitness(
                        player=player,
                        state=s,
                        a1=0,
                        b1=a1,
                        a2=0,
                        b2=a2,
                        lhs=(r[0][0], r[a1][a2]),
                        rhs=(r[0][a2], r[a1][0]),
                    )
                    logger.info("[INFO] rewards of %s are not additive: %s", player.label, witness.describe())
                    return witness
        first.append(tuple(r[a1][0] for a1 in range(n1)))
        second.append(tuple(r[0][a2] - r[0][0] for a2 in range(n2)))
    return AdditiveDecomposition(player=player, first=tuple(first), second=tuple(second))


def is_sit(P: DenseMatrix) -> bool:
    """Все строки одинаковы (точно или с допуском поля)."""
    return all(P.field.equal(P[i, j], P[0, j]) for i in range(1, P.rows) for j in range(P.cols))


def strategy_support(strategy: Strategy, s: int) -> frozenset:
    if isinstance(strategy, StationaryStrategy):
        return strategy.support(s)
    return frozenset((strategy[s],))


def sit_row(P: DenseMatrix) -> Optional[tuple]:
    """Общая строка SIT-матрицы или None."""
    return P.row(0) if is_sit(P) else None

