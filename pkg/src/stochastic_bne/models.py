# models.py
import os
from dataclasses import dataclass, field
from decimal import Decimal
from enum import IntEnum
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

# Глобальные параметры вычислений.
# Допуск для нулевых тестов в float-режиме (можно переопределить через BNE_TOLERANCE).
FLOAT_TOLERANCE: float = 1e-9
# Максимум детерминированных политик / чистых профилей при полном переборе.
ENUMERATION_CAP: int = 4096
# Значения по умолчанию для сертификации в CLI.
DEFAULT_BETA_HAT: Fraction = Fraction(3, 5)
DEFAULT_ALPHA_HAT: Fraction = Fraction(1, 2)

TOLERANCE_ENV_VAR = "BNE_TOLERANCE"

Scalar = Union[Fraction, float]


def get_float_tolerance() -> float:
    """Допуск float-режима: переменная окружения BNE_TOLERANCE или FLOAT_TOLERANCE."""
    raw = os.environ.get(TOLERANCE_ENV_VAR)
    if not raw:
        return FLOAT_TOLERANCE
    try:
        value = float(raw)
    except ValueError:
        return FLOAT_TOLERANCE
    return value if value >= 0 else FLOAT_TOLERANCE


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def format_scalar(value) -> str:
    """
    Короткая запись числа для сообщений: 9/10 -> '0.9', 2/3 -> '2/3'.
    Конечные десятичные дроби печатаем десятичными, остальные — как num/den.
    """
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        den = value.denominator
        for p in (2, 5):
            while den % p == 0:
                den //= p
        if den == 1:
            text = str(Decimal(value.numerator) / Decimal(value.denominator))
            return text
        return f"{value.numerator}/{value.denominator}"
    return str(value)


class Player(IntEnum):
    ONE = 1
    TWO = 2

    @property
    def other(self) -> "Player":
        return Player.TWO if self is Player.ONE else Player.ONE

    @property
    def label(self) -> str:
        return f"p{int(self)}"


@dataclass(frozen=True)
class PureStrategy:
    """Чистая стационарная стратегия: номер действия (с 0) в каждом состоянии."""

    actions: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.actions)

    def __getitem__(self, s: int) -> int:
        return self.actions[s]

    def to_stationary(self, action_counts: Sequence[int]) -> "StationaryStrategy":
        rows = []
        for s, a_s in enumerate(self.actions):
            rows.append(tuple(Fraction(1 if a == a_s else 0) for a in range(action_counts[s])))
        return StationaryStrategy(tuple(rows))

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.actions) + ")"


@dataclass(frozen=True)
class StationaryStrategy:
    """Распределение по действиям в каждом состоянии (Fraction или float)."""

    probabilities: Tuple[Tuple[Scalar, ...], ...]

    @classmethod
    def pure(cls, actions: Sequence[int], action_counts: Sequence[int]) -> "StationaryStrategy":
        return PureStrategy(tuple(actions)).to_stationary(action_counts)

    def __len__(self) -> int:
        return len(self.probabilities)

    def __getitem__(self, s: int) -> Tuple[Scalar, ...]:
        return self.probabilities[s]

    def action_counts(self) -> Tuple[int, ...]:
        return tuple(len(row) for row in self.probabilities)

    def support(self, s: int) -> frozenset:
        return frozenset(a for a, x in enumerate(self.probabilities[s]) if x > 0)

    def as_pure(self) -> Optional[PureStrategy]:
        """PureStrategy, если в каждом состоянии ровно одно действие с вероятностью 1."""
        actions = []
        for row in self.probabilities:
            ones = [a for a, x in enumerate(row) if x == 1]
            if len(ones) != 1 or any(x != 0 for a, x in enumerate(row) if a != ones[0]):
                return None
            actions.append(ones[0])
        return PureStrategy(tuple(actions))

    def is_exact(self) -> bool:
        return all(is_exact(x) for row in self.probabilities for x in row)

    def __str__(self) -> str:
        return ";".join(",".join(format_scalar(x) for x in row) for row in self.probabilities)


Strategy = Union[PureStrategy, StationaryStrategy]


def as_stationary(strategy: Strategy, action_counts: Sequence[int]) -> StationaryStrategy:
    if isinstance(strategy, PureStrategy):
        return strategy.to_stationary(action_counts)
    return strategy


@dataclass(frozen=True)
class DiscreteGame:
    """
    Конечная стохастическая игра двух игроков с дискретным временем.

    action_counts[s] = (|A¹(s)|, |A²(s)|)
    rewards[i][s][a1][a2] — награда игрока i+1
    transitions[s][a1][a2][s'] — p(s'|s,a1,a2)
    """

    action_counts: Tuple[Tuple[int, int], ...]
    rewards: Tuple[tuple, tuple]
    transitions: tuple
    name: str = ""

    @property
    def state_count(self) -> int:
        return len(self.action_counts)

    def actions(self, player: Player) -> Tuple[int, ...]:
        idx = int(player) - 1
        return tuple(counts[idx] for counts in self.action_counts)

    def reward(self, player: Player, s: int, a1: int, a2: int) -> Scalar:
        return self.rewards[int(player) - 1][s][a1][a2]

    def law(self, s: int, a1: int, a2: int) -> Tuple[Scalar, ...]:
        return self.transitions[s][a1][a2]


@dataclass(frozen=True)
class ContinuousGame:
    """
    То же, что DiscreteGame, но вместо вероятностей — интенсивности
    переходов: rates[s][a1][a2][s'] = μ(s', s, a1, a2), диагональ отрицательна.
    """

    action_counts: Tuple[Tuple[int, int], ...]
    rewards: Tuple[tuple, tuple]
    rates: tuple
    name: str = ""

    @property
    def state_count(self) -> int:
        return len(self.action_counts)

    def actions(self, player: Player) -> Tuple[int, ...]:
        idx = int(player) - 1
        return tuple(counts[idx] for counts in self.action_counts)

    def reward(self, player: Player, s: int, a1: int, a2: int) -> Scalar:
        return self.rewards[int(player) - 1][s][a1][a2]

    def law(self, s: int, a1: int, a2: int) -> Tuple[Scalar, ...]:
        return self.rates[s][a1][a2]


Game = Union[DiscreteGame, ContinuousGame]


@dataclass(frozen=True)
class AdditiveDecomposition:
    """r(s,a1,a2) = first[s][a1] + second[s][a2], калибровка second[s][0] = 0."""

    player: Player
    first: Tuple[Tuple[Fraction, ...], ...]
    second: Tuple[Tuple[Fraction, ...], ...]

    def reward(self, s: int, a1: int, a2: int) -> Fraction:
        return self.first[s][a1] + self.second[s][a2]


@dataclass(frozen=True)
class AdditiveWitness:
    """Нарушенный прямоугольник: r(a1,a2) + r(b1,b2) ≠ r(a1,b2) + r(b1,a2)."""

    player: Player
    state: int
    a1: int
    b1: int
    a2: int
    b2: int
    lhs: Tuple[Scalar, Scalar] = field(default=(Fraction(0), Fraction(0)))
    rhs: Tuple[Scalar, Scalar] = field(default=(Fraction(0), Fraction(0)))

    def describe(self) -> str:
        left = " + ".join(format_scalar(x) for x in self.lhs)
        right = " + ".join(format_scalar(x) for x in self.rhs)
        return f"{left} ≠ {right}"
