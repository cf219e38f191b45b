"""
Сертификация Blackwell-Nash равновесий в дискретных играх.

Два набора достаточных условий для чистой пары (f*, g*):
  C — равновесие при β̂, индуцированная цепь SIT, неравенства C3;
  D — равновесие при β̂, индуцированная цепь единичная, неравенства D3.
Для каждого отклонения θ = числитель − β·знаменатель (с точностью до
положительного множителя), отсюда границы β и порог β₀.

SC-AR конструкция: близорукий argmax для игрока 1 и Blackwell-оптимальный
ответ игрока 2.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import InvalidCertificate, NotSCAR
from .equilibrium import best_response_mdp, verify_nash
from .game_core import (
    Controller,
    check_additive_reward,
    induced_transition,
    is_single_controller,
    is_sit,
)
from .mdp import BlackwellCertificate, blackwell_optimal, blackwell_threshold
from .models import AdditiveWitness, DiscreteGame, Player, PureStrategy, format_scalar

logger = logging.getLogger(__name__)

CONSTRUCTION_REMARK = "construction per CT proof: myopic argmax for player 1, Blackwell-optimal reply for player 2"
SIT_PURE_REMARK = "a pure Nash equilibrium of a SIT game always satisfies the first two conditions"


class BoundKind(Enum):
    DEFINED = "bound"
    BETA_INDEPENDENT = "β-independent"


@dataclass(frozen=True)
class DeviationBound:
    """Граница для отклонения player в состоянии state к действию action."""

    player: Player
    state: int
    action: int
    numerator: Fraction
    denominator: Fraction
    kind: BoundKind
    value: Optional[Fraction]


@dataclass(frozen=True)
class ConditionVerdict:
    name: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class CertificationReport:
    """
    Итог проверки набора условий C/D (или M/N для непрерывного времени).
    При certified = True порог threshold (β₀) лежит в [0, 1).
    """

    condition_set: str
    pair: Tuple[PureStrategy, PureStrategy]
    verdicts: List[ConditionVerdict] = field(default_factory=list)
    bounds: List[DeviationBound] = field(default_factory=list)
    player_thresholds: Dict[Player, Fraction] = field(default_factory=dict)
    threshold: Optional[Fraction] = None
    sit: bool = False
    identity: bool = False
    remarks: List[str] = field(default_factory=list)
    alpha_thresholds: Dict[Player, Optional[Fraction]] = field(default_factory=dict)
    alpha_threshold: Optional[Fraction] = None
    mu_norm: Optional[Fraction] = None

    @property
    def certified(self) -> bool:
        return bool(self.verdicts) and all(v.passed for v in self.verdicts) and self.threshold is not None

    def verdict(self, name: str) -> ConditionVerdict:
        return next(v for v in self.verdicts if v.name == name)


@dataclass(frozen=True)
class ThresholdResult:
    threshold: Fraction
    player_thresholds: Dict[Player, Fraction]
    bounds: Tuple[DeviationBound, ...]


def _equilibrium_rewards(game: DiscreteGame, pair, player: Player) -> List[Fraction]:
    f, g = pair
    return [game.reward(player, s, f[s], g[s]) for s in range(game.state_count)]


def _deviations(game: DiscreteGame, pair, player: Player):
    """(s, a, (a1, a2)) для всех отклонений player от пары."""
    f, g = pair
    for s in range(game.state_count):
        for a in range(game.actions(player)[s]):
            own = f[s] if player is Player.ONE else g[s]
            if a == own:
                continue
            cell = (a, g[s]) if player is Player.ONE else (f[s], a)
            yield s, a, cell


def _expected(law, values) -> Fraction:
    return sum((p * v for p, v in zip(law, values)), Fraction(0))


def _terms(game: DiscreteGame, pair, player: Player, shape: str):
    """
    Для каждого отклонения: (s, a, числитель, знаменатель).
    shape = "sit": знаменатель Σ p_s' r(s',eq) − Σ p(s'|s,dev) r(s',eq);
    shape = "identity": знаменатель r(s,dev) − Σ p(s'|s,dev) r(s',eq).
    """
    f, g = pair
    eq = _equilibrium_rewards(game, pair, player)
    P = induced_transition(game, f, g)
    common = P.row(0)
    for s, a, (a1, a2) in _deviations(game, pair, player):
        dev_reward = game.reward(player, s, a1, a2)
        numerator = dev_reward - eq[s]
        moved = _expected(game.law(s, a1, a2), eq)
        if shape == "sit":
            denominator = _expected(common, eq) - moved
        else:
            denominator = dev_reward - moved
        yield s, a, Fraction(numerator), Fraction(denominator)


def _third_condition(game: DiscreteGame, pair, shape: str, name: str) -> ConditionVerdict:
    for player in (Player.ONE, Player.TWO):
        for s, a, _, denominator in _terms(game, pair, player, shape):
            if denominator < 0:
                return ConditionVerdict(
                    name,
                    False,
                    f"{player.label} state {s} action {a}: inequality fails by {format_scalar(-denominator)}",
                )
    return ConditionVerdict(name, True)


def _thresholds(game: DiscreteGame, pair, shape: str, beta_hat: Optional[Fraction]) -> ThresholdResult:
    bounds: List[DeviationBound] = []
    per_player: Dict[Player, Fraction] = {}
    for player in (Player.ONE, Player.TWO):
        best = Fraction(0)
        for s, a, numerator, denominator in _terms(game, pair, player, shape):
            if denominator == 0:
                if numerator > 0:
                    raise InvalidCertificate(
                        f"{player.label} gains {format_scalar(numerator)} by action {a} at state {s} for every β",
                        {"player": int(player), "state": s, "action": a},
                    )
                bounds.append(DeviationBound(player, s, a, numerator, denominator, BoundKind.BETA_INDEPENDENT, None))
                continue
            if denominator < 0:
                raise InvalidCertificate(
                    f"third condition fails for {player.label} at state {s}, action {a}",
                    {"player": int(player), "state": s, "action": a},
                )
            value = numerator / denominator
            if beta_hat is not None and value > beta_hat:
                raise InvalidCertificate(
                    f"bound {value} exceeds β̂ = {beta_hat}: the pair is not an equilibrium at β̂",
                    {"player": int(player), "state": s, "action": a},
                )
            bounds.append(DeviationBound(player, s, a, numerator, denominator, BoundKind.DEFINED, value))
            best = max(best, value)
        per_player[player] = best
    threshold = max(per_player.values())
    return ThresholdResult(threshold, per_player, tuple(bounds))


def _require_shape(game: DiscreteGame, pair, shape: str) -> None:
    P = induced_transition(game, *pair)
    ok = is_sit(P) if shape == "sit" else P.equals(type(P).identity(P.rows, P.field))
    if not ok:
        raise InvalidCertificate(
            f"induced chain is not {'SIT' if shape == 'sit' else 'the identity'}",
            {"transition": [[str(x) for x in row] for row in P.to_rows()]},
        )


def beta0_C(game: DiscreteGame, pair: Tuple[PureStrategy, PureStrategy], beta_hat: Optional[Fraction] = None) -> ThresholdResult:
    """β₀ = max{0, все определённые границы} для SIT-цепи."""
    _require_shape(game, pair, "sit")
    return _thresholds(game, pair, "sit", beta_hat)


def beta0_D(game: DiscreteGame, pair: Tuple[PureStrategy, PureStrategy], beta_hat: Optional[Fraction] = None) -> ThresholdResult:
    """β₀ для пары с единичной индуцированной цепью."""
    _require_shape(game, pair, "identity")
    return _thresholds(game, pair, "identity", beta_hat)


def _first_condition(game: DiscreteGame, pair, beta_hat, name: str) -> ConditionVerdict:
    report = verify_nash(game, pair[0], pair[1], beta_hat)
    if report.is_nash:
        return ConditionVerdict(name, True)
    dev = report.deviation
    return ConditionVerdict(
        name,
        False,
        f"{dev.player.label} gains {format_scalar(dev.surplus)} by action {dev.action} at state {dev.state}",
    )


def _certify(
    game: DiscreteGame,
    pair,
    beta_hat,
    condition_set: str,
    shape: str,
    first: Optional[ConditionVerdict] = None,
) -> CertificationReport:
    f, g = pair
    P = induced_transition(game, f, g)
    report = CertificationReport(condition_set=condition_set, pair=(f, g))
    report.sit = is_sit(P)
    report.identity = P.equals(type(P).identity(P.rows, P.field))

    report.verdicts.append(first or _first_condition(game, pair, beta_hat, f"{condition_set}1"))
    shape_ok = report.sit if shape == "sit" else report.identity
    report.verdicts.append(
        ConditionVerdict(
            f"{condition_set}2",
            shape_ok,
            None if shape_ok else f"induced chain is not {'SIT' if shape == 'sit' else 'the identity'}",
        )
    )
    if shape_ok:
        report.verdicts.append(_third_condition(game, pair, shape, f"{condition_set}3"))
    else:
        report.verdicts.append(ConditionVerdict(f"{condition_set}3", False, f"requires {condition_set}2"))
    if shape == "sit" and report.sit:
        report.remarks.append(SIT_PURE_REMARK)

    if all(v.passed for v in report.verdicts):
        result = _thresholds(game, pair, shape, Fraction(beta_hat))
        report.bounds = list(result.bounds)
        report.player_thresholds = dict(result.player_thresholds)
        report.threshold = result.threshold
        logger.info("[OK] %s-conditions certify %s, β₀ = %s", condition_set, pair, result.threshold)
    else:
        failed = [v.name for v in report.verdicts if not v.passed]
        logger.info("[INFO] %s-conditions fail: %s", condition_set, ", ".join(failed))
    return report


def check_conditions_C(game: DiscreteGame, pair: Tuple[PureStrategy, PureStrategy], beta_hat) -> CertificationReport:
    return _certify(game, pair, beta_hat, "C", "sit")


def check_conditions_D(game: DiscreteGame, pair: Tuple[PureStrategy, PureStrategy], beta_hat) -> CertificationReport:
    return _certify(game, pair, beta_hat, "D", "identity")


def certify_discrete(game: DiscreteGame, pair, beta_hat, condition_set: str) -> CertificationReport:
    """Проверка набора C или D и расчёт β₀."""
    condition_set = condition_set.upper()
    if condition_set == "C":
        return check_conditions_C(game, pair, beta_hat)
    if condition_set == "D":
        return check_conditions_D(game, pair, beta_hat)
    raise ValueError(f"unknown discrete condition set {condition_set!r}")


@dataclass(frozen=True)
class SCARResult:
    f: PureStrategy
    g: PureStrategy
    threshold: Fraction
    certificate: BlackwellCertificate
    alpha_threshold: Optional[Fraction] = None
    mu_norm: Optional[Fraction] = None
    remarks: Tuple[str, ...] = (CONSTRUCTION_REMARK,)


def _scar_structure(game) -> Tuple[PureStrategy, object]:
    """Проверка структуры SC-AR и близорукий argmax игрока 1."""
    controller = is_single_controller(game)
    if controller not in (Controller.PLAYER2, Controller.BOTH):
        raise NotSCAR(
            f"transitions are controlled by {controller.value}, player 2 expected",
            witness=controller,
            details={"controller": controller.value},
        )
    decomposition = check_additive_reward(game, Player.ONE)
    if isinstance(decomposition, AdditiveWitness):
        raise NotSCAR(
            f"player 1 rewards are not additive: {decomposition.describe()}",
            witness=decomposition,
            details={"state": decomposition.state, "rectangle": decomposition.describe()},
        )
    actions = []
    for row in decomposition.first:
        best = max(row)
        actions.append(next(a for a, x in enumerate(row) if x == best))
    return PureStrategy(tuple(actions)), decomposition


def scar_pair(game: DiscreteGame) -> Tuple[PureStrategy, PureStrategy, Fraction, BlackwellCertificate]:
    """f* — argmax r¹₁, g* — Blackwell-оптимальный ответ, β₀ — максимум двух порогов."""
    f_star, _ = _scar_structure(game)
    reply = best_response_mdp(game, f_star, Player.TWO)
    g_star, certificate = blackwell_optimal(reply)
    own = best_response_mdp(game, g_star, Player.ONE)
    beta0 = max(certificate.threshold, blackwell_threshold(own, f_star))
    return f_star, g_star, beta0, certificate


def sc_ar_bne_discrete(game: DiscreteGame) -> SCARResult:
    """Blackwell-Nash равновесие SC-AR игры с дискретным временем."""
    f_star, g_star, beta0, certificate = scar_pair(game)
    logger.info("[OK] SC-AR equilibrium f*=%s g*=%s, β₀ = %s", f_star, g_star, beta0)
    return SCARResult(f_star, g_star, beta0, certificate)
