"""
Игры и MDP с непрерывным временем.

Норма интенсивностей ‖μ‖, униформизация в эквивалентный DTMDP
(β = ‖μ‖/(α+‖μ‖), r̄ = r/(‖μ‖+α), p = μ/‖μ‖ + δ), прямое значение
политики (αI − Q)⁻¹r, проверка равновесия, SC-AR конструкция и
сертификация по наборам условий M/N.

Условия M/N — это C/D для «игры вложенной цепи» (награды r,
переходы μ/‖μ‖ + δ), поэтому сертификация переиспользует blackwell.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .blackwell import (
    CONSTRUCTION_REMARK,
    CertificationReport,
    ConditionVerdict,
    SCARResult,
    _certify,
    scar_pair,
)
from .errors import DimensionMismatch, ZeroRates
from .equilibrium import NashReport, mix_opponent, mixed_ne_single_controller_2x2, verify_nash
from .exact_numerics import DenseMatrix, infer_field, solve_linear
from .game_core import induced_rate_matrix, is_sit
from .mdp import DTMDP, Policy, _rows
from .models import ContinuousGame, DiscreteGame, Player, PureStrategy, StationaryStrategy, Strategy, format_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CTMDP:
    """rewards[s][a], rates[s][a][s'] (диагональ = −сумма остальных)."""

    rewards: Tuple[tuple, ...]
    rates: Tuple[tuple, ...]

    def __post_init__(self):
        if len(self.rewards) != len(self.rates):
            raise DimensionMismatch("rewards and rates disagree on the state count")
        n = len(self.rewards)
        for s, (r, q) in enumerate(zip(self.rewards, self.rates)):
            if len(r) != len(q) or not r:
                raise DimensionMismatch(f"state {s}: {len(r)} rewards for {len(q)} rate rows")
            if any(len(row) != n for row in q):
                raise DimensionMismatch(f"state {s}: rate row length differs from {n}")

    @property
    def state_count(self) -> int:
        return len(self.rewards)

    @property
    def action_counts(self) -> Tuple[int, ...]:
        return tuple(len(r) for r in self.rewards)


@dataclass(frozen=True)
class UniformizationResult:
    dtmdp: DTMDP
    beta: object
    mu_norm: Fraction
    alpha: object


@dataclass(frozen=True)
class GameUniformization:
    game: DiscreteGame
    beta: object
    mu_norm: Fraction
    alpha: object


def _off_diagonal_sum(row, s: int):
    return sum((x for t, x in enumerate(row) if t != s), Fraction(0))


def mu_norm(model: Union[ContinuousGame, CTMDP]) -> Fraction:
    """‖μ‖ = max по (s, действия) суммы внедиагональных интенсивностей."""
    if isinstance(model, CTMDP):
        rows = [(s, row) for s, per_state in enumerate(model.rates) for row in per_state]
    else:
        rows = [
            (s, cell)
            for s, per_state in enumerate(model.rates)
            for per_a1 in per_state
            for cell in per_a1
        ]
    norm = max((_off_diagonal_sum(row, s) for s, row in rows), default=Fraction(0))
    if norm == 0:
        raise ZeroRates("all transition rates are zero, the game is static")
    return norm


def beta_from_alpha(alpha, norm):
    """β = ‖μ‖/(α + ‖μ‖). alpha может быть рациональной функцией."""
    return norm / (alpha + norm)


def alpha_from_beta(beta, norm) -> Optional[Fraction]:
    """α = ‖μ‖(1 − β)/β; при β = 0 ограничения на α нет (None)."""
    if beta == 0:
        return None
    return norm * (1 - beta) / beta


def _check_alpha(alpha) -> None:
    if isinstance(alpha, (int, Fraction, float)) and alpha <= 0:
        raise ValueError(f"discount rate must be positive, got {alpha}")


def _embedded_row(row, s: int, norm):
    return tuple(x / norm + (1 if t == s else 0) for t, x in enumerate(row))


def uniformize(ctmdp: CTMDP, alpha, norm: Optional[Fraction] = None) -> UniformizationResult:
    """CTMDP → эквивалентный DTMDP при β = ‖μ‖/(α+‖μ‖)."""
    _check_alpha(alpha)
    norm = mu_norm(ctmdp) if norm is None else norm
    scale = norm + alpha
    rewards = tuple(tuple(r / scale for r in per_state) for per_state in ctmdp.rewards)
    transitions = tuple(
        tuple(_embedded_row(row, s, norm) for row in per_state) for s, per_state in enumerate(ctmdp.rates)
    )
    beta = beta_from_alpha(alpha, norm)
    logger.debug("[INFO] uniformized CTMDP: ‖μ‖=%s, α=%s, β=%s", norm, alpha, beta)
    return UniformizationResult(DTMDP(rewards, transitions), beta, norm, alpha)


def embedded_chain_game(game: ContinuousGame, norm: Optional[Fraction] = None) -> DiscreteGame:
    """Игра с наградами r и переходами μ/‖μ‖ + δ (без масштабирования наград)."""
    norm = mu_norm(game) if norm is None else norm
    transitions = tuple(
        tuple(tuple(_embedded_row(cell, s, norm) for cell in per_a1) for per_a1 in per_state)
        for s, per_state in enumerate(game.rates)
    )
    return DiscreteGame(game.action_counts, game.rewards, transitions, name=game.name)


def uniformize_game(game: ContinuousGame, alpha) -> GameUniformization:
    """Униформизация всей игры с одним общим ‖μ‖ для обоих игроков."""
    _check_alpha(alpha)
    norm = mu_norm(game)
    scale = norm + alpha
    rewards = tuple(
        tuple(tuple(tuple(x / scale for x in row) for row in per_state) for per_state in table)
        for table in game.rewards
    )
    embedded = embedded_chain_game(game, norm)
    discrete = DiscreteGame(game.action_counts, rewards, embedded.transitions, name=game.name)
    return GameUniformization(discrete, beta_from_alpha(alpha, norm), norm, alpha)


def best_response_ctmdp(game: ContinuousGame, opponent_strategy: Strategy, player: Player) -> CTMDP:
    """CTMDP, с которым сталкивается player при фиксированной стратегии соперника."""
    rewards, rates = mix_opponent(game, opponent_strategy, player)
    return CTMDP(rewards, rates)


def ct_policy_value(ctmdp: CTMDP, d: Policy, alpha) -> tuple:
    """v = (αI − Q_d)⁻¹ r_d без униформизации."""
    _check_alpha(alpha)
    d = _rows(ctmdp, d)
    n = ctmdp.state_count
    Q = [[0] * n for _ in range(n)]
    r = [0] * n
    for s in range(n):
        for a, w in enumerate(d[s]):
            if w == 0:
                continue
            r[s] = r[s] + w * ctmdp.rewards[s][a]
            for t in range(n):
                Q[s][t] = Q[s][t] + w * ctmdp.rates[s][a][t]
    field = infer_field([x for row in Q for x in row] + r + [alpha])
    A = DenseMatrix.from_rows(
        [[(alpha if i == j else 0) - Q[i][j] for j in range(n)] for i in range(n)], field
    )
    return solve_linear(A, [field.coerce(x) for x in r])


def verify_nash_ct(
    game: ContinuousGame, f: Strategy, g: Strategy, alpha, tol: Optional[float] = None
) -> NashReport:
    """
    α-дисконтированное равновесие: проверка на униформизованной игре при
    соответствующем β. Значения u униформизованной игры совпадают с v_α,
    unit_factor = ‖μ‖ + α — множитель, на который поделены награды.
    """
    uniform = uniformize_game(game, alpha)
    report = verify_nash(uniform.game, f, g, uniform.beta, tol)
    return NashReport(
        is_nash=report.is_nash,
        gaps=report.gaps,
        support_gaps=report.support_gaps,
        deviation=report.deviation,
        tolerance=report.tolerance,
        values=report.values,
        unit_factor=uniform.mu_norm + alpha,
    )


def sc_ar_bne_ct(game: ContinuousGame) -> SCARResult:
    """
    Blackwell-Nash равновесие SC-AR игры с непрерывным временем.

    g* — Blackwell-оптимальный ответ на вложенной цепи (награды r):
    масштаб 1/(‖μ‖+α) при фиксированном α не меняет оптимальную политику.
    """
    norm = mu_norm(game)
    embedded = embedded_chain_game(game, norm)
    f_star, g_star, beta0, certificate = scar_pair(embedded)
    alpha0 = alpha_from_beta(beta0, norm)
    logger.info(
        "[OK] CT SC-AR equilibrium f*=%s g*=%s, α₀ = %s",
        f_star, g_star, "unbounded" if alpha0 is None else alpha0,
    )
    return SCARResult(
        f_star, g_star, beta0, certificate, alpha_threshold=alpha0, mu_norm=norm, remarks=(CONSTRUCTION_REMARK,)
    )


def _near_miss_scale(Q: DenseMatrix) -> Optional[Fraction]:
    """c > 0, при котором Q = c·(SIT − I), или None."""
    if Q.rows < 2:
        return None
    c = Q[0, 1] - Q[1, 1]
    if c <= 0:
        return None
    P = DenseMatrix.from_rows(
        [[Q[i, j] / c + (1 if i == j else 0) for j in range(Q.cols)] for i in range(Q.rows)], Q.field
    )
    return c if is_sit(P) else None


def _ct_first_condition(game: ContinuousGame, pair, alpha_hat, name: str) -> ConditionVerdict:
    report = verify_nash_ct(game, pair[0], pair[1], alpha_hat)
    if report.is_nash:
        return ConditionVerdict(name, True)
    dev = report.deviation
    return ConditionVerdict(
        name,
        False,
        f"{dev.player.label} gains {format_scalar(dev.surplus)} by action {dev.action} at state {dev.state}",
    )


def certify_bne_ct(
    game: ContinuousGame, pair: Tuple[PureStrategy, PureStrategy], alpha_hat, condition_set: str
) -> CertificationReport:
    """
    Проверка M1–M3 или N1–N3 и порог α₀ = min α₀ⁱ, α₀ⁱ = ‖μ‖(1 − β₀ⁱ)/β₀ⁱ.
    β₀ⁱ = 0 означает отсутствие ограничения от игрока i.
    """
    condition_set = condition_set.upper()
    shapes = {"M": "sit", "N": "identity"}
    if condition_set not in shapes:
        raise ValueError(f"unknown continuous condition set {condition_set!r}")
    _check_alpha(alpha_hat)
    norm = mu_norm(game)
    embedded = embedded_chain_game(game, norm)
    beta_hat = beta_from_alpha(Fraction(alpha_hat), norm)
    first = _ct_first_condition(game, pair, alpha_hat, f"{condition_set}1")
    report = _certify(embedded, pair, beta_hat, condition_set, shapes[condition_set], first=first)
    report.mu_norm = norm

    if condition_set == "M" and not report.sit:
        c = _near_miss_scale(induced_rate_matrix(game, *pair))
        if c is not None and c != norm:
            verdict = report.verdict("M2")
            report.verdicts[report.verdicts.index(verdict)] = ConditionVerdict(
                "M2",
                False,
                f"Q = c(SIT − I) with c = {format_scalar(c)} ≠ ‖μ‖ = {format_scalar(norm)}",
            )

    if report.certified:
        alphas: Dict[Player, Optional[Fraction]] = {
            player: alpha_from_beta(beta, norm) for player, beta in report.player_thresholds.items()
        }
        report.alpha_thresholds = alphas
        finite = [a for a in alphas.values() if a is not None]
        report.alpha_threshold = min(finite) if finite else None
        logger.info(
            "[OK] %s-conditions certify %s, α₀ = %s",
            condition_set, pair, "unbounded" if report.alpha_threshold is None else report.alpha_threshold,
        )
    return report


def mixed_ne_single_controller_2x2_ct(game: ContinuousGame, alpha) -> Tuple[StationaryStrategy, StationaryStrategy]:
    """
    Смешанное равновесие игры с непрерывным временем, переходами которой
    управляет игрок 2. Безразличие не зависит от масштаба наград, поэтому
    решается дискретная задача на вложенной цепи при β(α).
    alpha может быть рациональной функцией — ответ в замкнутой форме.
    """
    _check_alpha(alpha)
    norm = mu_norm(game)
    return mixed_ne_single_controller_2x2(
        embedded_chain_game(game, norm), beta_from_alpha(alpha, norm), domain=(Fraction(0), None)
    )
