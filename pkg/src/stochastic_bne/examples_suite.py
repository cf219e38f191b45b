"""
Воспроизведение встроенных примеров: строки «ожидалось / получено»
со статусом и счётчиками, по образцу сравнения двух выгрузок.

Статусы:
  ok       — значение совпало точно
  mismatch — значение отличается
  error    — пример упал с исключением
"""

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from .blackwell import certify_discrete, sc_ar_bne_discrete
from .continuous import (
    best_response_ctmdp,
    certify_bne_ct,
    ct_policy_value,
    embedded_chain_game,
    mixed_ne_single_controller_2x2_ct,
    mu_norm,
    sc_ar_bne_ct,
    uniformize_game,
    verify_nash_ct,
)
from .errors import BneError, NotSCAR
from .equilibrium import (
    best_response_mdp,
    mixed_ne_single_controller_2x2,
    op_point,
    verify_average_nash,
    verify_nash,
)
from .exact_numerics import BETA, RationalFunction, limit_at_one
from .game_core import check_additive_reward
from .game_file import load_game
from .mdp import average_value, blackwell_optimal, policy_value_symbolic
from .models import Player, PureStrategy, StationaryStrategy, format_scalar

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_MISMATCH = "mismatch"
STATUS_ERROR = "error"

F = Fraction


@dataclass(frozen=True)
class SuiteRow:
    example: str
    quantity: str
    expected: str
    computed: str
    status: str

    def as_dict(self) -> Dict[str, str]:
        return asdict(self)


@dataclass
class SuiteResult:
    rows: List[SuiteRow] = field(default_factory=list)
    counters: Dict[str, int] = field(
        default_factory=lambda: {STATUS_OK: 0, STATUS_MISMATCH: 0, STATUS_ERROR: 0}
    )

    @property
    def passed(self) -> bool:
        return bool(self.rows) and self.counters[STATUS_MISMATCH] == 0 and self.counters[STATUS_ERROR] == 0

    def add(self, row: SuiteRow) -> None:
        self.rows.append(row)
        self.counters[row.status] += 1


def _text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, RationalFunction):
        return str(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_text(x) for x in value) + ")"
    if isinstance(value, (int, Fraction)):
        return format_scalar(Fraction(value))
    return str(value)


class _Collector:
    """Собирает строки одного примера."""

    def __init__(self, example: str):
        self.example = example
        self.rows: List[SuiteRow] = []

    def check(self, quantity: str, expected, computed) -> None:
        status = STATUS_OK if expected == computed else STATUS_MISMATCH
        if status != STATUS_OK:
            logger.warning("[WARN] %s: %s expected %s, got %s", self.example, quantity, _text(expected), _text(computed))
        self.rows.append(SuiteRow(self.example, quantity, _text(expected), _text(computed), status))


def _mixed(rows: Sequence[Sequence[Fraction]]) -> StationaryStrategy:
    return StationaryStrategy(tuple(tuple(F(x) for x in row) for row in rows))


def _pure(*actions: int) -> PureStrategy:
    return PureStrategy(tuple(actions))


def _grid(lo: Fraction, hi: Fraction, points: int = 10) -> List[Fraction]:
    """Равномерная точная сетка: lo, lo + h, ..., hi − h при h = (hi − lo)/points."""
    step = (hi - lo) / points
    return [lo + k * step for k in range(points)]


def _ex1_discrete(out: _Collector) -> None:
    game = load_game("ex1-discrete.json")
    for beta in (F(1, 4), F(1, 2), F(3, 4), F(9, 10)):
        f, g = mixed_ne_single_controller_2x2(game, beta)
        p = (3 * beta + 1) / (7 + 5 * beta)
        out.check(f"f* at β={format_scalar(beta)}", (p, 1 - p), f[0])
        out.check(f"g* at β={format_scalar(beta)}", (F(2, 3), F(1, 3)), g[0])
        report = verify_nash(game, f, g, beta)
        out.check(f"mixed pair is Nash at β={format_scalar(beta)}", True, report.is_nash)

    f_sym, _ = mixed_ne_single_controller_2x2(game, BETA)
    out.check("p(β) closed form", (3 * BETA + 1) / (5 * BETA + 7), f_sym[0][0])

    f_avg = _mixed([(F(1, 3), F(2, 3)), (1,)])
    g_avg = _mixed([(F(2, 3), F(1, 3)), (1,)])
    report = verify_average_nash(game, f_avg, g_avg)
    out.check("average NE accepted", True, report.is_nash)
    out.check("average value p1", (F(5), F(5)), report.values[Player.ONE])
    out.check("average value p2", (F(17, 3), F(17, 3)), report.values[Player.TWO])
    rejected = sum(
        not verify_average_nash(game, _pure(a, 0), _pure(b, 0)).is_nash for a in (0, 1) for b in (0, 1)
    )
    out.check("pure pairs rejected (average)", 4, rejected)

    mdp = best_response_mdp(game, _pure(0, 0), Player.TWO)
    for d in (_pure(0, 0), _pure(1, 0)):
        limit = tuple(limit_at_one((1 - BETA) * v) for v in policy_value_symbolic(mdp, d))
        out.check(f"vanishing discount, policy {d}", average_value(mdp, d), limit)


def _ex_additive_check(out: _Collector) -> None:
    game = load_game("ex1-discrete.json")
    witness = check_additive_reward(game, Player.ONE)
    out.check("additive rectangle", "4 + 4 ≠ 6 + 5", getattr(witness, "describe", lambda: "additive")())
    try:
        sc_ar_bne_discrete(game)
        verdict = "SC-AR"
    except NotSCAR:
        verdict = "NotSCAR"
    out.check("sc-ar verdict", "NotSCAR", verdict)


def _ex_sec_set(out: _Collector) -> None:
    game = load_game("ex-sec-set.json")
    beta = F(3, 5)
    f1, f2, g1, g2 = _pure(0, 0), _pure(1, 0), _pure(0, 0), _pure(1, 0)
    out.check("v¹(f₁,g₁)", (F(10), F(15, 2)), op_point(game, f1, g1, beta).v1)
    out.check("v²(f₁,g₁)", (F(11), F(10)), op_point(game, f1, g1, beta).v2)
    out.check("v¹(f₂,g₁)", (F(19, 2), F(15, 2)), op_point(game, f2, g1, beta).v1)
    out.check("v²(f₁,g₂)", (F(11), F(10)), op_point(game, f1, g2, beta).v2)

    report = certify_discrete(game, (f1, g1), beta, "D")
    out.check("D-conditions certified", True, report.certified)
    out.check("β₀", F(3, 5), report.threshold)
    for b in _grid(report.threshold, F(1)):
        out.check(f"Nash at β={format_scalar(b)}", True, verify_nash(game, f1, g1, b).is_nash)
    below = verify_nash(game, f1, g1, F(1, 2))
    out.check("positive gap at β=0.5 (p2)", True, below.gaps[Player.TWO][0] > 0)


def _ct_values(game, f, g, alpha, player: Player) -> tuple:
    own, opp = (f, g) if player is Player.ONE else (g, f)
    return ct_policy_value(best_response_ctmdp(game, opp, player), own, alpha)


def _ct_ex1(out: _Collector) -> None:
    game = load_game("ct-ex1.json")
    alpha = RationalFunction.variable()
    p = F(1, 2)
    f = _mixed([(p, 1 - p), (1,)])
    ctmdp = best_response_ctmdp(game, f, Player.TWO)
    diff = tuple(
        x - y for x, y in zip(ct_policy_value(ctmdp, _pure(0, 0), alpha), ct_policy_value(ctmdp, _pure(1, 0), alpha))
    )
    D = (p * (12 + 7 * alpha) - (4 + alpha)) / (alpha * (alpha + 2))
    out.check("v²(f,g₁) − v²(f,g₂) at p=1/2", (D, D / (1 + alpha)), diff)

    # u(α) = v(β(α)) / (‖μ‖ + α) на вложенной цепи
    mu = mu_norm(game)
    beta_of_alpha = mu / (alpha + mu)
    embedded = best_response_mdp(embedded_chain_game(game), f, Player.TWO)
    via_beta = tuple(v.compose(beta_of_alpha) / (mu + alpha) for v in policy_value_symbolic(embedded, _pure(0, 0)))
    out.check("u²(f,g₁) through β(α)", ct_policy_value(ctmdp, _pure(0, 0), alpha), via_beta)

    f_sym, _ = mixed_ne_single_controller_2x2_ct(game, alpha)
    out.check("p(α) closed form", (4 + alpha) / (12 + 7 * alpha), f_sym[0][0])
    for a in (F(1, 4), F(1), F(4)):
        f_a = _mixed([((4 + a) / (12 + 7 * a), (8 + 6 * a) / (12 + 7 * a)), (1,)])
        g_a = _mixed([(F(2, 3), F(1, 3)), (1,)])
        out.check(f"parametric pair is Nash at α={format_scalar(a)}", True, verify_nash_ct(game, f_a, g_a, a).is_nash)
    try:
        sc_ar_bne_ct(game)
        verdict = "SC-AR"
    except NotSCAR:
        verdict = "NotSCAR"
    out.check("sc-ar verdict", "NotSCAR", verdict)


def _ct_ex3(out: _Collector) -> None:
    game = load_game("ct-ex3.json")
    alpha = F(1, 2)
    out.check("β at α=0.5", F(2, 3), uniformize_game(game, alpha).beta)
    f1, f2, g1, g2 = _pure(0, 0), _pure(1, 0), _pure(0, 0), _pure(1, 0)
    out.check("u¹(f₁,g*)", (F(8), F(10)), _ct_values(game, f1, g2, alpha, Player.ONE))
    out.check("u¹(f₂,g*)", (F(8), F(10)), _ct_values(game, f2, g2, alpha, Player.ONE))
    out.check("u²(f*,g₁)", (F(6), F(8)), _ct_values(game, f1, g1, alpha, Player.TWO))
    out.check("u²(f*,g₂)", (F(22, 3), F(8)), _ct_values(game, f1, g2, alpha, Player.TWO))
    out.check("Nash at α=0.5", True, verify_nash_ct(game, f1, g2, alpha).is_nash)
    reply, _ = blackwell_optimal(best_response_mdp(embedded_chain_game(game), f1, Player.TWO))
    out.check("Blackwell reply on DTMDP(f*)", g2, reply)

    report = certify_bne_ct(game, (f1, g2), alpha, "M")
    out.check("M-conditions certified", True, report.certified)
    out.check("α₀", F(1, 2), report.alpha_threshold)
    alpha0 = report.alpha_threshold
    for a in sorted({alpha0, alpha0 / 2, alpha0 / 4, alpha0 / 100, *_grid(alpha0, 0)}, reverse=True):
        out.check(f"Nash at α={format_scalar(a)}", True, verify_nash_ct(game, f1, g2, a).is_nash)
    out.check("not Nash at α=1", False, verify_nash_ct(game, f1, g2, F(1)).is_nash)


def _ct_ex2(out: _Collector) -> None:
    game = load_game("ct-ex2.json")
    alpha = F(2, 3)
    out.check("β at α=2/3", F(3, 5), uniformize_game(game, alpha).beta)
    f1, f2, g1, g2 = _pure(0, 0), _pure(1, 0), _pure(0, 0), _pure(1, 0)
    out.check("u¹(f₁,g*)", (F(6), F(9, 2)), _ct_values(game, f1, g1, alpha, Player.ONE))
    out.check("u¹(f₂,g*)", (F(57, 10), F(9, 2)), _ct_values(game, f2, g1, alpha, Player.ONE))
    out.check("u²(f*,g₁)", (F(33, 5), F(6)), _ct_values(game, f1, g1, alpha, Player.TWO))
    out.check("u²(f*,g₂)", (F(33, 5), F(6)), _ct_values(game, f1, g2, alpha, Player.TWO))
    out.check("Nash at α=2/3", True, verify_nash_ct(game, f1, g1, alpha).is_nash)
    reply, _ = blackwell_optimal(best_response_mdp(embedded_chain_game(game), f1, Player.TWO))
    out.check("Blackwell reply on DTMDP(f*)", g1, reply)

    report = certify_bne_ct(game, (f1, g1), alpha, "N")
    out.check("N-conditions certified", True, report.certified)
    out.check("α₀", F(2, 3), report.alpha_threshold)
    for a in _grid(report.alpha_threshold, 0):
        out.check(f"Nash at α={format_scalar(a)}", True, verify_nash_ct(game, f1, g1, a).is_nash)
    m_report = certify_bne_ct(game, (f1, g1), alpha, "M")
    out.check("M2 on the N instance", False, m_report.verdict("M2").passed)


EXAMPLES: Dict[str, Callable[[_Collector], None]] = {
    "ex1-discrete": _ex1_discrete,
    "ex-additive-check": _ex_additive_check,
    "ex-sec-set": _ex_sec_set,
    "ct-ex1": _ct_ex1,
    "ct-ex3": _ct_ex3,
    "ct-ex2": _ct_ex2,
}


def run_suite(names: Optional[Sequence[str]] = None) -> SuiteResult:
    """Прогнать примеры (по умолчанию все) и собрать строки сравнения."""
    result = SuiteResult()
    selected = list(names) if names else list(EXAMPLES)
    unknown = [n for n in selected if n not in EXAMPLES]
    if unknown:
        raise KeyError(f"unknown examples: {', '.join(unknown)}")

    for name in selected:
        logger.info("[RUN] Example %s ...", name)
        out = _Collector(name)
        try:
            EXAMPLES[name](out)
        except BneError as exc:
            logger.error("Example %s failed: %s", name, exc.message)
            out.rows.append(SuiteRow(name, "run", "no error", f"{type(exc).__name__}: {exc.message}", STATUS_ERROR))
        except Exception as exc:
            logger.warning("[WARN] Example %s crashed: %s: %s", name, type(exc).__name__, exc)
            out.rows.append(SuiteRow(name, "run", "no error", f"{type(exc).__name__}: {exc}", STATUS_ERROR))
        for row in out.rows:
            result.add(row)
        logger.info("[INFO] %s: %d rows", name, len(out.rows))

    logger.info(
        "[OK] Suite finished: ok=%d, mismatch=%d, error=%d",
        result.counters[STATUS_OK],
        result.counters[STATUS_MISMATCH],
        result.counters[STATUS_ERROR],
    )
    return result
