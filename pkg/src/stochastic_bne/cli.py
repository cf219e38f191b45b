import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .blackwell import certify_discrete, sc_ar_bne_discrete
from .continuous import (
    best_response_ctmdp,
    certify_bne_ct,
    ct_policy_value,
    embedded_chain_game,
    mixed_ne_single_controller_2x2_ct,
    sc_ar_bne_ct,
    uniformize,
    uniformize_game,
    verify_nash_ct,
)
from .errors import (
    BneError,
    DimensionMismatch,
    EnumerationCapExceeded,
    GameFileError,
    InvalidCertificate,
    NoInteriorSolution,
    NotBlackwellOptimal,
    NotSCAR,
    NotSingleController,
    ZeroRates,
)
from .equilibrium import (
    best_response_mdp,
    enumerate_pure_nash,
    mixed_ne_single_controller_2x2,
    op_point,
    verify_average_nash,
    verify_nash,
)
from .exact_numerics import RationalFunction
from .examples_suite import run_suite
from .export_report import dumps_report, export_suite_to_csv, get_default_export_path, write_report
from .game_file import load_game, parse_fix, parse_number, parse_strategy
from .mdp import blackwell_optimal, optimal_policy
from .models import (
    DEFAULT_ALPHA_HAT,
    DEFAULT_BETA_HAT,
    ContinuousGame,
    Game,
    Player,
    PureStrategy,
    StationaryStrategy,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2

# Отрицательный вердикт (exit 1), а не ошибка ввода.
VERDICT_ERRORS = (NotSCAR, InvalidCertificate, NotSingleController, NoInteriorSolution, NotBlackwellOptimal)
INPUT_ERRORS = (GameFileError, DimensionMismatch, EnumerationCapExceeded, ZeroRates)


class _Parser(argparse.ArgumentParser):
    """argparse, который не печатает usage, а поднимает GameFileError."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise GameFileError(f"{self.prog}: {message}", {"usage": self.format_usage().strip()})


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = _Parser(
        prog="run_bne.py",
        description="Blackwell-Nash equilibria of two-player stochastic games (exact arithmetic).",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--pretty",
        action="store_true",
        help="Человекочитаемый вывод (JSON с отступами, таблица для reproduce-examples).",
    )
    common.add_argument(
        "--output",
        type=str,
        default=None,
        help="Путь к JSON-отчёту. 'auto' — файл в data/exports/ с таймстампом.",
    )

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def game_command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("game", help="JSON-файл игры или имя встроенного примера (ex-sec-set, ct-ex2, ...).")
        return p

    def discount(p: argparse.ArgumentParser) -> None:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--beta", help="Коэффициент дисконтирования β (дискретная игра), например 3/5.")
        group.add_argument("--alpha", help="Ставка дисконтирования α > 0 (непрерывное время), например 1/2.")

    def pair(p: argparse.ArgumentParser) -> None:
        p.add_argument("--f", required=True, help="Стратегия игрока 1: 'p1,p2;q1' (состояния через ';').")
        p.add_argument("--g", required=True, help="Стратегия игрока 2 в том же синтаксисе.")

    p = game_command("value", "Дисконтированные значения обоих игроков для пары (f, g).")
    pair(p)
    discount(p)

    p = game_command("best-response", "Оптимальный ответ на фиксированную стратегию соперника.")
    p.add_argument("--fix", required=True, help="Фиксированная стратегия: '<игрок>:<стратегия>', например 1:1,0;1.")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta")
    group.add_argument("--alpha")
    group.add_argument(
        "--blackwell",
        action="store_true",
        help="Blackwell-оптимальный ответ (для всех β близких к 1) с порогом β₀.",
    )

    p = game_command("verify-nash", "Проверка равновесия Нэша.")
    pair(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta")
    group.add_argument("--alpha")
    group.add_argument("--average", action="store_true", help="Критерий среднего выигрыша (дискретная игра).")

    p = game_command("enumerate-pure", "Все чистые равновесия при заданном β (или α).")
    discount(p)

    p = game_command("certify", "Сертификация Blackwell-Nash по наборам условий C/D (дискр.) или M/N (непр.).")
    pair(p)
    p.add_argument("--set", dest="condition_set", required=True, choices=["C", "D", "M", "N"])
    p.add_argument("--beta-hat", default=None, help=f"β̂ для C/D (по умолчанию {DEFAULT_BETA_HAT}).")
    p.add_argument("--alpha-hat", default=None, help=f"α̂ для M/N (по умолчанию {DEFAULT_ALPHA_HAT}).")

    game_command("sc-ar", "Конструкция BNE для SC-AR игры или структурный контрпример.")

    p = game_command("mixed-ne-2x2", "Смешанное равновесие игры 2×2 с одним контролирующим игроком.")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta")
    group.add_argument("--alpha")
    group.add_argument(
        "--symbolic",
        action="store_true",
        help="Ответ в замкнутой форме как функция β (или α для непрерывной игры).",
    )

    p = sub.add_parser("reproduce-examples", parents=[common], help="Прогнать встроенные примеры.")
    p.add_argument("--only", nargs="+", default=None, help="Только указанные примеры.")
    p.add_argument(
        "--csv",
        type=str,
        default=None,
        help="Путь к CSV с таблицей сравнения. 'auto' — data/exports/ с таймстампом.",
    )

    return parser.parse_args(argv)


def _scalar(text: str, name: str) -> Fraction:
    try:
        return parse_number(text)
    except GameFileError as exc:
        raise GameFileError(f"--{name}: {exc.message}") from exc


def _positive(text: str, name: str) -> Fraction:
    value = _scalar(text, name)
    if value <= 0:
        raise GameFileError(f"--{name} must be positive, got {text}")
    return value


def _unit_interval(text: str, name: str) -> Fraction:
    value = _scalar(text, name)
    if not 0 <= value < 1:
        raise GameFileError(f"--{name} must lie in [0, 1), got {text}")
    return value


def _discount(args: argparse.Namespace, game: Game) -> Tuple[str, Fraction]:
    """("beta", β) для дискретной игры или ("alpha", α) для непрерывной."""
    continuous = isinstance(game, ContinuousGame)
    if continuous:
        if getattr(args, "alpha", None) is None:
            raise GameFileError("continuous games take --alpha")
        return "alpha", _positive(args.alpha, "alpha")
    if getattr(args, "beta", None) is None:
        raise GameFileError("discrete games take --beta")
    return "beta", _unit_interval(args.beta, "beta")


def _strategies(args: argparse.Namespace, game: Game) -> Tuple[StationaryStrategy, StationaryStrategy]:
    f = parse_strategy(args.f, game.actions(Player.ONE), Player.ONE)
    g = parse_strategy(args.g, game.actions(Player.TWO), Player.TWO)
    return f, g


def _pure_pair(f: StationaryStrategy, g: StationaryStrategy) -> Tuple[PureStrategy, PureStrategy]:
    pure_f, pure_g = f.as_pure(), g.as_pure()
    if pure_f is None or pure_g is None:
        raise GameFileError("certification needs a pure strategy pair")
    return pure_f, pure_g


def _values(game: Game, f, g, kind: str, rate) -> Dict[Player, tuple]:
    if kind == "beta":
        point = op_point(game, f, g, rate)
        return {Player.ONE: point.v1, Player.TWO: point.v2}
    out = {}
    for player in (Player.ONE, Player.TWO):
        own, opp = (f, g) if player is Player.ONE else (g, f)
        out[player] = ct_policy_value(best_response_ctmdp(game, opp, player), own, rate)
    return out


def cmd_value(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    f, g = _strategies(args, game)
    kind, rate = _discount(args, game)
    return EXIT_OK, {"inputs": {"f": f, "g": g, kind: rate}, "values": _values(game, f, g, kind, rate)}


def cmd_best_response(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    fixed, text = parse_fix(args.fix)
    strategy = parse_strategy(text, game.actions(fixed), fixed)
    responder = fixed.other
    inputs: Dict[str, Any] = {"fixed_player": fixed, "fixed": strategy}
    continuous = isinstance(game, ContinuousGame)

    if continuous and args.blackwell:
        # вложенная цепь: награды r, переходы μ/‖μ‖ + δ
        mdp = best_response_mdp(embedded_chain_game(game), strategy, responder)
    elif continuous:
        _, alpha = _discount(args, game)
        uniform = uniformize(best_response_ctmdp(game, strategy, responder), alpha)
        policy, values = optimal_policy(uniform.dtmdp, uniform.beta)
        inputs["alpha"] = alpha
        return EXIT_OK, {
            "inputs": inputs,
            "player": responder,
            "policy": policy,
            "values": values,
            "beta": uniform.beta,
        }
    else:
        mdp = best_response_mdp(game, strategy, responder)
        if not args.blackwell:
            _, beta = _discount(args, game)
            policy, values = optimal_policy(mdp, beta)
            inputs["beta"] = beta
            return EXIT_OK, {"inputs": inputs, "player": responder, "policy": policy, "values": values}

    policy, certificate = blackwell_optimal(mdp)
    result = {"inputs": inputs, "player": responder, "policy": policy, "blackwell": certificate}
    if continuous:
        result["note"] = "threshold is a β₀ on the embedded chain"
    return EXIT_OK, result


def cmd_verify_nash(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    f, g = _strategies(args, game)
    if args.average:
        if isinstance(game, ContinuousGame):
            raise GameFileError("--average applies to discrete games")
        report = verify_average_nash(game, f, g)
        inputs: Dict[str, Any] = {"f": f, "g": g, "criterion": "average"}
    else:
        kind, rate = _discount(args, game)
        report = verify_nash(game, f, g, rate) if kind == "beta" else verify_nash_ct(game, f, g, rate)
        inputs = {"f": f, "g": g, kind: rate}
    return (EXIT_OK if report.is_nash else EXIT_NEGATIVE), {"inputs": inputs, "report": report}


def cmd_enumerate_pure(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    kind, rate = _discount(args, game)
    if kind == "alpha":
        uniform = uniformize_game(game, rate)
        found = enumerate_pure_nash(uniform.game, uniform.beta)
    else:
        found = enumerate_pure_nash(game, rate)
    pairs = [{"f": f, "g": g} for f, g in found]
    return EXIT_OK, {"inputs": {kind: rate}, "count": len(pairs), "equilibria": pairs}


def cmd_certify(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    f, g = _strategies(args, game)
    pair = _pure_pair(f, g)
    condition_set = args.condition_set
    continuous = isinstance(game, ContinuousGame)
    if continuous != (condition_set in ("M", "N")):
        raise GameFileError(
            f"condition set {condition_set} does not apply to a {'continuous' if continuous else 'discrete'} game"
        )
    if continuous:
        alpha_hat = _positive(args.alpha_hat, "alpha-hat") if args.alpha_hat else DEFAULT_ALPHA_HAT
        report = certify_bne_ct(game, pair, alpha_hat, condition_set)
        inputs: Dict[str, Any] = {"f": pair[0], "g": pair[1], "set": condition_set, "alpha_hat": alpha_hat}
    else:
        beta_hat = _unit_interval(args.beta_hat, "beta-hat") if args.beta_hat else DEFAULT_BETA_HAT
        report = certify_discrete(game, pair, beta_hat, condition_set)
        inputs = {"f": pair[0], "g": pair[1], "set": condition_set, "beta_hat": beta_hat}
    result: Dict[str, Any] = {"inputs": inputs, "report": report}
    if continuous and report.certified and report.alpha_threshold is None:
        result["alpha0"] = "unbounded"
    return (EXIT_OK if report.certified else EXIT_NEGATIVE), result


def cmd_sc_ar(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    if isinstance(game, ContinuousGame):
        result = sc_ar_bne_ct(game)
        extra = {"alpha0": result.alpha_threshold if result.alpha_threshold is not None else "unbounded"}
    else:
        result = sc_ar_bne_discrete(game)
        extra = {"beta0": result.threshold}
    return EXIT_OK, {"equilibrium": {"f": result.f, "g": result.g}, **extra, "result": result}


def cmd_mixed_ne(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    game = load_game(args.game)
    continuous = isinstance(game, ContinuousGame)
    if args.symbolic:
        rate: Any = RationalFunction.variable()
        kind = "alpha" if continuous else "beta"
    else:
        kind, rate = _discount(args, game)
    if continuous:
        f, g = mixed_ne_single_controller_2x2_ct(game, rate)
    else:
        f, g = mixed_ne_single_controller_2x2(game, rate)
    symbol = "α" if continuous else "β"

    def render(x):
        return x.format(symbol) if isinstance(x, RationalFunction) else x

    f_rows = [[render(x) for x in row] for row in f.probabilities]
    g_rows = [[render(x) for x in row] for row in g.probabilities]
    return EXIT_OK, {"inputs": {kind: symbol if args.symbolic else rate}, "f": f_rows, "g": g_rows}


def _suite_table(rows) -> str:
    header = ("№", "example", "quantity", "expected", "computed", "status")
    body = [
        (str(i), r.example, r.quantity, r.expected, r.computed, r.status) for i, r in enumerate(rows, start=1)
    ]
    widths = [max(len(line[k]) for line in [header] + body) for k in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)) for line in [header] + body]
    return "\n".join(lines)


def cmd_reproduce(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    try:
        result = run_suite(args.only)
    except KeyError as exc:
        raise GameFileError(str(exc.args[0])) from exc
    payload: Dict[str, Any] = {"counters": result.counters, "rows": [r.as_dict() for r in result.rows]}
    if args.csv:
        path = get_default_export_path("reproduce_examples", ".csv") if args.csv == "auto" else Path(args.csv)
        payload["csv"] = str(export_suite_to_csv(payload["rows"], path))
        logger.info("[OK] Suite table written: %s", path)
    if args.pretty:
        payload["table"] = _suite_table(result.rows)
    return (EXIT_OK if result.passed else EXIT_NEGATIVE), payload


COMMANDS = {
    "value": cmd_value,
    "best-response": cmd_best_response,
    "verify-nash": cmd_verify_nash,
    "enumerate-pure": cmd_enumerate_pure,
    "certify": cmd_certify,
    "sc-ar": cmd_sc_ar,
    "mixed-ne-2x2": cmd_mixed_ne,
    "reproduce-examples": cmd_reproduce,
}


def _emit_error(exc: BneError, command: Optional[str]) -> None:
    payload = {"error": type(exc).__name__, "message": exc.message, "details": exc.details}
    if command:
        payload["command"] = command
    if isinstance(exc, NotSCAR) and exc.witness is not None:
        payload["witness"] = exc.witness
    sys.stderr.write(dumps_report(payload) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    command: Optional[str] = None
    try:
        args = parse_args(argv)
        command = args.command
        logger.info("[RUN] %s ...", command)
        code, result = COMMANDS[command](args)
    except VERDICT_ERRORS as exc:
        logger.info("[INFO] %s: %s", type(exc).__name__, exc.message)
        _emit_error(exc, command)
        return EXIT_NEGATIVE
    except INPUT_ERRORS as exc:
        logger.error("Input error: %s", exc.message)
        _emit_error(exc, command)
        return EXIT_INPUT
    except BneError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.message)
        _emit_error(exc, command)
        return EXIT_INPUT
    except ValueError as exc:
        logger.error("Input error: %s", exc)
        _emit_error(GameFileError(str(exc)), command)
        return EXIT_INPUT

    report = {"command": command, **result}
    table = report.pop("table", None)
    if table is not None:
        sys.stdout.write(table + "\n")
        counters = report["counters"]
        sys.stdout.write(
            f"ok={counters['ok']} mismatch={counters['mismatch']} error={counters['error']}\n"
        )
    else:
        sys.stdout.write(dumps_report(report, pretty=args.pretty) + "\n")

    if args.output:
        path = get_default_export_path(f"bne_{command.replace('-', '_')}") if args.output == "auto" \
            else Path(args.output)
        write_report(report, path)
        logger.info("[OK] Report written: %s", path)
    logger.info("[OK] %s finished with exit code %d", command, code)
    return code
