"""
Файлы игр (JSON) и синтаксис стратегий в командной строке.

Формат:
    {"kind": "discrete" | "continuous", "name": "...", "states": n,
     "actions": [[|A¹(s)|, |A²(s)|], ...],
     "rewards": {"p1": [s][a1][a2], "p2": [s][a1][a2]},
     "transitions" | "rates": [s][a1][a2][s']}

Числа: целые, десятичные строки, "num/den" или JSON-числа (читаются
как Decimal, поэтому точно).
"""

import json
import logging
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

from .errors import GameFileError
from .game_core import validate
from .models import ContinuousGame, DiscreteGame, Game, Player, StationaryStrategy

logger = logging.getLogger(__name__)

GAMES_DIR = Path(__file__).resolve().parent / "games"

KINDS = ("discrete", "continuous")


def parse_number(value: Any) -> Fraction:
    """int / Decimal / "3/5" / "0.6" → Fraction."""
    if isinstance(value, bool):
        raise GameFileError(f"boolean is not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise GameFileError(f"non-finite number {value}")
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                result = Fraction(int(num.strip()), int(den.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise GameFileError(f"bad rational {value!r}") from exc
            return result
        try:
            dec = Decimal(text)
        except InvalidOperation as exc:
            raise GameFileError(f"bad number {value!r}") from exc
        if not dec.is_finite():
            raise GameFileError(f"non-finite number {value!r}")
        return Fraction(dec)
    raise GameFileError(f"expected a number, got {type(value).__name__}")


def _numbers(data: Any, depth: int, where: str):
    if depth == 0:
        return parse_number(data)
    if not isinstance(data, list):
        raise GameFileError(f"{where}: expected a nested array", {"where": where})
    return tuple(_numbers(x, depth - 1, f"{where}[{i}]") for i, x in enumerate(data))


def game_from_dict(doc: Dict[str, Any]) -> Game:
    """Разобрать документ и проверить инварианты игры (validate)."""
    if not isinstance(doc, dict):
        raise GameFileError("game document must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise GameFileError(f"kind must be one of {', '.join(KINDS)}, got {kind!r}")
    law_key = "transitions" if kind == "discrete" else "rates"
    missing = [k for k in ("states", "actions", "rewards", law_key) if k not in doc]
    if missing:
        raise GameFileError(f"missing keys: {', '.join(missing)}", {"missing": missing})

    try:
        actions = tuple((int(n1), int(n2)) for n1, n2 in doc["actions"])
    except (TypeError, ValueError) as exc:
        raise GameFileError("actions must be a list of [n1, n2] pairs") from exc
    if len(actions) != doc["states"]:
        raise GameFileError(f"'states' = {doc['states']} but {len(actions)} action pairs given")

    rewards = doc["rewards"]
    if not isinstance(rewards, dict) or set(rewards) != {"p1", "p2"}:
        raise GameFileError("rewards must be an object with keys p1 and p2")
    tables = (_numbers(rewards["p1"], 3, "rewards.p1"), _numbers(rewards["p2"], 3, "rewards.p2"))
    laws = _numbers(doc[law_key], 4, law_key)
    name = str(doc.get("name", ""))

    if kind == "discrete":
        game: Game = DiscreteGame(actions, tables, laws, name=name)
    else:
        game = ContinuousGame(actions, tables, laws, name=name)
    violations = validate(game)
    if violations:
        raise GameFileError(
            f"invalid game: {violations[0]}",
            {"violations": [str(v) for v in violations]},
        )
    return game


def loads_game(text: str) -> Game:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"invalid JSON: {exc}") from exc
    return game_from_dict(doc)


def resolve_game_path(name: Union[str, Path]) -> Path:
    """Путь к файлу или имя встроенной игры (с .json или без)."""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (GAMES_DIR / path.name, GAMES_DIR / f"{path.name}.json"):
        if candidate.exists():
            return candidate
    raise GameFileError(f"game file not found: {name}", {"path": str(name)})


def load_game(name: Union[str, Path]) -> Game:
    path = resolve_game_path(name)
    logger.info("[RUN] Loading game from %s", path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GameFileError(f"cannot read {path}: {exc}") from exc
    return loads_game(text)


def _render(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_render(x) for x in value]
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def dump_game(game: Game) -> Dict[str, Any]:
    """Обратное к game_from_dict: точные числа как "num/den"."""
    continuous = isinstance(game, ContinuousGame)
    doc: Dict[str, Any] = {"kind": "continuous" if continuous else "discrete"}
    if game.name:
        doc["name"] = game.name
    doc["states"] = game.state_count
    doc["actions"] = [list(c) for c in game.action_counts]
    doc["rewards"] = {"p1": _render(game.rewards[0]), "p2": _render(game.rewards[1])}
    doc["rates" if continuous else "transitions"] = _render(game.rates if continuous else game.transitions)
    return doc


def parse_strategy(text: str, counts: Sequence[int], player: Player = Player.ONE) -> StationaryStrategy:
    """
    "p1,p2;q1" → StationaryStrategy: состояния через ';', вероятности через ','.
    Каждая строка неотрицательна и в сумме даёт 1.
    """
    states = [chunk.strip() for chunk in text.split(";")]
    if len(states) != len(counts):
        raise GameFileError(
            f"{player.label} strategy {text!r} has {len(states)} states, expected {len(counts)}",
            {"strategy": text},
        )
    rows = []
    for s, (chunk, n) in enumerate(zip(states, counts)):
        row = tuple(parse_number(x) for x in chunk.split(","))
        if len(row) != n:
            raise GameFileError(
                f"{player.label} strategy at state {s}: {len(row)} entries, expected {n}",
                {"strategy": text, "state": s},
            )
        if any(x < 0 for x in row) or sum(row) != 1:
            raise GameFileError(
                f"{player.label} strategy at state {s} is not a probability vector",
                {"strategy": text, "state": s},
            )
        rows.append(row)
    return StationaryStrategy(tuple(rows))


def parse_fix(text: str) -> Tuple[Player, str]:
    """"1:1,0;1" → (Player.ONE, "1,0;1")."""
    head, sep, rest = text.partition(":")
    if not sep or head.strip() not in ("1", "2"):
        raise GameFileError(f"expected <player>:<strategy>, got {text!r}")
    return Player(int(head.strip())), rest.strip()
