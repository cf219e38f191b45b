import csv
import dataclasses
import json
from datetime import datetime
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

from .exact_numerics import Polynomial, RationalFunction
from .models import Player, PureStrategy, StationaryStrategy

# Каталог для экспорта относительно корня проекта
DEFAULT_EXPORT_DIR = Path(__file__).resolve().parents[2] / "data" / "exports"


def get_default_export_path(prefix: str = "bne_report", suffix: str = ".json") -> Path:
    """Вернуть путь вида data/exports/bne_report_YYYYMMDD_HHMM.json."""
    DEFAULT_EXPORT_DIR.mkdir(parents=True, exist_ok=True)
    ts = datetime.now().strftime("%Y%m%d_%H%M")
    return DEFAULT_EXPORT_DIR / f"{prefix}_{ts}{suffix}"


def render_scalar(value: Any) -> Any:
    """
    Число для отчёта: {"value": "3/5", "decimal": 0.6}.
    Рациональные функции — строкой в переменной β (или α).
    """
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, Fraction)):
        value = Fraction(value)
        text = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        return {"value": text, "decimal": float(value)}
    if isinstance(value, float):
        return {"value": repr(value), "decimal": value}
    if isinstance(value, (RationalFunction, Polynomial)):
        return {"value": str(value)}
    return str(value)


def parse_exact(rendered: Any) -> Fraction:
    """Обратное к render_scalar для точных значений."""
    if isinstance(rendered, dict):
        rendered = rendered["value"]
    return Fraction(str(rendered))


def _key(key: Any) -> str:
    if isinstance(key, Player):
        return key.label
    if isinstance(key, Enum):
        return str(key.value)
    if isinstance(key, tuple):
        return ",".join(str(k) for k in key)
    return str(key)


def to_jsonable(obj: Any) -> Any:
    """Рекурсивно превратить отчёты (dataclass, Enum, стратегии, числа) в JSON."""
    if isinstance(obj, (PureStrategy, StationaryStrategy)):
        return str(obj)
    if isinstance(obj, Enum):
        return getattr(obj, "label", obj.value)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        certified = getattr(type(obj), "certified", None)
        if isinstance(certified, property):
            out["certified"] = obj.certified
        return out
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (frozenset, set)) else obj
        return [to_jsonable(x) for x in items]
    if isinstance(obj, (str, bool)) or obj is None:
        return obj
    return render_scalar(obj)


def dumps_report(report: Dict[str, Any], pretty: bool = False) -> str:
    return json.dumps(to_jsonable(report), ensure_ascii=False, indent=2 if pretty else None)


def write_report(report: Dict[str, Any], filename: Union[str, Path]) -> Path:
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report, pretty=True) + "\n", encoding="utf-8")
    return path


SUITE_HEADER = [
    "№",
    "example",
    "quantity",
    "expected",
    "computed",
    "status",
]


def export_suite_to_csv(rows: Iterable[Dict[str, Any]], filename: Union[str, Path]) -> Path:
    """
    Таблица reproduce-examples в CSV.

    rows — словари с ключами example, quantity, expected, computed, status.
    """
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    items: List[Dict[str, Any]] = list(rows)

    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=SUITE_HEADER)
        writer.writeheader()
        for idx, item in enumerate(items, start=1):
            writer.writerow(
                {
                    "№": idx,
                    "example": item.get("example"),
                    "quantity": item.get("quantity"),
                    "expected": item.get("expected"),
                    "computed": item.get("computed"),
                    "status": item.get("status"),
                }
            )
    return path
