import csv
import json
from fractions import Fraction as F

from conftest import pure
from stochastic_bne.blackwell import check_conditions_D
from stochastic_bne.equilibrium import verify_nash
from stochastic_bne.exact_numerics import BETA
from stochastic_bne.export_report import (
    SUITE_HEADER,
    dumps_report,
    export_suite_to_csv,
    get_default_export_path,
    parse_exact,
    render_scalar,
    to_jsonable,
    write_report,
)
from stochastic_bne.models import Player


def test_render_scalar():
    assert render_scalar(F(3, 5)) == {"value": "3/5", "decimal": 0.6}
    assert render_scalar(4) == {"value": "4", "decimal": 4.0}
    assert render_scalar(None) is None
    assert render_scalar(True) is True
    assert render_scalar(1 / (1 - BETA))["value"] == str(1 / (1 - BETA))
    assert parse_exact(render_scalar(F(-7, 3))) == F(-7, 3)


def test_nash_report_to_json(ex_sec_set):
    report = verify_nash(ex_sec_set, pure(0, 0), pure(0, 0), F(3, 5))
    data = to_jsonable(report)
    assert data["is_nash"] is True
    assert data["deviation"] is None
    assert data["values"]["p1"][1] == {"value": "15/2", "decimal": 7.5}
    assert set(data["gaps"]) == {"p1", "p2"}


def test_certification_report_to_json(ex_sec_set):
    report = check_conditions_D(ex_sec_set, (pure(0, 0), pure(0, 0)), F(3, 5))
    data = json.loads(dumps_report({"report": report}))["report"]
    assert data["certified"] is True
    assert data["pair"] == ["(0,0)", "(0,0)"]
    assert data["threshold"]["value"] == "3/5"
    assert data["player_thresholds"] == {
        "p1": {"value": "1/2", "decimal": 0.5},
        "p2": {"value": "3/5", "decimal": 0.6},
    }
    assert data["bounds"][0]["kind"] == "bound"


def test_write_report_and_default_path(tmp_path):
    path = write_report({"player": Player.TWO, "beta": F(1, 2)}, tmp_path / "out" / "r.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data == {"player": "p2", "beta": {"value": "1/2", "decimal": 0.5}}
    default = get_default_export_path("unit", ".csv")
    assert default.parent.name == "exports"
    assert default.name.startswith("unit_") and default.suffix == ".csv"


def test_export_suite_to_csv(tmp_path):
    rows = [
        {"example": "ex", "quantity": "β₀", "expected": "3/5", "computed": "3/5", "status": "ok"},
        {"example": "ex", "quantity": "q", "expected": "2/3", "computed": "1/2", "status": "mismatch"},
    ]
    path = export_suite_to_csv(rows, tmp_path / "suite.csv")
    with path.open(encoding="utf-8", newline="") as f:
        table = list(csv.DictReader(f))
    assert list(table[0]) == SUITE_HEADER
    assert [r["№"] for r in table] == ["1", "2"]
    assert table[1]["status"] == "mismatch"
