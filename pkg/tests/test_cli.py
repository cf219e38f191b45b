import csv
import json

import pytest

from stochastic_bne.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _json(text):
    return json.loads(text)


def test_value_continuous(capsys):
    code, out, _ = _run(capsys, "value", "ct-ex3", "--f", "1,0;1", "--g", "0,1;1", "--alpha", "1/2")
    assert code == EXIT_OK
    data = _json(out)
    assert data["command"] == "value"
    assert [x["value"] for x in data["values"]["p1"]] == ["8", "10"]
    assert [x["value"] for x in data["values"]["p2"]] == ["22/3", "8"]


def test_verify_nash_discrete(capsys):
    code, out, _ = _run(capsys, "verify-nash", "ex-sec-set", "--f", "1,0;1", "--g", "1,0;1", "--beta", "3/5")
    assert code == EXIT_OK
    assert _json(out)["report"]["is_nash"] is True

    code, out, _ = _run(capsys, "verify-nash", "ex-sec-set", "--f", "1,0;1", "--g", "1,0;1", "--beta", "0.5")
    assert code == EXIT_NEGATIVE
    assert _json(out)["report"]["deviation"]["player"] == "p2"


def test_verify_nash_average(capsys):
    code, out, _ = _run(capsys, "verify-nash", "ex1-discrete", "--f", "1/3,2/3;1", "--g", "2/3,1/3;1", "--average")
    assert code == EXIT_OK
    assert _json(out)["inputs"]["criterion"] == "average"


def test_best_response(capsys):
    code, out, _ = _run(capsys, "best-response", "ex1-discrete", "--fix", "1:1/2,1/2;1", "--beta", "1/2")
    assert code == EXIT_OK
    data = _json(out)
    assert data["player"] == "p2"
    assert data["policy"] == "(0,0)"

    code, out, _ = _run(capsys, "best-response", "ct-ex3", "--fix", "1:1,0;1", "--blackwell")
    assert code == EXIT_OK
    assert _json(out)["policy"] == "(1,0)"


def test_enumerate_pure(capsys):
    code, out, _ = _run(capsys, "enumerate-pure", "ex1-discrete", "--beta", "1/2")
    assert code == EXIT_OK
    assert _json(out)["count"] == 0

    code, out, _ = _run(capsys, "enumerate-pure", "ct-ex3", "--alpha", "1/2")
    assert code == EXIT_OK
    assert {"f": "(0,0)", "g": "(1,0)"} in _json(out)["equilibria"]


def test_certify_sets(capsys):
    code, out, _ = _run(capsys, "certify", "ex-sec-set", "--f", "1,0;1", "--g", "1,0;1", "--set", "D")
    assert code == EXIT_OK
    assert _json(out)["report"]["threshold"]["value"] == "3/5"

    code, out, _ = _run(
        capsys, "certify", "ct-ex2", "--f", "1,0;1", "--g", "1,0;1", "--set", "N", "--alpha-hat", "2/3"
    )
    assert code == EXIT_OK
    assert _json(out)["report"]["alpha_threshold"]["value"] == "2/3"

    code, out, _ = _run(capsys, "certify", "ex-sec-set", "--f", "1,0;1", "--g", "1,0;1", "--set", "C")
    assert code == EXIT_NEGATIVE
    assert _json(out)["report"]["certified"] is False


def test_certify_set_must_match_game(capsys):
    code, _, err = _run(capsys, "certify", "ct-ex2", "--f", "1,0;1", "--g", "1,0;1", "--set", "C")
    assert code == EXIT_INPUT
    assert _json(err)["error"] == "GameFileError"


def test_sc_ar_negative_verdict(capsys):
    code, out, err = _run(capsys, "sc-ar", "ex1-discrete.json")
    assert code == EXIT_NEGATIVE
    assert out == ""
    data = _json(err)
    assert data["error"] == "NotSCAR"
    assert data["command"] == "sc-ar"
    assert data["details"]["rectangle"] == "4 + 4 ≠ 6 + 5"


def test_mixed_ne_symbolic(capsys):
    code, out, _ = _run(capsys, "mixed-ne-2x2", "ex1-discrete", "--symbolic")
    assert code == EXIT_OK
    data = _json(out)
    assert data["inputs"] == {"beta": "β"}
    assert "β" in data["f"][0][0]
    assert data["g"][0][0] == {"value": "2/3", "decimal": pytest.approx(2 / 3)}


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-nash", "ex1-discrete", "--f", "1,0", "--g", "1,0;1", "--beta", "1/2"],
        ["verify-nash", "ex1-discrete", "--f", "1,0;1", "--g", "1,0;1", "--beta", "1"],
        ["verify-nash", "ex1-discrete", "--f", "1,0;1", "--g", "1,0;1", "--alpha", "1"],
        ["value", "ct-ex3", "--f", "1,0;1", "--g", "1,0;1", "--alpha", "-1"],
        ["value", "no-such-game", "--f", "1", "--g", "1", "--beta", "1/2"],
        ["enumerate-pure"],
        ["frobnicate"],
    ],
)
def test_input_errors(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == EXIT_INPUT
    assert out == ""
    assert "error" in _json(err)


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, _, _ = _run(capsys, "sc-ar", "ct-ex2", "--output", str(target))
    assert code in (EXIT_OK, EXIT_NEGATIVE)
    code, _, _ = _run(
        capsys, "verify-nash", "ct-ex2", "--f", "1,0;1", "--g", "1,0;1", "--alpha", "2/3", "--output", str(target)
    )
    assert code == EXIT_OK
    assert json.loads(target.read_text(encoding="utf-8"))["command"] == "verify-nash"


def test_reproduce_examples(capsys, tmp_path):
    target = tmp_path / "suite.csv"
    code, out, _ = _run(capsys, "reproduce-examples", "--csv", str(target))
    assert code == EXIT_OK
    data = _json(out)
    assert data["counters"]["mismatch"] == 0
    assert data["counters"]["error"] == 0
    with target.open(encoding="utf-8", newline="") as f:
        assert len(list(csv.DictReader(f))) == data["counters"]["ok"]


def test_reproduce_examples_pretty_and_unknown(capsys):
    code, out, _ = _run(capsys, "reproduce-examples", "--only", "ct-ex2", "--pretty")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("№")
    assert out.splitlines()[-1].startswith("ok=")

    code, _, err = _run(capsys, "reproduce-examples", "--only", "nope")
    assert code == EXIT_INPUT
    assert "nope" in _json(err)["message"]
