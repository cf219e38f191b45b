import json
from decimal import Decimal
from fractions import Fraction as F

import pytest

from stochastic_bne.errors import GameFileError
from stochastic_bne.game_file import (
    dump_game,
    game_from_dict,
    load_game,
    loads_game,
    parse_fix,
    parse_number,
    parse_strategy,
    resolve_game_path,
)
from stochastic_bne.models import ContinuousGame, DiscreteGame, Player


@pytest.mark.parametrize(
    "raw, expected",
    [
        (3, F(3)),
        ("3/5", F(3, 5)),
        (" 3 / 5 ", F(3, 5)),
        ("4.4", F(22, 5)),
        (Decimal("0.1"), F(1, 10)),
        (0.1, F(1, 10)),
        ("-2", F(-2)),
    ],
)
def test_parse_number(raw, expected):
    assert parse_number(raw) == expected


@pytest.mark.parametrize("raw", [True, "abc", "1/0", "NaN", "inf", None, [1]])
def test_parse_number_rejects(raw):
    with pytest.raises(GameFileError):
        parse_number(raw)


def test_bundled_games_load(ex1, ex_sec_set, ct_ex2):
    assert isinstance(ex1, DiscreteGame)
    assert isinstance(ct_ex2, ContinuousGame)
    assert ex_sec_set.reward(Player.TWO, 0, 0, 0) == F(22, 5)
    assert ex1.name == "ex1-discrete"


def test_resolve_game_path_accepts_bare_name(tmp_path):
    assert resolve_game_path("ct-ex3").name == "ct-ex3.json"
    with pytest.raises(GameFileError):
        resolve_game_path(tmp_path / "missing.json")


def test_json_floats_are_read_exactly():
    text = json.dumps(
        {
            "kind": "discrete",
            "states": 1,
            "actions": [[1, 1]],
            "rewards": {"p1": [[[0.1]]], "p2": [[[0]]]},
            "transitions": [[[[1]]]],
        }
    )
    game = loads_game(text)
    assert game.rewards[0][0][0][0] == F(1, 10)


def test_dump_and_reload_preserve_game(ex_sec_set, tmp_path):
    doc = dump_game(ex_sec_set)
    assert doc["rewards"]["p2"][0][0][0] == "22/5"
    assert doc["rewards"]["p1"][0][0][0] == 4
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_game(path) == ex_sec_set


def test_invalid_game_lists_violations(ex1):
    doc = dump_game(ex1)
    doc["transitions"][0][0][0] = ["9/10", 0]
    with pytest.raises(GameFileError) as info:
        game_from_dict(doc)
    assert "row sum 0.9 ≠ 1" in info.value.message
    assert info.value.details["violations"]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("transitions"),
        lambda d: d.update(kind="hybrid"),
        lambda d: d.update(states=3),
        lambda d: d.update(rewards={"p1": d["rewards"]["p1"]}),
        lambda d: d.update(actions="2x2"),
    ],
)
def test_malformed_documents(ex1, mutate):
    doc = dump_game(ex1)
    mutate(doc)
    with pytest.raises(GameFileError):
        game_from_dict(doc)


def test_invalid_json():
    with pytest.raises(GameFileError):
        loads_game("{not json")


def test_parse_strategy():
    s = parse_strategy("1/3,2/3;1", (2, 1), Player.ONE)
    assert s.probabilities == ((F(1, 3), F(2, 3)), (F(1),))
    assert parse_strategy("1,0;1", (2, 1)).as_pure().actions == (0, 0)


@pytest.mark.parametrize("text", ["1,0", "1,0;1;1", "1;1", "1/2,1/3;1", "2,-1;1"])
def test_parse_strategy_rejects(text):
    with pytest.raises(GameFileError):
        parse_strategy(text, (2, 1), Player.TWO)


def test_parse_fix():
    assert parse_fix("1:1,0;1") == (Player.ONE, "1,0;1")
    assert parse_fix("2: 0,1;1") == (Player.TWO, "0,1;1")
    with pytest.raises(GameFileError):
        parse_fix("3:1;1")
    with pytest.raises(GameFileError):
        parse_fix("1,0;1")
