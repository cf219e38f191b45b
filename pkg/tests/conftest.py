import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

SRC_DIR = Path(__file__).resolve().parents[1] / "src"
if str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))

from stochastic_bne.game_file import load_game  # noqa: E402
from stochastic_bne.models import ContinuousGame, DiscreteGame, PureStrategy, StationaryStrategy  # noqa: E402

F = Fraction


def pure(*actions):
    return PureStrategy(tuple(actions))


def mixed(*rows):
    return StationaryStrategy(tuple(tuple(F(x) for x in row) for row in rows))


def _tables(cells):
    """cells[s][a1][a2] = ((r1, r2), law) -> (rewards, laws)."""
    p1 = tuple(tuple(tuple(F(c[0][0]) for c in row) for row in state) for state in cells)
    p2 = tuple(tuple(tuple(F(c[0][1]) for c in row) for row in state) for state in cells)
    laws = tuple(tuple(tuple(tuple(F(x) for x in c[1]) for c in row) for row in state) for state in cells)
    counts = tuple((len(state), len(state[0])) for state in cells)
    return counts, (p1, p2), laws


def discrete_game(cells, name=""):
    counts, rewards, laws = _tables(cells)
    return DiscreteGame(counts, rewards, laws, name=name)


def continuous_game(cells, name=""):
    counts, rewards, laws = _tables(cells)
    return ContinuousGame(counts, rewards, laws, name=name)


@pytest.fixture
def ex1():
    return load_game("ex1-discrete.json")


@pytest.fixture
def ex_sec_set():
    return load_game("ex-sec-set.json")


@pytest.fixture
def ct_ex1():
    return load_game("ct-ex1.json")


@pytest.fixture
def ct_ex2():
    return load_game("ct-ex2.json")


@pytest.fixture
def ct_ex3():
    return load_game("ct-ex3.json")


@pytest.fixture
def sit_game():
    """SIT под парой ((0,0),(0,0)); β₀ = 1/3 по условиям C."""
    return discrete_game(
        [
            [
                [((5, 4), (1, 0)), ((6, 5), (0, 1))],
                [((4, 9), (0, 1)), ((4, 5), (0, 1))],
            ],
            [[((2, 1), (1, 0))]],
        ],
        name="sit-demo",
    )


@pytest.fixture
def scar_game():
    """Переходы Example 1, награды игрока 1 аддитивны: (2,1) + (0,3)."""
    return discrete_game(
        [
            [
                [((2, 9), (1, 0)), ((5, 3), (0, 1))],
                [((1, 4), (1, 0)), ((4, 5), (0, 1))],
            ],
            [[((6, 7), (1, 0))]],
        ],
        name="scar-demo",
    )


@pytest.fixture
def scar_game_ct():
    return continuous_game(
        [
            [
                [((2, 9), (0, 0)), ((5, 3), (-1, 1))],
                [((1, 4), (0, 0)), ((4, 5), (-1, 1))],
            ],
            [[((6, 7), (1, -1))]],
        ],
        name="scar-demo-ct",
    )


def random_distribution(rng: random.Random, n: int):
    weights = [rng.randint(0, 4) for _ in range(n)]
    if sum(weights) == 0:
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return tuple(F(w, total) for w in weights)


def random_discrete_game(rng: random.Random, max_states: int = 3, max_actions: int = 3) -> DiscreteGame:
    n = rng.randint(1, max_states)
    counts = tuple((rng.randint(1, max_actions), rng.randint(1, max_actions)) for _ in range(n))
    rewards = tuple(
        tuple(
            tuple(tuple(F(rng.randint(-5, 10)) for _ in range(n2)) for _ in range(n1))
            for n1, n2 in counts
        )
        for _ in range(2)
    )
    transitions = tuple(
        tuple(tuple(random_distribution(rng, n) for _ in range(n2)) for _ in range(n1)) for n1, n2 in counts
    )
    return DiscreteGame(counts, rewards, transitions)


def random_rate_row(rng: random.Random, n: int, s: int):
    row = [F(rng.randint(0, 10), 2) if t != s else F(0) for t in range(n)]
    row[s] = -sum(row)
    return tuple(row)
