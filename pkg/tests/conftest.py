import random

import pytest
from hypothesis import strategies as st

from mtforest.coding import CodingSequence
from mtforest.enumeration import generate_plane_forests
from mtforest.forest import TypedForest
from mtforest.verify import root_sequences


@st.composite
def forests(draw, d=2, max_vertices=10, max_roots=3):
    """Plane d-type forests built breadth first from drawn offspring choices."""
    c = draw(st.lists(st.integers(1, d), min_size=1, max_size=min(max_roots, max_vertices)))
    colors = list(c)
    children = [[] for _ in c]
    pos = 0
    while pos < len(colors):
        room = max_vertices - len(colors)
        kids = sorted(draw(st.lists(st.integers(1, d), max_size=min(room, 3))))
        for t in kids:
            children[pos].append(len(colors))
            colors.append(t)
            children.append([])
        pos += 1
    return TypedForest.build(d, colors, children, list(range(len(c))))


@st.composite
def coding_sequences(draw, d=2, max_len=5, max_jump=2):
    """Arbitrary elements of S_d with short paths (not necessarily codings of forests)."""
    steps = []
    for i in range(d):
        n = draw(st.integers(0, max_len))
        path = []
        for _ in range(n):
            path.append(tuple(draw(st.integers(-1, 1)) if j == i else draw(st.integers(0, max_jump))
                              for j in range(d)))
        steps.append(tuple(path))
    return CodingSequence(d, tuple(steps))


def random_coding(rng: random.Random, d: int, max_len: int) -> CodingSequence:
    steps = []
    for i in range(d):
        path = []
        for _ in range(rng.randint(1, max_len)):
            path.append(tuple(rng.choice((-1, -1, 0, 1)) if j == i else rng.choice((0, 0, 0, 1, 2))
                              for j in range(d)))
        steps.append(tuple(path))
    return CodingSequence(d, tuple(steps))


@pytest.fixture(scope="session")
def small_corpus():
    """Every 2-type plane forest with at most 5 vertices, over every root sequence."""
    out = []
    for c in root_sequences(2, 5):
        out.extend(generate_plane_forests(2, c, max_total=5))
    return out


# A hand-traced two-tree forest used across modules.
#   tree 1: a(1) -> [b(1), c(2)];  b -> [e(1), d(2)];  c -> [f(2)]
#   tree 2: g(2) -> [h(1)]
HAND = [(1, [(1, [(1, []), (2, [])]), (2, [(2, [])])]), (2, [(1, [])])]


@pytest.fixture
def hand_forest():
    return TypedForest.from_nested(2, HAND)


# PASS/FAIL lines printed by the acceptance tests, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
