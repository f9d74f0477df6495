from fractions import Fraction
from itertools import permutations

from hypothesis import given, strategies as st

from mtforest.exact import binom, det_int, minor, nullspace


def leibniz(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


square = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n))


@given(square)
def test_bareiss_matches_leibniz(m):
    assert det_int(m) == leibniz(m)


def test_det_small_cases():
    assert det_int([]) == 1
    assert det_int([[7]]) == 7
    assert det_int([[1, -1], [0, 1]]) == 1
    assert det_int([[0, 1], [1, 0]]) == -1
    assert det_int([[1, 2], [2, 4]]) == 0


def test_minor_drops_rows_and_columns():
    m = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert minor(m, [1]) == [[1, 3], [7, 9]]
    assert minor(m, []) == m
    assert minor(m, [0, 1, 2]) == []


def test_nullspace():
    basis = nullspace([[Fraction(-1, 2), Fraction(1, 2)], [Fraction(1), Fraction(-1)]])
    assert basis == [[Fraction(1), Fraction(1)]]
    assert nullspace([[1, 0], [0, 1]]) == []


def test_binom_out_of_range():
    assert binom(5, 2) == 10
    assert binom(3, 4) == 0
    assert binom(3, -1) == 0
    assert binom(-1, 0) == 0
