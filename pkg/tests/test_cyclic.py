import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from conftest import coding_sequences, forests, random_coding
from mtforest.coding import CodingSequence, encode, reduce_sequence, smallest_solution
from mtforest.cyclic import (count_good_shifts, cyclic_determinant, cyclic_shift,
                             elementary_codes_by_filter, elementary_codes_by_layers,
                             elementary_forest_sum, enumerate_elementary_forests, good_shifts,
                             matrix_tree_grid,
                             shift_last_jump, simple_system)
from mtforest.enumeration import random_forest
from mtforest.exact import det_int
from mtforest.forest import TypedForest, laplacian


def lemma_hypotheses(r, x, n):
    return smallest_solution(r, x) is not None and all(
        x.value(i, i, n[i]) != 0 for i in range(x.d) if n[i])


def test_zero_shift_is_identity():
    x = CodingSequence.from_steps([[(0, 1), (-1, 0), (1, 2)], [(0, -1)]])
    assert cyclic_shift(x, (0, 0)) == x


@given(coding_sequences(d=2, max_len=5), st.data())
def test_shift_then_complement_restores(x, data):
    n = x.lengths
    q = tuple(data.draw(st.integers(0, max(k - 1, 0))) for k in n)
    back = tuple((k - s) % k if k else 0 for s, k in zip(q, n))
    assert cyclic_shift(cyclic_shift(x, q), back) == x


@given(coding_sequences(d=3, max_len=4), st.data())
def test_shift_preserves_endpoints(x, data):
    q = tuple(data.draw(st.integers(0, max(k - 1, 0))) for k in x.lengths)
    assert cyclic_shift(x, q).endpoint_matrix() == x.endpoint_matrix()


def test_shift_inside_window_keeps_tail():
    x = CodingSequence.from_steps([[(-1,), (0,), (1,), (-1,)]])
    y = cyclic_shift(x, (1,), (3,))
    assert y.steps[0] == ((0,), (1,), (-1,), (-1,))


def test_shift_out_of_range():
    x = CodingSequence.from_steps([[(-1, 0), (-1, 0)], [(0, -1)]])
    with pytest.raises(ValueError):
        cyclic_shift(x, (2, 0))
    with pytest.raises(ValueError):
        cyclic_shift(x, (0, 0), (3, 1))


def test_two_vertex_example():
    x = encode(TypedForest.from_nested(2, [(1, [(2, [])])]))
    assert count_good_shifts((1, 0), x, (1, 1)) == 1
    assert cyclic_determinant(x, (1, 1)) == 1
    assert det_int([[1, -1], [0, 1]]) == 1


def test_hand_forest_good_shifts(hand_forest):
    x = encode(hand_forest)
    assert cyclic_determinant(x, (4, 4)) == 4
    assert count_good_shifts((1, 1), x, (4, 4)) == 4
    assert list(good_shifts((1, 1), x, (4, 4))) == [(0, 0), (0, 2), (0, 3), (3, 3)]


def test_identity_determinant():
    x = CodingSequence.from_steps([[(-1, 0, 0)], [(0, -1, 0)], [(0, 0, -1)]])
    assert cyclic_determinant(x, (1, 1, 1)) == 1
    assert elementary_forest_sum(((-1, 0, 0), (0, -1, 0), (0, 0, -1)), (1, 1, 1)) == 1


def test_two_by_two_determinant():
    k = ((-1, 1), (0, -1))
    assert det_int([[-v for v in row] for row in k]) == 1
    assert elementary_forest_sum(k, (1, 0)) == 1


def test_preconditions_checked():
    x = encode(TypedForest.from_nested(2, [(1, [(2, [])])]))
    with pytest.raises(ValueError):
        count_good_shifts((0, 1), x, (1, 1))
    flat = CodingSequence.from_steps([[(0, 0)], [(0, -1)]])
    with pytest.raises(ValueError):
        count_good_shifts((0, 1), flat, (1, 1))


def test_zero_length_types_dropped():
    x = CodingSequence.from_steps([[(-1, 0), (-1, 0)], []])
    assert count_good_shifts((2, 0), x, (2, 0)) == cyclic_determinant(x, (2, 0)) == 2


def test_cyclic_lemma_on_small_corpus(small_corpus):
    for f in small_corpus:
        x, n, r = encode(f), f.type_counts, f.root_counts()
        if lemma_hypotheses(r, x, n):
            assert count_good_shifts(r, x, n) == cyclic_determinant(x, n)


@pytest.mark.parametrize("d,max_len,trials", [(2, 5, 4000), (3, 4, 3000)])
def test_cyclic_lemma_on_random_sequences(d, max_len, trials):
    rng = random.Random(d)
    tested = 0
    for _ in range(trials):
        x = random_coding(rng, d, max_len)
        for r in product(range(3), repeat=d):
            if sum(r) == 0:
                continue
            n = smallest_solution(r, x)
            if n is None or not all(x.value(i, i, n[i]) for i in range(d) if n[i]):
                continue
            assert count_good_shifts(r, x, n) == cyclic_determinant(x, n)
            tested += 1
    assert tested > 100


def test_non_smallest_solution_window():
    # the diagonal walk goes back up to 0 before it reaches -2
    x = CodingSequence.from_steps([[(-1,), (1,), (-1,), (-1,)]])
    assert smallest_solution((2,), x) == (4,)
    assert count_good_shifts((2,), x, (4,)) == cyclic_determinant(x, (4,)) == 2


def test_elementary_forest_counts():
    assert [len(enumerate_elementary_forests(d)) for d in range(1, 6)] == [1, 3, 16, 125, 1296]
    assert enumerate_elementary_forests(2) == [(0, 0), (0, 1), (2, 0)]


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6])
def test_elementary_enumerations_agree(d):
    assert elementary_codes_by_filter(d) == elementary_codes_by_layers(d)


def test_large_d_uses_layers():
    assert len(enumerate_elementary_forests(7)) == 8 ** 6


@settings(max_examples=300)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(
    st.lists(st.integers(0, 4), min_size=d, max_size=d),
    st.lists(st.integers(0, 4), min_size=d * d, max_size=d * d))))
def test_matrix_tree_identity(data):
    r, flat = data
    d = len(r)
    a = [[0 if i == j else flat[i * d + j] for j in range(d)] for i in range(d)]
    k = laplacian(r, a)
    assert det_int([[-v for v in row] for row in k]) == elementary_forest_sum(k, r)


def test_elementary_sum_checks_columns():
    with pytest.raises(ValueError):
        elementary_forest_sum(((-2, 1), (0, -1)), (1, 0))


@given(forests(d=2, max_vertices=9))
def test_reduction_keeps_good_shift_count(f):
    x, n, r = encode(f), f.type_counts, f.root_counts()
    xbar = reduce_sequence(x)
    if not lemma_hypotheses(r, x, n):
        return
    assert count_good_shifts(r, x, n) == count_good_shifts(r, xbar, xbar.lengths)


def test_moving_last_jump_keeps_count():
    rng = random.Random(5)
    moved = 0
    for _ in range(400):
        f = random_forest(2, 10, rng)
        r = f.root_counts()
        xbar = reduce_sequence(encode(f))
        k = xbar.lengths
        if not lemma_hypotheses(r, xbar, k):
            continue
        base = count_good_shifts(r, xbar, k)
        for m, coord in [(0, 1), (1, 0)]:
            path = xbar.steps[m]
            if len(path) >= 2 and path[-1][coord] > 0:
                y = shift_last_jump(xbar, m, coord)
                assert y.endpoint_matrix() == xbar.endpoint_matrix()
                assert count_good_shifts(r, y, k) == base
                moved += 1
    assert moved > 20


def test_shift_last_jump_errors():
    x = CodingSequence.from_steps([[(-1, 1), (-1, 0)], [(0, -1)]])
    with pytest.raises(ValueError):
        shift_last_jump(x, 0, 1)
    with pytest.raises(ValueError):
        shift_last_jump(x, 0, 0)


@settings(max_examples=150)
@given(st.integers(2, 3).flatmap(lambda d: st.tuples(
    st.lists(st.integers(0, 2), min_size=d, max_size=d),
    st.lists(st.integers(0, 2), min_size=d * d, max_size=d * d),
    st.lists(st.integers(0, 6), min_size=d, max_size=d))))
def test_simple_systems(data):
    r, flat, where = data
    d = len(r)
    if sum(r) == 0:
        return
    a = [[0 if i == j else flat[i * d + j] for j in range(d)] for i in range(d)]
    k = laplacian(r, a)
    lengths = [-k[i][i] for i in range(d)]
    if any(v == 0 for v in lengths):
        return
    x = simple_system(r, a, [w % v for w, v in zip(where, lengths)])
    assert x.lengths == tuple(lengths)
    assert x.endpoint_matrix() == k
    assert count_good_shifts(r, x, x.lengths) == elementary_forest_sum(k, r)


def test_matrix_tree_grid_agrees_with_literal_check():
    cases = 0
    for d in (2, 3):
        for r in product(range(3), repeat=d):
            for off in product(range(3), repeat=d * (d - 1)):
                it = iter(off)
                a = [[0 if i == j else next(it) for j in range(d)] for i in range(d)]
                k = laplacian(r, a)
                if sum(r) == 0 or max(-k[j][j] for j in range(d)) > 2:
                    continue
                assert det_int([[-v for v in row] for row in k]) == elementary_forest_sum(k, r)
                cases += 1
        assert matrix_tree_grid(d, 2) == (cases, 0)
        cases = 0
