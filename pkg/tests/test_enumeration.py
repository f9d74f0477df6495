import random
from collections import Counter
from itertools import product

import pytest

from mtforest.enumeration import (GenerationCapExceeded, LabeledForests, acyclic_parent_maps,
                                  census_is_consistent, census_of_tuple, compositions,
                                  count_injective, count_labeled_by_census,
                                  count_labeled_by_edge_types, count_labeled_by_indegree,
                                  count_plane_forests, count_single_type_by_degrees,
                                  count_unlabeled_by_census, generate_plane_forests,
                                  indegree_tuples, labeled_fiber_size, plane_census,
                                  root_sequence, single_type_degree_counts)
from mtforest.forest import Signature, TypedForest


def plane_by_signature(d, r, max_total):
    out = Counter()
    for f in generate_plane_forests(d, root_sequence(r), max_total=max_total):
        out[Signature.of(f)] += 1
    return out


def usable(sig):
    return all(-sig.laplacian[i][i] > 0 for i in range(sig.d))


def test_single_type_plane_trees_are_catalan():
    catalan = [1, 1, 2, 5, 14, 42]
    for n in range(1, 7):
        assert count_plane_forests(Signature((1,), (n,), ((0,),))) == catalan[n - 1]
    assert count_plane_forests(Signature((1,), (3,), ((0,),))) == 2


def test_plane_counts_two_vertex_examples():
    assert count_plane_forests(Signature((1, 0), (1, 1), ((0, 1), (0, 0)))) == 1
    assert count_plane_forests(Signature((1, 1), (1, 1), ((0, 0), (0, 0)))) == 1


@pytest.mark.parametrize("r", [(1, 0), (0, 1), (1, 1), (2, 0), (2, 1)])
def test_plane_counts_match_generator(r):
    brute = plane_by_signature(2, r, 6)
    for n in product(range(7), repeat=2):
        if sum(n) > 6:
            continue
        for a01, a10 in product(range(n[1] + 1), range(n[0] + 1)):
            sig = Signature(r, n, ((0, a01), (a10, 0)))
            try:
                sig.check()
            except ValueError:
                assert brute[sig] == 0
                continue
            if usable(sig):
                assert count_plane_forests(sig) == brute[sig], sig


def test_plane_counts_three_types():
    r = (1, 1, 0)
    brute = plane_by_signature(3, r, 5)
    assert sum(brute.values()) > 100
    for sig, cnt in brute.items():
        if usable(sig):
            assert count_plane_forests(sig) == cnt


def test_unlabeled_census_matches_generator():
    for (sig, census), cnt in plane_census(2, (1, 2), 6).items():
        if usable(sig):
            assert count_unlabeled_by_census(sig, dict(census)) == cnt


@pytest.fixture(scope="module")
def labeled_21():
    return LabeledForests((2, 1))


@pytest.fixture(scope="module")
def labeled_22():
    return LabeledForests((2, 2))


def test_acyclic_parent_map_counts():
    # rooted forests on N labeled vertices: (N+1)^(N-1)
    assert [len(acyclic_parent_maps(m)) for m in range(1, 6)] == [1, 3, 16, 125, 1296]


def test_labeled_edge_types_match_brute(labeled_21, labeled_22):
    for lab in (labeled_21, labeled_22):
        for sig, cnt in lab.by_signature().items():
            if usable(sig):
                assert count_labeled_by_edge_types(sig) == cnt


def test_labeled_indegree_match_brute(labeled_22):
    brute = labeled_22.by_indegree()
    for (sig, c), cnt in brute.items():
        if usable(sig):
            assert count_labeled_by_indegree(sig, c) == cnt
    sig = next(s for s, _ in brute if usable(s))
    for c in indegree_tuples(sig):
        assert count_labeled_by_indegree(sig, c) == brute.get((sig, c), 0)


def test_labeled_census_match_brute(labeled_22):
    for (sig, census), cnt in labeled_22.by_census().items():
        if usable(sig):
            assert count_labeled_by_census(sig, dict(census)) == cnt


def test_injective_match_brute(labeled_22):
    inj = labeled_22.injective_by_signature()
    for sig in labeled_22.by_signature():
        if usable(sig):
            assert count_injective(sig) == inj.get(sig, 0)


def test_edge_type_count_is_sum_over_indegree_tuples(labeled_21):
    for sig in labeled_21.by_signature():
        if usable(sig):
            total = sum(count_labeled_by_indegree(sig, c) for c in indegree_tuples(sig))
            assert total == count_labeled_by_edge_types(sig)


def test_census_count_is_tuple_count_times_compatible_tuples(labeled_22):
    for sig in labeled_22.by_signature():
        if not usable(sig):
            continue
        by_census = Counter()
        for c in indegree_tuples(sig):
            by_census[tuple(sorted(census_of_tuple(c).items()))] += 1
        for census, tuples in by_census.items():
            c = next(t for t in indegree_tuples(sig) if tuple(sorted(census_of_tuple(t).items())) == census)
            assert count_labeled_by_census(sig, dict(census)) == tuples * count_labeled_by_indegree(sig, c)


def test_unlabeled_times_fiber_is_labeled(labeled_22):
    for (sig, census), _ in labeled_22.by_census().items():
        if usable(sig):
            census = dict(census)
            assert (count_unlabeled_by_census(sig, census) * labeled_fiber_size(sig, census)
                    == count_labeled_by_census(sig, census))


def test_inconsistent_census_counts_zero():
    sig = Signature((1, 0), (1, 1), ((0, 1), (0, 0)))
    census = {(0, (0, 0)): 1, (1, (0, 0)): 1}
    assert not census_is_consistent(sig, census)
    assert count_labeled_by_census(sig, census) == 0
    assert count_unlabeled_by_census(sig, census) == 0


def test_wrong_indegree_sums_count_zero():
    sig = Signature((1, 0), (1, 1), ((0, 1), (0, 0)))
    c = (((0,), (0,)), ((0,), (0,)))
    assert count_labeled_by_indegree(sig, c) == 0


def test_formulas_reject_types_without_subtrees():
    # every type-2 vertex hangs below a type-2 vertex: no type-2 subtree roots
    sig = Signature((1, 0), (1, 0), ((0, 0), (0, 0)))
    for count in (count_plane_forests, count_labeled_by_edge_types, count_injective):
        with pytest.raises(ValueError):
            count(sig)


def test_single_type_degree_examples():
    assert count_single_type_by_degrees((2, 0, 0)) == 1
    assert count_single_type_by_degrees((0,)) == 1
    assert count_single_type_by_degrees((1, 1, 1)) == 0
    with pytest.raises(ValueError):
        count_single_type_by_degrees(())


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_single_type_degree_counts_match_brute(n):
    brute = single_type_degree_counts(n)
    for c in product(range(n), repeat=n):
        assert count_single_type_by_degrees(c) == brute.get(c, 0)


def test_compositions():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(1, 0)) == []
    assert len(list(compositions(4, 3))) == 15


def test_generator_length_one_stream():
    out = list(generate_plane_forests(2, (1,), n=(1, 0)))
    assert out == [TypedForest.from_nested(2, [(1, [])])]


def test_generator_is_deterministic_and_distinct():
    a = [f.to_json() for f in generate_plane_forests(2, (1, 2), max_total=6)]
    b = [f.to_json() for f in generate_plane_forests(2, (1, 2), max_total=6)]
    assert a == b
    assert len(set(a)) == len(a)


def test_generator_respects_exact_counts():
    for f in generate_plane_forests(3, (1, 3), n=(2, 2, 1)):
        assert f.type_counts == (2, 2, 1)
        assert f.root_types() == (1, 3)


def test_generator_limit():
    with pytest.raises(GenerationCapExceeded):
        list(generate_plane_forests(2, (1,), max_total=6, limit=10))
    with pytest.raises(ValueError):
        generate_plane_forests(2, (1,))


def test_generator_support_restriction():
    support = [{(0, 0), (0, 2)}, {(0, 0), (2, 0)}]
    for f in generate_plane_forests(2, (1,), max_total=7, support=support):
        for v in range(len(f)):
            assert f.offspring(v) in support[f.colors[v] - 1]


def test_labeled_block_counts_sum():
    rng = random.Random(0)
    n = (rng.randint(1, 2), rng.randint(1, 2))
    lab = LabeledForests(n)
    assert sum(lab.by_signature().values()) == len(lab.parents) == (sum(n) + 1) ** (sum(n) - 1)
