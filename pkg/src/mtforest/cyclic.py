"""Cyclic permutations of coding sequences and the matrix-tree side of the cyclic lemma."""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from typing import Iterator, Sequence

import numpy as np

from .coding import CodingSequence, is_solution, smallest_solution
from .exact import det_int, minor

Matrix = Sequence[Sequence[int]]


def cyclic_shift(x: CodingSequence, q: Sequence[int], n: Sequence[int] | None = None) -> CodingSequence:
    """Rotate each path at ``q_i`` inside the window ``[0, n_i]``.

    The steps ``q_i+1 .. n_i`` move to the front, so the value at ``n_i`` and
    everything after it is unchanged.
    """
    n = x.lengths if n is None else tuple(n)
    if len(q) != x.d or len(n) != x.d:
        raise ValueError("q and n must be d-vectors")
    steps = []
    for i, path in enumerate(x.steps):
        if n[i] > len(path):
            raise ValueError("window exceeds the path length")
        if not (q[i] == 0 or 0 <= q[i] <= n[i] - 1):
            raise ValueError(f"shift {q[i]} out of range for window {n[i]}")
        steps.append(path[q[i]:n[i]] + path[:q[i]] + path[n[i]:])
    return CodingSequence(x.d, tuple(steps))


def _check_cyclic_hypotheses(r: Sequence[int], x: CodingSequence, n: Sequence[int]) -> None:
    if len(n) != x.d or any(a > b for a, b in zip(n, x.lengths)):
        raise ValueError("n must not exceed the length of x")
    if not is_solution(r, x, n):
        raise ValueError("n is not a solution of (r, x)")
    for i in range(x.d):
        if n[i] > 0 and x.value(i, i, n[i]) == 0:
            raise ValueError(f"diagonal endpoint of path {i} is zero")


def good_shifts(r: Sequence[int], x: CodingSequence, n: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield the shifts ``q`` for which ``n`` is the smallest solution of the shifted system.

    Types with ``n_i = 0`` carry no steps in the window and are not shifted.
    """
    n = tuple(n)
    _check_cyclic_hypotheses(r, x, n)
    window = x.truncate(n)
    for q in product(*(range(max(k, 1)) for k in n)):
        if smallest_solution(r, cyclic_shift(window, q)) == n:
            yield q


def count_good_shifts(r: Sequence[int], x: CodingSequence, n: Sequence[int]) -> int:
    """Brute-force count over all prod(n_i) cyclic permutations."""
    return sum(1 for _ in good_shifts(r, x, n))


def cyclic_determinant(x: CodingSequence, n: Sequence[int]) -> int:
    """det(-x^{i,j}(n_i)) over the types with ``n_i > 0``."""
    m = [[-x.value(i, j, n[i]) for j in range(x.d)] for i in range(x.d)]
    return det_int(minor(m, [i for i in range(x.d) if n[i] == 0]))


# -- elementary forests --------------------------------------------------------

def _acyclic(code: Sequence[int]) -> bool:
    d = len(code)
    for start in range(1, d + 1):
        v, steps = start, 0
        while v != 0:
            v = code[v - 1]
            steps += 1
            if steps > d:
                return False
    return True


def elementary_codes_by_filter(d: int) -> list[tuple[int, ...]]:
    """Filter all (d+1)^d parent vectors down to the acyclic ones."""
    return sorted(code for code in product(range(d + 1), repeat=d)
                  if all(code[i] != i + 1 for i in range(d)) and _acyclic(code))


def elementary_codes_by_layers(d: int) -> list[tuple[int, ...]]:
    """Grow forests on {1..d} layer by layer below the sink 0."""
    out = []

    def grow(code, remaining, layer):
        if not remaining:
            out.append(tuple(code))
            return
        rem = sorted(remaining)
        for mask in range(1, 1 << len(rem)):
            chosen = [rem[b] for b in range(len(rem)) if mask >> b & 1]
            for parents in product(layer, repeat=len(chosen)):
                for v, p in zip(chosen, parents):
                    code[v - 1] = p
                grow(code, remaining - set(chosen), chosen)
            for v in chosen:
                code[v - 1] = None

    grow([None] * d, set(range(1, d + 1)), [0])
    return sorted(out)


@lru_cache(maxsize=None)
def _elementary_codes(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(elementary_codes_by_filter(d) if d <= 6 else elementary_codes_by_layers(d))


def enumerate_elementary_forests(d: int) -> list[tuple[int, ...]]:
    """The set D: vectors (j_1..j_d), j_i the parent type of type i, 0 for a root."""
    if d < 1:
        raise ValueError("d must be positive")
    return list(_elementary_codes(d))


def check_laplacian(k: Matrix, r: Sequence[int]) -> None:
    d = len(r)
    for j in range(d):
        if any(k[i][j] < 0 for i in range(d) if i != j):
            raise ValueError("off-diagonal Laplacian entries must be nonnegative")
        if -k[j][j] != r[j] + sum(k[i][j] for i in range(d) if i != j):
            raise ValueError(f"column {j} violates -k_jj = r_j + sum_i k_ij")


def elementary_forest_sum(k: Matrix, r: Sequence[int]) -> int:
    """Sum over D of prod_i k_{j_i, i}, reading k_{0, i} as r_i."""
    check_laplacian(k, r)
    d = len(r)
    total = 0
    for code in enumerate_elementary_forests(d):
        term = 1
        for i, parent in enumerate(code):
            term *= r[i] if parent == 0 else k[parent - 1][i]
            if term == 0:
                break
        total += term
    return total


def _column_options(d: int, j: int, bound: int) -> list[tuple[int, tuple[int, ...]]]:
    """Every (r_j, column j of the off-diagonal counts) with -k_jj <= bound."""
    out = []
    for v in product(range(bound + 1), repeat=d):
        if sum(v) <= bound:
            a = list(v[1:])
            a.insert(j, 0)
            out.append((v[0], tuple(a)))
    return out


def matrix_tree_grid(d: int, bound: int) -> tuple[int, int]:
    """Check det(-K) against the elementary-forest sum for every K with |k_ij| <= bound.

    Both sides are sums of products with one factor per column of K.  Grouping
    the terms by the factor of column 1 leaves tensors over columns 2..d that
    are built once; each choice of column 1 then costs a few scaled sums.
    Returns (cases with r != 0, failures).
    """
    cols = [_column_options(d, j, bound) for j in range(d)]
    # mcol[j][c, i] = (-K)_{ij}; wcol[j][c, p] = factor of column j under parent type p (0 = root)
    mcol = [np.array([[r + sum(a) if i == j else -a[i] for i in range(d)] for r, a in opts], dtype=np.int64)
            for j, opts in enumerate(cols)]
    wcol = [np.array([[r] + [0 if p == j else a[p] for p in range(d)] for r, a in opts], dtype=np.int64)
            for j, opts in enumerate(cols)]
    rootless = [np.array([r == 0 for r, _ in opts]) for opts in cols]

    def outer(vectors, dtype=np.int64):
        out = np.ones((), dtype=dtype)
        for v in vectors:
            out = np.multiply.outer(out, v)
        return out

    shape = tuple(len(c) for c in cols[1:])
    det_parts = np.zeros((d,) + shape, dtype=np.int64)
    for perm in permutations(range(d)):
        sign = -1 if sum(perm[i] > perm[k] for i in range(d) for k in range(i + 1, d)) % 2 else 1
        det_parts[perm[0]] += sign * outer([mcol[j][:, perm[j]] for j in range(1, d)])
    sum_parts = np.zeros((d + 1,) + shape, dtype=np.int64)
    for code in enumerate_elementary_forests(d):
        sum_parts[code[0]] += outer([wcol[j][:, code[j]] for j in range(1, d)])
    rest_has_root = ~outer(rootless[1:], dtype=bool)

    cases = fails = 0
    for c0 in range(len(cols[0])):
        det = np.tensordot(mcol[0][c0], det_parts, axes=1)
        esum = np.tensordot(wcol[0][c0], sum_parts, axes=1)
        valid = np.ones(shape, dtype=bool) if not rootless[0][c0] else rest_has_root
        cases += int(np.count_nonzero(valid))
        fails += int(np.count_nonzero((det != esum) & valid))
    return cases, fails


# -- constructions used by the proofs ------------------------------------------

def shift_last_jump(x: CodingSequence, m: int, coord: int) -> CodingSequence:
    """Move one unit of the last jump of coordinate ``coord`` of path ``m`` one step earlier."""
    if coord == m:
        raise ValueError("only off-diagonal coordinates can be shifted")
    path = [list(s) for s in x.steps[m]]
    if len(path) < 2:
        raise ValueError("path too short to move its last jump")
    if path[-1][coord] <= 0:
        raise ValueError("the last step of that coordinate is not a positive jump")
    path[-1][coord] -= 1
    path[-2][coord] += 1
    steps = list(x.steps)
    steps[m] = tuple(tuple(s) for s in path)
    return CodingSequence(x.d, tuple(steps))


def simple_system(r: Sequence[int], a: Matrix, jump_at: Sequence[int]) -> CodingSequence:
    """Reduced sequence whose off-diagonal mass of path i sits in the single step ``jump_at[i]``.

    Path i has length ``r_i + sum_j a[j][i]`` and diagonal steps all equal to -1.
    """
    d = len(r)
    steps = []
    for i in range(d):
        length = r[i] + sum(a[j][i] for j in range(d) if j != i)
        path = []
        for t in range(length):
            s = [0] * d
            s[i] = -1
            if t == jump_at[i]:
                for j in range(d):
                    if j != i:
                        s[j] = a[i][j]
            path.append(tuple(s))
        steps.append(tuple(path))
    return CodingSequence(d, tuple(steps))
