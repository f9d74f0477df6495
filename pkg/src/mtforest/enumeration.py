"""Exact counts of multitype forests, with exhaustive generators to check them against.

Plane forests are counted for a fixed root type sequence.  Labeled forests
are sets of rooted trees on the vertex set {(i, k): k in [n_i]} whose children
are unordered, i.e. acyclic parent maps; they carry no plane structure.
"""

from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping, Sequence

import numpy as np

from .exact import binom, det_int, fact
from .forest import Signature, TypedForest

Vector = tuple[int, ...]
Census = Mapping[tuple[int, Vector], int]


class GenerationCapExceeded(RuntimeError):
    pass


# -- closed forms -----------------------------------------------------------------

def _checked(sig: Signature) -> tuple[int, ...]:
    sig.check()
    k = sig.laplacian
    if any(-k[i][i] <= 0 for i in range(sig.d)):
        raise ValueError("counting formulas need -k_ii > 0 for every type")
    return tuple(-k[i][i] for i in range(sig.d))


def _det(sig: Signature) -> int:
    return det_int([[-v for v in row] for row in sig.laplacian])


def _exact_div(num: int, den: int) -> int:
    q, rem = divmod(num, den)
    assert rem == 0, f"count {num}/{den} is not an integer"
    return q


def count_plane_forests(sig: Signature) -> int:
    """Plane forests with a given root type sequence, vertex counts and edge-type counts."""
    _checked(sig)
    kp, n = sig.kprime, sig.n
    num = _det(sig)
    for i in range(sig.d):
        for j in range(sig.d):
            num *= binom(n[i] + kp[i][j] - 1, kp[i][j])
    den = 1
    for v in n:
        den *= v
    return _exact_div(num, den)


def _common(sig: Signature) -> tuple[int, int]:
    """Numerator prod (n_j - 1)! det(-K) and denominator prod r_j!."""
    num = _det(sig)
    for v in sig.n:
        num *= fact(v - 1)
    den = 1
    for v in sig.r:
        den *= fact(v)
    return num, den


def count_labeled_by_indegree(sig: Signature, c: Sequence[Sequence[Sequence[int]]]) -> int:
    """Labeled forests in which vertex (i, k) has ``c[i][j][k]`` children of type j."""
    _checked(sig)
    kp = sig.kprime
    for i in range(sig.d):
        for j in range(sig.d):
            if len(c[i][j]) != sig.n[i] or any(v < 0 for v in c[i][j]):
                raise ValueError("indegree tuple has the wrong shape")
            if sum(c[i][j]) != kp[i][j]:
                return 0
    num, den = _common(sig)
    for i in range(sig.d):
        for j in range(sig.d):
            for v in c[i][j]:
                den *= fact(v)
    return _exact_div(num, den)


def count_labeled_by_edge_types(sig: Signature) -> int:
    """Labeled forests with the given vertex counts and edge counts per (parent type, child type)."""
    _checked(sig)
    kp = sig.kprime
    num, den = _common(sig)
    for i in range(sig.d):
        for j in range(sig.d):
            num *= sig.n[i] ** kp[i][j]
            den *= fact(kp[i][j])
    return _exact_div(num, den)


def count_injective(sig: Signature) -> int:
    """Labeled forests in which no vertex has two children of the same type."""
    _checked(sig)
    kp = sig.kprime
    num, den = _common(sig)
    for i in range(sig.d):
        for j in range(sig.d):
            num *= binom(sig.n[i], kp[i][j])
    return _exact_div(num, den)


def census_is_consistent(sig: Signature, census: Census) -> bool:
    n = [0] * sig.d
    kp = [[0] * sig.d for _ in range(sig.d)]
    for (i, u), cnt in census.items():
        if cnt < 0:
            return False
        n[i] += cnt
        for j in range(sig.d):
            kp[i][j] += u[j] * cnt
    return tuple(n) == sig.n and tuple(map(tuple, kp)) == sig.kprime


def _census_weights(sig: Signature, census: Census) -> tuple[int, int]:
    """prod N_{i,u}! and prod_k (k!)^{N(k)}, where N(k) also counts types with r_i = k."""
    nfact, kfact = 1, 1
    for (i, u), cnt in census.items():
        nfact *= fact(cnt)
        for v in u:
            kfact *= fact(v) ** cnt
    for v in sig.r:
        kfact *= fact(v)
    return nfact, kfact


def count_labeled_by_census(sig: Signature, census: Census) -> int:
    """Labeled forests with ``census[(i, u)]`` type-(i+1) vertices of offspring vector u."""
    _checked(sig)
    if not census_is_consistent(sig, census):
        return 0
    nfact, kfact = _census_weights(sig, census)
    num = _det(sig)
    for v in sig.n:
        num *= fact(v) * fact(v - 1)
    return _exact_div(num, nfact * kfact)


def count_unlabeled_by_census(sig: Signature, census: Census) -> int:
    """Plane forests (fixed root type sequence) with the given offspring census."""
    _checked(sig)
    if not census_is_consistent(sig, census):
        return 0
    nfact, _ = _census_weights(sig, census)
    num = _det(sig)
    for v in sig.n:
        num *= fact(v - 1)
    return _exact_div(num, nfact)


def labeled_fiber_size(sig: Signature, census: Census) -> int:
    """Number of labeled forests mapping onto one plane forest of the census."""
    num = 1
    for v in sig.n:
        num *= fact(v)
    return _exact_div(num, _census_weights(sig, census)[1])


def count_single_type_by_degrees(c: Sequence[int]) -> int:
    """Forests on {1..n} in which vertex i has ``c[i-1]`` children."""
    n = len(c)
    if n == 0 or any(v < 0 for v in c):
        raise ValueError("need a nonempty sequence of nonnegative degrees")
    k = n - sum(c)
    if k < 1:
        return 0
    num = k * binom(n, k) * fact(n - k)
    den = n
    for v in c:
        den *= fact(v)
    return _exact_div(num, den)


# -- tuples and censuses compatible with a signature ----------------------------

def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def indegree_tuples(sig: Signature) -> Iterator[tuple[tuple[tuple[int, ...], ...], ...]]:
    """Every indegree tuple c with sum_k c[i][j][k] = k'_ij."""
    d = sig.d
    cells = [(i, j) for i in range(d) for j in range(d)]
    choices = [list(compositions(sig.kprime[i][j], sig.n[i])) for i, j in cells]
    for pick in product(*choices):
        yield tuple(tuple(pick[i * d + j] for j in range(d)) for i in range(d))


def census_of_tuple(c) -> dict[tuple[int, Vector], int]:
    d = len(c)
    out: Counter = Counter()
    for i in range(d):
        for k in range(len(c[i][0])):
            out[(i, tuple(c[i][j][k] for j in range(d)))] += 1
    return dict(out)


# -- plane forest generator -------------------------------------------------------

def generate_plane_forests(d: int, c: Sequence[int], n: Sequence[int] | None = None,
                           max_total: int | None = None,
                           support: Sequence[set] | None = None,
                           limit: int | None = None) -> Iterator[TypedForest]:
    """Every plane forest with root type sequence ``c``, without repetition.

    Vertices are expanded in global breadth-first order and each one picks an
    offspring vector; distinct choice sequences give distinct forests.  Bound
    the size with the exact vertex counts ``n`` or with ``max_total``; restrict
    offspring vectors of type i to ``support[i-1]`` if given.  Forests appear in
    a fixed order.  ``limit`` raises once more forests than that would be emitted.
    """
    if n is None and max_total is None:
        raise ValueError("need n or max_total")
    colors = list(c)
    counts = [0] * d
    for t in colors:
        counts[t - 1] += 1
    offspring: list[Vector] = []
    emitted = 0

    def room(j: int, total: int) -> int:
        if n is not None:
            return n[j] - counts[j]
        return max_total - total

    def rec(pos: int):
        nonlocal emitted
        if pos == len(colors):
            if n is None or tuple(counts) == tuple(n):
                emitted += 1
                if limit is not None and emitted > limit:
                    raise GenerationCapExceeded(f"more than {limit} forests")
                children, nxt = [], len(c)
                for z in offspring:
                    k = sum(z)
                    children.append(list(range(nxt, nxt + k)))
                    nxt += k
                yield TypedForest.build(d, colors, children, range(len(c)))
            return
        i = colors[pos] - 1
        total = len(colors)
        if support is not None:
            options = sorted(support[i])
        else:
            options = product(*(range(room(j, total) + 1) for j in range(d)))
        for z in options:
            if sum(z) > (max_total - total if max_total is not None else sum(z)):
                continue
            if n is not None and any(counts[j] + z[j] > n[j] for j in range(d)):
                continue
            for j, k in enumerate(z):
                colors.extend([j + 1] * k)
                counts[j] += k
            offspring.append(tuple(z))
            yield from rec(pos + 1)
            offspring.pop()
            for j in reversed(range(d)):
                k = z[j]
                if k:
                    del colors[-k:]
                    counts[j] -= k

    if n is not None and any(counts[j] > n[j] for j in range(d)):
        return iter(())
    return rec(0)


def plane_census(d: int, c: Sequence[int], max_total: int) -> Counter:
    """Counter of (Signature, census) over all plane forests with roots ``c`` and at most ``max_total`` vertices."""
    out: Counter = Counter()
    for f in generate_plane_forests(d, c, max_total=max_total):
        sig = Signature.of(f)
        census = Counter((f.colors[v] - 1, f.offspring(v)) for v in range(len(f)))
        out[(sig, tuple(sorted(census.items())))] += 1
    return out


def root_sequence(r: Sequence[int]) -> tuple[int, ...]:
    """The nondecreasing root type sequence with r_i roots of type i."""
    return tuple(i + 1 for i, k in enumerate(r) for _ in range(k))


# -- labeled forest oracle --------------------------------------------------------

def acyclic_parent_maps(total: int) -> np.ndarray:
    """All maps p: {1..N} -> {0..N} whose iterates reach 0; row m, column v-1 holds p(v)."""
    if total == 0:
        return np.zeros((1, 0), dtype=np.int8)
    grids = np.indices((total + 1,) * total, dtype=np.int8).reshape(total, -1).T
    grids = grids[(grids != np.arange(1, total + 1, dtype=np.int8)).all(axis=1)]
    ext = np.hstack([np.zeros((len(grids), 1), dtype=np.int8), grids])
    cur = grids.copy()
    for _ in range(total):
        cur = np.take_along_axis(ext, cur.astype(np.intp), axis=1)
    return np.ascontiguousarray(grids[(cur == 0).all(axis=1)])


class LabeledForests:
    """All labeled forests with vertex counts ``n``; labels of type i form a contiguous block."""

    def __init__(self, n: Sequence[int], parents: np.ndarray | None = None):
        self.n = tuple(n)
        self.d = len(n)
        total = sum(n)
        self.parents = acyclic_parent_maps(total) if parents is None else parents
        self.types = np.repeat(np.arange(self.d), self.n)
        m = len(self.parents)
        rows = np.arange(m)
        off = np.zeros((m, total + 1, self.d), dtype=np.int16)
        for w in range(total):
            off[rows, self.parents[:, w], self.types[w]] += 1
        self.roots = off[:, 0, :].astype(np.int64)
        self.offspring = off[:, 1:, :].astype(np.int64)
        kp = np.zeros((m, self.d, self.d), dtype=np.int64)
        for v in range(total):
            kp[:, self.types[v], :] += self.offspring[:, v, :]
        self.kprime = kp

    def signature_of(self, r_row, kp_row) -> Signature:
        d = self.d
        r = tuple(int(v) for v in r_row)
        a = tuple(tuple(int(kp_row[i][j]) for j in range(d)) for i in range(d))
        return Signature(r, self.n, a)

    def _group(self, parts: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        keys = np.hstack([p.reshape(len(self.parents), -1) for p in parts])
        return np.unique(keys, axis=0, return_counts=True)

    def by_signature(self) -> dict[Signature, int]:
        keys, counts = self._group([self.roots, self.kprime])
        d = self.d
        return {self.signature_of(k[:d], k[d:].reshape(d, d)): int(cnt) for k, cnt in zip(keys, counts)}

    def by_indegree(self) -> dict[tuple, int]:
        """(Signature, indegree tuple c[i][j][k]) -> number of labeled forests."""
        keys, counts = self._group([self.roots, self.kprime, self.offspring])
        d, total = self.d, sum(self.n)
        starts = np.concatenate([[0], np.cumsum(self.n)])
        out = {}
        for k, cnt in zip(keys, counts):
            sig = self.signature_of(k[:d], k[d:d + d * d].reshape(d, d))
            off = k[d + d * d:].reshape(total, d)
            c = tuple(tuple(tuple(int(v) for v in off[starts[i]:starts[i + 1], j]) for j in range(d))
                      for i in range(d))
            out[(sig, c)] = int(cnt)
        return out

    def by_census(self) -> dict[tuple, int]:
        """(Signature, sorted census items) -> number of labeled forests."""
        d = self.d
        base = int(max(self.n + (1,))) + 1
        codes = np.zeros(self.offspring.shape[:2], dtype=np.int64)
        for j in range(d):
            codes = codes * base + self.offspring[:, :, j]
        starts = np.concatenate([[0], np.cumsum(self.n)])
        blocks = [np.sort(codes[:, starts[i]:starts[i + 1]], axis=1) for i in range(d)]
        keys, counts = self._group([self.roots, self.kprime] + blocks)
        out = {}
        for k, cnt in zip(keys, counts):
            sig = self.signature_of(k[:d], k[d:d + d * d].reshape(d, d))
            census: Counter = Counter()
            pos = d + d * d
            for i in range(d):
                for code in k[pos:pos + self.n[i]]:
                    u, code = [], int(code)
                    for _ in range(d):
                        u.append(code % base)
                        code //= base
                    census[(i, tuple(reversed(u)))] += 1
                pos += self.n[i]
            out[(sig, tuple(sorted(census.items())))] = int(cnt)
        return out

    def injective_by_signature(self) -> dict[Signature, int]:
        mask = (self.offspring <= 1).all(axis=(1, 2))
        keys, counts = np.unique(np.hstack([self.roots[mask], self.kprime[mask].reshape(mask.sum(), -1)]),
                                 axis=0, return_counts=True)
        d = self.d
        return {self.signature_of(k[:d], k[d:].reshape(d, d)): int(cnt) for k, cnt in zip(keys, counts)}


def single_type_degree_counts(total: int) -> Counter:
    """Degree sequence (c_1..c_n) -> number of forests on {1..n} with those child counts."""
    parents = acyclic_parent_maps(total)
    deg = np.zeros((len(parents), total + 1), dtype=np.int64)
    rows = np.arange(len(parents))
    for w in range(total):
        deg[rows, parents[:, w]] += 1
    keys, counts = np.unique(deg[:, 1:], axis=0, return_counts=True)
    return Counter({tuple(int(v) for v in k): int(cnt) for k, cnt in zip(keys, counts)})


# -- random forests ---------------------------------------------------------------

def random_forest(d: int, max_vertices: int, rng: random.Random, max_roots: int = 3) -> TypedForest:
    """A random plane forest with at most ``max_vertices`` vertices (not uniform)."""
    c = [rng.randint(1, d) for _ in range(rng.randint(1, min(max_roots, max_vertices)))]
    colors = list(c)
    children: list[list[int]] = [[] for _ in c]
    pos = 0
    while pos < len(colors):
        room = max_vertices - len(colors)
        k = min(room, rng.choice([0, 0, 1, 1, 2, 3]))
        kids = sorted(rng.randint(1, d) for _ in range(k))
        for t in kids:
            children[pos].append(len(colors))
            colors.append(t)
            children.append([])
        pos += 1
    return TypedForest.build(d, colors, children, list(range(len(c))))


def forest_event_probabilities(law, c: Sequence[int], max_total: int) -> dict:
    """Exact P_c(O = n, A = a) for every event with at most ``max_total`` individuals.

    Sums prod_v nu_{type(v)}(offspring of v) over every plane forest with roots
    ``c``, restricted to offspring vectors in the support of the law.
    """
    out: dict = {}
    support = [set(dist) for dist in law.nu]
    for f in generate_plane_forests(law.d, c, max_total=max_total, support=support):
        w = Fraction(1)
        for v in range(len(f)):
            w *= law.nu[f.colors[v] - 1][f.offspring(v)]
        sig = Signature.of(f)
        key = (sig.n, sig.a)
        out[key] = out.get(key, 0) + w
    return out
