"""Multitype Galton-Watson forests: offspring laws, criticality, exact progeny laws, simulation."""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exact import det_int, minor, nullspace
from .forest import Signature, TypedForest

LAW_SCHEMA = "mtforest.law/1"

Vector = tuple[int, ...]
Distribution = dict[Vector, Fraction]


class LawError(ValueError):
    pass


class SupportTooLarge(LawError):
    pass


class EnclosureStraddlesOne(ArithmeticError):
    pass


class RegimeMismatch(ValueError):
    pass


def _key(text: str) -> Vector:
    return tuple(int(t) for t in text.split(","))


class OffspringLaw:
    """One finite-support offspring distribution on Z_+^d per type, with exact weights."""

    def __init__(self, nu: Sequence[Mapping[Sequence[int], object]], d: int | None = None):
        d = len(nu) if d is None else d
        if len(nu) != d or d < 1:
            raise LawError("need one distribution per type")
        dists = []
        for i, dist in enumerate(nu):
            clean: Distribution = {}
            for z, w in dist.items():
                z = tuple(int(v) for v in z)
                w = Fraction(w)
                if len(z) != d or any(v < 0 for v in z):
                    raise LawError(f"type {i + 1}: bad offspring vector {z}")
                if w < 0:
                    raise LawError(f"type {i + 1}: negative weight")
                if w:
                    clean[z] = clean.get(z, Fraction(0)) + w
            if sum(clean.values()) != 1:
                raise LawError(f"type {i + 1}: weights sum to {sum(clean.values())}, not 1")
            dists.append(dict(sorted(clean.items())))
        self.d = d
        self.nu: tuple[Distribution, ...] = tuple(dists)
        self._powers: dict[tuple[int, int], Distribution] = {}

    def __eq__(self, other):
        return isinstance(other, OffspringLaw) and self.nu == other.nu

    def __repr__(self):
        return f"OffspringLaw(d={self.d}, nu={self.to_json_obj()['nu']})"

    def power(self, i: int, n: int, support_cap: int = 200_000) -> Distribution:
        """Cached n-fold convolution of the law of type ``i`` (0-based)."""
        key = (i, n)
        if key not in self._powers:
            self._powers[key] = convolution_power(self.nu[i], n, support_cap)
        return self._powers[key]

    def max_support_sum(self) -> int:
        return max(sum(z) for dist in self.nu for z in dist)

    def to_json_obj(self) -> dict:
        return {
            "schema": LAW_SCHEMA,
            "d": self.d,
            "nu": [{",".join(map(str, z)): str(w) for z, w in dist.items()} for dist in self.nu],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "OffspringLaw":
        if obj.get("schema") != LAW_SCHEMA:
            raise LawError(f"unsupported law schema {obj.get('schema')!r}")
        return cls([{_key(k): Fraction(v) for k, v in dist.items()} for dist in obj["nu"]], int(obj["d"]))

    @classmethod
    def from_json(cls, text: str) -> "OffspringLaw":
        return cls.from_json_obj(json.loads(text))


def convolve(p: Mapping[Vector, Fraction], q: Mapping[Vector, Fraction],
             support_cap: int | None = None) -> Distribution:
    out: Distribution = {}
    for a, wa in p.items():
        for b, wb in q.items():
            z = tuple(x + y for x, y in zip(a, b))
            out[z] = out.get(z, 0) + wa * wb
    if support_cap is not None and len(out) > support_cap:
        raise SupportTooLarge(f"convolution support {len(out)} exceeds cap {support_cap}")
    return out


def convolution_power(nu: Mapping[Vector, Fraction], n: int, support_cap: int = 200_000) -> Distribution:
    """Exact n-fold convolution by repeated squaring; the 0-th power is the point mass at 0."""
    if n < 0:
        raise ValueError("power must be nonnegative")
    d = len(next(iter(nu))) if nu else 1
    result: Distribution = {(0,) * d: Fraction(1)}
    base = {tuple(z): Fraction(w) for z, w in nu.items()}
    while n:
        if n & 1:
            result = convolve(result, base, support_cap)
        n >>= 1
        if n:
            base = convolve(base, base, support_cap)
    return result


def mean_matrix(law: OffspringLaw) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(sum((z[j] * w for z, w in dist.items()), Fraction(0)) for j in range(law.d))
                 for dist in law.nu)


# -- criticality ----------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    irreducible: bool
    regime: str
    rho_low: Fraction
    rho_high: Fraction
    exact: bool
    degenerate: bool
    mean: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def to_json_obj(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "regime": self.regime,
            "rho_enclosure": [str(self.rho_low), str(self.rho_high)],
            "rho_exact": self.exact,
            "degenerate": self.degenerate,
            "mean_matrix": [[str(v) for v in row] for row in self.mean],
        }


def strongly_connected_components(adj: Sequence[Sequence[bool]]) -> list[list[int]]:
    """Components of the directed graph i -> j when adj[i][j]; plain reachability, d is small."""
    d = len(adj)
    reach = [[i == j or bool(adj[i][j]) for j in range(d)] for i in range(d)]
    for k in range(d):
        for i in range(d):
            if reach[i][k]:
                for j in range(d):
                    if reach[k][j]:
                        reach[i][j] = True
    comps, seen = [], set()
    for i in range(d):
        if i not in seen:
            comp = [j for j in range(d) if reach[i][j] and reach[j][i]]
            seen.update(comp)
            comps.append(comp)
    return comps


def _block_bounds(m: list[list[Fraction]], width: float, max_iter: int) -> tuple[Fraction, Fraction, bool]:
    """Collatz-Wielandt enclosure of the Perron root of an irreducible nonnegative block."""
    k = len(m)
    if k == 1:
        return m[0][0], m[0][0], True
    shifted = np.array([[float(m[i][j]) + (i == j) for j in range(k)] for i in range(k)])
    v = np.ones(k)
    low, high = Fraction(0), Fraction(10**18)
    for _ in range(max_iter):
        v = shifted @ v
        v /= v.max()
        vf = [Fraction(float(t)).limit_denominator(10**12) for t in v]
        if min(vf) <= 0:
            continue
        ratios = [sum(m[i][j] * vf[j] for j in range(k)) / vf[i] for i in range(k)]
        low, high = max(low, min(ratios)), min(high, max(ratios))
        if high - low <= width:
            break
    # exact criticality: a positive eigenvector for eigenvalue 1 pins rho = 1
    basis = nullspace([[m[i][j] - (i == j) for j in range(k)] for i in range(k)])
    if len(basis) == 1 and (all(t > 0 for t in basis[0]) or all(t < 0 for t in basis[0])):
        return Fraction(1), Fraction(1), True
    return low, high, False


def classify(law: OffspringLaw, width: float = 1e-9, max_iter: int = 10_000) -> Classification:
    """Irreducibility, spectral-radius enclosure and regime of the mean matrix."""
    m = [list(row) for row in mean_matrix(law)]
    d = law.d
    comps = strongly_connected_components([[m[i][j] > 0 for j in range(d)] for i in range(d)])
    low = high = Fraction(0)
    exact_one = False
    all_exact = True
    for comp in comps:
        block = [[m[i][j] for j in comp] for i in comp]
        lo, hi, exact = _block_bounds(block, width, max_iter)
        all_exact = all_exact and exact and lo == hi
        low, high = max(low, lo), max(high, hi)
        exact_one = exact_one or (exact and lo == 1)
    degenerate = all(sum(z) == 1 for dist in law.nu for z in dist)
    if high < 1:
        regime = "subcritical"
    elif low > 1:
        regime = "supercritical"
    elif exact_one and high == 1:
        regime = "critical"
    else:
        raise EnclosureStraddlesOne(f"rho in [{float(low)}, {float(high)}] cannot be separated from 1")
    return Classification(len(comps) == 1, regime, low, high, all_exact, degenerate,
                          tuple(tuple(r) for r in m))


# -- exact progeny laws ---------------------------------------------------------

def progeny_law(law: OffspringLaw, r: Sequence[int], n: Sequence[int],
                a: Sequence[Sequence[int]]) -> Fraction:
    """P_r(O = n, A = a): joint law of total progeny and inter-type edge counts.

    ``a[i][j]`` (i != j) counts type-(j+1) individuals with a type-(i+1) parent.
    Types with ``n_i = 0`` are removed from the determinant; the matching
    convolution factor is the point mass at 0.
    """
    sig = Signature(tuple(r), tuple(n), tuple(tuple(row) for row in a))
    if sig.d != law.d:
        raise ValueError("signature and law disagree on d")
    sig.check()
    k = sig.laplacian
    prob = Fraction(1)
    for i in range(sig.d):
        target = sig.kprime[i]
        w = law.power(i, sig.n[i]).get(target, 0)
        if not w:
            return Fraction(0)
        prob *= w
    det = det_int(minor([[-v for v in row] for row in k], [i for i in range(sig.d) if sig.n[i] == 0]))
    denom = 1
    for v in sig.n:
        denom *= max(v, 1)
    return prob * Fraction(det, denom)


def admissible_edge_counts(r: Sequence[int], n: Sequence[int]) -> Iterable[tuple[tuple[int, ...], ...]]:
    """All off-diagonal matrices with r_j + sum_{i != j} a_ij <= n_j for every column j."""
    d = len(r)
    columns = []
    for j in range(d):
        others = [i for i in range(d) if i != j]
        budget = n[j] - r[j]
        if budget < 0:
            return
        col = [vals for vals in product(range(budget + 1), repeat=len(others)) if sum(vals) <= budget]
        columns.append((others, col))
    for choice in product(*(col for _, col in columns)):
        a = [[0] * d for _ in range(d)]
        for j, vals in enumerate(choice):
            for i, v in zip(columns[j][0], vals):
                a[i][j] = v
        yield tuple(tuple(row) for row in a)


def marginal_progeny_law(law: OffspringLaw, r: Sequence[int], n: Sequence[int]) -> Fraction:
    """P_r(O = n), summing the joint law over every admissible edge-count matrix."""
    return sum((progeny_law(law, r, n, a) for a in admissible_edge_counts(r, n)), Fraction(0))


def otter_dwass_1type(nu: Mapping[int, object], k: int, n: int) -> Fraction:
    """(k/n) nu^{*n}(n-k).  ``nu`` may carry total mass below 1 (a defective law)."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    dist = {(int(z),): Fraction(w) for z, w in nu.items()}
    if any(z[0] < 0 for z in dist) or any(w < 0 for w in dist.values()) or sum(dist.values()) > 1:
        raise ValueError("nu must be a (possibly defective) distribution on Z_+")
    return Fraction(k, n) * convolution_power(dist, n).get((n - k,), 0)


def reducible_regime(law: OffspringLaw) -> str:
    """Which two-type reducible formula applies: 'type2-sterile' or 'type2-closed'."""
    if law.d != 2:
        raise RegimeMismatch("reducible formulas are two-type")
    m = mean_matrix(law)
    if not (m[0][1] > 0 and 0 < m[0][0] <= 1):
        raise RegimeMismatch("need m12 > 0 and 0 < m11 <= 1")
    if m[1][0] != 0:
        raise RegimeMismatch("need m21 = 0")
    if m[1][1] == 0:
        return "type2-sterile"
    if m[1][1] <= 1:
        return "type2-closed"
    raise RegimeMismatch("need m22 <= 1")


def reducible_2type_laws(law: OffspringLaw, r1: int, n1: int, n2: int) -> Fraction:
    """P_{(r1,0)}(O_1 = n1, O_2 = n2) for the two reducible two-type patterns."""
    if not 1 <= r1 <= n1 or n2 < 0:
        raise ValueError("need 1 <= r1 <= n1 and n2 >= 0")
    regime = reducible_regime(law)
    p1 = law.power(0, n1)
    if regime == "type2-sterile":
        return Fraction(r1, n1) * p1.get((n1 - r1, n2), 0)
    if n2 < 1:
        raise RegimeMismatch("the type2-closed formula needs n2 >= 1")
    p2 = law.power(1, n2)
    total = sum((j * p1.get((n1 - r1, j), 0) * p2.get((0, n2 - j), 0) for j in range(n2 + 1)), Fraction(0))
    return Fraction(r1, n1 * n2) * total


# -- simulation -----------------------------------------------------------------

@dataclass(frozen=True)
class Truncation:
    """Report of a simulation stopped at the vertex cap."""

    cap: int
    vertices: int
    records: tuple[tuple[int, Vector], ...]

    def to_json_obj(self) -> dict:
        return {"truncated": True, "cap": self.cap, "vertices": self.vertices}


class _Sampler:
    """Inverse-CDF sampling over each support in sorted key order."""

    def __init__(self, law: OffspringLaw):
        self.keys = [list(dist) for dist in law.nu]
        self.cdf = []
        for dist in law.nu:
            acc, cum = Fraction(0), []
            for w in dist.values():
                acc += w
                cum.append(float(acc))
            cum[-1] = 1.0
            self.cdf.append(np.array(cum))

    def draw(self, i: int, u: float) -> Vector:
        return self.keys[i][min(int(np.searchsorted(self.cdf[i], u, side="right")), len(self.keys[i]) - 1)]


class _Uniforms:
    def __init__(self, rng: np.random.Generator, block: int = 4096):
        self.rng, self.block = rng, block
        self.buf, self.pos = rng.random(block), 0

    def next(self) -> float:
        if self.pos == self.block:
            self.buf, self.pos = self.rng.random(self.block), 0
        self.pos += 1
        return self.buf[self.pos - 1]


def _as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def simulate_forest(law: OffspringLaw, c: Sequence[int], seed, cap: int = 10_000) -> TypedForest | Truncation:
    """Grow a forest generation by generation; stop with a report once ``cap`` vertices exist."""
    sampler = _Sampler(law)
    rng = _as_rng(seed)
    colors = list(c)
    children: list[list[int]] = [[] for _ in colors]
    if len(colors) > cap:
        return Truncation(cap, len(colors), ())
    queue = deque(range(len(colors)))
    records = []
    while queue:
        v = queue.popleft()
        i = colors[v] - 1
        z = sampler.draw(i, rng.random())
        records.append((i + 1, z))
        if len(colors) + sum(z) > cap:
            return Truncation(cap, len(colors) + sum(z), tuple(records))
        for j, count in enumerate(z):
            for _ in range(count):
                w = len(colors)
                colors.append(j + 1)
                children.append([])
                children[v].append(w)
                queue.append(w)
    return TypedForest.build(law.d, colors, children, list(range(len(c))))


Event = tuple[Vector, tuple[tuple[int, ...], ...]]


def _progeny_block(law: OffspringLaw, c: Sequence[int], seed: int, block: int,
                   replicas: int, cap: int) -> tuple[Counter, int]:
    sampler = _Sampler(law)
    uni = _Uniforms(np.random.default_rng([seed, block]))
    d = law.d
    events: Counter = Counter()
    truncated = 0
    for _ in range(replicas):
        pending = [0] * d
        for t in c:
            pending[t - 1] += 1
        n = list(pending)
        a = [[0] * d for _ in range(d)]
        total = sum(n)
        alive = True
        while alive and any(pending):
            i = next(t for t in range(d) if pending[t])
            pending[i] -= 1
            z = sampler.draw(i, uni.next())
            total += sum(z)
            if total > cap:
                alive = False
                break
            for j, cnt in enumerate(z):
                if cnt:
                    pending[j] += cnt
                    n[j] += cnt
                    if j != i:
                        a[i][j] += cnt
        if alive:
            events[(tuple(n), tuple(tuple(row) for row in a))] += 1
        else:
            truncated += 1
    return events, truncated


def simulate_progeny(law: OffspringLaw, c: Sequence[int], seed: int, replicas: int,
                     cap: int = 64, block_size: int = 1000, workers: int = 1) -> tuple[Counter, int]:
    """Frequencies of (total progeny, inter-type edge counts) over independent replicas.

    Replicas are split into blocks; block b draws from the stream seeded by
    ``(seed, b)``, so the result does not depend on ``workers``.  Replicas that
    exceed ``cap`` vertices are counted as truncated instead.
    """
    blocks = [(b, min(block_size, replicas - b * block_size))
              for b in range((replicas + block_size - 1) // block_size)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_progeny_block, *zip(*[(law, tuple(c), seed, b, k, cap) for b, k in blocks])))
    else:
        parts = [_progeny_block(law, c, seed, b, k, cap) for b, k in blocks]
    events: Counter = Counter()
    truncated = 0
    for ev, t in parts:
        events.update(ev)
        truncated += t
    return events, truncated


def step_law(law: OffspringLaw, i: int) -> Distribution:
    """Law of an increment of path ``i`` (0-based): offspring minus one on the diagonal."""
    return {tuple(v - (j == i) for j, v in enumerate(z)): w for z, w in law.nu[i].items()}
