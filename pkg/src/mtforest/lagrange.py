"""Truncated multivariate power series and the arborescent Lagrange-Good inversion formula."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .cyclic import enumerate_elementary_forests

Exponent = tuple[int, ...]


class MultiSeries:
    """Sparse series in d variables with rational coefficients, cut at total degree ``order``."""

    __slots__ = ("d", "order", "coeffs")

    def __init__(self, d: int, order: int, coeffs: Mapping[Sequence[int], object] | None = None):
        self.d = d
        self.order = order
        clean: dict[Exponent, Fraction] = {}
        for m, c in (coeffs or {}).items():
            m = tuple(int(v) for v in m)
            if len(m) != d or any(v < 0 for v in m):
                raise ValueError(f"bad exponent {m}")
            c = Fraction(c)
            if c and sum(m) <= order:
                clean[m] = clean.get(m, Fraction(0)) + c
        self.coeffs = {m: c for m, c in sorted(clean.items(), key=lambda kv: (sum(kv[0]), kv[0])) if c}

    @classmethod
    def constant(cls, d: int, order: int, value=1) -> "MultiSeries":
        return cls(d, order, {(0,) * d: value})

    @classmethod
    def variable(cls, d: int, order: int, i: int) -> "MultiSeries":
        return cls(d, order, {tuple(int(j == i) for j in range(d)): 1})

    @classmethod
    def monomial(cls, d: int, order: int, m: Sequence[int], value=1) -> "MultiSeries":
        return cls(d, order, {tuple(m): value})

    def coeff(self, m: Sequence[int]) -> Fraction:
        if sum(m) > self.order:
            raise ValueError(f"degree {sum(m)} is beyond the truncation order {self.order}")
        return self.coeffs.get(tuple(m), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, MultiSeries) and (self.d, self.order, self.coeffs) == (other.d, other.order, other.coeffs)

    def __repr__(self):
        return f"MultiSeries(d={self.d}, order={self.order}, {dict(self.coeffs)})"

    def truncate(self, order: int) -> "MultiSeries":
        return MultiSeries(self.d, min(order, self.order), self.coeffs)

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return MultiSeries(self.d, min(self.order, other.order), out)

    def scale(self, c) -> "MultiSeries":
        return MultiSeries(self.d, self.order, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        order = min(self.order, other.order)
        out: dict[Exponent, Fraction] = {}
        for a, ca in self.coeffs.items():
            da = sum(a)
            for b, cb in other.coeffs.items():
                if da + sum(b) > order:
                    continue
                m = tuple(x + y for x, y in zip(a, b))
                out[m] = out.get(m, 0) + ca * cb
        return MultiSeries(self.d, order, out)

    def __pow__(self, k: int) -> "MultiSeries":
        if k < 0:
            raise ValueError("negative power")
        result = MultiSeries.constant(self.d, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def derivative(self, i: int) -> "MultiSeries":
        """Partial derivative in x_i; the result is exact only up to ``order - 1``."""
        out = {}
        for m, c in self.coeffs.items():
            if m[i]:
                out[m[:i] + (m[i] - 1,) + m[i + 1:]] = c * m[i]
        return MultiSeries(self.d, self.order - 1, out)

    def compose(self, gs: Sequence["MultiSeries"]) -> "MultiSeries":
        """self(g_1, ..., g_d) for series g_i without constant term."""
        if len(gs) != self.d:
            raise ValueError("need one series per variable")
        if any(g.coeffs.get((0,) * g.d) for g in gs):
            raise ValueError("substituted series must vanish at 0")
        target_d = gs[0].d
        order = min(g.order for g in gs)
        powers: list[dict[int, MultiSeries]] = [{0: MultiSeries.constant(target_d, order)} for _ in gs]

        def power(i, k):
            if k not in powers[i]:
                powers[i][k] = power(i, k - 1) * gs[i]
            return powers[i][k]

        out = MultiSeries(target_d, order)
        for m, c in self.coeffs.items():
            if sum(m) > order:
                continue
            term = MultiSeries.constant(target_d, order, c)
            for i, k in enumerate(m):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out


def series_from_law(nu_i: Mapping[Sequence[int], object], order: int) -> MultiSeries:
    """Generating function sum nu(z) x^z."""
    d = len(next(iter(nu_i)))
    return MultiSeries(d, order, nu_i)


def solve_fixed_point(fs: Sequence[MultiSeries], order: int) -> list[MultiSeries]:
    """The series g with g_i = x_i f_i(g), up to total degree ``order``.

    Each round fixes one more degree, so ``order`` rounds suffice; one extra
    round checks that nothing moves any more.
    """
    d = len(fs)
    if any(f.d != d for f in fs):
        raise ValueError("need d series in d variables")
    if any(f.coeffs.get((0,) * d, 0) <= 0 for f in fs):
        raise ValueError("need f_i(0) > 0 for every i")
    xs = [MultiSeries.variable(d, order, i) for i in range(d)]
    fs = [f.truncate(order) for f in fs]
    g = [MultiSeries(d, order) for _ in range(d)]

    def step(g):
        return [xs[i] * fs[i].compose(g) for i in range(d)]

    for _ in range(order):
        g = step(g)
    if step(g) != g:
        raise ArithmeticError("fixed-point iteration did not settle")
    return g


def graph_derivative(gs: Sequence[MultiSeries], code: Sequence[int]) -> MultiSeries:
    """prod_k (prod_{i: j_i = k} d/dx_i) g_k over k = 0..d, for an elementary-forest code."""
    d = len(code)
    if len(gs) != d + 1:
        raise ValueError("need d + 1 series g_0..g_d")
    if tuple(code) not in set(enumerate_elementary_forests(d)):
        raise ValueError(f"{tuple(code)} is not an elementary forest code")
    out = None
    for k in range(d + 1):
        term = gs[k]
        for i, parent in enumerate(code):
            if parent == k:
                term = term.derivative(i)
        out = term if out is None else out * term
    return out


def root_series(r: Sequence[int], order: int) -> MultiSeries:
    """f_0(x) = x_1^{r_1} ... x_d^{r_d}."""
    if any(v < 0 for v in r) or sum(r) < 1:
        raise ValueError("r must be nonnegative with positive sum")
    return MultiSeries.monomial(len(r), order, r)


def lagrange_good_lhs(fs: Sequence[MultiSeries], r: Sequence[int], n: Sequence[int]) -> Fraction:
    """[x^n] f_0(g), with g the fixed point of g_i = x_i f_i(g)."""
    order = sum(n)
    g = solve_fixed_point(fs, order)
    return root_series(r, order).compose(g).coeff(n)


def lagrange_good_rhs(f0: MultiSeries, fs: Sequence[MultiSeries], n: Sequence[int]) -> Fraction:
    """(prod 1/n_i) [x^{n-1}] sum over D of the graph derivative of (f_0, f_1^{n_1}, ..., f_d^{n_d})."""
    d = len(fs)
    if len(n) != d or any(v < 1 for v in n):
        raise ValueError("n must be a positive integer vector")
    if f0.coeffs == {} or all(sum(m) == 0 for m in f0.coeffs):
        raise ValueError("f_0 must be a nonconstant monomial x^r with sum(r) >= 1")
    order = sum(n)
    hs = [f0.truncate(order)] + [f.truncate(order) ** k for f, k in zip(fs, n)]
    target = tuple(v - 1 for v in n)
    total = Fraction(0)
    for code in enumerate_elementary_forests(d):
        total += graph_derivative(hs, code).coeff(target)
    for v in n:
        total /= v
    return total


def lagrange_1d(g: MultiSeries, k: int, n: int) -> tuple[Fraction, Fraction]:
    """Both sides of [z^n] h^k = (k/n) [z^{n-k}] g^n, where h = z g(h)."""
    if g.d != 1 or not 1 <= k <= n:
        raise ValueError("need a one-variable series and 1 <= k <= n")
    h = solve_fixed_point([g], n)[0]
    lhs = (h ** k).coeff((n,))
    rhs = Fraction(k, n) * (g.truncate(n) ** n).coeff((n - k,))
    return lhs, rhs
