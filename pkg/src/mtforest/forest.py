"""Finite plane forests whose vertices carry a type (color) in 1..d.

A :class:`TypedForest` is stored as an arena of vertices numbered in breadth
first search order: tree by tree, and inside a tree generation by generation,
left to right.  Because the numbering is canonical, two forests compare equal
exactly when they have the same ordered typed shape.

Types are 1-based everywhere in the public API.  Vectors indexed by type
(root counts, vertex counts, offspring vectors) are plain Python sequences
where position ``i - 1`` holds the entry for type ``i``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

FOREST_SCHEMA = "mtforest.forest/1"


class ForestError(ValueError):
    pass


@dataclass(frozen=True)
class TypedForest:
    d: int
    colors: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    roots: tuple[int, ...]
    parents: tuple[int, ...] = field(compare=False, repr=False, default=())

    def __post_init__(self):
        if self.d < 1:
            raise ForestError("d must be positive")
        if len(self.colors) != len(self.children):
            raise ForestError("colors and children disagree in length")
        for c in self.colors:
            if not 1 <= c <= self.d:
                raise ForestError(f"color {c} outside 1..{self.d}")
        for kids in self.children:
            for a, b in zip(kids, kids[1:]):
                if self.colors[a] > self.colors[b]:
                    raise ForestError("sibling colors must be nondecreasing left to right")
        if not self.parents:
            par = [-1] * len(self.colors)
            for v, kids in enumerate(self.children):
                for w in kids:
                    par[w] = v
            object.__setattr__(self, "parents", tuple(par))

    # -- construction ---------------------------------------------------------

    @classmethod
    def build(cls, d: int, colors: Sequence[int], children: Sequence[Sequence[int]],
              roots: Sequence[int], normalize: bool = False) -> "TypedForest":
        """Build from an arbitrary vertex numbering, relabelling into BFS order.

        With ``normalize`` the children of every vertex are stably sorted by
        color; otherwise unsorted siblings are rejected.
        """
        n = len(colors)
        seen = [False] * n
        order: list[int] = []
        for root in roots:
            if seen[root]:
                raise ForestError("vertex reached twice")
            seen[root] = True
            queue = deque([root])
            while queue:
                v = queue.popleft()
                order.append(v)
                kids = list(children[v])
                if normalize:
                    kids.sort(key=lambda w: colors[w])
                for w in kids:
                    if seen[w]:
                        raise ForestError("vertex reached twice")
                    seen[w] = True
                    queue.append(w)
        if len(order) != n:
            raise ForestError("some vertices are not reachable from the roots")
        new = {old: i for i, old in enumerate(order)}
        new_children = []
        for old in order:
            kids = list(children[old])
            if normalize:
                kids.sort(key=lambda w: colors[w])
            new_children.append(tuple(new[w] for w in kids))
        root_ids = []
        for root in roots:
            root_ids.append(new[root])
        return cls(d, tuple(colors[v] for v in order), tuple(new_children), tuple(root_ids))

    @classmethod
    def empty(cls, d: int) -> "TypedForest":
        return cls(d, (), (), ())

    @classmethod
    def from_nested(cls, d: int, trees: Iterable[Any], normalize: bool = False) -> "TypedForest":
        """Build from nested trees.

        Each tree is either ``{"color": c, "children": [...]}`` or a pair
        ``(c, [children...])``.
        """
        colors: list[int] = []
        children: list[list[int]] = []
        roots: list[int] = []

        def node(obj):
            if isinstance(obj, dict):
                return int(obj["color"]), obj.get("children", [])
            c, kids = obj
            return int(c), kids

        for tree in trees:
            c, kids = node(tree)
            roots.append(len(colors))
            colors.append(c)
            children.append([])
            stack = [(roots[-1], kids)]
            while stack:
                parent, kids = stack.pop()
                for kid in kids:
                    c, grand = node(kid)
                    v = len(colors)
                    colors.append(c)
                    children.append([])
                    children[parent].append(v)
                    stack.append((v, grand))
        return cls.build(d, colors, children, roots, normalize=normalize)

    # -- basic queries --------------------------------------------------------

    def __len__(self) -> int:
        return len(self.colors)

    @cached_property
    def type_counts(self) -> tuple[int, ...]:
        counts = [0] * self.d
        for c in self.colors:
            counts[c - 1] += 1
        return tuple(counts)

    def root_types(self) -> tuple[int, ...]:
        """The root type sequence."""
        return tuple(self.colors[r] for r in self.roots)

    def root_counts(self) -> tuple[int, ...]:
        counts = [0] * self.d
        for r in self.roots:
            counts[self.colors[r] - 1] += 1
        return tuple(counts)

    def offspring(self, v: int) -> tuple[int, ...]:
        """Vector whose entry ``j - 1`` is the number of type-j children of ``v``."""
        p = [0] * self.d
        for w in self.children[v]:
            p[self.colors[w] - 1] += 1
        return tuple(p)

    def edge_counts(self) -> tuple[tuple[int, ...], ...]:
        """Matrix whose (i-1, j-1) entry counts type-j vertices with a type-i parent."""
        a = [[0] * self.d for _ in range(self.d)]
        for v, kids in enumerate(self.children):
            ci = self.colors[v] - 1
            for w in kids:
                a[ci][self.colors[w] - 1] += 1
        return tuple(tuple(row) for row in a)

    def is_reduced(self) -> bool:
        return all(self.colors[self.parents[v]] != self.colors[v]
                   for v in range(len(self)) if self.parents[v] >= 0)

    # -- serialization --------------------------------------------------------

    def to_nested(self) -> list[dict]:
        nodes = [{"color": c, "children": []} for c in self.colors]
        for v, kids in enumerate(self.children):
            nodes[v]["children"] = [nodes[w] for w in kids]
        return [nodes[r] for r in self.roots]

    def to_json_obj(self) -> dict:
        return {"schema": FOREST_SCHEMA, "d": self.d, "trees": self.to_nested()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict, normalize: bool = False) -> "TypedForest":
        if obj.get("schema") != FOREST_SCHEMA:
            raise ForestError(f"unsupported forest schema {obj.get('schema')!r}")
        return cls.from_nested(int(obj["d"]), obj["trees"], normalize=normalize)

    @classmethod
    def from_json(cls, text: str, normalize: bool = False) -> "TypedForest":
        return cls.from_json_obj(json.loads(text), normalize=normalize)


def bfs_order(f: TypedForest) -> list[int]:
    """Vertices in breadth first order, tree by tree."""
    order = []
    for root in f.roots:
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            queue.extend(f.children[v])
    return order


def subtree_roots(f: TypedForest, i: int) -> list[int]:
    """Roots of the maximal type-i subtrees, in BFS order of ``f``."""
    return [v for v in bfs_order(f)
            if f.colors[v] == i and (f.parents[v] < 0 or f.colors[f.parents[v]] != i)]


def subforest_order(f: TypedForest, i: int) -> list[int]:
    """Type-i vertices of ``f`` listed in the BFS order of the type-i subforest."""
    order = []
    for root in subtree_roots(f, i):
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            queue.extend(w for w in f.children[v] if f.colors[w] == i)
    return order


def subforest(f: TypedForest, i: int) -> TypedForest:
    """The forest of maximal monochromatic type-i subtrees, ranked by root position."""
    if not 1 <= i <= f.d:
        raise ForestError(f"type {i} outside 1..{f.d}")
    roots = subtree_roots(f, i)
    kids = [tuple(w for w in f.children[v] if f.colors[w] == i) for v in range(len(f))]
    keep = [v for v in range(len(f)) if f.colors[v] == i]
    idx = {v: k for k, v in enumerate(keep)}
    return TypedForest.build(
        f.d, [i] * len(keep), [[idx[w] for w in kids[v]] for v in keep], [idx[r] for r in roots]
    )


def component_roots(f: TypedForest) -> list[int]:
    """For each vertex, the root of the monochromatic subtree containing it."""
    top = [0] * len(f)
    for v in bfs_order(f):
        p = f.parents[v]
        top[v] = top[p] if p >= 0 and f.colors[p] == f.colors[v] else v
    return top


def reduce_forest(f: TypedForest) -> TypedForest:
    """Collapse every monochromatic subtree into a single vertex of its type.

    Child components are ordered by the BFS position of their roots in ``f``,
    then stably sorted by color.
    """
    top = component_roots(f)
    comps = [v for v in bfs_order(f) if top[v] == v]
    idx = {v: k for k, v in enumerate(comps)}
    children: list[list[int]] = [[] for _ in comps]
    for v in comps:
        p = f.parents[v]
        if p >= 0:
            children[idx[top[p]]].append(idx[v])
    colors = [f.colors[v] for v in comps]
    roots = [idx[r] for r in f.roots]
    return TypedForest.build(f.d, colors, children, roots, normalize=True)


def in_root_class(c: Sequence[int], r: Sequence[int]) -> bool:
    """Whether the root type sequence ``c`` has exactly ``r[i-1]`` entries equal to ``i``."""
    counts = [0] * len(r)
    for t in c:
        if not 1 <= t <= len(r):
            return False
        counts[t - 1] += 1
    return counts == list(r)


@dataclass(frozen=True)
class Signature:
    """Root counts, vertex counts and inter-type edge counts of a forest class.

    ``a[i][j]`` (i != j) counts type-(j+1) vertices with a type-(i+1) parent;
    the diagonal of ``a`` is ignored.  The Laplacian has the same off-diagonal
    entries and diagonal ``-(r_j + sum_{i != j} a[i][j])``.
    """

    r: tuple[int, ...]
    n: tuple[int, ...]
    a: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = len(self.r)
        if len(self.n) != d or len(self.a) != d or any(len(row) != d for row in self.a):
            raise ValueError("signature dimensions disagree")
        object.__setattr__(self, "a", tuple(
            tuple(0 if i == j else int(self.a[i][j]) for j in range(d)) for i in range(d)))

    @property
    def d(self) -> int:
        return len(self.r)

    @cached_property
    def laplacian(self) -> tuple[tuple[int, ...], ...]:
        return laplacian(self.r, self.a)

    @cached_property
    def kprime(self) -> tuple[tuple[int, ...], ...]:
        """Edge counts by (parent type, child type), same-type edges included."""
        k = self.laplacian
        return tuple(tuple(self.n[i] + k[i][i] if i == j else k[i][j] for j in range(self.d))
                     for i in range(self.d))

    def check(self) -> None:
        """Raise ValueError unless the hypotheses of the progeny formula hold."""
        k = self.laplacian
        if any(v < 0 for v in self.r) or sum(self.r) < 1:
            raise ValueError("r must be nonnegative with positive sum")
        if any(self.a[i][j] < 0 for i in range(self.d) for j in range(self.d)):
            raise ValueError("off-diagonal counts must be nonnegative")
        if any(self.n[i] < -k[i][i] for i in range(self.d)):
            raise ValueError("need n_i >= -k_ii for every type")

    @classmethod
    def of(cls, f: TypedForest) -> "Signature":
        return cls(f.root_counts(), f.type_counts, f.edge_counts())


def laplacian(r: Sequence[int], a: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    d = len(r)
    diag = [-(r[j] + sum(a[i][j] for i in range(d) if i != j)) for j in range(d)]
    return tuple(tuple(diag[i] if i == j else int(a[i][j]) for j in range(d)) for i in range(d))
