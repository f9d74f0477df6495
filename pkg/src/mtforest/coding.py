"""Coding sequences of typed forests and the smallest-solution machinery.

A coding sequence holds one path per type.  Path ``i`` (0-based, standing for
type ``i + 1``) is a walk in Z^d started at the origin; coordinate ``i`` of it
is downward skip free and every other coordinate is nondecreasing.  For a
forest, step ``m`` of path ``i`` records the offspring vector of the m-th vertex
of the type-(i+1) subforest, with one subtracted on the diagonal coordinate.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .forest import ForestError, TypedForest, in_root_class, subforest_order

CODING_SCHEMA = "mtforest.coding/1"

Vector = tuple[int, ...]


class CodingError(ValueError):
    pass


class LevelNotReached(CodingError):
    pass


@dataclass(frozen=True)
class CodingSequence:
    d: int
    steps: tuple[tuple[Vector, ...], ...]

    def __post_init__(self):
        if len(self.steps) != self.d:
            raise CodingError("need exactly one path per type")
        for i, path in enumerate(self.steps):
            for step in path:
                if len(step) != self.d:
                    raise CodingError("steps must be d-vectors")
                if step[i] < -1:
                    raise CodingError(f"path {i}: diagonal step {step[i]} below -1")
                if any(step[j] < 0 for j in range(self.d) if j != i):
                    raise CodingError(f"path {i}: off-diagonal coordinate decreases")

    @classmethod
    def from_steps(cls, steps: Sequence[Sequence[Sequence[int]]]) -> "CodingSequence":
        return cls(len(steps), tuple(tuple(tuple(int(v) for v in s) for s in path) for path in steps))

    @classmethod
    def from_values(cls, values: Sequence[Sequence[Sequence[int]]]) -> "CodingSequence":
        """Build from path values, each path starting at the origin."""
        steps = []
        for path in values:
            if any(v != 0 for v in path[0]):
                raise CodingError("paths start at the origin")
            steps.append([[b - a for a, b in zip(p, q)] for p, q in zip(path, path[1:])])
        return cls.from_steps(steps)

    @property
    def lengths(self) -> Vector:
        return tuple(len(p) for p in self.steps)

    @cached_property
    def values(self) -> tuple[tuple[Vector, ...], ...]:
        out = []
        for path in self.steps:
            cur = (0,) * self.d
            vals = [cur]
            for s in path:
                cur = tuple(a + b for a, b in zip(cur, s))
                vals.append(cur)
            out.append(tuple(vals))
        return tuple(out)

    def value(self, i: int, j: int, m: int) -> int:
        """Coordinate ``j`` of path ``i`` at time ``m``."""
        return self.values[i][m][j]

    def end(self, i: int) -> Vector:
        return self.values[i][-1]

    def endpoint_matrix(self, n: Sequence[int] | None = None) -> tuple[Vector, ...]:
        """Rows ``x^(i)(n_i)``; with ``n=None`` the full lengths are used."""
        n = self.lengths if n is None else n
        return tuple(self.values[i][n[i]] for i in range(self.d))

    @cached_property
    def _passage(self) -> tuple[tuple[int, ...], ...]:
        # first_hit[i][k] = first time the diagonal coordinate of path i reaches -k
        table = []
        for i in range(self.d):
            hits = [0]
            for m, v in enumerate(self.values[i]):
                if -v[i] == len(hits):
                    hits.append(m)
            table.append(tuple(hits))
        return tuple(table)

    def depth(self, i: int) -> int:
        """Number of levels reached: minus the minimum of the diagonal coordinate."""
        return len(self._passage[i]) - 1

    def truncate(self, n: Sequence[int]) -> "CodingSequence":
        if any(a > b for a, b in zip(n, self.lengths)):
            raise CodingError("cannot truncate beyond the length")
        return CodingSequence(self.d, tuple(p[:k] for p, k in zip(self.steps, n)))

    def to_json_obj(self) -> dict:
        return {
            "schema": CODING_SCHEMA,
            "d": self.d,
            "lengths": list(self.lengths),
            "increments": [[list(s) for s in path] for path in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CodingSequence":
        if obj.get("schema") != CODING_SCHEMA:
            raise CodingError(f"unsupported coding schema {obj.get('schema')!r}")
        x = cls.from_steps(obj["increments"])
        if x.d != obj["d"] or list(x.lengths) != list(obj["lengths"]):
            raise CodingError("header disagrees with increments")
        return x

    @classmethod
    def from_json(cls, text: str) -> "CodingSequence":
        return cls.from_json_obj(json.loads(text))


def encode(f: TypedForest) -> CodingSequence:
    """Walk each typed subforest in its own BFS order and record offspring vectors."""
    steps = []
    for i in range(f.d):
        path = []
        for v in subforest_order(f, i + 1):
            p = list(f.offspring(v))
            p[i] -= 1
            path.append(tuple(p))
        steps.append(tuple(path))
    return CodingSequence(f.d, tuple(steps))


def first_passage(x: CodingSequence, i: int, k: int) -> int:
    """First time the diagonal coordinate of path ``i`` equals ``-k``."""
    if k < 0:
        raise ValueError("level must be nonnegative")
    table = x._passage[i]
    if k >= len(table):
        raise LevelNotReached(f"path {i} never reaches level -{k}")
    return table[k]


def reduce_sequence(x: CodingSequence) -> CodingSequence:
    """Sample every path at the first passage times of its diagonal coordinate."""
    values = []
    for i in range(x.d):
        times = x._passage[i]
        values.append([x.values[i][t] for t in times])
    return CodingSequence.from_values(values)


def is_solution(r: Sequence[int], x: CodingSequence, s: Sequence[int]) -> bool:
    return all(r[j] + sum(x.values[i][s[i]][j] for i in range(x.d)) == 0 for j in range(x.d))


def smallest_solution(r: Sequence[int], x: CodingSequence) -> Vector | None:
    """Componentwise smallest ``s <= length(x)`` balancing every type, or None.

    Iterates the level vector v -> r + (off-diagonal mass collected at the first
    passage times of v) until it stops moving.
    """
    d = x.d
    if len(r) != d or any(v < 0 for v in r) or sum(r) < 1:
        raise ValueError("r must be a nonnegative vector with positive sum")
    table = x._passage
    levels = list(r)
    for _ in range(sum(x.lengths) + 2):
        if any(levels[i] >= len(table[i]) for i in range(d)):
            return None
        times = [table[i][levels[i]] for i in range(d)]
        nxt = [r[j] + sum(x.values[i][times[i]][j] for i in range(d) if i != j) for j in range(d)]
        if nxt == levels:
            return tuple(times)
        levels = nxt
    raise AssertionError("fixed-point iteration exceeded its proven bound")


def decode(x: CodingSequence, c: Sequence[int], r: Sequence[int] | None = None) -> TypedForest:
    """Rebuild the unique forest with coding ``x`` and root type sequence ``c``.

    Each path is cut into single-type subtrees at the first passage times of its
    diagonal coordinate.  The forest is then grown tree by tree in BFS order;
    every time a vertex of type i starts a new type-i subtree it takes the next
    unused type-i subtree from the queue of path i.
    """
    d = x.d
    if r is None:
        r = [0] * d
        for t in c:
            r[t - 1] += 1
    if not in_root_class(c, r):
        raise CodingError("root type sequence does not match r")
    if smallest_solution(r, x) != x.lengths:
        raise CodingError("the length of x is not the smallest solution of (r, x)")

    # Lukasiewicz decoding of every typed path into subtrees; a subtree is the
    # list of (offspring vector, local children indices) in its own BFS order.
    pending: list[deque] = []
    for i in range(d):
        times = x._passage[i]
        trees = deque()
        for a, b in zip(times, times[1:]):
            segment = x.steps[i][a:b]
            nodes = [[tuple(s[j] + (1 if j == i else 0) for j in range(d)), []] for s in segment]
            nxt = 1
            for v, node in enumerate(nodes):
                for _ in range(node[0][i]):
                    if nxt >= len(nodes):
                        raise CodingError("path segment is not a tree")
                    node[1].append(nxt)
                    nxt += 1
            trees.append(nodes)
        pending.append(trees)

    colors: list[int] = []
    children: list[list[int]] = []
    roots: list[int] = []

    def new_vertex(t: int) -> int:
        colors.append(t)
        children.append([])
        return len(colors) - 1

    for t in c:
        root = new_vertex(t)
        roots.append(root)
        # queue items: (vertex id, subtree nodes, node index or None for a subtree root)
        queue = deque([(root, None, None)])
        while queue:
            v, nodes, k = queue.popleft()
            i = colors[v] - 1
            if nodes is None:
                if not pending[i]:
                    raise CodingError(f"ran out of type-{i + 1} subtrees")
                nodes, k = pending[i].popleft(), 0
            offspring, local = nodes[k]
            inner = iter(local)
            for j in range(d):
                for _ in range(offspring[j]):
                    w = new_vertex(j + 1)
                    children[v].append(w)
                    if j == i:
                        queue.append((w, nodes, next(inner)))
                    else:
                        queue.append((w, None, None))
    if any(pending):
        raise CodingError("unused subtrees left after decoding")
    try:
        return TypedForest.build(d, colors, children, roots)
    except ForestError as exc:
        raise CodingError(str(exc)) from exc
