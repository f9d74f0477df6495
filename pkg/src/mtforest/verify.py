"""Oracle suite behind ``mtforest verify``: every exact identity checked against brute force."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import product
from math import sqrt
from typing import Callable

from .branching import (OffspringLaw, admissible_edge_counts, marginal_progeny_law, progeny_law,
                        simulate_progeny)
from .coding import decode, encode
from .cyclic import count_good_shifts, cyclic_determinant, matrix_tree_grid
from .enumeration import (LabeledForests, count_labeled_by_census, count_labeled_by_edge_types,
                          count_plane_forests, forest_event_probabilities, generate_plane_forests,
                          random_forest, root_sequence)
from .forest import Signature
from .lagrange import lagrange_good_lhs, lagrange_good_rhs, root_series, series_from_law

DESK_LAWS = ("binary_exchange", "mixed_critical", "subcritical", "reducible_closed", "reducible_sterile")


def load_law(name_or_path: str) -> OffspringLaw:
    """A shipped law by name (e.g. ``subcritical``) or a path to a law JSON file."""
    data = resources.files("mtforest") / "data" / f"{name_or_path}.json"
    if data.is_file():
        return OffspringLaw.from_json(data.read_text())
    with open(name_or_path) as fh:
        return OffspringLaw.from_json(fh.read())


def shipped_law_names() -> list[str]:
    return sorted(p.name[:-5] for p in (resources.files("mtforest") / "data").iterdir()
                  if p.name.endswith(".json"))


def root_sequences(d: int, max_len: int):
    for k in range(1, max_len + 1):
        yield from product(range(1, d + 1), repeat=k)


def small_forests(d: int, max_total: int):
    """Every plane forest with at most ``max_total`` vertices, over every root sequence."""
    for c in root_sequences(d, max_total):
        yield from generate_plane_forests(d, c, max_total=max_total)


@dataclass
class Check:
    name: str
    cases: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def check_bijection(cap: int, seed: int) -> Check:
    cases = fails = 0
    rng = random.Random(seed)
    forests = list(small_forests(2, cap)) + [random_forest(3, 2 * cap, rng) for _ in range(50)]
    for f in forests:
        x = encode(f)
        g = decode(x, f.root_types(), f.root_counts())
        cases += 1
        fails += g != f or encode(g) != x
    return Check(f"bijection d=2 size<={cap} + 50 random d=3", cases, fails)


def check_cyclic(cap: int, seed: int) -> Check:
    cases = fails = 0
    for f in small_forests(2, cap):
        x, n, r = encode(f), f.type_counts, f.root_counts()
        if any(x.value(i, i, n[i]) == 0 for i in range(2) if n[i]):
            continue
        cases += 1
        fails += count_good_shifts(r, x, n) != cyclic_determinant(x, n)
    return Check(f"good shifts = determinant, d=2 size<={cap}", cases, fails)


def check_matrix_tree(bound: int) -> Check:
    cases = fails = 0
    for d in (1, 2, 3, 4):
        c, f = matrix_tree_grid(d, bound)
        cases += c
        fails += f
    return Check(f"matrix-tree d<=4 |k_ij|<={bound}", cases, fails)


def check_progeny(cap: int) -> Check:
    cases = fails = 0
    for name in DESK_LAWS:
        law = load_law(name)
        for c in [(1,), (2,), (1, 2)]:
            r = (c.count(1), c.count(2))
            brute = forest_event_probabilities(law, c, cap)
            for n in product(range(cap + 1), repeat=2):
                if sum(n) > cap:
                    continue
                for a in admissible_edge_counts(r, n):
                    cases += 1
                    fails += progeny_law(law, r, n, a) != brute.get((n, a), 0)
    return Check(f"progeny law = forest enumeration, size<={cap}", cases, fails)


def check_enumeration(cap: int) -> Check:
    cases = fails = 0
    for r in [(1, 0), (0, 1), (1, 1), (2, 0), (2, 1)]:
        plane: dict = {}
        for f in generate_plane_forests(2, root_sequence(r), max_total=cap):
            sig = Signature.of(f)
            plane[sig] = plane.get(sig, 0) + 1
        for sig, v in plane.items():
            if all(-sig.laplacian[i][i] > 0 for i in range(2)):
                cases += 1
                fails += count_plane_forests(sig) != v
    for total in range(2, min(cap, 6) + 1):
        for n1 in range(1, total):
            lab = LabeledForests((n1, total - n1))
            for sig, v in lab.by_signature().items():
                if all(-sig.laplacian[i][i] > 0 for i in range(2)):
                    cases += 1
                    fails += count_labeled_by_edge_types(sig) != v
            for (sig, census), v in lab.by_census().items():
                if all(-sig.laplacian[i][i] > 0 for i in range(2)):
                    cases += 1
                    fails += count_labeled_by_census(sig, dict(census)) != v
    return Check(f"forest counts = brute force, size<={cap}", cases, fails)


def check_lagrange(cap: int) -> Check:
    cases = fails = 0
    for name in DESK_LAWS:
        law = load_law(name)
        for r in [(1, 0), (0, 1)]:
            for n in product(range(1, cap), repeat=2):
                if sum(n) > cap:
                    continue
                fs = [series_from_law(nu, sum(n)) for nu in law.nu]
                lhs = lagrange_good_lhs(fs, r, n)
                rhs = lagrange_good_rhs(root_series(r, sum(n)), fs, n)
                cases += 1
                fails += not lhs == rhs == marginal_progeny_law(law, r, n)
    return Check(f"Lagrange-Good three-way, size<={cap}", cases, fails)


def check_simulation(cap: int, seed: int, replicas: int) -> Check:
    cases = fails = 0
    for name in DESK_LAWS:
        law = load_law(name)
        events, _ = simulate_progeny(law, (1,), seed, replicas, cap=4 * cap)
        for n in product(range(cap + 1), repeat=2):
            if sum(n) > cap:
                continue
            for a in admissible_edge_counts((1, 0), n):
                p = progeny_law(law, (1, 0), n, a)
                if p < Fraction(1, 1000):
                    continue
                freq = events.get((n, a), 0) / replicas
                sd = sqrt(float(p) * (1 - float(p)) / replicas)
                cases += 1
                fails += abs(freq - float(p)) > 4 * sd
    return Check(f"simulation within 4 sd, {replicas} replicas", cases, fails)


def run_verify(cap: int = 6, seed: int = 0, replicas: int = 20_000) -> dict:
    checks: list[Callable[[], Check]] = [
        lambda: check_bijection(cap, seed),
        lambda: check_cyclic(cap, seed),
        lambda: check_matrix_tree(min(cap, 4)),
        lambda: check_progeny(cap + 2),
        lambda: check_enumeration(cap),
        lambda: check_lagrange(cap + 2),
        lambda: check_simulation(cap + 2, seed, replicas),
    ]
    results = [fn() for fn in checks]
    return {
        "config": {"cap": cap, "seed": seed, "replicas": replicas},
        "checks": [{"name": c.name, "cases": c.cases, "failures": c.failures,
                    "status": "pass" if c.passed else "FAIL"} for c in results],
        "all_passed": all(c.passed for c in results),
    }


def format_table(report: dict) -> str:
    lines = [f"verify cap={report['config']['cap']} seed={report['config']['seed']} "
             f"replicas={report['config']['replicas']}"]
    for c in report["checks"]:
        lines.append(f"{c['status']:4}  {c['cases']:7d} cases  {c['failures']:4d} failures  {c['name']}")
    lines.append("ALL PASS" if report["all_passed"] else "SOME CHECKS FAILED")
    return "\n".join(lines)


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
