"""Shared fixtures and independent brute-force helpers.

The helpers here deliberately avoid the package's own oracle so tests can
cross-check it.
"""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from colormatch.core import Edge, Instance, Matching, cyclic_instance, disjoint_union
from colormatch.oracle import gen_random
from colormatch.structure import AltPath, NearlyAltPath, cycle_decomposition
from colormatch.switching import rotate_cycle_matching


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def cyclic3() -> Instance:
    return cyclic_instance(3)


@pytest.fixture
def two_blocks() -> Instance:
    return disjoint_union(cyclic_instance(3), cyclic_instance(3))


def brute_counts(inst: Instance, size: int) -> set[tuple[int, ...]]:
    """Count vectors of all matchings of ``size`` edges, via itertools."""
    edges = [Edge(u, c) for u in range(inst.n) for c in inst.colors]
    out = set()
    for combo in combinations(edges, size):
        if len({e.u for e in combo}) < size:
            continue
        if len({inst.perms[e.color - 1][e.u] for e in combo}) < size:
            continue
        out.add(tuple(sum(e.color == c for e in combo) for c in inst.colors))
    return out


def connected_instance(n: int, seed: int) -> Instance:
    return gen_random(n, seed, connected=True)


def structured_matching(inst: Instance, rng: random.Random) -> Matching | None:
    """A size n-1 matching with a3 >= 1 that tends to make C0 a cycle.

    One (M1, M2)-cycle gets a rotated matching leaving two vertices free; some
    other cycles are covered by a single color; the rest is matched by a
    randomized backtracking search.
    """
    cycles = cycle_decomposition(inst, 1, 2)
    rng.shuffle(cycles)
    c0 = cycles[0]
    k = rng.randrange(len(c0) // 2)
    edges = set(rotate_cycle_matching(inst, c0, rng.choice(c0), rng.choice((1, 2)), k).edges)
    loose: list[int] = []
    for cyc in cycles[1:]:
        if rng.random() < 0.5:
            col = rng.choice((1, 2))
            edges |= {inst.edge_at(x, col) for x in cyc if inst.is_a(x)}
        else:
            loose += [x for x in cyc if inst.is_a(x)]
    free_b = set(range(inst.n, 2 * inst.n)) - {inst.endpoints(e)[1] for e in edges}
    rng.shuffle(loose)
    picked: list[Edge] = []

    def rec(idx: int) -> bool:
        if idx == len(loose):
            return True
        cols = [1, 2, 3]
        rng.shuffle(cols)
        for c in cols:
            b = inst.nbr(loose[idx], c)
            if b in free_b:
                free_b.discard(b)
                picked.append(Edge(loose[idx], c))
                if rec(idx + 1):
                    return True
                picked.pop()
                free_b.add(b)
        return False

    if not rec(0):
        return None
    m = Matching(frozenset(edges | set(picked)))
    return m if m.count(3) else None


def random_matching(inst: Instance, size: int, rng: random.Random) -> Matching | None:
    """A uniformly-ish random matching of ``size`` edges, by greedy restarts."""
    for _ in range(200):
        order = list(range(inst.n))
        rng.shuffle(order)
        used_b: set[int] = set()
        chosen = []
        for u in order:
            if len(chosen) == size:
                break
            cols = list(inst.colors)
            rng.shuffle(cols)
            for c in cols:
                b = inst.perms[c - 1][u]
                if b not in used_b:
                    used_b.add(b)
                    chosen.append(Edge(u, c))
                    break
        if len(chosen) == size:
            return Matching(frozenset(chosen))
    return None


def random_path(inst: Instance, rng: random.Random, length: int, good: int | None = None) -> AltPath | None:
    """A random simple path with ``length`` vertices.

    With ``good=c`` the path is c-good: odd positions carry colors c or 3,
    even positions 3-c or 3.
    """
    for _ in range(50):
        verts = [rng.randrange(2 * inst.n)]
        while len(verts) < length:
            pos = len(verts)
            cols = [1, 2, 3] if good is None else ([good, 3] if pos % 2 == 1 else [3 - good, 3])
            nxt = [inst.nbr(verts[-1], c) for c in cols]
            nxt = [y for y in nxt if y not in verts]
            if not nxt:
                break
            verts.append(rng.choice(nxt))
        if len(verts) == length:
            return AltPath.through(inst, verts)
    return None


def random_nearly_alt(inst: Instance, rng: random.Random, good: int | None = None) -> NearlyAltPath | None:
    """A random path with random unsaturated positions and a greedy rest."""
    length = 2 * rng.randint(1, inst.n)
    path = random_path(inst, rng, length, good)
    if path is None:
        return None
    i = rng.randrange(1, length, 2)
    j = rng.randrange(i + 1, length + 1, 2)
    on_path = set(path.vertices)
    rest = set()
    used = set(on_path)
    for u in range(inst.n):
        if u in used:
            continue
        for c in inst.colors:
            b = inst.nbr(u, c)
            if b not in used:
                rest.add(Edge(u, c))
                used |= {u, b}
                break
    return NearlyAltPath(path, i, j, frozenset(rest))
