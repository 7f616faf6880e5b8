"""Perfect matchings of a component under per-color budgets.

``reduce_perfect`` returns a perfect matching with at most ``b[c]`` edges of
each color whenever the budgets add up to at least ``2m - 1``.  The work is
done by ``reduce_extend``, which grows a seed inside ``M1 ∪ M2`` one
``(M1, M2)``-cycle at a time and repairs the last cycle with an
``(M3, M')``-alternating walk.
"""

from __future__ import annotations

from typing import Sequence

from . import trace
from .core import Edge, Instance, Matching, mate_map
from .errors import BudgetTooSmall, PreconditionViolated, check
from .structure import cycle_decomposition, max_alt_walk


def reduce_perfect(F: Instance, b: Sequence[int]) -> Matching:
    m = F.n
    if min(b) < 0:
        raise PreconditionViolated("budgets must be nonnegative")
    if sum(b) < 2 * m - 1:
        raise BudgetTooSmall(f"b1+b2+b3 = {sum(b)} < 2m-1 = {2 * m - 1}")
    # the two largest budgets play M1 and M2, so b1 + b2 >= m
    order = sorted((1, 2, 3), key=lambda c: -b[c - 1])
    relabeled = F.with_colors(order)
    out = reduce_extend(relabeled, [b[c - 1] for c in order], Matching(frozenset()))
    result = Matching(frozenset(Edge(e.u, order[e.color - 1]) for e in out.edges))
    check(len(result) == m, "reduction did not return a perfect matching")
    check(all(result.count(c) <= b[c - 1] for c in (1, 2, 3)), "reduction exceeded a budget")
    return result


def _free_cycles(F: Instance, covered: set[int]) -> list[tuple[int, ...]]:
    cycles = []
    for cyc in cycle_decomposition(F, 1, 2):
        hit = sum(1 for x in cyc if x in covered)
        if hit == 0:
            cycles.append(cyc)
        elif hit != len(cyc):
            raise PreconditionViolated("seed cuts an (M1, M2)-cycle")
    return cycles


def reduce_extend(F: Instance, b: Sequence[int], M: Matching) -> Matching:
    """Extend ``M ⊆ M1 ∪ M2`` to a perfect matching within the budgets ``b``."""
    m = F.n
    b1, b2, b3 = b
    edges = set(M.edges)
    if any(e.color == 3 for e in edges):
        raise PreconditionViolated("seed must lie in M1 ∪ M2")
    if len(mate_map(F, edges)) != 2 * len(edges):
        raise PreconditionViolated("seed is not a matching")
    if M.count(1) > b1 or M.count(2) > b2:
        raise PreconditionViolated("seed exceeds the M1/M2 budgets")
    if b1 + b2 < m:
        raise PreconditionViolated("b1 + b2 < m")
    if b1 + b2 + b3 < 2 * m - 1:
        raise BudgetTooSmall("b1 + b2 + b3 < 2m - 1")

    level = 0
    while True:
        covered = set(mate_map(F, edges))
        cycles = _free_cycles(F, covered)
        if not cycles:
            break
        level += 1
        spare = {1: b1 - sum(e.color == 1 for e in edges), 2: b2 - sum(e.color == 2 for e in edges)}
        hi, lo = (1, 2) if spare[1] >= spare[2] else (2, 1)
        bh, bl = spare[hi], spare[lo]
        mp = m - len(edges)
        check(2 * bh >= bh + bl >= mp, "budget chain 2b1' >= b1'+b2' >= m' failed")
        trace.emit("reduction.level", level=level, cycles=len(cycles), m_rest=mp, spare=[bh, bl])

        if len(cycles) > 1:
            C = min(cycles, key=lambda cyc: (len(cyc), min(cyc)))
            check(len(C) // 2 <= bh, "shortest cycle exceeds spare budget")
            edges |= _color_edges(F, C, hi)
            continue
        C = cycles[0]
        if bh >= mp:
            edges |= _color_edges(F, C, hi)
            continue
        edges = _last_cycle(F, edges, C, hi, lo, bh, bl, mp, b3)
        break

    out = Matching(frozenset(edges))
    check(len(out) == m, "extension is not perfect")
    return out


def _color_edges(F: Instance, cyc: Sequence[int], c: int) -> set[Edge]:
    return {F.edge_at(x, c) for x in cyc if F.is_a(x)}


def _last_cycle(F, edges, C, hi, lo, bh, bl, mp, b3) -> set[Edge]:
    # v1 = lowest A-vertex of C, oriented so that v1 v2 is an M_hi edge
    v = [min(x for x in C if F.is_a(x))]
    while len(v) < 2 * mp:
        v.append(F.nbr(v[-1], hi if len(v) % 2 == 1 else lo))
    check(F.nbr(v[-1], lo) == v[0], "cycle orientation broken")

    def vert(s: int) -> int:  # 1-based, cyclic
        return v[(s - 1) % (2 * mp)]

    def edge(s: int) -> Edge:  # edge v_s v_{s+1}
        return F.edge_between(vert(s), vert(s + 1))

    seeded = set(edges)
    seeded |= {edge(2 * i) for i in range(1, mp - bh)}
    seeded |= {edge(2 * (mp - j) - 1) for j in range(0, mp - bl - 1)}
    walk = max_alt_walk(F, seeded, v[0])
    k = v.index(walk.vertices[-1]) + 1
    check(k % 2 == 0, "walk landed on an odd position")
    check(2 * (mp - bh - 1) + 2 <= k <= 2 * (bl + 2) - 2, "walk landed outside the free window")
    m3_on_walk = sum(1 for e in walk.edges if e.color == 3)
    check(m3_on_walk <= len(seeded) + 1 <= b3, "walk carries too many M3 edges")

    filled = set(edges)
    filled |= {edge(2 * s) for s in range(1, (k - 2) // 2 + 1)}
    filled |= {edge(2 * s - 1) for s in range(k // 2 + 1, mp + 1)}
    trace.emit("reduction.walk", k=k, walk_length=len(walk), m3=m3_on_walk)
    return filled ^ set(walk.edges)
