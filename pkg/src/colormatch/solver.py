"""Find an (a1, a2, a3)-matching for any target summing to n - 1.

Routing:

* one nonzero multiplicity: the first ``n - 1`` edges of that color;
* two nonzero: :func:`solve_two_color`, a walk around the 2-factor;
* three nonzero, connected: start from ``n - 1`` edges of ``M3`` and switch
  ``a1`` times toward ``M1``, then ``a2`` times toward ``M2``;
* three nonzero, disconnected: peel the smallest component with a
  within-budget perfect matching and recurse on the rest.
"""

from __future__ import annotations

from typing import Sequence

from . import trace
from .core import Edge, Instance, Matching, components, remove_component, restrict
from .errors import InvalidTargetSum, check
from .reduction import reduce_perfect
from .structure import cycle_decomposition
from .switching import switch


def _check_target(inst: Instance, target: Sequence[int]) -> tuple[int, int, int]:
    if len(target) != 3:
        raise InvalidTargetSum(f"target must have three entries, got {len(target)}")
    a = tuple(int(x) for x in target)
    if min(a) < 0:
        raise InvalidTargetSum(f"negative entry in target {list(a)}")
    if sum(a) != inst.n - 1:
        raise InvalidTargetSum(f"target sums to {sum(a)}, expected n-1 = {inst.n - 1}")
    return a


def solve_two_color(inst: Instance, c_i: int, c_j: int, a_i: int, a_j: int) -> Matching:
    """An ``(a_i, a_j)``-matching inside ``M_{c_i} ∪ M_{c_j}``."""
    if c_i == c_j or min(a_i, a_j) < 0 or a_i + a_j != inst.n - 1:
        raise InvalidTargetSum(f"need distinct colors and a_i + a_j = n-1, got {a_i} + {a_j}")
    left = a_i
    chosen: list[Edge] = []
    cut = False
    for cyc in cycle_decomposition(inst, c_i, c_j):
        half = len(cyc) // 2
        # cyc[0] cyc[1] is an M_{c_i} edge; A-vertices sit at even indices
        if cut:
            chosen += [inst.edge_at(x, c_j) for x in cyc[::2]]
        elif left >= half:
            chosen += [inst.edge_at(x, c_i) for x in cyc[::2]]
            left -= half
        else:
            # `left` consecutive c_i edges, then c_j edges until one short
            chosen += [inst.edge_at(cyc[2 * s], c_i) for s in range(left)]
            chosen += [inst.edge_between(cyc[s], cyc[s + 1]) for s in range(2 * left + 1, len(cyc) - 1, 2)]
            cut = True
    out = Matching(frozenset(chosen))
    check(cut and out.count(c_i) == a_i and out.count(c_j) == a_j, "two-color walk miscounted")
    return out


def solve(inst: Instance, target: Sequence[int]) -> Matching:
    """Return a matching with exactly ``target[c-1]`` edges of ``M_c``."""
    a = _check_target(inst, target)
    out = _solve(inst, a)
    check(out.counts == a and len(out) == inst.n - 1, "solver returned wrong counts")
    return out


def _solve(inst: Instance, a: tuple[int, int, int]) -> Matching:
    nonzero = [c for c in (1, 2, 3) if a[c - 1] > 0]
    if len(nonzero) <= 1:
        c = nonzero[0] if nonzero else 1
        trace.emit("solve.route", route="one_color", color=c)
        return Matching(frozenset(Edge(u, c) for u in range(a[c - 1])))
    if len(nonzero) == 2:
        ci, cj = nonzero
        trace.emit("solve.route", route="two_color", colors=[ci, cj])
        return solve_two_color(inst, ci, cj, a[ci - 1], a[cj - 1])

    comps = components(inst)
    if len(comps) == 1:
        trace.emit("solve.route", route="switching", switches=a[0] + a[1])
        m = Matching(frozenset(Edge(u, 3) for u in range(inst.n - 1)))
        for direction in (1, 2):
            for _ in range(a[direction - 1]):
                m = switch(inst, m, direction)
                trace.emit("solve.switch", direction=direction, counts=list(m.counts))
        return m

    comp = comps[0]
    perfect = comp.lift(reduce_perfect(restrict(inst, comp), a))
    used = perfect.counts
    trace.emit("solve.peel", m=comp.m, counts=list(used))
    rest_inst, rest = remove_component(inst, comp)
    residual = tuple(a[c] - used[c] for c in range(3))
    tail = rest.lift(_solve(rest_inst, residual))
    return Matching(perfect.edges | tail.edges)
