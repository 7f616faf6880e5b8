"""Alternating structures on top of an instance.

Path positions are 1-based: the edge at position ``s`` joins the ``s``-th and
``(s+1)``-th vertex.  With that convention the unsaturated vertices of a
nearly-alternating path sit at an odd and an even position.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .core import Edge, Instance, Matching, mate_map
from .errors import (
    BadParity,
    Disconnected,
    MatchingWrongSize,
    OutOfRange,
    PreconditionViolated,
    StartSaturated,
    VertexSaturated,
)


def edge_set(m: Matching | Iterable[Edge]) -> frozenset[Edge]:
    if isinstance(m, Matching):
        return m.edges
    return frozenset(m)


def cycle_decomposition(inst: Instance, c: int, c2: int) -> list[tuple[int, ...]]:
    """Cycles of ``M_c ∪ M_c2``.

    Each cycle starts at its smallest A-vertex and leaves it along ``M_c``;
    cycles are ordered by that starting vertex.
    """
    if c == c2:
        raise PreconditionViolated("colors must differ")
    seen = [False] * inst.n
    cycles = []
    for start in range(inst.n):
        if seen[start]:
            continue
        cyc = []
        x = start
        while True:
            seen[x] = True
            y = inst.nbr(x, c)
            cyc += [x, y]
            x = inst.nbr(y, c2)
            if x == start:
                break
        cycles.append(tuple(cyc))
    return cycles


@dataclass(frozen=True)
class AltPath:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    @classmethod
    def through(cls, inst: Instance, vertices: Sequence[int]) -> AltPath:
        edges = []
        for x, y in zip(vertices, vertices[1:]):
            e = inst.edge_between(x, y)
            if e is None:
                raise PreconditionViolated(f"no edge between {x} and {y}")
            edges.append(e)
        if len(set(vertices)) != len(vertices):
            raise PreconditionViolated("path repeats a vertex")
        return cls(tuple(vertices), tuple(edges))

    @property
    def edge_colors(self) -> tuple[int, ...]:
        return tuple(e.color for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def vertex(self, pos: int) -> int:
        return self.vertices[pos - 1]

    def edge(self, pos: int) -> Edge:
        return self.edges[pos - 1]

    def reversed(self) -> AltPath:
        return AltPath(self.vertices[::-1], self.edges[::-1])


def is_good(path: AltPath) -> int | None:
    """Return ``c`` if the path is c-good, else ``None``.

    Color-1 goodness wins the tie on paths carrying only M3 edges.
    """
    for c in (1, 2):
        ok = True
        for pos, e in enumerate(path.edges, start=1):
            if e.color == c and pos % 2 == 0:
                ok = False
                break
            if e.color == 3 - c and pos % 2 == 1:
                ok = False
                break
        if ok:
            return c
    return None


@dataclass(frozen=True)
class NearlyAltPath:
    """A path together with the matching data off the path.

    The represented matching is ``M(P; i, j)``: odd-position edges before
    ``i``, even-position edges in ``[i, j)``, odd-position edges from ``j`` on,
    plus ``rest`` (matching edges not on the path).
    """

    path: AltPath
    i: int
    j: int
    rest: frozenset[Edge]
    _pf: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _base: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        L = len(self.path.vertices)
        if L % 2:
            raise BadParity("a nearly-alternating path has odd length")
        _check_positions(L, self.i, self.j)
        pf = []
        for c in (1, 2, 3):
            acc = [0, 0]
            for pos, e in enumerate(self.path.edges, start=1):
                sign = 1 if pos % 2 == 0 else -1
                acc.append(acc[-1] + (sign if e.color == c else 0))
            pf.append(tuple(acc))
        base = [0, 0, 0]
        for e in self.rest:
            base[e.color - 1] += 1
        for pos, e in enumerate(self.path.edges, start=1):
            if pos % 2 == 1:
                base[e.color - 1] += 1
        object.__setattr__(self, "_pf", tuple(pf))
        object.__setattr__(self, "_base", tuple(base))

    @property
    def length(self) -> int:
        """Number of vertices."""
        return len(self.path.vertices)

    @cached_property
    def ref_matching(self) -> Matching:
        return shift_matching(self, self.i, self.j)

    def at(self, i: int, j: int) -> NearlyAltPath:
        """The same path with the unsaturated vertices moved to ``(i, j)``."""
        _check_positions(self.length, i, j)
        # share the prefix tables instead of recomputing them
        new = object.__new__(NearlyAltPath)
        for name, value in (("path", self.path), ("i", i), ("j", j), ("rest", self.rest),
                            ("_pf", self._pf), ("_base", self._base)):
            object.__setattr__(new, name, value)
        return new

    def f(self, c: int, i: int | None = None, j: int | None = None) -> int:
        """f_c at positions ``(i, j)`` via prefix sums."""
        i = self.i if i is None else i
        j = self.j if j is None else j
        pf = self._pf[c - 1]
        return pf[j] - pf[i]

    def counts_at(self, i: int | None = None, j: int | None = None) -> tuple[int, int, int]:
        """Per-color counts of ``M(P; i, j)`` without building it."""
        return tuple(self._base[c - 1] + self.f(c, i, j) for c in (1, 2, 3))


def _check_positions(L: int, i: int, j: int) -> None:
    if not (1 <= i < j <= L):
        raise OutOfRange(f"positions ({i}, {j}) outside 1..{L}")
    if i % 2 == 0 or j % 2 == 1:
        raise BadParity(f"need odd i and even j, got ({i}, {j})")


def nearly_alt_path(inst: Instance, vertices: Sequence[int], matching: Matching | Iterable[Edge]) -> NearlyAltPath:
    """Wrap a path that is nearly-alternating for ``matching``."""
    edges = edge_set(matching)
    path = vertices if isinstance(vertices, AltPath) else AltPath.through(inst, vertices)
    if len(edges) != inst.n - 1:
        raise MatchingWrongSize(f"|M| = {len(edges)}, expected {inst.n - 1}")
    mate = mate_map(inst, edges)
    on_path = set(path.edges)
    free = [pos for pos, x in enumerate(path.vertices, start=1) if x not in mate]
    if len(free) != 2:
        raise PreconditionViolated("both unsaturated vertices must lie on the path")
    for x in path.vertices:
        if x in mate and inst.edge_between(x, mate[x]) not in on_path:
            raise PreconditionViolated(f"vertex {x} is matched off the path")
    i, j = free
    rest = frozenset(e for e in edges if e not in on_path)
    p = NearlyAltPath(path, i, j, rest)
    if p.ref_matching.edges != edges:
        raise PreconditionViolated("matching is not alternating along the path")
    return p


def shift_matching(p: NearlyAltPath, i2: int, j2: int) -> Matching:
    """``M(P; i2, j2) = (M_P Δ P[i2, j2]) ∪ (M \\ P)``."""
    _check_positions(p.length, i2, j2)
    chosen = set(p.rest)
    for pos, e in enumerate(p.path.edges, start=1):
        inside = i2 <= pos < j2
        if (pos % 2 == 1) != inside:
            chosen.add(e)
    return Matching(frozenset(chosen))


def f_c(p: NearlyAltPath, c: int) -> int:
    """Signed count of ``M_c`` edges between the unsaturated positions.

    Computed literally from the reference matching; ``NearlyAltPath.f`` is the
    prefix-sum equivalent used in hot loops.
    """
    m = p.ref_matching.edges
    total = 0
    for pos in range(p.i, p.j):
        e = p.path.edge(pos)
        if e.color == c:
            total += 1 if e in m else -1
    return total


# ----------------------------------------------------------- structure view


def component_walk(inst: Instance, mate: dict[int, int], start: int, c: int) -> list[int]:
    """Walk ``M_c``, matched, ``M_c``, ... from an unsaturated vertex.

    For a matching of size n-1 this ends at the other unsaturated vertex.
    """
    verts = [start]
    x = start
    while True:
        y = inst.nbr(x, c)
        verts.append(y)
        if y not in mate:
            return verts
        x = mate[y]
        verts.append(x)
        if len(verts) > 2 * inst.n:
            raise PreconditionViolated("walk does not terminate; not a matching of size n-1")


@dataclass(frozen=True)
class StructureView:
    matching: Matching
    u1: int
    u2: int
    p1: AltPath
    p2: AltPath
    c0_is_cycle: bool
    alt_cycles: tuple[tuple[int, ...], ...]

    @cached_property
    def c0_vertices(self) -> frozenset[int]:
        return frozenset(self.p1.vertices) | frozenset(self.p2.vertices)

    @cached_property
    def c0_cycle(self) -> tuple[int, ...]:
        """C0 as a cyclic sequence: P1 from u1 to u2, then P2 back."""
        if not self.c0_is_cycle:
            raise PreconditionViolated("C0 is not a cycle")
        return self.p1.vertices + self.p2.vertices[::-1][1:-1]

    @cached_property
    def cycle_vertices(self) -> frozenset[int]:
        return frozenset(x for cyc in self.alt_cycles for x in cyc)

    def p(self, c: int) -> AltPath:
        return self.p1 if c == 1 else self.p2


def structure_view(inst: Instance, matching: Matching | Iterable[Edge], start: int | None = None) -> StructureView:
    """P1(M), P2(M), C0(M) and the M-alternating cycles of M1 ∪ M2.

    ``start`` picks which unsaturated vertex is called u1; by default the
    A-side one.
    """
    edges = edge_set(matching)
    if len(edges) != inst.n - 1:
        raise MatchingWrongSize(f"|M| = {len(edges)}, expected {inst.n - 1}")
    mate = mate_map(inst, edges)
    free = [x for x in range(2 * inst.n) if x not in mate]
    if start is None:
        u1, u2 = free
    elif start in free:
        u1, u2 = start, free[1 - free.index(start)]
    else:
        raise VertexSaturated(f"vertex {start} is saturated")
    p1 = AltPath.through(inst, component_walk(inst, mate, u1, 1))
    p2 = AltPath.through(inst, component_walk(inst, mate, u1, 2))
    has_m3 = any(e.color == 3 for e in p1.edges + p2.edges)
    alt = []
    for cyc in cycle_decomposition(inst, 1, 2):
        if all(x in mate and inst.edge_between(x, mate[x]).color != 3 for x in cyc):
            alt.append(cyc)
    m = matching if isinstance(matching, Matching) else Matching(edges)
    return StructureView(m, u1, u2, p1, p2, not has_m3, tuple(alt))


def alternating_reachability(inst: Instance, matching: Matching | Iterable[Edge], v: int) -> dict[int, int | None]:
    """Predecessor map of an alternating search from unsaturated ``v``.

    The search leaves ``v`` along non-matching edges and afterwards alternates
    matched / unmatched steps.
    """
    edges = edge_set(matching)
    mate = mate_map(inst, edges)
    if v in mate:
        raise VertexSaturated(f"vertex {v} is saturated")
    pred: dict[int, int | None] = {v: None}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        # x was reached by a matched edge (or is v): continue with free edges
        for c in inst.colors:
            y = inst.nbr(x, c)
            if y in pred or mate.get(x) == y:
                continue
            pred[y] = x
            z = mate.get(y)
            if z is not None and z not in pred:
                pred[z] = y
                queue.append(z)
    if len(pred) != 2 * inst.n:
        raise Disconnected(f"reached {len(pred)} of {2 * inst.n} vertices")
    return pred


def path_from_pred(pred: dict[int, int | None], w: int) -> list[int]:
    out = [w]
    while pred[out[-1]] is not None:
        out.append(pred[out[-1]])
    return out[::-1]


def max_alt_walk(inst: Instance, matching: Matching | Iterable[Edge], start: int) -> AltPath:
    """The maximal walk alternating ``M_3`` and matching edges from ``start``."""
    mate = mate_map(inst, edge_set(matching))
    if start in mate:
        raise StartSaturated(f"vertex {start} is saturated")
    verts = [start]
    seen = {start}
    x = start
    while True:
        y = inst.nbr(x, 3)
        if y in seen:
            raise PreconditionViolated("matching shares edges with M3")
        verts.append(y)
        seen.add(y)
        if y not in mate:
            return AltPath.through(inst, verts)
        x = mate[y]
        if x in seen:
            raise PreconditionViolated("matching shares edges with M3")
        verts.append(x)
        seen.add(x)
