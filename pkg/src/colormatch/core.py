"""Instances, matchings, components and verification.

An instance on ``2n`` vertices is stored as ``k`` permutations; ``perms[c][u]``
is the B-side partner of A-side vertex ``u`` in matching ``M_{c+1}``.  The
solver works with ``k == 3``; the brute-force oracle also accepts ``k == 4``.

Vertices are integers: A-vertex ``u`` is ``u`` and B-vertex ``v`` is ``n + v``.
An edge is keyed by ``(u, color)``; its B endpoint is always derived.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    LengthMismatch,
    MatchingsOverlap,
    NotABijection,
    NTooSmall,
)


class Edge(NamedTuple):
    u: int
    color: int


@dataclass(frozen=True)
class Instance:
    n: int
    perms: tuple[tuple[int, ...], ...]
    inverse: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        inv = []
        for p in self.perms:
            q = [0] * self.n
            for u, v in enumerate(p):
                q[v] = u
            inv.append(tuple(q))
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def k(self) -> int:
        return len(self.perms)

    @property
    def colors(self) -> range:
        return range(1, self.k + 1)

    def is_a(self, x: int) -> bool:
        return x < self.n

    def nbr(self, x: int, c: int) -> int:
        """The other endpoint of the ``M_c`` edge at vertex ``x``."""
        if x < self.n:
            return self.n + self.perms[c - 1][x]
        return self.inverse[c - 1][x - self.n]

    def endpoints(self, e: Edge) -> tuple[int, int]:
        return e.u, self.n + self.perms[e.color - 1][e.u]

    def edge_between(self, x: int, y: int) -> Edge | None:
        if x >= self.n:
            x, y = y, x
        if x >= self.n or y < self.n:
            return None
        b = y - self.n
        for c in self.colors:
            if self.perms[c - 1][x] == b:
                return Edge(x, c)
        return None

    def edge_at(self, x: int, c: int) -> Edge:
        return Edge(x if x < self.n else self.inverse[c - 1][x - self.n], c)

    def with_colors(self, order: Sequence[int]) -> Instance:
        """Relabel colors: new color ``i + 1`` is old color ``order[i]``."""
        return Instance(self.n, tuple(self.perms[c - 1] for c in order))

    def to_text(self) -> str:
        lines = [str(self.n)] + [" ".join(map(str, p)) for p in self.perms]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, k: int | None = None) -> Instance:
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or len(rows[0]) != 1:
            raise LengthMismatch("first line must hold n alone")
        try:
            n = int(rows[0][0])
            perms = [[int(tok) for tok in row] for row in rows[1:]]
        except ValueError as exc:
            raise LengthMismatch(f"non-integer token: {exc}") from None
        return validate_instance(n, perms, k=k)


def validate_instance(n: int, perms: Sequence[Sequence[int]], k: int | None = 3) -> Instance:
    """Check a raw instance and return it as an :class:`Instance`.

    ``k=None`` accepts any number (at least three) of permutations.
    """
    if k is not None and len(perms) != k:
        raise LengthMismatch(f"expected {k} permutations, got {len(perms)}")
    if len(perms) < 3:
        raise LengthMismatch(f"need at least 3 permutations, got {len(perms)}")
    if n < len(perms):
        # k pairwise-discordant permutations of an n-set need n >= k
        raise NTooSmall(f"n={n} cannot carry {len(perms)} disjoint perfect matchings")
    for c, p in enumerate(perms, start=1):
        if len(p) != n:
            raise LengthMismatch(f"M{c} has {len(p)} entries, expected {n}")
        if sorted(p) != list(range(n)):
            raise NotABijection(c)
    for u in range(n):
        seen: dict[int, int] = {}
        for c, p in enumerate(perms, start=1):
            if p[u] in seen:
                raise MatchingsOverlap(u, seen[p[u]], c)
            seen[p[u]] = c
    return Instance(n, tuple(tuple(int(x) for x in p) for p in perms))


def cyclic_instance(n: int, shifts: Sequence[int] = (0, 1, 2)) -> Instance:
    """``perms[c][u] = u + shifts[c] (mod n)``."""
    return validate_instance(n, [[(u + s) % n for u in range(n)] for s in shifts], k=None)


def disjoint_union(*parts: Instance) -> Instance:
    k = parts[0].k
    perms: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for part in parts:
        for c in range(k):
            perms[c].extend(offset + v for v in part.perms[c])
        offset += part.n
    return validate_instance(offset, perms, k=k)


@dataclass(frozen=True)
class Matching:
    edges: frozenset[Edge]

    @classmethod
    def of(cls, edges: Iterable[Iterable[int]]) -> Matching:
        return cls(frozenset(Edge(int(u), int(c)) for u, c in edges))

    @cached_property
    def counts(self) -> tuple[int, ...]:
        k = max((e.color for e in self.edges), default=3)
        out = [0] * max(k, 3)
        for e in self.edges:
            out[e.color - 1] += 1
        return tuple(out)

    def count(self, c: int) -> int:
        return sum(1 for e in self.edges if e.color == c)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    def to_json(self) -> str:
        edges = [[e.u, e.color] for e in sorted(self.edges)]
        return json.dumps({"edges": edges, "counts": list(self.counts)})

    @classmethod
    def from_json(cls, text: str) -> Matching:
        return cls.of(json.loads(text)["edges"])


def mate_map(inst: Instance, edges: Iterable[Edge]) -> dict[int, int]:
    """Vertex -> matched partner, both directions."""
    mate: dict[int, int] = {}
    for e in edges:
        a, b = inst.endpoints(e)
        mate[a] = b
        mate[b] = a
    return mate


def unsaturated(inst: Instance, edges: Iterable[Edge]) -> list[int]:
    mate = mate_map(inst, edges)
    return [x for x in range(2 * inst.n) if x not in mate]


# ---------------------------------------------------------------- components


@dataclass(frozen=True)
class Component:
    a_vertices: tuple[int, ...]
    b_vertices: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.a_vertices)

    @property
    def size(self) -> int:
        return 2 * self.m

    @cached_property
    def a_index(self) -> dict[int, int]:
        return {u: i for i, u in enumerate(self.a_vertices)}

    @cached_property
    def b_index(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.b_vertices)}

    def lift(self, matching: Matching) -> Matching:
        """Map a matching of the restricted instance back to the parent."""
        return Matching(frozenset(Edge(self.a_vertices[e.u], e.color) for e in matching.edges))

    def lower(self, matching: Matching) -> Matching:
        return Matching(frozenset(Edge(self.a_index[e.u], e.color) for e in matching.edges if e.u in self.a_index))


def components(inst: Instance) -> list[Component]:
    """Connected components of the union graph, smallest first."""
    n = inst.n
    seen = [False] * (2 * n)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        verts = []
        while queue:
            x = queue.popleft()
            verts.append(x)
            for c in inst.colors:
                y = inst.nbr(x, c)
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
        a = tuple(sorted(x for x in verts if x < n))
        b = tuple(sorted(x - n for x in verts if x >= n))
        comps.append(Component(a, b))
    comps.sort(key=lambda comp: (comp.size, comp.a_vertices[0]))
    return comps


def is_connected(inst: Instance) -> bool:
    return len(components(inst)) == 1


def restrict(inst: Instance, comp: Component) -> Instance:
    perms = []
    for c in range(inst.k):
        perms.append(tuple(comp.b_index[inst.perms[c][u]] for u in comp.a_vertices))
    return Instance(comp.m, tuple(perms))


def remove_component(inst: Instance, comp: Component) -> tuple[Instance, Component]:
    """The instance on the complement of ``comp``, plus its embedding."""
    a_in = set(comp.a_vertices)
    b_in = set(comp.b_vertices)
    rest = Component(
        tuple(u for u in range(inst.n) if u not in a_in),
        tuple(v for v in range(inst.n) if v not in b_in),
    )
    return restrict(inst, rest), rest


# -------------------------------------------------------------- verification


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    reason: str | None = None
    detail: str = ""

    def to_json(self) -> str:
        return json.dumps({"ok": self.ok, "reason": self.reason, "detail": self.detail})


def verify_matching(inst: Instance, matching: Matching, target: Sequence[int] | None = None) -> VerifyReport:
    """Check edge existence, vertex-disjointness and (optionally) exact counts."""
    for e in sorted(matching.edges):
        if not (0 <= e.u < inst.n and 1 <= e.color <= inst.k):
            return VerifyReport(False, "edge-existence", f"no edge {tuple(e)}")
    a_seen: set[int] = set()
    b_seen: set[int] = set()
    for e in sorted(matching.edges):
        b = inst.perms[e.color - 1][e.u]
        if e.u in a_seen:
            return VerifyReport(False, "disjointness", f"A-vertex {e.u} covered twice")
        if b in b_seen:
            return VerifyReport(False, "disjointness", f"B-vertex {b} covered twice")
        a_seen.add(e.u)
        b_seen.add(b)
    if target is not None:
        got = [matching.count(c) for c in range(1, len(target) + 1)]
        extra = sum(1 for e in matching.edges if e.color > len(target))
        if got != list(target) or extra:
            return VerifyReport(False, "counts", f"counts {got} != target {list(target)}")
    return VerifyReport(True)
