"""One-step color exchange on connected instances.

Given a matching of size ``n - 1`` with counts ``(a1, a2, a3)`` and
``a3 >= 1``, :func:`switch` returns one with ``(a1 + 1, a2, a3 - 1)``
(direction 1) or ``(a1, a2 + 1, a3 - 1)`` (direction 2).

The pipeline is an existence argument turned into code.  Every place where
the argument picks an extremal object is realized as a repair loop with a
strictly decreasing measure, and every place where it derives a contradiction
from "no better matching exists" is realized by building that better matching
and returning it.  Internal invariants are checked as we go; a failed check
raises :class:`~colormatch.errors.InternalError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import trace
from .core import Edge, Instance, Matching, is_connected, mate_map
from .errors import (
    A3Zero,
    IterationGuardExceeded,
    KOutOfRange,
    NotConnected,
    PreconditionViolated,
    check,
)
from .structure import (
    AltPath,
    NearlyAltPath,
    StructureView,
    alternating_reachability,
    edge_set,
    is_good,
    nearly_alt_path,
    path_from_pred,
    structure_view,
)

GUARD_FACTOR = 16


class _Guard:
    def __init__(self, n: int):
        self.limit = GUARD_FACTOR * n * n
        self.steps = 0

    def tick(self, what: str) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise IterationGuardExceeded(f"more than {self.limit} pipeline steps (last: {what})")


def _counts(edges) -> tuple[int, int, int]:
    out = [0, 0, 0]
    for e in edges:
        out[e.color - 1] += 1
    return tuple(out)


def _path_edges(inst: Instance, verts: Sequence[int]) -> list[Edge]:
    return [inst.edge_between(x, y) for x, y in zip(verts, verts[1:])]


def _is_matching(inst: Instance, edges) -> bool:
    return len(mate_map(inst, edges)) == 2 * len(edges)


def _alternates_from_free(inst: Instance, edges, verts: Sequence[int]) -> bool:
    """True if ``verts`` is a simple path starting at a free vertex whose
    edges alternate unmatched, matched, unmatched, ..."""
    if len(set(verts)) != len(verts):
        return False
    for pos, e in enumerate(_path_edges(inst, verts), start=1):
        if e is None or (e in edges) != (pos % 2 == 0):
            return False
    return True


# --------------------------------------------------------------- cycle tools


def _orient(inst: Instance, cycle: Sequence[int], v: int, first_color: int) -> list[int]:
    """The cycle as a list starting at ``v`` whose first edge has ``first_color``."""
    idx = cycle.index(v)
    seq = list(cycle[idx:]) + list(cycle[:idx])
    ring = [inst.edge_between(x, y) for x, y in zip(seq, seq[1:] + seq[:1])]
    if len(seq) % 2 or any(e is None or e.color == 3 for e in ring) or len({e.color for e in ring[::2]}) != 1:
        raise PreconditionViolated("vertex sequence is not an (M1, M2)-cycle")
    if inst.edge_between(seq[0], seq[1]).color != first_color:
        seq = [seq[0]] + seq[1:][::-1]
    check(inst.edge_between(seq[0], seq[1]).color == first_color, "cycle does not alternate")
    return seq


def _cycle_edges(inst: Instance, cycle: Sequence[int]) -> list[Edge]:
    return _path_edges(inst, list(cycle) + [cycle[0]])


def rotate_cycle_matching(inst: Instance, cycle: Sequence[int], v: int, c: int, k: int) -> Matching:
    """A matching on an (M1, M2)-cycle with ``k`` edges of ``M_c``,
    ``|C|/2 - 1 - k`` edges of ``M_{3-c}``, leaving ``v`` unsaturated."""
    half = len(cycle) // 2
    if not 0 <= k < half:
        raise KOutOfRange(f"k={k} outside [0, {half})")
    if v not in cycle:
        raise PreconditionViolated(f"vertex {v} is not on the cycle")
    seq = _orient(inst, cycle, v, 3 - c)

    def edge(s: int) -> Edge:  # 1-based position on the oriented cycle
        return inst.edge_between(seq[s - 1], seq[s % len(seq)])

    chosen = {edge(2 * s) for s in range(1, k + 1)}
    chosen |= {edge(2 * s - 1) for s in range(k + 2, half + 1)}
    return Matching(frozenset(chosen))


def _arc(cycle: Sequence[int], a: int, nxt: int, b: int) -> list[int]:
    """Walk the cycle from ``a`` through its neighbour ``nxt`` until ``b``."""
    size = len(cycle)
    idx = cycle.index(a)
    step = 1 if cycle[(idx + 1) % size] == nxt else -1
    check(cycle[(idx + step) % size] == nxt, "arc start is not a cycle neighbour")
    out = [a]
    while out[-1] != b:
        idx = (idx + step) % size
        out.append(cycle[idx])
    return out


# ------------------------------------------------------------- C0 dichotomy


def resolve_c0(inst: Instance, matching: Matching) -> Matching | StructureView:
    """Either improve ``matching`` by one M3 -> M1 exchange or certify that
    C0(M) is an (M1, M2)-alternating cycle (returned as the view)."""
    edges = edge_set(matching)
    a1, a2, a3 = _counts(edges)
    if a3 == 0:
        raise A3Zero("matching has no M3 edge")
    view = structure_view(inst, edges)
    u1, u2 = view.u1, view.u2
    direct = inst.edge_between(u1, u2)
    if direct is not None and direct.color == 1:
        drop = min(e for e in edges if e.color == 3)
        trace.emit("c0.direct_edge", edge=list(direct), dropped=list(drop))
        return Matching(frozenset(edges - {drop} | {direct}))
    if view.c0_is_cycle:
        trace.emit("c0.cycle", length=len(view.c0_cycle))
        return view

    w1 = list(view.p1.vertices)  # u1 -> u2
    w2 = list(view.p2.vertices[::-1])  # u2 -> u1

    def first_m3(verts: list[int]) -> int | None:
        for s, e in enumerate(_path_edges(inst, verts)[1::2], start=1):
            if e.color == 3:
                return s
        return None

    inf = float("inf")
    ell1 = first_m3(w1) or inf
    ell2 = first_m3(w2) or inf
    if ell1 <= ell2:
        first, second = w1, w2
        len1, len2 = 2 * ell1, 2 * (ell1 - 1)
        case = 1
    else:
        first, second = w2, w1
        len1, len2 = 2 * ell2, 2 * ell2
        case = 2
    out = set(edges) ^ set(_path_edges(inst, first[: len1 + 1]))
    # the second path may run on through the start of the first one
    extended = second + first[1:]
    out ^= set(_path_edges(inst, extended[: len2 + 1]))
    check(_is_matching(inst, out), "C0 exchange broke the matching")
    check(_counts(out) == (a1 + 1, a2, a3 - 1), "C0 exchange produced wrong counts")
    trace.emit("c0.exchange", case=case, ell1=ell1 if ell1 != inf else None, ell2=ell2 if ell2 != inf else None)
    return Matching(frozenset(out))


# ----------------------------------------------------------------- P0 search


@dataclass(frozen=True)
class P0Certificate:
    matching: Matching
    path: AltPath
    view: StructureView
    color: int

    @property
    def u1(self) -> int:
        return self.view.u1


def _cycle_index(view: StructureView) -> dict[int, int]:
    return {x: idx for idx, cyc in enumerate(view.alt_cycles) for x in cyc}


def _interval_violation(inst: Instance, view: StructureView, verts: Sequence[int]):
    """First alternating cycle whose trace on the path is not a common sub-path."""
    where = _cycle_index(view)
    spots: dict[int, list[int]] = {}
    for pos, x in enumerate(verts):
        if x in where:
            spots.setdefault(where[x], []).append(pos)
    for cid, idx in spots.items():
        lo, hi = idx[0], idx[-1]
        contiguous = idx == list(range(lo, hi + 1))
        if contiguous:
            contiguous = all(inst.edge_between(verts[s], verts[s + 1]).color != 3 for s in range(lo, hi))
        if not contiguous:
            return cid, lo, hi
    return None


def _m3_count(inst: Instance, verts: Sequence[int]) -> int:
    return sum(1 for e in _path_edges(inst, verts) if e.color == 3)


def find_p0(inst: Instance, matching: Matching, guard: _Guard | None = None) -> P0Certificate:
    """Find (M, P0) with C0(M) a cycle and P0 leaving C0 ∪ 𝒞(M) cleanly.

    ``matching`` must already be certified (C0 a cycle).  The returned
    matching has the same counts but may differ on cycles of M1 ∪ M2.
    """
    guard = guard or _Guard(inst.n)
    edges = set(edge_set(matching))
    counts0 = _counts(edges)
    view = structure_view(inst, edges)
    check(view.c0_is_cycle, "find_p0 needs C0 to be a cycle")
    start = view.u1
    outside = view.c0_vertices | view.cycle_vertices
    pred = alternating_reachability(inst, edges, start)
    # pred preserves discovery order, so this is a nearest outside vertex
    target = next(w for w in pred if w not in outside)
    path = path_from_pred(pred, target)

    # phase 1: properties (i)-(iv), measure (#M3 edges, length)
    last = None
    while True:
        guard.tick("p0.phase1")
        view = structure_view(inst, edges, start=start)
        check(view.c0_is_cycle, "C0 stopped being a cycle")
        inside = view.c0_vertices | view.cycle_vertices
        ell = next(pos for pos, x in enumerate(path) if x not in inside)
        P = path[: ell + 1]
        measure = (_m3_count(inst, P), len(P))
        check(last is None or measure < last, f"phase-1 measure did not drop: {last} -> {measure}")
        last = measure
        mate = mate_map(inst, edges)
        check(_alternates_from_free(inst, edges, P), "P is not alternating")
        ext = P + [mate[P[-1]]]

        hits = [pos for pos, x in enumerate(ext) if pos > 0 and x in view.c0_vertices]
        if hits:
            pos = hits[-1]
            cyc = view.c0_cycle
            on_c0 = {e for e in _cycle_edges(inst, cyc) if e in edges}
            k1 = sum(1 for e in on_c0 if e.color == 1)
            edges = (edges - on_c0) | set(rotate_cycle_matching(inst, cyc, ext[pos], 1, k1).edges)
            start = ext[pos]
            path = P[pos:]
            trace.emit("p0.repair_c0", position=pos, m3=measure[0], length=measure[1])
            continue

        bad = _interval_violation(inst, view, ext)
        if bad is not None:
            cid, lo, hi = bad
            cyc = view.alt_cycles[cid]
            x = ext[lo]
            came_matched = mate.get(ext[lo - 1]) == x
            nbrs = [inst.nbr(x, 1), inst.nbr(x, 2)]
            nxt = mate[x] if not came_matched else next(y for y in nbrs if y != mate[x])
            path = ext[:lo] + _arc(cyc, x, nxt, ext[hi]) + ext[hi + 1 : ell + 1]
            trace.emit("p0.reroute", cycle=cid, m3=measure[0], length=measure[1])
            continue
        break

    # phase 2: property (v), measure (#M3 edges, last M ∩ M_cbar position)
    c = inst.edge_between(ext[-2], ext[-1]).color
    check(c in (1, 2), "last edge of P0 must be an M1 or M2 edge")
    cb = 3 - c
    last = None
    while True:
        guard.tick("p0.phase2")
        view = structure_view(inst, edges, start=start)
        mate = mate_map(inst, edges)
        where = _cycle_index(view)
        p_edges = _path_edges(inst, ext)
        last_cb = max((pos for pos, e in enumerate(p_edges, start=1) if e in edges and e.color == cb), default=0)
        measure = (_m3_count(inst, ext), last_cb)
        check(last is None or measure < last, f"phase-2 measure did not drop: {last} -> {measure}")
        last = measure
        visited: list[int] = []
        for x in ext:
            if x in where and where[x] not in visited:
                visited.append(where[x])
        wrong = [cid for cid in visited if inst.edge_between(view.alt_cycles[cid][0], mate[view.alt_cycles[cid][0]]).color == cb]
        if not wrong:
            break
        cj = view.alt_cycles[wrong[-1]]
        c0 = view.c0_cycle
        c0_m = {e for e in _cycle_edges(inst, c0) if e in edges}
        k = sum(1 for e in c0_m if e.color == c)
        half_j = len(cj) // 2
        spots = [pos for pos, x in enumerate(ext) if x in set(cj)]
        if half_j <= k:
            edges = (edges - c0_m) | set(rotate_cycle_matching(inst, c0, start, c, k - half_j).edges)
            cj_edges = _cycle_edges(inst, cj)
            edges = (edges - {e for e in cj_edges if e.color == cb}) | {e for e in cj_edges if e.color == c}
            lo, hi = spots[0], spots[-1]
            other = next(y for y in (inst.nbr(ext[lo], 1), inst.nbr(ext[lo], 2)) if y != ext[lo + 1])
            ext = ext[:lo] + _arc(cj, ext[lo], other, ext[hi]) + ext[hi + 1 :]
            trace.emit("p0.flip_cycle", case=1, cycle_half=half_j, k=k)
        else:
            h = spots[-1]
            cj_m = {e for e in _cycle_edges(inst, cj) if e in edges}
            edges = (edges - c0_m) | {e for e in _cycle_edges(inst, c0) if e.color == cb}
            edges = (edges - cj_m) | set(rotate_cycle_matching(inst, cj, ext[h], c, k).edges)
            start = ext[h]
            ext = ext[h:]
            trace.emit("p0.flip_cycle", case=2, cycle_half=half_j, k=k)
        check(_counts(edges) == counts0, "phase-2 repair changed the counts")
        check(_alternates_from_free(inst, edges, ext), "phase-2 repair broke alternation")

    view = structure_view(inst, edges, start=start)
    cert = P0Certificate(Matching(frozenset(edges)), AltPath.through(inst, ext), view, c)
    _check_p0(inst, cert)
    return cert


def _check_p0(inst: Instance, cert: P0Certificate) -> None:
    view, verts = cert.view, cert.path.vertices
    edges = cert.matching.edges
    check(view.c0_is_cycle, "P0: C0 is not a cycle")
    check(verts[0] == view.u1, "P0 must start at u1")
    check(_alternates_from_free(inst, edges, verts), "P0 is not M-alternating")
    outside = view.c0_vertices | view.cycle_vertices
    check(verts[-1] not in outside and verts[-2] not in outside, "P0 (i): last two vertices")
    check(all(x in view.cycle_vertices for x in verts[1:-2]), "P0 (i): inner vertices")
    check(cert.path.edges[-1] in edges, "P0 (ii): last edge")
    check(not (set(verts) & view.c0_vertices) - {view.u1}, "P0 (iii): meets C0 again")
    check(_interval_violation(inst, view, verts) is None, "P0 (iv): interval property")
    colors = {e.color for e in cert.path.edges if e in edges}
    check(colors == {cert.color}, "P0 (v): matched edges of two colors")
    where = _cycle_index(view)
    r = len({where[x] for x in verts if x in where})
    check(_m3_count(inst, verts) == r + 1, "P0 must carry exactly r+1 M3 edges")


# --------------------------------------------------------- switching path


@dataclass(frozen=True)
class SwitchCertificate:
    path: NearlyAltPath
    h: int
    t: int
    c: int

    @property
    def k(self) -> int:
        return self.path.length

    @property
    def matching(self) -> Matching:
        return self.path.ref_matching


def _is_c_good(path: AltPath, c: int) -> bool:
    return all(
        not (e.color == c and pos % 2 == 0) and not (e.color == 3 - c and pos % 2 == 1)
        for pos, e in enumerate(path.edges, start=1)
    )


def find_switch_path(inst: Instance, cert: P0Certificate) -> SwitchCertificate:
    """Glue P_c(M), P0 and the exit cycle into one c-good nearly-alternating path."""
    edges = cert.matching.edges
    mate = mate_map(inst, edges)
    view, c = cert.view, cert.color
    cb = 3 - c
    pc = list(view.p(c).vertices[::-1])  # u2 -> u1
    p0 = list(cert.path.vertices)
    v_l, x = p0[-2], p0[-1]
    tail = [x]
    while True:
        y = inst.nbr(x, cb)
        if y == v_l:
            break
        tail.append(y)
        x = mate[y]
        tail.append(x)
        check(len(tail) <= 2 * inst.n, "exit cycle walk does not close")
    verts = pc + p0[1:] + tail[1:]
    p = nearly_alt_path(inst, verts, edges)
    h = len(pc)
    t = h + len(p0) - 2
    k = len(verts)
    sc = SwitchCertificate(p, h, t, c)

    w = p.path
    check(p.i == 1 and p.j == h and h % 2 == 0 and 1 < h < k, "(a) unsaturated positions")
    check(all(w.edge(s).color != 3 for s in range(1, h)), "(b) P[1,h] must avoid M3")
    check(p.f(3) == 0, "(b) f3 must vanish")
    check(t % 2 == 1 and h < t < k - 2, "(c) position t")
    check(w.edge(t - 1).color == 3 and w.edge(t - 1) not in edges, "(c) w_{t-1} w_t in M3 \\ M")
    closing = inst.edge_between(w.vertex(t), w.vertex(k))
    check(closing is not None and closing.color == cb, "(c) w_t w_k in M_cbar")
    check(all((w.edge(s).color == c) == (s % 2 == 1) for s in range(1, t)), "(d) prefix M_c-alternating")
    cyc_edges = [w.edge(s) for s in range(t, k)] + [closing]
    check(all((e in edges) != (e.color == cb) for e in cyc_edges), "(e) cycle alternation")
    check(any(e in edges and e.color == 3 for e in cyc_edges), "(e) cycle carries an M3 ∩ M edge")
    check(k - t + 1 >= 4, "(e) exit cycle too short")
    check(_is_c_good(w, c), "switch path is not c-good")
    trace.emit("switch.path", k=k, h=h, t=t, c=c)
    return sc


# ------------------------------------------------------------- path moves


def can_move_step(p: NearlyAltPath) -> NearlyAltPath | None:
    """Move the unsaturated pair two steps forward keeping a2 fixed.

    Returns ``None`` when the step's hypotheses fail.
    """
    i, j, L = p.i, p.j, p.length
    if j > L - 2:
        return None
    col = lambda pos: p.path.edge(pos).color  # noqa: E731
    if i + 1 == j and col(i) == 3:
        return None
    if col(j) != 2 and col(j + 1) != 2:
        nxt = (i, j + 2)
    elif i <= j - 3 and col(i) != 2 and col(i + 1) != 2:
        nxt = (i + 2, j)
    else:
        nxt = (i + 2, j + 2)
    q = p.at(*nxt)
    before, after = p.counts_at(), q.counts_at()
    check(before[1] == after[1], "can-move step changed a2")
    check(abs(before[2] - after[2]) <= 1, "can-move step moved a3 by more than one")
    trace.emit("move.step", frm=[i, j], to=list(nxt), a2=[before[1], after[1]], a3=[before[2], after[2]])
    return q


def _has_m2(p: NearlyAltPath, i: int, j: int) -> bool:
    return any(p.path.edge(pos).color == 2 for pos in range(i, j))


def _iv_positions(p: NearlyAltPath, src: tuple[int, int], dst: tuple[int, int]) -> list[tuple[int, int]]:
    (i, j), (i2, j2) = src, dst
    if i <= i2 and j2 <= j:
        return [(s, j) for s in range(i, i2 + 1, 2)] + [(i2, s) for s in range(j - 2, j2 - 1, -2)]
    if i2 <= i and j <= j2:
        return _iv_positions(p, dst, src)[::-1]
    if not _has_m2(p, i, j):
        return [(s, j) for s in range(i, j, 2)] + [(s, j2) for s in range(j2 - 1, i2 - 1, -2)]
    if i2 < i:
        return _iv_positions(p, dst, src)[::-1]
    seq = [(i, j)]
    cur = p.at(i, j)
    while cur.i != i2 and cur.j != j2:
        cur = can_move_step(cur)
        check(cur is not None, "intermediate walk stalled")
        seq.append((cur.i, cur.j))
    if cur.i == i2:
        seq += [(i2, s) for s in range(cur.j + 2, j2 + 1, 2)]
    else:
        seq += [(s, j2) for s in range(cur.i + 2, i2 + 1, 2)]
    return seq


def intermediate_value(p: NearlyAltPath, q: NearlyAltPath, a3_star: int) -> Matching:
    """A matching with exactly ``a3_star`` M3 edges (and the common a2)
    between the shifts ``p`` and ``q`` of one good path."""
    if p.path != q.path or p.rest != q.rest:
        raise PreconditionViolated("both matchings must live on the same path and agree off it")
    if is_good(p.path) is None:
        raise PreconditionViolated("path is not good")
    cp, cq = p.counts_at(), q.counts_at()
    if cp[1] != cq[1]:
        raise PreconditionViolated("a2 differs")
    if not min(cp[2], cq[2]) <= a3_star <= max(cp[2], cq[2]):
        raise PreconditionViolated("a3* is not between the two a3 values")
    seq = _iv_positions(p, (p.i, p.j), (q.i, q.j))
    check(seq[0] == (p.i, p.j) and seq[-1] == (q.i, q.j), "sequence has the wrong endpoints")
    prev = None
    for pos in seq:
        counts = p.counts_at(*pos)
        check(counts[1] == cp[1], "a2 drifted along the sequence")
        check(prev is None or abs(prev - counts[2]) <= 1, "a3 jumped along the sequence")
        prev = counts[2]
        if counts[2] == a3_star:
            out = p.at(*pos).ref_matching
            trace.emit("iv.result", positions=list(pos), a3_star=a3_star, a3=out.count(3), a2=out.count(2))
            return out
    raise PreconditionViolated("sequence never reached a3*")  # unreachable given the checks


# ---------------------------------------------------------------- switch


def switch(inst: Instance, matching: Matching, direction: int = 1) -> Matching:
    """Trade one M3 edge for one edge of ``M_direction``."""
    if direction not in (1, 2):
        raise PreconditionViolated("direction must be 1 or 2")
    if not is_connected(inst):
        raise NotConnected("switching needs a connected instance")
    edges = edge_set(matching)
    if len(edges) != inst.n - 1:
        raise PreconditionViolated(f"matching must have n-1 = {inst.n - 1} edges")
    a = _counts(edges)
    if a[2] == 0:
        raise A3Zero("no M3 edge to trade")
    if direction == 2:
        swapped = inst.with_colors((2, 1, 3))
        flip = {1: 2, 2: 1, 3: 3}
        res = _switch_up(swapped, frozenset(Edge(e.u, flip[e.color]) for e in edges))
        out = Matching(frozenset(Edge(e.u, flip[e.color]) for e in res.edges))
    else:
        out = _switch_up(inst, edges)
    want = (a[0] + (direction == 1), a[1] + (direction == 2), a[2] - 1)
    check(_is_matching(inst, out.edges), "switch output is not a matching")
    check(out.counts == want, f"switch produced {out.counts}, wanted {want}")
    return out


def _switch_up(inst: Instance, edges: frozenset[Edge]) -> Matching:
    guard = _Guard(inst.n)
    a1, a2, a3 = _counts(edges)
    goal = a3 - 1
    res = resolve_c0(inst, Matching(edges))
    if isinstance(res, Matching):
        return res
    cert = find_switch_path(inst, find_p0(inst, res.matching, guard))
    p = cert.path
    t, k = cert.t, cert.k

    cur = p
    while True:
        guard.tick("move")
        if cur.counts_at()[2] == goal:
            trace.emit("switch.done", via="walk", positions=[cur.i, cur.j])
            return cur.ref_matching
        nxt = can_move_step(cur)
        if nxt is None:
            break
        cur = nxt
    check(cur.j == k, "walk stopped before the end of the path")

    best = max(i for i in range(1, k, 2) if p.counts_at(i, k)[1] == a2)
    m_ik = p.at(best, k)
    a3_ik = m_ik.counts_at()[2]
    if a3_ik < a3:
        trace.emit("switch.done", via="iv_direct", i=best)
        return intermediate_value(p, m_ik, goal)

    if best >= t:
        # the walk ended inside the exit cycle; C0 of this matching is that
        # cycle, which carries an M3 edge, so the C0 exchange must fire
        trace.emit("switch.case", case=1, i=best)
        again = resolve_c0(inst, m_ik.ref_matching)
        check(isinstance(again, Matching), "re-entry did not yield an exchange")
        return again

    trace.emit("switch.case", case=2, i=best, c=cert.c)
    return _finish_case2(inst, cert, m_ik, best, goal)


def _finish_case2(inst: Instance, cert: SwitchCertificate, m_ik: NearlyAltPath, i: int, goal: int) -> Matching:
    p, h, t, k, c = cert.path, cert.h, cert.t, cert.k, cert.c
    w = p.path
    a2 = p.counts_at()[1]
    base = m_ik.ref_matching.edges
    e_m3 = w.edge(t - 1)
    e_close = inst.edge_between(w.vertex(t), w.vertex(k))
    check(i <= t - 2 and e_m3 in base, "case 2 needs w_t matched by its M3 edge")
    if c == 2:
        star = set(base) - {e_m3} | {e_close}
        i_star = i
    else:
        e_in, e_out = w.edge(i), w.edge(i + 1)
        check(e_in.color == 1 and e_in not in base, "w_i w_{i+1} must be a free M1 edge")
        check(e_out.color == 2 and e_out in base, "w_{i+1} w_{i+2} must be a matched M2 edge")
        star = set(base) - {e_m3, e_out} | {e_close, e_in}
        i_star = i + 2
    star_counts = _counts(star)
    check(star_counts[1] == a2 and star_counts[2] == m_ik.counts_at()[2] - 1, "M* has wrong counts")
    if star_counts[2] == goal:
        trace.emit("switch.done", via="m_star")
        return Matching(frozenset(star))

    cut = AltPath(w.vertices[: t - 1], w.edges[: t - 2])
    cyc = [w.edge(s) for s in range(t, k)] + [e_close]
    m_delta = set(p.ref_matching.edges) ^ set(cyc)
    on_cut = set(cut.edges)
    rest = frozenset(e for e in m_delta if e not in on_cut)
    check(rest == frozenset(e for e in star if e not in on_cut), "M* and M^Δ disagree off P'")
    q_star = NearlyAltPath(cut, i_star, t - 1, rest)
    check(q_star.ref_matching.edges == frozenset(star), "M* is not a shift on P'")
    q_delta = q_star.at(1, h)
    check(q_delta.ref_matching.edges == frozenset(m_delta), "M^Δ is not a shift on P'")

    f_star = q_star.f(2)
    f_hi, f_lo = q_star.f(2, 1, h), q_star.f(2, h - 1, h)
    check(abs(f_hi) >= abs(f_star) >= abs(f_lo), "f2 interpolation inequality failed")
    values = [q_star.f(2, 2 * s + 1, h) for s in range(h // 2)]
    check(len({(v > 0) - (v < 0) for v in values + [f_star] if v}) <= 1, "f2 signs disagree on a good path")
    s = next((s for s, v in enumerate(values) if v == f_star), None)
    check(s is not None, "no shift of M^Δ matches f2(M*)")
    m_tilde = q_star.at(2 * s + 1, h)
    tc = m_tilde.counts_at()
    check(tc[1] == a2 and tc[2] < goal + 1, "M~ has wrong counts")
    trace.emit("switch.done", via="iv_case2", shift=2 * s + 1)
    return intermediate_value(q_star, m_tilde, goal)
