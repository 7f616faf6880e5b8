import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import connected_instance, random_matching, random_nearly_alt, random_path
from colormatch.core import Edge, Matching, components, cyclic_instance, disjoint_union
from colormatch.errors import BadParity, Disconnected, OutOfRange, StartSaturated, VertexSaturated
from colormatch.oracle import gen_random
from colormatch.structure import (
    AltPath,
    NearlyAltPath,
    alternating_reachability,
    cycle_decomposition,
    f_c,
    is_good,
    max_alt_walk,
    nearly_alt_path,
    path_from_pred,
    shift_matching,
    structure_view,
)


def test_cycle_decomposition_cyclic3(cyclic3):
    cycles = cycle_decomposition(cyclic3, 1, 2)
    assert cycles == [(0, 3, 2, 5, 1, 4)]


def test_cycle_decomposition_blocks(two_blocks):
    cycles = cycle_decomposition(two_blocks, 1, 2)
    assert len(cycles) == 2
    assert {len(c) for c in cycles} == {6}


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 20), seed=st.integers(0, 2**32))
def test_cycle_decomposition_covers(n, seed):
    inst = gen_random(n, seed)
    for c, c2 in ((1, 2), (1, 3), (2, 3)):
        cycles = cycle_decomposition(inst, c, c2)
        assert sum(len(cyc) for cyc in cycles) == 2 * n
        assert sorted(x for cyc in cycles for x in cyc) == list(range(2 * n))


def test_structure_view_cyclic3(cyclic3):
    # A2 and B2 stay free; they are joined by an M1 edge
    view = structure_view(cyclic3, Matching.of([[0, 1], [1, 1]]))
    assert (view.u1, view.u2) == (2, 5)
    assert view.p1.vertices == (2, 5)
    assert view.p2.vertices == (2, 3, 0, 4, 1, 5)
    assert view.c0_is_cycle
    assert view.c0_cycle == (2, 5, 1, 4, 0, 3)
    assert view.alt_cycles == ()


def test_structure_view_start(cyclic3):
    m = Matching.of([[0, 1], [1, 1]])
    assert structure_view(cyclic3, m, start=5).u2 == 2
    with pytest.raises(VertexSaturated):
        structure_view(cyclic3, m, start=0)


def test_alt_cycles_under_m1(two_blocks):
    m = Matching(frozenset(Edge(u, 1) for u in range(5)))
    view = structure_view(two_blocks, m)
    assert view.alt_cycles == (cycle_decomposition(two_blocks, 1, 2)[0],)
    assert not view.c0_is_cycle or view.cycle_vertices.isdisjoint(view.c0_vertices)


def _four_path(inst):
    return AltPath.through(inst, [0, 3, 1, 4])


def test_shift_examples(cyclic3):
    path = _four_path(cyclic3)
    assert path.edge_colors == (1, 3, 1)
    p = NearlyAltPath(path, 1, 4, frozenset())
    assert shift_matching(p, 1, 4) == p.ref_matching == Matching(frozenset({Edge(1, 3)}))
    assert shift_matching(p, 1, 2).edges == {path.edge(3)}
    with pytest.raises(BadParity):
        shift_matching(p, 2, 4)
    with pytest.raises(OutOfRange):
        shift_matching(p, 1, 6)


def test_f_values(cyclic3):
    path = AltPath.through(cyclic3, [0, 3, 2, 5])
    assert path.edge_colors == (1, 2, 1)
    p = NearlyAltPath(path, 1, 4, frozenset())
    assert [f_c(p, c) for c in (1, 2, 3)] == [-2, 1, 0]
    single = NearlyAltPath(AltPath.through(cyclic3, [1, 3]), 1, 2, frozenset())
    assert single.path.edge_colors == (3,)
    assert f_c(single, 3) == -1
    # an M1 edge off M, an M2 edge on M, an M3 edge off M
    mixed = AltPath.through(cyclic3, [1, 4, 0, 5])
    assert mixed.edge_colors == (1, 2, 3)
    q = NearlyAltPath(mixed, 1, 4, frozenset())
    assert [f_c(q, c) for c in (1, 2, 3)] == [-1, 1, -1]


def test_is_good_examples(cyclic3):
    assert is_good(AltPath.through(cyclic3, [0, 3, 2, 5])) == 1
    assert is_good(AltPath.through(cyclic3, [1, 3])) == 1
    # M1 at an even position with M2 at an odd one is 2-good
    assert is_good(AltPath.through(cyclic3, [0, 4, 1, 3])) == 2
    # M1 and M2 both at odd positions
    bad = AltPath.through(cyclic3, [0, 3, 1, 5])
    assert bad.edge_colors == (1, 3, 2)
    assert is_good(bad) is None
    assert is_good(AltPath.through(cyclic3, [0, 4, 1, 5])) == 2


def test_nearly_alt_path_validation(cyclic3):
    m = Matching.of([[0, 1], [1, 1]])
    p = nearly_alt_path(cyclic3, [2, 3, 0, 4, 1, 5], m)
    assert (p.i, p.j) == (1, 6) and p.rest == frozenset()
    assert p.ref_matching == m


def test_reachability_cyclic3(cyclic3):
    m = Matching.of([[0, 1], [1, 1]])
    pred = alternating_reachability(cyclic3, m, 2)
    assert len(pred) == 6
    assert path_from_pred(pred, 2) == [2]
    with pytest.raises(VertexSaturated):
        alternating_reachability(cyclic3, m, 0)


def test_reachability_disconnected(two_blocks):
    m = Matching(frozenset(Edge(u, 1) for u in range(5)))
    with pytest.raises(Disconnected):
        alternating_reachability(two_blocks, m, 5)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 14), seed=st.integers(0, 2**32))
def test_reachability_spans_connected(n, seed):
    inst = connected_instance(n, seed)
    m = random_matching(inst, n - 1, random.Random(seed))
    if m is None:
        return
    free = [x for x in range(2 * n) if x not in {v for e in m.edges for v in inst.endpoints(e)}]
    pred = alternating_reachability(inst, m, free[0])
    assert len(pred) == 2 * n
    for w in pred:
        walk = path_from_pred(pred, w)
        assert len(set(walk)) == len(walk)


def test_max_alt_walk_immediate(cyclic3):
    walk = max_alt_walk(cyclic3, Matching(frozenset()), 0)
    assert walk.vertices == (0, 5)
    with pytest.raises(StartSaturated):
        max_alt_walk(cyclic3, Matching.of([[0, 1]]), 0)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(3, 14), seed=st.integers(0, 2**32))
def test_max_alt_walk_properties(n, seed):
    inst = gen_random(n, seed)
    rng = random.Random(seed)
    seed_edges = [Edge(u, rng.choice((1, 2))) for u in range(n)]
    rng.shuffle(seed_edges)
    chosen, used = set(), set()
    for e in seed_edges[: rng.randint(0, n - 1)]:
        a, b = inst.endpoints(e)
        if a not in used and b not in used:
            chosen.add(e)
            used |= {a, b}
    start = next(x for x in range(2 * n) if x not in used)
    walk = max_alt_walk(inst, chosen, start)
    assert len(walk) % 2 == 1
    assert sum(e.color == 3 for e in walk.edges) <= len(chosen) + 1
    assert max_alt_walk(inst, chosen, start) == walk


def _literal_counts(p, i, j):
    return shift_matching(p, i, j).counts[:3]


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 12), seed=st.integers(0, 2**32))
def test_changes_identity(n, seed):
    inst = gen_random(n, seed)
    p = random_nearly_alt(inst, random.Random(seed))
    if p is None:
        return
    L = p.length
    spots = [(i, j) for i in range(1, L, 2) for j in range(i + 1, L + 1, 2)]
    data = {}
    for i, j in spots:
        q = p.at(i, j)
        data[i, j] = (_literal_counts(p, i, j), [f_c(q, c) for c in (1, 2, 3)])
        assert q.counts_at() == data[i, j][0]
        assert [q.f(c) for c in (1, 2, 3)] == data[i, j][1]
    for s1 in spots:
        for s2 in spots:
            (a1, f1), (a2, f2) = data[s1], data[s2]
            assert all(a2[c] - a1[c] == f2[c] - f1[c] for c in range(3))
    assert shift_matching(p.at(*spots[-1]), p.i, p.j) == p.ref_matching


@settings(max_examples=60, deadline=None)
@given(n=st.integers(4, 12), seed=st.integers(0, 2**32), c=st.sampled_from([1, 2]))
def test_good_path_sign_rule(n, seed, c):
    inst = gen_random(n, seed)
    p = random_nearly_alt(inst, random.Random(seed), good=c)
    if p is None:
        return
    assert is_good(p.path) in (c, 1)
    window = [p.path.edge(pos) for pos in range(p.i, p.j)]
    assert sum(e.color == c for e in window) == -f_c(p, c)
    assert sum(e.color == 3 - c for e in window) == f_c(p, 3 - c)


def test_blocks_fixture_shape(two_blocks):
    assert len(components(two_blocks)) == 2
    assert disjoint_union(cyclic_instance(3)) == cyclic_instance(3)
