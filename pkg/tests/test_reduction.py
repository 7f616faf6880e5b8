import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_counts
from colormatch import trace
from colormatch.core import Edge, Matching, cyclic_instance, disjoint_union, verify_matching
from colormatch.errors import BudgetTooSmall, PreconditionViolated
from colormatch.oracle import gen_random
from colormatch.reduction import reduce_extend, reduce_perfect
from colormatch.structure import cycle_decomposition


def _within(m, b):
    return len(m) and all(m.count(c) <= b[c - 1] for c in (1, 2, 3))


@pytest.mark.parametrize("b", [(3, 1, 1), (1, 1, 3), (1, 2, 2)])
def test_cyclic3_budgets(cyclic3, b):
    m = reduce_perfect(cyclic3, b)
    assert len(m) == 3 and verify_matching(cyclic3, m).ok
    assert _within(m, b)


def test_cyclic3_122_is_rainbow(cyclic3):
    # the six perfect matchings are M1, M2, M3 and three rainbow ones
    assert brute_counts(cyclic3, 3) == {(3, 0, 0), (0, 3, 0), (0, 0, 3), (1, 1, 1)}
    assert reduce_perfect(cyclic3, (1, 2, 2)).counts == (1, 1, 1)


def test_budget_too_small(cyclic3):
    with pytest.raises(BudgetTooSmall):
        reduce_perfect(cyclic3, (1, 1, 2))
    with pytest.raises(PreconditionViolated):
        reduce_perfect(cyclic3, (-1, 3, 3))


def test_extend_perfect_seed_unchanged(cyclic3):
    seed = Matching(frozenset(Edge(u, 2) for u in range(3)))
    assert reduce_extend(cyclic3, (0, 3, 2), seed) == seed


def test_extend_single_cycle_takes_m1(cyclic3):
    out = reduce_extend(cyclic3, (3, 0, 2), Matching(frozenset()))
    assert out.edges == {Edge(u, 1) for u in range(3)}


def test_extend_rejects_bad_seed(cyclic3):
    with pytest.raises(PreconditionViolated):
        reduce_extend(cyclic3, (2, 2, 2), Matching.of([[0, 3]]))
    blocks = disjoint_union(cyclic3, cyclic3)
    # seed covering part of a cycle
    with pytest.raises(PreconditionViolated):
        reduce_extend(blocks, (4, 4, 4), Matching.of([[0, 1]]))


def test_extend_levels_traced():
    inst = disjoint_union(cyclic_instance(3), cyclic_instance(4), cyclic_instance(5))
    with trace.collect() as events:
        m = reduce_extend(inst, (10, 8, 5), Matching(frozenset()))
    levels = [e for e in events if e["event"] == "reduction.level"]
    assert len(levels) == len(cycle_decomposition(inst, 1, 2))
    assert len(m) == inst.n and _within(m, (10, 8, 5))


def _budgets(m, rng):
    total = 2 * m - rng.randint(0, 1)
    cuts = sorted(rng.randint(0, total) for _ in range(2))
    return cuts[0], cuts[1] - cuts[0], total - cuts[1]


@settings(max_examples=300, deadline=None)
@given(m=st.integers(3, 16), seed=st.integers(0, 2**32), blocks=st.booleans())
def test_reduce_perfect_fuzz(m, seed, blocks):
    rng = random.Random(seed)
    if blocks and m >= 6:
        k = rng.randint(3, m - 3)
        F = disjoint_union(gen_random(k, seed), gen_random(m - k, seed + 1))
    else:
        F = gen_random(m, seed)
    b = _budgets(m, rng)
    with trace.collect() as events:
        out = reduce_perfect(F, b)
    assert len(out) == m and verify_matching(F, out).ok
    assert _within(out, b)
    for e in events:
        if e["event"] == "reduction.walk":
            assert e["m3"] <= b[2]


@settings(max_examples=60, deadline=None)
@given(m=st.integers(3, 7), seed=st.integers(0, 2**32))
def test_reduce_perfect_matches_bruteforce(m, seed):
    F = gen_random(m, seed)
    perfect = brute_counts(F, m)
    rng = random.Random(seed)
    b = _budgets(m, rng)
    assert any(all(x <= y for x, y in zip(a, b)) for a in perfect)
    assert reduce_perfect(F, b).counts in perfect
