"""Brute-force ground truth, seeded generators and search campaigns.

Random generation uses :class:`random.Random` (Mersenne Twister) seeded with
an integer.  Each permutation is drawn with ``shuffle`` and redrawn until it
is discordant with the ones before it; connected instances are redrawn as a
whole until the union graph is connected.  Reports are lists of flat dicts
serialized one JSON object per line.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from . import trace
from .core import (
    Edge,
    Instance,
    Matching,
    cyclic_instance,
    disjoint_union,
    is_connected,
    validate_instance,
    verify_matching,
)
from .errors import ColorMatchError, GenerationBudgetExceeded, NTooSmall, TooLarge
from .solver import solve

DEFAULT_CAP = 8
PERM_ATTEMPTS = 10_000
INSTANCE_ATTEMPTS = 1_000


# -------------------------------------------------------------- enumeration


def _guard(inst: Instance, cap: int) -> None:
    if inst.n > cap:
        raise TooLarge(f"n={inst.n} exceeds the enumeration cap {cap}")


def enumerate_matchings(inst: Instance, size: int, cap: int = DEFAULT_CAP) -> Iterator[Matching]:
    """Every matching with exactly ``size`` edges.

    Order: A-vertices ascending; at each one, "skip" comes first, then colors
    ascending.
    """
    _guard(inst, cap)
    n = inst.n
    if not 0 <= size <= n:
        return
    chosen: list[Edge] = []
    used = [False] * n

    def rec(u: int) -> Iterator[Matching]:
        if len(chosen) == size:
            yield Matching(frozenset(chosen))
            return
        if n - u < size - len(chosen):
            return
        yield from rec(u + 1)
        for c in inst.colors:
            b = inst.perms[c - 1][u]
            if not used[b]:
                used[b] = True
                chosen.append(Edge(u, c))
                yield from rec(u + 1)
                chosen.pop()
                used[b] = False

    yield from rec(0)


def achievable_counts(inst: Instance, size: int, cap: int = DEFAULT_CAP) -> frozenset[tuple[int, ...]]:
    """All color-count vectors realized by some matching of ``size`` edges."""
    _guard(inst, cap)
    n, k = inst.n, inst.k

    @lru_cache(maxsize=None)
    def rec(u: int, mask: int, left: int) -> frozenset[tuple[int, ...]]:
        if left == 0:
            return frozenset({(0,) * k})
        if n - u < left:
            return frozenset()
        out = set(rec(u + 1, mask, left))
        for c in inst.colors:
            b = inst.perms[c - 1][u]
            if not mask >> b & 1:
                for t in rec(u + 1, mask | 1 << b, left - 1):
                    out.add(t[: c - 1] + (t[c - 1] + 1,) + t[c:])
        return frozenset(out)

    return rec(0, 0, size)


def exists_bruteforce(inst: Instance, target: Sequence[int], cap: int = DEFAULT_CAP) -> bool:
    """Is there a matching with exactly ``target[c-1]`` edges of each color?"""
    _guard(inst, cap)
    want = tuple(target) + (0,) * (inst.k - len(target))
    if len(want) != inst.k or min(want) < 0:
        return False
    return want in achievable_counts(inst, sum(want), cap)


# --------------------------------------------------------------- generators


def _draw(n: int, k: int, rng: random.Random) -> list[list[int]]:
    perms: list[list[int]] = []
    for _ in range(k):
        for _ in range(PERM_ATTEMPTS):
            p = list(range(n))
            rng.shuffle(p)
            if all(p[u] != q[u] for q in perms for u in range(n)):
                perms.append(p)
                break
        else:
            raise GenerationBudgetExceeded(f"no discordant permutation after {PERM_ATTEMPTS} draws")
    return perms


def gen_random(n: int, seed: int, connected: bool = False, k: int = 3) -> Instance:
    """Deterministic random instance with ``k`` pairwise-discordant matchings."""
    if n < max(3, k):
        raise NTooSmall(f"n={n} is too small for {k} discordant permutations")
    rng = random.Random(seed)
    for _ in range(INSTANCE_ATTEMPTS):
        inst = validate_instance(n, _draw(n, k, rng), k=k)
        if not connected or is_connected(inst):
            return inst
    raise GenerationBudgetExceeded(f"no connected instance after {INSTANCE_ATTEMPTS} draws")


def gen_disconnected(n: int, seed: int) -> Instance:
    """A union of connected random blocks, each with at least 3 vertices a side."""
    if n < 6:
        raise NTooSmall("a disconnected instance needs n >= 6")
    rng = random.Random(seed)
    sizes = []
    left = n
    while left >= 6 and (not sizes or rng.random() < 0.5):
        s = rng.randint(3, left - 3)
        sizes.append(s)
        left -= s
    sizes.append(left)
    return disjoint_union(*(gen_random(s, rng.getrandbits(32), connected=True) for s in sizes))


def all_triples(total: int) -> list[tuple[int, int, int]]:
    return [(a1, a2, total - a1 - a2) for a1 in range(total + 1) for a2 in range(total + 1 - a1)]


def all_tuples(total: int, k: int) -> list[tuple[int, ...]]:
    if k == 1:
        return [(total,)]
    return [(a,) + rest for a in range(total + 1) for rest in all_tuples(total - a, k - 1)]


# --------------------------------------------------------------------- fuzz


@dataclass
class Report:
    """Flat per-case records plus a summary dict."""

    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_jsonl(self) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        lines.append(json.dumps({"summary": self.summary}, sort_keys=True))
        return "\n".join(lines) + "\n"


def replay_trial(
    tseed: int, n_range: tuple[int, int], targets: str = "auto", cap: int = DEFAULT_CAP,
    oracle_n: int = 6, trial: int = 0,
) -> list[dict]:
    """Re-run one fuzz trial from the seed recorded in its report lines."""
    return _fuzz_trial((trial, tseed, n_range[0], n_range[1], targets, cap, oracle_n))


def _fuzz_trial(args: tuple) -> list[dict]:
    trial, tseed, n_lo, n_hi, policy, cap, oracle_n = args
    rng = random.Random(tseed)
    n = rng.randint(n_lo, n_hi)
    if n >= 6 and rng.random() < 0.3:
        inst, kind = gen_disconnected(n, rng.getrandbits(32)), "disconnected"
    else:
        inst, kind = gen_random(n, rng.getrandbits(32), connected=True), "connected"
    triples = all_triples(n - 1)
    if policy == "sample" or (policy == "auto" and n > 6):
        triples = sorted(set(rng.sample(triples, min(3, len(triples)))))
    reachable = achievable_counts(inst, n - 1, cap) if n <= min(cap, oracle_n) else None
    out = []
    for a in triples:
        steps = [0]

        def count(_event: dict) -> None:
            steps[0] += 1

        t0 = time.perf_counter()
        try:
            with trace.tracing(count):
                m = solve(inst, a)
            rep = verify_matching(inst, m, a)
            outcome = "ok" if rep.ok else f"fail:{rep.reason}"
        except ColorMatchError as exc:
            outcome = f"error:{type(exc).__name__}:{exc}"
        ms = round((time.perf_counter() - t0) * 1000, 3)
        oracle = None if reachable is None else a in reachable
        out.append({
            "trial": trial, "seed": tseed, "n": n, "kind": kind, "triple": list(a),
            "outcome": outcome, "oracle": oracle, "steps": steps[0], "ms": ms,
        })
    return out


def fuzz_campaign(
    n_range: tuple[int, int],
    trials: int,
    seed: int,
    targets: str = "auto",
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    oracle_n: int = 6,
) -> Report:
    """Solve and verify on ``trials`` random instances.

    ``targets``: ``exhaustive`` (every triple), ``sample`` (three random
    triples) or ``auto`` (exhaustive for n <= 6).  The oracle runs for
    ``n <= min(cap, oracle_n)``.
    """
    if targets not in ("auto", "exhaustive", "sample"):
        raise ValueError(f"unknown target policy {targets!r}")
    master = random.Random(seed)
    jobs = [(t, master.getrandbits(63), n_range[0], n_range[1], targets, cap, oracle_n) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_fuzz_trial, jobs, chunksize=64))
    else:
        chunks = [_fuzz_trial(job) for job in jobs]
    records = [r for chunk in chunks for r in chunk]
    failures = [r for r in records if r["outcome"] != "ok"]
    mismatches = [r for r in records if r["oracle"] is not None and r["oracle"] != (r["outcome"] == "ok")]
    summary = {
        "seed": seed, "trials": trials, "cases": len(records),
        "failures": len(failures), "oracle_checked": sum(r["oracle"] is not None for r in records),
        "oracle_mismatches": len(mismatches),
        "max_steps": max((r["steps"] for r in records), default=0),
        "failed_seeds": sorted({r["seed"] for r in failures}),
    }
    return Report(records, summary)


# --------------------------------------------------------------- searches


def _structured_family(n: int) -> Iterator[tuple[str, Instance]]:
    # cyclic Latin squares: M1 ∪ M2 is a union of short cycles when the
    # shift difference shares a factor with n
    for s2 in range(1, n):
        for s3 in range(1, n):
            if s3 != s2:
                yield f"cyclic(0,{s2},{s3})", cyclic_instance(n, (0, s2, s3))


def search_tightness(n_max: int, cap: int = DEFAULT_CAP, random_budget: int = 50, seed: int = 0) -> list[dict]:
    """Instances and triples summing to n with no matching of those counts.

    Structured families go first, then ``random_budget`` random instances per
    n.  Every witness is re-checked with :func:`exists_bruteforce`.
    """
    if n_max > cap:
        raise TooLarge(f"n_max={n_max} exceeds the cap {cap}")
    found: list[dict] = []
    seen: set[tuple] = set()

    def scan(label: str, inst: Instance) -> None:
        if inst.perms in seen:
            return
        seen.add(inst.perms)
        ok = achievable_counts(inst, inst.n, cap)
        for a in all_triples(inst.n):
            if max(a) <= inst.n - 1 and a not in ok and not exists_bruteforce(inst, a, cap):
                found.append({"source": label, "n": inst.n, "instance": inst.to_text(), "triple": list(a)})

    rng = random.Random(seed)
    for n in range(3, n_max + 1):
        for label, inst in _structured_family(n):
            scan(label, inst)
        for _ in range(random_budget):
            s = rng.getrandbits(32)
            scan(f"random(seed={s})", gen_random(n, s))
    return found


def search_k4(n_max: int, budget: int, seed: int = 0, cap: int = DEFAULT_CAP) -> Report:
    """Test every 4-tuple summing to n - 1 on random 4-matching instances."""
    if n_max > cap:
        raise TooLarge(f"n_max={n_max} exceeds the cap {cap}")
    rng = random.Random(seed)
    records: list[dict] = []
    counterexamples = []
    for n in range(4, n_max + 1):
        for _ in range(budget):
            s = rng.getrandbits(32)
            inst = gen_random(n, s, k=4)
            ok = achievable_counts(inst, n - 1, cap)
            for a in all_tuples(n - 1, 4):
                found = a in ok
                records.append({"n": n, "seed": s, "tuple": list(a), "found": found})
                if not found and not exists_bruteforce(inst, a, cap):
                    counterexamples.append({"n": n, "seed": s, "tuple": list(a), "instance": inst.to_text()})
    summary = {"seed": seed, "n_max": n_max, "budget": budget, "tested": len(records),
               "counterexamples": len(counterexamples), "details": counterexamples}
    return Report(records, summary)
