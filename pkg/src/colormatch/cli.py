"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from contextlib import ExitStack
from typing import Sequence

from . import trace
from .core import Instance, Matching, verify_matching
from .errors import ColorMatchError, InternalError
from .oracle import DEFAULT_CAP, exists_bruteforce, fuzz_campaign, gen_disconnected, gen_random, search_k4, search_tightness
from .solver import solve

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
BENCH_SIZES = (50, 100, 200, 500, 1000)


def _read_instance(path: str) -> Instance:
    with open(path) as fh:
        return Instance.from_text(fh.read())


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def cmd_solve(args) -> int:
    inst = _read_instance(args.input)
    with ExitStack() as stack:
        if args.trace is not None:
            stream = sys.stderr if args.trace == "-" else stack.enter_context(open(args.trace, "w"))
            stack.enter_context(trace.tracing(trace.jsonl_sink(stream)))
        m = solve(inst, args.target)
    _write(m.to_json() + "\n", args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _read_instance(args.input)
    with open(args.matching) as fh:
        try:
            m = Matching.from_json(fh.read())
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"bad matching file: {exc}") from None
    rep = verify_matching(inst, m, args.target)
    print(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_gen(args) -> int:
    seed = _seed(args)
    if args.disconnected:
        inst = gen_disconnected(args.n, seed)
    else:
        inst = gen_random(args.n, seed, connected=args.connected, k=args.k)
    _write(inst.to_text(), args.output)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    seed = _seed(args)
    rep = fuzz_campaign((args.n_min, args.n_max), args.trials, seed, targets=args.targets,
                        cap=args.cap, workers=args.workers)
    _write(rep.to_jsonl(), args.output)
    print(json.dumps(rep.summary), file=sys.stderr)
    ok = rep.summary["failures"] == 0 and rep.summary["oracle_mismatches"] == 0
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_oracle(args) -> int:
    inst = _read_instance(args.input)
    found = exists_bruteforce(inst, args.target, cap=args.cap)
    print(json.dumps({"target": args.target, "exists": found}))
    return EXIT_OK


def cmd_search(args) -> int:
    seed = _seed(args)
    if args.kind == "tightness":
        found = search_tightness(args.n_max, cap=args.cap, random_budget=args.budget, seed=seed)
        text = "".join(json.dumps(w, sort_keys=True) + "\n" for w in found)
        _write(text, args.output)
        print(json.dumps({"witnesses": len(found)}), file=sys.stderr)
        return EXIT_OK
    rep = search_k4(args.n_max, args.budget, seed=seed, cap=args.cap)
    _write(rep.to_jsonl(), args.output)
    print(json.dumps({k: v for k, v in rep.summary.items() if k != "details"}), file=sys.stderr)
    return EXIT_OK if rep.summary["counterexamples"] == 0 else EXIT_VERIFY


def bench_rows(sizes: Sequence[int], seed: int) -> list[dict]:
    rows = []
    for n in sizes:
        inst = gen_random(n, seed + n, connected=True)
        third = (n - 1) // 3
        target = (third, third, n - 1 - 2 * third)
        switches = [0]

        def count(event: dict) -> None:
            if event["event"] == "solve.switch":
                switches[0] += 1

        t0 = time.perf_counter()
        with trace.tracing(count):
            m = solve(inst, target)
        wall = time.perf_counter() - t0
        if not verify_matching(inst, m, target).ok:
            raise InternalError(f"bench solve at n={n} failed verification")
        rows.append({"n": n, "target": list(target), "seconds": round(wall, 3), "switches": switches[0]})
    return rows


def cmd_bench(args) -> int:
    seed = _seed(args)
    rows = bench_rows(args.n or BENCH_SIZES, seed)
    out = [f"{'n':>6} {'target':>18} {'seconds':>9} {'switches':>9}"]
    for r in rows:
        tgt = ",".join(map(str, r["target"]))
        out.append(f"{r['n']:>6} {tgt:>18} {r['seconds']:>9.3f} {r['switches']:>9}")
    _write("\n".join(out) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="colormatch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="find a matching with the given color counts")
    s.add_argument("--input", required=True)
    s.add_argument("--target", required=True, type=int, nargs=3, metavar=("A1", "A2", "A3"))
    s.add_argument("--trace", nargs="?", const="-", default=None,
                   help="write JSON-lines trace events to PATH (stderr if no PATH)")
    s.add_argument("--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check a matching file")
    s.add_argument("--input", required=True)
    s.add_argument("--matching", required=True)
    s.add_argument("--target", type=int, nargs=3, metavar=("A1", "A2", "A3"))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gen", help="generate a random instance")
    s.add_argument("--n", required=True, type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--connected", action="store_true")
    s.add_argument("--disconnected", action="store_true", help="union of connected blocks (k=3 only)")
    s.add_argument("--k", type=int, choices=(3, 4), default=3)
    s.add_argument("--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("fuzz", help="solve-and-verify campaign")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--n-min", type=int, default=3)
    s.add_argument("--n-max", type=int, default=12)
    s.add_argument("--seed", type=int)
    s.add_argument("--targets", choices=("auto", "exhaustive", "sample"), default="auto")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--output")
    s.set_defaults(func=cmd_fuzz)

    s = sub.add_parser("oracle", help="brute-force existence check")
    s.add_argument("--input", required=True)
    s.add_argument("--target", required=True, type=int, nargs="+")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("search", help="tightness or k=4 search")
    s.add_argument("kind", choices=("tightness", "k4"))
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--budget", type=int, default=20)
    s.add_argument("--seed", type=int)
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.add_argument("--output")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("bench", help="solve wall time against n")
    s.add_argument("--n", type=int, nargs="+")
    s.add_argument("--seed", type=int)
    s.add_argument("--output")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ColorMatchError, OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
