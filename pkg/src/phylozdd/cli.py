"""Command-line interface.

Subcommands: gen, family, reduce-matching (write instances), solve (run one
method, print the exact count), verify (check a solutions file), bench (run
a seeded corpus and append CSV records). Timeouts are data: a solve that
hits its deadline reports on stderr and exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bench import aggregate_ratios, append_csv, parse_bench_config, run_bench
from .bnb import bnb_count, bnb_enumerate
from .core import canonical_key, is_laminar, is_sandwiched, validate_instance
from .datagen import compression_family, derive_seed, gen_ground_truth, perturb
from .feasibility import brute_force_solutions
from .formats import (FormatError, read_bigraph, read_instance, read_solutions,
                      write_instance, write_solutions)
from .reductions import matching_to_idbpp
from .zddbuild import BuildDeadlineExceeded, build, iter_solutions, make_order


def _write_instance_file(inst, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_instance(inst, fh)


def _load_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            inst = read_instance(fh)
    except FormatError as exc:
        sys.exit(f"{path}: {exc}")
    problems = validate_instance(inst)
    if problems:
        for v in problems:
            print(f"{path}: {v}", file=sys.stderr)
        sys.exit(2)
    return inst


def _cmd_gen(args) -> int:
    truth = gen_ground_truth(args.m, args.n, args.seed)
    inst = perturb(truth, args.p, derive_seed(args.seed, 1))
    _write_instance_file(inst, args.out)
    return 0


def _cmd_family(args) -> int:
    inst = compression_family(args.chars, args.extra)
    _write_instance_file(inst, args.out)
    return 0


def _cmd_reduce_matching(args) -> int:
    try:
        with open(args.graph, "r", encoding="utf-8") as fh:
            g = read_bigraph(fh)
    except FormatError as exc:
        sys.exit(f"{args.graph}: {exc}")
    _write_instance_file(matching_to_idbpp(g), args.out)
    return 0


def _write_enumerated(path: str, phylos) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_solutions(phylos, fh)


def _cmd_solve(args) -> int:
    inst = _load_instance(args.input)
    deadline = args.timeout_ms / 1000.0 if args.timeout_ms else None
    stats_out: dict = {"method": args.method, "m": inst.m, "n": inst.n, "k": inst.k}
    status = "solved"
    count = None
    t0 = time.monotonic()

    if args.method == "zdd":
        vm = make_order(inst, args.order)
        try:
            root, bstats = build(inst, vm, pair_schedule=args.pair_order, deadline=deadline)
        except BuildDeadlineExceeded as exc:
            status = "timeout"
            stats_out.update(pair_steps=exc.stats.pair_steps,
                             zdd_peak_nodes=exc.stats.peak_nodes)
        else:
            count = root.store.count(root)
            stats_out.update(zdd_nodes=bstats.final_nodes,
                             zdd_peak_nodes=bstats.peak_nodes,
                             pair_steps=bstats.pair_steps)
            if args.enumerate:
                _write_enumerated(args.enumerate, iter_solutions(root, vm, inst))
    elif args.method == "bnb":
        if args.enumerate:
            found = []
            bstats = bnb_enumerate(inst, found.append, deadline=deadline)
            _write_enumerated(args.enumerate, found)
        else:
            bstats = bnb_count(inst, deadline=deadline)
        stats_out.update(bnb_calls=bstats.calls, bnb_found=bstats.found)
        if bstats.completed:
            count = bstats.found
        else:
            status = "timeout"
    else:  # brute
        try:
            sols = brute_force_solutions(inst)
        except ValueError as exc:
            status = "refused"
            stats_out["reason"] = str(exc)
        else:
            count = len(sols)
            if args.enumerate:
                _write_enumerated(args.enumerate, sols)

    stats_out["status"] = status
    stats_out["time_ms"] = round((time.monotonic() - t0) * 1000)
    if count is not None:
        stats_out["count"] = str(count)
    if args.stats:
        Path(args.stats).write_text(json.dumps(stats_out, indent=2) + "\n", encoding="utf-8")
    if status == "solved":
        print(count)
        return 0
    if status == "timeout":
        print(f"timeout after {stats_out['time_ms']} ms "
              f"(partial results in --stats output if requested)", file=sys.stderr)
        return 0
    print(stats_out.get("reason", "refused"), file=sys.stderr)
    return 3


def _cmd_verify(args) -> int:
    inst = _load_instance(args.input)
    try:
        with open(args.solutions, "r", encoding="utf-8") as fh:
            phylos = read_solutions(fh, inst)
    except FormatError as exc:
        sys.exit(f"{args.solutions}: {exc}")
    problems = []
    prev_key = None
    for line_no, phylo in enumerate(phylos, start=1):
        if not is_sandwiched(phylo, inst):
            problems.append(f"line {line_no}: not sandwiched between the bounds")
        if not is_laminar(phylo.sets):
            problems.append(f"line {line_no}: not laminar")
        key = canonical_key(phylo)
        if prev_key is not None and key <= prev_key:
            problems.append(f"line {line_no}: out of order or duplicate "
                            f"(file must be strictly ascending by canonical key)")
        prev_key = key
    if problems:
        for msg in problems:
            print(f"{args.solutions}: {msg}", file=sys.stderr)
        return 1
    print(f"ok: {len(phylos)} phylogenies verified")
    return 0


def _cmd_bench(args) -> int:
    try:
        config = parse_bench_config(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        sys.exit(f"{args.config}: {exc}")
    records = run_bench(config, jobs=args.jobs)
    append_csv(records, args.out)
    solved = sum(1 for r in records if r.status == "solved")
    print(f"{len(records)} records ({solved} solved) appended to {args.out}")
    rows = aggregate_ratios(records)
    if rows:
        print("compression ratios log10(zdd_nodes / count):")
        for row in rows:
            print(f"  m={row['m']} n={row['n']} p={row['p']}: "
                  f"mean {row['mean']:.2f} std {row['std']:.2f} over {row['solved']} solved")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phylozdd",
        description="Enumerate and count directed binary perfect phylogenies "
                    "from incomplete binary character data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random perturbed instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("family", help="generate the exponential-count compression family")
    p.add_argument("--chars", type=int, required=True)
    p.add_argument("--extra", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("reduce-matching", help="reduce a bipartite graph to an instance")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reduce_matching)

    p = sub.add_parser("solve", help="count (and optionally enumerate) solutions")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=("zdd", "bnb", "brute"), required=True)
    p.add_argument("--order", choices=("character-major", "element-major"),
                   default="character-major")
    p.add_argument("--pair-order", choices=("lexicographic", "deferred"),
                   default="lexicographic")
    p.add_argument("--timeout-ms", type=int, default=None)
    p.add_argument("--enumerate", metavar="PATH", default=None)
    p.add_argument("--stats", metavar="PATH", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a solutions file against an instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--solutions", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="run a seeded corpus and append CSV records")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
