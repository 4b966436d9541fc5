"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from ..algo import match_full
from ..errors import InfeasibleSpec, OracleOverflow, UsageError
from ..oracle import fft_match_positions, naive_match_positions
from ..qsim import MODE_NAMES, SimConfig
from ..wildstr import Role, read_string_file, write_string_file
from .bench import load_grid, run_bench
from .gen import GenSpec, gen_instance
from .lemmas import run_lemma_suite

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def _read_pair(args):
    return read_string_file(args.text, Role.TEXT), read_string_file(args.pattern, Role.PATTERN)


def cmd_match(args) -> int:
    A, B = _read_pair(args)
    out = match_full(A, B, SimConfig.named(args.mode, seed=args.seed))
    if args.json:
        print(out.to_json())
    else:
        print("no match" if out.witness is None else out.witness)
    return EXIT_OK


def cmd_oracle(args) -> int:
    A, B = _read_pair(args)
    engine = fft_match_positions if args.engine == "fft" else naive_match_positions
    print(" ".join(map(str, engine(A, B))))
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(args.n, args.m, args.k, alphabet=args.alphabet, plant_at=args.plant,
                   near_miss=args.near_miss, case=args.case, seed=args.seed)
    A, B = gen_instance(spec)
    write_string_file(f"{args.out_prefix}.text", A)
    write_string_file(f"{args.out_prefix}.pattern", B)
    return EXIT_OK


def cmd_lemmas(args) -> int:
    report = run_lemma_suite(args.max_n, args.samples, args.seed)
    print(report.summary())
    for cx in report.counterexamples:
        print(cx.to_json())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_bench(args) -> int:
    _, summary = run_bench(load_grid(args.grid), args.csv)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_MISMATCH if summary["oracle_mismatches"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwild", description="Simulated quantum wildcard matching.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="find a wildcard occurrence of a pattern in a text")
    p.add_argument("--text", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--mode", choices=MODE_NAMES, default="ideal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="print the full outcome as one JSON object")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("oracle", help="list every match position classically")
    p.add_argument("--text", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--engine", choices=("naive", "fft"), default="naive")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write a seeded instance to PATH.text and PATH.pattern")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alphabet", type=int, default=4)
    plant = p.add_mutually_exclusive_group()
    plant.add_argument("--plant", type=int, metavar="IDX")
    plant.add_argument("--near-miss", type=int, metavar="C")
    p.add_argument("--case", choices=("any", "1", "2"), default="any")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True, metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lemmas", help="verify the structural lemmas exhaustively and by sampling")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("bench", help="run a JSON-lines grid and write a CSV")
    p.add_argument("--grid", required=True)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleSpec as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, OracleOverflow, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
