#!/usr/bin/env python3
"""
Command-line front end: exact counts, code weights, benchmarks and the self-test.

Examples:
    python mlcount.py count --problem problems/shared_cube_q3.json --json
    python mlcount.py weights --code problems/shared_cube_code_q2.json --hierarchy
    python mlcount.py bench --problem problems/shared_cube_n12_q3.json --repeat 5 --csv bench.csv
    python mlcount.py selftest --max-bits 12
"""
import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from dotenv import load_dotenv
from tqdm import tqdm

from codes import code_report, codeword_weight, min_distance, parse_code, weight_hierarchy
from counting import METHODS, count
from gf import MlcountError
from model import parse_problem
from oracle import DEFAULT_MAX_BITS
from selftest import DEFAULT_MAX_BITS as SELFTEST_MAX_BITS, DEFAULT_SEED, ORACLE_SUITE_MAX_BITS, run_selftest

# Load environment variables from .env file
load_dotenv()

BENCH_COLUMNS = ["problem", "method", "count", "ns", "median_ns", "speedup"]


class CountMismatch(MlcountError):
    """Exception raised when benchmarked methods disagree on a count."""
    exit_code = 6


class InputUnreadable(MlcountError):
    """Exception raised when an input file cannot be read."""
    exit_code = 2


def env_int(name: str, default: int) -> int:
    """Integer environment variable, falling back to default with a warning when malformed."""
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        print(f"Warning: ignoring {name}={raw!r}, expected an integer", file=sys.stderr)
        return default


def resolve(value: Optional[int], env_name: str, default: int) -> int:
    """A flag value wins over the environment, which wins over the default."""
    return value if value is not None else env_int(env_name, default)


def emit(args, payload: Dict[str, object], text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def read_input(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputUnreadable(f"Cannot read {path}: {e.strerror or e}")


# -------------------------------------------------------------------------
# count
# -------------------------------------------------------------------------
def cmd_count(args) -> int:
    threads = resolve(args.threads, "MLCOUNT_THREADS", 1)
    max_bits = resolve(args.max_bits, "MLCOUNT_ORACLE_MAX_BITS", DEFAULT_MAX_BITS)
    query = parse_problem(read_input(args.problem), require_rank=args.method != "oracle")

    value, method_used, elapsed = count(query, args.method, threads, max_bits, args.force)
    emit(args, {"count": str(value), "method": method_used, "timing_ns": elapsed}, str(value))
    return 0


# -------------------------------------------------------------------------
# weights
# -------------------------------------------------------------------------
def parse_word(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--word expects comma-separated element indices, got {text!r}")


def cmd_weights(args) -> int:
    threads = resolve(args.threads, "MLCOUNT_THREADS", 1)
    code = parse_code(read_input(args.code))
    report = {key: str(value) for key, value in code_report(code).items()}
    lines = [f"length: {code.length}", f"dimension: {code.dimension}"]

    if args.hierarchy:
        hierarchy = weight_hierarchy(code, threads, progress=args.progress)
        report["hierarchy"] = [str(d) for d in hierarchy]
        lines.append("d: " + " ".join(str(d) for d in hierarchy))
    elif args.min_distance:
        report["min_distance"] = str(min_distance(code))
        lines.append(f"min_distance: {report['min_distance']}")
    else:
        report["weight"] = str(codeword_weight(code, args.word))
        lines.append(f"weight: {report['weight']}")

    emit(args, report, "\n".join(lines))
    return 0


# -------------------------------------------------------------------------
# bench
# -------------------------------------------------------------------------
def bench_frame(problem_id: str, samples: Dict[str, List[int]], counts: Dict[str, int]) -> pd.DataFrame:
    """One row per timing sample, with the per-method median and the speedup over the oracle."""
    rows = []
    for method, times in samples.items():
        for ns in times:
            rows.append({"problem": problem_id, "method": method, "count": str(counts[method]), "ns": ns})
    df = pd.DataFrame(rows, columns=["problem", "method", "count", "ns"])
    df["median_ns"] = df.groupby("method")["ns"].transform("median")
    if "oracle" in samples:
        oracle_median = df.loc[df["method"] == "oracle", "ns"].median()
        df["speedup"] = oracle_median / df["median_ns"]
    else:
        df["speedup"] = float("nan")
    return df[BENCH_COLUMNS]


def cmd_bench(args) -> int:
    threads = resolve(args.threads, "MLCOUNT_THREADS", 1)
    max_bits = resolve(args.max_bits, "MLCOUNT_ORACLE_MAX_BITS", DEFAULT_MAX_BITS)
    query = parse_problem(read_input(args.problem))
    problem_id = Path(args.problem).stem

    methods = [m for m in args.methods.split(",") if m]
    if args.skip_oracle:
        methods = [m for m in methods if m != "oracle"]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(f"Unknown methods {unknown}; choose from {list(METHODS)}")
    if args.repeat < 1:
        raise argparse.ArgumentTypeError(f"--repeat must be at least 1, got {args.repeat}")

    samples: Dict[str, List[int]] = {}
    counts: Dict[str, int] = {}
    for method in methods:
        samples[method] = []
        for _ in tqdm(range(args.repeat), desc=f"Timing {method}", disable=not args.progress):
            value, _, elapsed = count(query, method, threads, max_bits, args.force)
            samples[method].append(elapsed)
            counts[method] = value

    if len(set(counts.values())) > 1:
        raise CountMismatch(f"Methods disagree on {problem_id}: {counts}")

    df = bench_frame(problem_id, samples, counts)
    if args.csv:
        df.to_csv(args.csv, index=False)
        print(f"Bench results written to {args.csv}", file=sys.stderr)

    summary = df.drop_duplicates("method")[["method", "count", "median_ns", "speedup"]]
    if args.json:
        records = summary.to_dict(orient="records")
        for record in records:
            record["median_ns"] = int(record["median_ns"])
            record["speedup"] = None if pd.isna(record["speedup"]) else float(record["speedup"])
        print(json.dumps({"problem": problem_id, "methods": records}, sort_keys=True))
    else:
        print(summary.to_string(index=False))
    return 0


# -------------------------------------------------------------------------
# selftest
# -------------------------------------------------------------------------
def cmd_selftest(args) -> int:
    threads = resolve(args.threads, "MLCOUNT_THREADS", 1)
    seed = resolve(args.seed, "MLCOUNT_SEED", DEFAULT_SEED)
    max_bits = args.max_bits if args.max_bits is not None else SELFTEST_MAX_BITS

    start = time.perf_counter()
    results = run_selftest(max_bits, seed, threads, args.progress, args.oracle_max_bits)
    elapsed = time.perf_counter() - start

    failed = [r for r in results if not r.ok]
    for r in results:
        for note in r.notes:
            print(f"Warning: {r.name}: {note}", file=sys.stderr)

    if args.json:
        print(json.dumps({
            "seed": seed,
            "max_bits": max_bits,
            "oracle_max_bits": args.oracle_max_bits,
            "suites": [{"name": r.name, "checked": r.checked, "passed": r.passed} for r in results],
            "failures": [f for r in failed for f in r.failures],
        }, sort_keys=True))
    else:
        print(f"Self-test (seed {seed}, oracle up to 2^{max_bits} points, "
              f"random oracle instances up to 2^{args.oracle_max_bits})")
        for r in results:
            status = "ok" if r.ok else "FAIL"
            print(f"  {r.name:<22} {r.passed}/{r.checked} {status}")
        for r in failed:
            for failure in r.failures:
                print(json.dumps(failure, sort_keys=True))
        print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    print(f"Elapsed: {elapsed:.1f}s", file=sys.stderr)
    return 1 if failed else 0


# -------------------------------------------------------------------------
# Entry point
# -------------------------------------------------------------------------
def parse_args(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="Print a JSON report instead of plain text")
    common.add_argument("--threads", type=int, default=None,
                        help="Worker threads for parallel sums (default: MLCOUNT_THREADS or 1)")
    common.add_argument("--progress", action="store_true",
                        help="Show progress bars on stderr")

    parser = argparse.ArgumentParser(
        description="Exact solution counts for products of multilinear forms with separated variables"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_count = sub.add_parser("count", parents=[common], help="Count solutions of f_1...f_k = a")
    p_count.add_argument("--problem", required=True, help="Problem file (JSON)")
    p_count.add_argument("--method", choices=METHODS, default="auto",
                         help="Counting method (default: auto)")
    p_count.add_argument("--max-bits", type=int, default=None,
                         help="Oracle limit, log2 of q^n (default: MLCOUNT_ORACLE_MAX_BITS or 26)")
    p_count.add_argument("--force", action="store_true", help="Run the oracle past its limit")
    p_count.set_defaults(handler=cmd_count)

    p_weights = sub.add_parser("weights", parents=[common], help="Code parameters and weights")
    p_weights.add_argument("--code", required=True, help="Code file (JSON)")
    what = p_weights.add_mutually_exclusive_group(required=True)
    what.add_argument("--hierarchy", action="store_true", help="Print the weight hierarchy d_1..d_m")
    what.add_argument("--min-distance", action="store_true", help="Print the minimum distance")
    what.add_argument("--word", type=parse_word, help="Weight of the codeword a_1,...,a_m")
    p_weights.set_defaults(handler=cmd_weights)

    p_bench = sub.add_parser("bench", parents=[common], help="Time the formula path against the oracle")
    p_bench.add_argument("--problem", required=True, help="Problem file (JSON)")
    p_bench.add_argument("--repeat", type=int, default=5, help="Samples per method (default: 5)")
    p_bench.add_argument("--csv", help="Write per-sample results to this CSV file")
    p_bench.add_argument("--methods", default="auto,general,oracle",
                         help="Comma-separated methods to time (default: auto,general,oracle)")
    p_bench.add_argument("--skip-oracle", action="store_true", help="Leave the oracle out")
    p_bench.add_argument("--max-bits", type=int, default=None, help="Oracle limit, log2 of q^n")
    p_bench.add_argument("--force", action="store_true", help="Run the oracle past its limit")
    p_bench.set_defaults(handler=cmd_bench)

    p_self = sub.add_parser("selftest", parents=[common], help="Run the fixture and property suites")
    p_self.add_argument("--max-bits", type=int, default=None,
                        help=f"Oracle-backed checks only up to 2^B points (default: {SELFTEST_MAX_BITS})")
    p_self.add_argument("--oracle-max-bits", type=int, default=ORACLE_SUITE_MAX_BITS,
                        help=f"Largest q^n, as log2, in the randomized oracle suite (default: {ORACLE_SUITE_MAX_BITS})")
    p_self.add_argument("--seed", type=int, default=None,
                        help=f"Seed for randomized suites (default: MLCOUNT_SEED or {DEFAULT_SEED})")
    p_self.set_defaults(handler=cmd_selftest)

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    try:
        return args.handler(args)
    except MlcountError as e:
        print(f"Error: {e}", file=sys.stderr)
        if args.json:
            print(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": e.exit_code},
                             sort_keys=True))
        return e.exit_code
    except argparse.ArgumentTypeError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
