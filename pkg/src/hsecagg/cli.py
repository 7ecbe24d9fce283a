"""Command-line runner: single rounds, dropout sweeps, and dlog benchmarks.

Exit codes: 0 success, 1 configuration error (or a ``--verify`` mismatch),
2 protocol abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from random import Random
from typing import Optional, Sequence

from .counters import OpCounter
from .dlog import dlog_pollard_lambda
from .modmath import gen_group_params, generator_power
from .protocol import ConfigError, IdealAbort, Mode, ideal_aggregate, setup, validate_threshold
from .simnet import LATENCY_PRESETS, DropoutSchedule, run_round, run_sweep, synthetic_inputs, write_csv

SEED_ENV = "HPRG_AGG_SEED"


class UsageError(Exception):
    pass


def _rate(text: str) -> float:
    value = float(text)
    if not 0 <= value < 1:
        raise argparse.ArgumentTypeError(f"dropout rate must lie in [0, 1), got {text}")
    return value


def _float_list(text: str) -> list[float]:
    return [_rate(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _round_flags(p: argparse.ArgumentParser, dropout_step: int) -> None:
    p.add_argument("--clients", type=int, default=10, help="number of clients n")
    p.add_argument("--threshold", type=int, default=None, help="Shamir threshold t (default floor(2n/3)+1)")
    p.add_argument("--vector-len", type=int, default=8, help="vector length m")
    p.add_argument("--alpha", type=int, default=255, help="largest per-entry input value")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SEMI_HONEST.value)
    p.add_argument("--dropout-rate", type=_rate, default=0.0)
    p.add_argument("--dropout-step", type=int, choices=[1, 2, 3, 4], default=dropout_step)
    p.add_argument("--group-bits", type=int, default=512)
    p.add_argument("--seed", type=int, default=None, help=f"run seed (falls back to ${SEED_ENV}, then 0)")
    p.add_argument("--latency", choices=sorted(LATENCY_PRESETS), default="none")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsecagg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one aggregation round and print its transcript")
    _round_flags(run, dropout_step=4)
    run.add_argument("--inputs", help="JSON file mapping client id to its vector")
    run.add_argument("--out", help="write the transcript here instead of stdout")
    run.add_argument("--verify", action="store_true", help="check the output against the ideal functionality")

    sweep = sub.add_parser("sweep", help="average a round over several dropout rates, as CSV")
    _round_flags(sweep, dropout_step=2)
    sweep.add_argument("--rates", type=_float_list, default=[0.0, 0.1, 0.2, 0.3])
    sweep.add_argument("--reps", type=int, default=1)
    sweep.add_argument("--csv", help="write the CSV here instead of stdout")

    bench = sub.add_parser("bench-dlog", help="mean kangaroo cost per interval size")
    bench.add_argument("--bounds", type=_int_list, default=[4096, 65536, 1048576])
    bench.add_argument("--samples", type=int, default=100)
    bench.add_argument("--group-bits", type=int, default=256)
    bench.add_argument("--seed", type=int, default=None)
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _configure(args):
    n = args.clients
    if n < 1:
        raise UsageError("need at least one client")
    t = args.threshold if args.threshold is not None else 2 * n // 3 + 1
    mode = Mode(args.mode)
    if args.dropout_step == 3 and mode is not Mode.MALICIOUS:
        raise UsageError("dropout step 3 only exists in malicious mode")
    validate_threshold(n, t, mode)
    seed = _seed(args)
    group = gen_group_params(args.group_bits)
    config, keys = setup(n, t, args.vector_len, args.alpha, mode, group, seed=seed)
    return config, keys, seed


def _load_inputs(path: str, config) -> dict[int, list[int]]:
    with open(path) as fh:
        raw = json.load(fh)
    inputs = {int(k): [int(v) for v in vec] for k, vec in raw.items()}
    missing = [i for i in config.clients if i not in inputs]
    if missing:
        raise UsageError(f"inputs file lacks vectors for clients {missing}")
    return inputs


def cmd_run(args) -> int:
    config, keys, seed = _configure(args)
    if args.inputs:
        inputs = _load_inputs(args.inputs, config)
    else:
        inputs = synthetic_inputs(config.n, config.m, config.alpha, seed)
    schedule = DropoutSchedule.from_rate(config.n, args.dropout_rate, args.dropout_step)
    tr = run_round(config, keys, inputs, schedule, LATENCY_PRESETS[args.latency], seed)
    doc = tr.as_dict()
    mismatch = False
    if args.verify:
        try:
            expected = ideal_aggregate(inputs, tr.rosters, config.t, config.malicious)
            ok = tr.output == expected
            doc["verify"] = {"ok": ok, "expected": expected}
        except IdealAbort as exc:
            ok = tr.abort is not None and tr.abort["stage"] == exc.stage
            doc["verify"] = {"ok": ok, "expected_abort_stage": exc.stage}
        mismatch = not ok
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if mismatch:
        print("error: output does not match the ideal aggregate", file=sys.stderr)
        return 1
    if tr.abort is not None:
        print(f"aborted: {tr.abort['reason']} at stage {tr.abort['stage']}", file=sys.stderr)
        return 2
    return 0


def cmd_sweep(args) -> int:
    config, keys, seed = _configure(args)
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    rows = run_sweep(
        config, keys, args.rates, args.reps, dropout_step=args.dropout_step, latency=LATENCY_PRESETS[args.latency], seed=seed
    )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


def bench_dlog(group, bounds: Sequence[int], samples: int, seed: int) -> list[dict]:
    """Mean kangaroo group-op count and wall time for each bound."""
    rows = []
    prev: Optional[float] = None
    for bound in bounds:
        rng = Random(f"bench-dlog/{seed}/{bound}")
        total_ops, total_s = 0, 0.0
        for k in range(samples):
            z = rng.randint(0, bound)
            target = generator_power(group, z)
            ops = OpCounter()
            start = time.perf_counter()
            found = dlog_pollard_lambda(group, target, bound, rng_seed=f"{seed}/{bound}/{k}", ops=ops)
            total_s += time.perf_counter() - start
            if found != z:
                raise RuntimeError(f"dlog returned {found} for {z} at bound {bound}")
            total_ops += ops.dlog_ops
        mean_ops = total_ops / samples
        rows.append(
            {
                "bound": bound,
                "mean_ops": mean_ops,
                "mean_ms": 1000 * total_s / samples,
                "ratio": mean_ops / prev if prev else None,
            }
        )
        prev = mean_ops
    return rows


def cmd_bench_dlog(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if any(b < 1 for b in args.bounds):
        raise UsageError("bounds must be positive")
    group = gen_group_params(args.group_bits)
    print(f"{'bound':>10} {'mean_ops':>12} {'mean_ms':>10} {'ratio':>7}")
    for row in bench_dlog(group, args.bounds, args.samples, _seed(args)):
        ratio = f"{row['ratio']:.2f}" if row["ratio"] is not None else "-"
        print(f"{row['bound']:>10} {row['mean_ops']:>12.1f} {row['mean_ms']:>10.3f} {ratio:>7}")
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "bench-dlog": cmd_bench_dlog}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
