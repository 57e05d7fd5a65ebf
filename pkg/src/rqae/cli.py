"""Command line entry point: ``rqae {verify,sweep,compare,depth-stats}``.

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from .errors import ConfigurationError
from .harness import (
    ALGORITHMS,
    AlgorithmSpec,
    CompareRow,
    DepthHistogramRow,
    SweepRow,
    VerifyRow,
    compare,
    default_a_grid,
    default_compare_specs,
    depth_stats,
    emit_csv,
    sweep,
)
from .likelihood import DEFAULT_POSTERIOR_GRID
from .plotting import emit_plot
from .sampling import trial_rng
from .schedules import critical_points
from .statevector import verify_depths

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

FULL_TRIALS = 4096
FULL_SAMPLES = 2**16


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _name_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def build_parser():
    parser = _Parser(prog="rqae", description="Random-depth amplitude estimation experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="check closed-form hit probabilities against a statevector simulation")
    p.add_argument("--m-max", type=int, default=16)
    p.add_argument("--phi-samples", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV of per-angle deviations")

    p = sub.add_parser("sweep", help="bias and RMSE over a grid of ground truths")
    p.add_argument("--algo", choices=ALGORITHMS, default="mlae-eis")
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--R", type=int, default=32)
    p.add_argument("--t", type=int, default=5)
    p.add_argument("--depths", type=_int_list, default=(), help="explicit depths for --algo mlae")
    p.add_argument("--grid-size", type=int, default=256, help="number of ground-truth points")
    p.add_argument("--a-min", type=float, default=None)
    p.add_argument("--a-max", type=float, default=None)
    p.add_argument("--posterior-grid", type=int, default=DEFAULT_POSTERIOR_GRID)
    p.add_argument("--trials", type=int, default=1024)
    p.add_argument("--full", action="store_true", help=f"use {FULL_TRIALS} trials per point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="CSV destination")
    p.add_argument("--plot", help="SVG destination")
    p.add_argument("--mark-critical", type=int, default=None, metavar="ORDER")

    p = sub.add_parser("compare", help="RMSE against oracle cost over random ground truths")
    p.add_argument("--algos", type=_name_list, default=("mc", "mlae-eis", "djqae", "rqae-u", "rqae-a", "qpe"))
    p.add_argument("--samples", type=int, default=2**12)
    p.add_argument("--full", action="store_true", help=f"use {FULL_SAMPLES} samples")
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--t-max", type=int, default=8)
    p.add_argument("--mc-max-exp", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--plot")

    p = sub.add_parser("depth-stats", help="mean realized shots per depth for RQAE")
    p.add_argument("--rule", choices=("uniform", "adaptive"), default="adaptive")
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--R", type=int, default=32)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--posterior-grid", type=int, default=DEFAULT_POSTERIOR_GRID)
    p.add_argument("--trials", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    return parser


def _verify(args):
    if args.m_max < 1 or args.phi_samples < 1:
        raise ConfigurationError("--m-max and --phi-samples must be >= 1")
    start = time.perf_counter()
    rng = trial_rng(args.seed, "verify", 0)
    phis = rng.uniform(0.0, math.pi / 2, size=args.phi_samples)
    rows = [VerifyRow(phi=float(phi), max_deviation=float(verify_depths(phi, args.m_max))) for phi in phis]
    worst = max(r.max_deviation for r in rows)
    elapsed = time.perf_counter() - start
    ok = worst < args.tol
    print(f"max deviation {worst:.3e} over {len(rows)} angles, depths 1..{args.m_max} ({elapsed:.2f}s): {'PASS' if ok else 'FAIL'}")
    if args.out:
        emit_csv(rows, args.out, VerifyRow)
    return EXIT_OK if ok else EXIT_VERIFY


def _sweep(args):
    spec = AlgorithmSpec(args.algo, K=args.K, R=args.R, t=args.t, grid_size=args.posterior_grid, depths=args.depths)
    if args.a_min is None and args.a_max is None:
        grid = default_a_grid(args.grid_size)
    else:
        lo = 0.0 if args.a_min is None else args.a_min
        hi = 1.0 if args.a_max is None else args.a_max
        if not (0.0 <= lo <= hi <= 1.0) or args.grid_size < 1:
            raise ConfigurationError("need 0 <= --a-min <= --a-max <= 1 and --grid-size >= 1")
        grid = np.linspace(lo, hi, args.grid_size).tolist()
    trials = FULL_TRIALS if args.full else args.trials
    rows = sweep(spec, grid, trials, seed=args.seed, workers=args.workers)
    if args.out:
        emit_csv(rows, args.out, SweepRow)
    else:
        for r in rows:
            print(f"a={r.a:.6f} bias={r.bias:+.3e} rmse={r.rmse:.3e} crlb={r.crlb:.3e}")
    if args.plot:
        markers = critical_points(args.mark_critical).points if args.mark_critical else ()
        emit_plot(rows, args.plot, x="a", y=("bias", "rmse", "crlb"), markers=markers, title=spec.canonical)
    return EXIT_OK


def _compare(args):
    specs = default_compare_specs(args.algos, k_max=args.k_max, t_max=args.t_max, mc_max_exp=args.mc_max_exp)
    samples = FULL_SAMPLES if args.full else args.samples
    rows = compare(specs, samples, seed=args.seed, workers=args.workers)
    if args.out:
        emit_csv(rows, args.out, CompareRow)
    else:
        for r in rows:
            print(f"{r.algorithm:>9} {r.parameter:>5} N={r.mean_cost:10.1f} rmse={r.rmse:.3e}")
    if args.plot:
        emit_plot(rows, args.plot, x="mean_cost", y="rmse", group="algorithm", loglog=True, xlabel="oracle calls N")
    return EXIT_OK


def _depth_stats(args):
    rows = depth_stats(args.rule, args.K, args.R, args.a, args.trials, seed=args.seed, grid_size=args.posterior_grid, workers=args.workers)
    if args.out:
        emit_csv(rows, args.out, DepthHistogramRow)
    else:
        for r in rows:
            print(f"M={r.depth:>4} mean R={r.mean_shots:.3f}")
    return EXIT_OK


_COMMANDS = {"verify": _verify, "sweep": _sweep, "compare": _compare, "depth-stats": _depth_stats}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
