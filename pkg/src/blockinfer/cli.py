"""Command-line interface.

Subcommands: count (structure family sizes), estimate (fit one matrix),
test (selective + naive p-values for one matrix), simulate (batched trials
to CSV), summarize (metrics JSON from a trial CSV).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from ._rng import SeededRng, mix64
from .core import load_matrix_csv, vectorize
from .enumeration import count_structures
from .estimate import CoolingSchedule, exact_minimizer, sa_minimizer, tan_witten_minimizer
from .harness import make_config, read_records_csv, run_scenario, summarize, write_records_csv
from .inference import (
    DegenerateSignalError,
    decompose,
    exact_truncation,
    naive_p_value,
    sa_truncation,
    selective_p_value,
    truncated_f_p_value,
    unknown_variance_statistic,
    unknown_variance_truncation,
)
from .specfun import f_cdf


def _enc(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _cmd_count(args) -> int:
    print(count_structures(args.n, args.p, args.K, args.H, exact_blocks=args.exact))
    return 0


def _schedule(args) -> CoolingSchedule:
    return CoolingSchedule.geometric(t0=args.t0, ratio=args.ratio, epsilon=args.epsilon)


def _cmd_estimate(args) -> int:
    x = vectorize(load_matrix_csv(args.input))
    if args.method == "exact":
        res = exact_minimizer(x, args.K, args.H)
    elif args.method == "sa":
        res = sa_minimizer(x, args.K, args.H, schedule=_schedule(args),
                           rng=SeededRng(key=mix64(args.seed)))
    else:
        res = tan_witten_minimizer(x, args.K, args.H, rng=SeededRng(key=mix64(args.seed)))
    print(json.dumps({
        "row_labels": res.g_hat.row_labels.tolist(),
        "col_labels": res.g_hat.col_labels.tolist(),
        "residue": res.residue,
        "steps": res.steps,
    }))
    return 0


def _cmd_test(args) -> int:
    if args.sigma0 is None and not args.unknown_variance:
        print("error: provide --sigma0 or --unknown-variance", file=sys.stderr)
        return 2
    if args.sigma0 is not None and args.unknown_variance:
        print("error: --sigma0 and --unknown-variance are mutually exclusive", file=sys.stderr)
        return 2
    x = vectorize(load_matrix_csv(args.input))
    rng = SeededRng(key=mix64(args.seed))
    if args.method == "exact":
        est = exact_minimizer(x, args.K, args.H)
    else:
        est = sa_minimizer(x, args.K, args.H, schedule=_schedule(args), rng=rng)
    out = {
        "row_labels": est.g_hat.row_labels.tolist(),
        "col_labels": est.g_hat.col_labels.tolist(),
    }
    if args.unknown_variance:
        try:
            pieces = unknown_variance_statistic(x, est.g_hat, args.K, args.H, block=args.block)
            intervals = unknown_variance_truncation(pieces, est.g_hat, args.K, args.H)
            out.update({
                "T": pieces.T_F,
                "d1": pieces.d1,
                "d2": pieces.d2,
                "intervals": [[_enc(lo), _enc(hi)] for lo, hi in intervals],
                "p_selective": truncated_f_p_value(pieces.T_F, pieces.d1, pieces.d2, intervals),
                "p_naive": 1.0 - f_cdf(pieces.d2, pieces.d1, pieces.T_F),
                "degenerate": False,
            })
        except DegenerateSignalError:
            out.update({"T": 0.0, "intervals": [[0.0, "inf"]], "p_selective": 1.0,
                        "p_naive": 1.0, "degenerate": True})
    else:
        dof = x.n * x.p - est.g_hat.occupied_blocks
        try:
            decomp = decompose(x, est.g_hat, args.sigma0)
            if args.method == "exact":
                trunc = exact_truncation(decomp, est.g_hat, args.K, args.H, args.sigma0)
            else:
                trunc = sa_truncation(decomp, est.g_hat, args.K, args.H, args.sigma0,
                                      schedule=_schedule(args), rng=rng)
            out.update({
                "T": decomp.T,
                "dof": decomp.dof,
                "beta": _enc(trunc.beta),
                "p_selective": selective_p_value(decomp.T, decomp.dof, trunc.beta),
                "p_naive": naive_p_value(decomp.T, decomp.dof),
                "degenerate": False,
            })
        except DegenerateSignalError:
            out.update({"T": 0.0, "dof": dof, "beta": "inf", "p_selective": 1.0,
                        "p_naive": 1.0, "degenerate": True})
    print(json.dumps(out))
    return 0


def _cmd_simulate(args) -> int:
    config = make_config(
        args.scenario, args.n, args.p,
        K_null=args.Knull, H_null=args.Hnull, K=args.K, H=args.H,
        level=args.level, sigma0=args.sigma0, trials=args.trials,
        estimator=args.estimator, truncation=args.truncation,
        variance_mode=args.variance, t0=args.t0, ratio=args.ratio,
        epsilon=args.epsilon, seed=args.seed,
    )
    records = run_scenario(config)
    write_records_csv(args.out, records)
    print(f"wrote {len(records)} trials to {args.out}")
    return 0


def _cmd_summarize(args) -> int:
    records = read_records_csv(args.input)
    alphas = tuple(float(a) for a in args.alphas.split(","))
    summary = summarize(records, alphas)
    payload = json.dumps(summary.to_json_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
        print(f"wrote summary to {args.out}")
    else:
        print(payload)
    return 0


def _add_schedule_args(sp):
    sp.add_argument("--t0", type=float, default=10.0)
    sp.add_argument("--ratio", type=float, default=0.99)
    sp.add_argument("--epsilon", type=float, default=1e-6)
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockinfer")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("count", help="count bicluster structures")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--H", type=int, required=True)
    sp.add_argument("--exact", action="store_true",
                    help="count structures using exactly K row and H column clusters")
    sp.set_defaults(func=_cmd_count)

    sp = sub.add_parser("estimate", help="fit a structure to a CSV matrix")
    sp.add_argument("--input", required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--H", type=int, required=True)
    sp.add_argument("--method", choices=["exact", "sa", "tanwitten"], default="exact")
    _add_schedule_args(sp)
    sp.set_defaults(func=_cmd_estimate)

    sp = sub.add_parser("test", help="selective test on a CSV matrix")
    sp.add_argument("--input", required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--H", type=int, required=True)
    sp.add_argument("--sigma0", type=float, default=None)
    sp.add_argument("--unknown-variance", action="store_true")
    sp.add_argument("--block", choices=["first", "largest"], default="first",
                    help="reference block for the unknown-variance statistic")
    sp.add_argument("--method", choices=["exact", "sa"], default="exact")
    _add_schedule_args(sp)
    sp.set_defaults(func=_cmd_test)

    sp = sub.add_parser("simulate", help="run a batch of trials to CSV")
    sp.add_argument("--scenario", required=True,
                    choices=["realizable", "unrealizable", "approx", "sensitivity"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--Knull", type=int, default=None)
    sp.add_argument("--Hnull", type=int, default=None)
    sp.add_argument("--K", type=int, default=None)
    sp.add_argument("--H", type=int, default=None)
    sp.add_argument("--level", type=int, default=None)
    sp.add_argument("--sigma0", type=float, default=0.05)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--estimator", choices=["exact", "sa", "tanwitten"], default=None)
    sp.add_argument("--truncation", choices=["exact", "sa"], default=None)
    sp.add_argument("--variance", choices=["known", "unknown"], default="known")
    sp.add_argument("--out", required=True)
    _add_schedule_args(sp)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("summarize", help="metrics JSON from a trial CSV")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--alphas", default="0.1,0.05,0.01")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_summarize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
