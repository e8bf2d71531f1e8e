"""``hypersbm`` command line: gen, detect, rate, experiment, oracle.

Exit codes: 0 success, 1 runtime failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

from .exceptions import BudgetExceededError, ConvergenceError, ParseError
from .experiment import load_config, run_experiment, write_csv
from .metrics import mismatch_ratio
from .model import (
    ModelParams,
    balanced_assignment,
    read_assignment,
    read_hypergraph,
    sample_hypergraph,
    validate_params,
    write_assignment,
    write_hypergraph,
)
from .rate import predict_regimes, rate_report
from .refine import MODES, detect
from .spectral import DEFAULT_MU, DEFAULT_TAU_FACTOR, DEFAULT_TOL

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _read_params_file(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            values[key] = value
    return values


def _params_from_args(args) -> ModelParams:
    if getattr(args, "params", None):
        raw = _read_params_file(args.params)
        for key in ("n", "k", "d", "eta"):
            if key in raw and getattr(args, key, None) is None:
                setattr(args, key, float(raw[key]) if key == "eta" else int(raw[key]))
        if "p" in raw and args.p is None:
            args.p = _floats(raw["p"])
        if "a" in raw and args.a is None:
            args.a = _floats(raw["a"])
    for key in ("n", "k", "d"):
        if getattr(args, key) is None:
            raise UsageError(f"--{key} is required")
    if (args.p is None) == (args.a is None):
        raise UsageError("give exactly one of --p and --a")
    eta = 0.5 if args.eta is None else args.eta
    try:
        if args.a is not None:
            return ModelParams.from_scaled(args.n, args.k, args.d, args.a, eta)
        return ModelParams(args.n, args.k, args.d, eta, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_param_flags(p):
    p.add_argument("--params", help="key = value file with n, k, d, eta, p or a")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--p", type=_floats, help="relation probabilities, comma-separated")
    p.add_argument("--a", type=_floats, help="a-vector; p = a / n^(d-1)")


def _add_algo_flags(p):
    p.add_argument("--mode", choices=MODES, default="simplified")
    p.add_argument("--mu", type=float, default=DEFAULT_MU)
    p.add_argument("--tau-factor", type=float, default=DEFAULT_TAU_FACTOR)
    p.add_argument("--eps-clamp", type=float, default=None)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)


def cmd_gen(args) -> int:
    params = _params_from_args(args)
    problems = [x for x in validate_params(params) if not args.clamped_test or "(0,1)" not in x]
    if problems:
        raise UsageError("; ".join(problems))
    labels = balanced_assignment(params.n, params.k)
    h = sample_hypergraph(params, labels, args.seed)
    write_hypergraph(h, args.out + ".hsbm")
    write_assignment(labels, params.k, args.out + ".labels")
    print(f"wrote {h.n_edges} edges to {args.out}.hsbm and labels to {args.out}.labels")
    return EXIT_OK


def cmd_detect(args) -> int:
    h = read_hypergraph(args.hypergraph)
    labels = detect(h, args.k, args.mode, args.mu, args.tau_factor, args.eps_clamp, args.tol)
    if args.out:
        write_assignment(labels, args.k, args.out)
    else:
        write_assignment(labels, args.k, sys.stdout)
    if args.truth:
        truth, k = read_assignment(args.truth)
        if truth.shape[0] != h.n:
            raise UsageError(f"truth has {truth.shape[0]} labels, hypergraph has {h.n} nodes")
        ratio, perm = mismatch_ratio(labels, truth, max(k, args.k))
        print(f"mismatch_ratio {ratio!r}", file=sys.stderr if not args.out else sys.stdout)
        print("permutation " + " ".join(str(t + 1) for t in perm),
              file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_rate(args) -> int:
    params = _params_from_args(args)
    report = rate_report(params)
    regimes = predict_regimes(report)
    print(f"n={report.n} k={report.k} d={report.d} p={list(params.p)}")
    print(f"{'i':>3} {'j':>3} {'m':>12} {'I':>14} {'m*I':>14}")
    for (i, j), m, div, term in report.terms():
        print(f"{i:>3} {j:>3} {m:>12} {div:>14.6e} {term:>14.6e}")
    print(f"exponent E          {report.exponent:.6f}")
    print(f"predicted risk      {report.predicted_risk:.6e}")
    print(f"E / ln n            {report.exact_recovery_ratio:.6f}")
    print(f"exact recovery      {'yes' if regimes['exact_recovery'] else 'no'}")
    print(f"condition (main)    {report.condition_main:.6f}")
    print(f"condition (order)   {report.condition_order:.6f}")
    if args.csv:
        fh = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="", encoding="ascii")
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["row", "i", "j", "m", "I", "mI", "E", "predicted_risk", "E_over_ln_n"])
            for (i, j), m, div, term in report.terms():
                w.writerow(["pair", i, j, m, repr(div), repr(term), "", "", ""])
            w.writerow(["summary", "", "", "", "", "", repr(report.exponent),
                        repr(report.predicted_risk), repr(report.exact_recovery_ratio)])
        finally:
            if fh is not sys.stdout:
                fh.close()
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    jobs = args.jobs if args.jobs is not None else int(os.environ.get("HYPERSBM_JOBS", "1"))
    records = run_experiment(config, jobs=jobs)
    with open(args.out, "w", newline="", encoding="ascii") as fh:
        write_csv(records, fh, timings=args.timings)
    failed = sum(r.status != "ok" for r in records)
    if failed:
        print(f"{failed} trial(s) failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_oracle(args) -> int:
    from . import oracle

    if args.what == "m":
        coeffs = oracle.brute_force_m(args.d, args.k, args.n)
        for pair in sorted(coeffs.m):
            print(f"{pair[0]} {pair[1]} forward={coeffs.forward[pair]} "
                  f"backward={coeffs.backward[pair]} m={coeffs.m[pair]}")
    elif args.what == "pairs":
        for i, j in sorted(oracle.brute_force_neighbor_pairs(args.d, args.k)):
            print(i, j)
    elif args.what == "testing":
        from .relations import confusion_coefficients

        params = _params_from_args(args)
        coeffs = confusion_coefficients(params.d, params.k, params.n)
        prob = oracle.exact_testing_probability(params, coeffs)
        E = rate_report(params).exponent
        print(f"exact {prob!r} exp(-E) {math.exp(-E)!r}")
    elif args.what == "mle":
        h = read_hypergraph(args.hypergraph)
        labels = oracle.exhaustive_mle(h, args.k, args.p)
        write_assignment(labels, args.k, sys.stdout)
    elif args.what == "loss":
        est, k1 = read_assignment(args.est)
        truth, k2 = read_assignment(args.truth)
        print(repr(oracle.exhaustive_permutation_loss(est, truth, max(k1, k2))))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypersbm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a hypergraph and its planted labeling")
    _add_param_flags(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output prefix (.hsbm and .labels)")
    g.add_argument("--clamped-test", action="store_true",
                   help="allow probabilities 0 and 1")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("detect", help="detect communities in a hypergraph file")
    d.add_argument("hypergraph")
    d.add_argument("--k", type=int, required=True)
    _add_algo_flags(d)
    d.add_argument("--truth", help="ground-truth labels; prints the mismatch ratio")
    d.add_argument("--out", help="write labels here instead of stdout")
    d.set_defaults(func=cmd_detect)

    r = sub.add_parser("rate", help="error exponent report")
    _add_param_flags(r)
    r.add_argument("--csv", help="also write CSV here ('-' for stdout)")
    r.set_defaults(func=cmd_rate)

    e = sub.add_parser("experiment", help="Monte Carlo sweep from a config file")
    e.add_argument("config")
    e.add_argument("--out", required=True)
    e.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $HYPERSBM_JOBS or 1)")
    e.add_argument("--timings", action="store_true",
                   help="add a wall_time column (output no longer reproducible)")
    e.set_defaults(func=cmd_experiment)

    o = sub.add_parser("oracle", help="brute-force references")
    osub = o.add_subparsers(dest="what", required=True)
    om = osub.add_parser("m")
    for key in ("d", "k", "n"):
        om.add_argument(f"--{key}", type=int, required=True)
    op = osub.add_parser("pairs")
    op.add_argument("--d", type=int, required=True)
    op.add_argument("--k", type=int, required=True)
    ot = osub.add_parser("testing")
    _add_param_flags(ot)
    ol = osub.add_parser("mle")
    ol.add_argument("hypergraph")
    ol.add_argument("--k", type=int, required=True)
    ol.add_argument("--p", type=_floats, required=True)
    oloss = osub.add_parser("loss")
    oloss.add_argument("est")
    oloss.add_argument("truth")
    o.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"hypersbm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceededError, ConvergenceError, OSError, ValueError) as exc:
        print(f"hypersbm {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
