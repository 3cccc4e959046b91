"""Command-line interface.

Exit codes: 0 on success, 2 when the MPB estimator returns ABORT, 1 on any
error (including usage errors).  Errors are reported as a JSON object on
stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path


from . import experiments as exp
from .configs import Binning, BinningScheme, ConfigSpace
from .distribution import CoarseTable, coarse_grain, exact_output_distribution
from .errors import BosonOWFError
from .matrix import UnitaryMatrix, haar_random_unitary
from .mpb import Algo1Params, estimate_mpb
from .owf import OwfParams, evaluate, evaluate_exact_full_domain
from .sampling import RngStream, build_sampler, draw_bins
from .security import birthday_simulate, collision_census, cost_estimates, t_min

EXIT_OK, EXIT_ERROR, EXIT_ABORT = 0, 1, 2

EXPERIMENTS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig7", "fig9", "fig10")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- output helpers ------------------------------------------------------------

def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows, fieldnames=None) -> str:
    buf = io.StringIO()
    rows = list(rows)
    fieldnames = fieldnames or (list(rows[0]) if rows else [])
    w = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_or_json(args, rows, payload=None) -> None:
    if args.format == "csv":
        _emit(args, _csv(rows))
    else:
        _emit(args, _json(payload if payload is not None else rows))


def _require_seed(args) -> int:
    if args.seed is None:
        raise UsageError(f"{args.command}: --seed is required for stochastic commands")
    return args.seed


def _scheme(args) -> BinningScheme:
    return BinningScheme(args.bins, Binning(args.binning))


def _algo1(args) -> Algo1Params:
    rounds = args.max_rounds
    if args.budget is not None:
        rounds = max(1, -(-args.budget // args.round_size))
    return Algo1Params(num_bootstraps=args.bootstraps, delta_n=args.round_size,
                       max_rounds=rounds, xi=args.xi)


# -- subcommands -----------------------------------------------------------------

def cmd_unitary(args) -> int:
    if args.action == "gen":
        if args.M is None:
            raise UsageError("unitary gen: --M is required")
        U = haar_random_unitary(args.M, _require_seed(args))
        if args.out:
            U.save(args.out)
        else:
            from .matrix import dumps_unitary
            sys.stdout.write(dumps_unitary(U))
        return EXIT_OK
    if not args.path:
        raise UsageError("unitary show: a unitary file is required")
    U = UnitaryMatrix.load(args.path)
    _emit(args, _json({"M": U.M, "seed": U.seed, "checksum": U.checksum(),
                       "unitarity_defect": U.unitarity_defect}))
    return EXIT_OK


def cmd_sample(args) -> int:
    U = UnitaryMatrix.load(args.unitary)
    coarse = CoarseTable(U, args.bosons, _scheme(args))[args.input_rank]
    rec = draw_bins(build_sampler(coarse), args.count, RngStream(_require_seed(args)))
    text = f"# d={rec.d}\n" + "\n".join(map(str, rec.labels.tolist())) + "\n"
    _emit(args, text)
    return EXIT_OK


def cmd_dist(args) -> int:
    U = UnitaryMatrix.load(args.unitary)
    space = ConfigSpace(U.M, args.bosons)
    dist = exact_output_distribution(U, space.unrank(args.input_rank), threads=args.threads)
    if args.bins:
        coarse = coarse_grain(dist, _scheme(args))
        rows = [{"bin": b, "probability": float(p)} for b, p in enumerate(coarse.probs)]
        payload = {"mpb_label": coarse.mpb_label, "p_max": coarse.p_max, "gap": coarse.gap,
                   "raw_mass": dist.raw_mass, "probs": coarse.probs.tolist()}
    else:
        rows = [{"rank": k, "probability": float(p)} for k, p in enumerate(dist.probs)]
        payload = {"raw_mass": dist.raw_mass, "probs": dist.probs.tolist()}
    _rows_or_json(args, rows, payload)
    return EXIT_OK


def cmd_mpb(args) -> int:
    U = UnitaryMatrix.load(args.unitary)
    coarse = CoarseTable(U, args.bosons, _scheme(args))[args.input_rank]
    outcome = estimate_mpb(build_sampler(coarse), coarse.d, _algo1(args),
                           RngStream(_require_seed(args)), threads=args.threads)
    _emit(args, _json(outcome.to_dict()))
    return EXIT_OK if outcome.ended else EXIT_ABORT


def cmd_owf(args) -> int:
    U = UnitaryMatrix.load(args.unitary)
    if args.action == "table":
        params = OwfParams(U, args.bosons, args.bins, Binning(args.binning))
        ys = evaluate_exact_full_domain(params, threads=args.threads)
        _emit(args, _csv({"x": x, "y": int(y)} for x, y in enumerate(ys.tolist())))
        return EXIT_OK
    if args.input is None:
        raise UsageError("owf eval: --input is required")
    if args.mode == "sampled":
        params = OwfParams(U, args.bosons, args.bins, Binning(args.binning), mode="sampled",
                           algo1=_algo1(args), retry_cap=args.retry_cap)
        rng = RngStream(_require_seed(args))
    else:
        params = OwfParams(U, args.bosons, args.bins, Binning(args.binning))
        rng = None
    y, trace = evaluate(args.input, params, rng)
    _emit(args, _json({"x": args.input, "y": y, "mode": args.mode, "trace": trace.to_dict()}))
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.action == "tmin":
        _emit(args, _json({"t_min": t_min(args.size, args.nu_max, args.eta),
                           "space_size": args.size, "nu_max": args.nu_max, "eta": args.eta}))
        return EXIT_OK
    if args.action == "cost":
        est = cost_estimates(args.M, args.N, args.d, args.omega, args.ncpu, args.nu_max, args.eta)
        _emit(args, _json(est.to_dict()))
        return EXIT_OK
    U = UnitaryMatrix.load(args.unitary)
    params = OwfParams(U, args.bosons, args.bins, Binning(args.binning))
    if args.action == "census":
        rep = collision_census(evaluate_exact_full_domain(params, threads=args.threads))
        if args.csv:
            Path(args.csv).write_text(_csv({"y": y, "count": int(c)} for y, c in enumerate(rep.occurrence.tolist())))
        _emit(args, _json(rep.to_dict()))
        return EXIT_OK
    rep = birthday_simulate(params, args.repetitions, RngStream(_require_seed(args)), threads=args.threads)
    _emit(args, _json(rep.to_dict()))
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {args.name!r}; choose from {', '.join(EXPERIMENTS)}")
    seed = _require_seed(args)
    rng = RngStream(seed)
    M, N, d = args.M, args.N, args.d
    sizes = args.sample_sizes or [10_000, 100_000]
    if args.name in ("fig1", "fig2", "fig3", "fig4", "fig10"):
        U = haar_random_unitary(M, seed)
    if args.name in ("fig1", "fig2", "fig3", "fig4"):
        coarse = CoarseTable(U, N, BinningScheme(d))[args.input_rank]

    if args.name == "fig1":
        rows = exp.ci_histograms(coarse, sizes, rng, num_bootstraps=args.bootstraps)
        _rows_or_json(args, rows)
    elif args.name == "fig2":
        res = exp.ci_width_scaling(coarse, sizes, args.runs, rng, num_bootstraps=args.bootstraps,
                                   threads=args.threads)
        _rows_or_json(args, res["rows"], res)
    elif args.name == "fig3":
        rows = exp.omega_boxes(coarse, sizes, args.runs, rng, num_bootstraps=args.bootstraps,
                               threads=args.threads)
        _rows_or_json(args, rows)
    elif args.name == "fig4":
        params = Algo1Params(args.bootstraps, args.round_size, args.max_rounds, args.xi)
        rows = exp.status_curves(coarse, params, args.runs, rng, threads=args.threads)
        _rows_or_json(args, rows)
    elif args.name == "fig5":
        eps = args.eps or [1e-5, 1e-4, 1e-3, 1e-2]
        rows = exp.eps_census(M, N, d, args.unitaries, eps, seed, threads=args.threads)
        _rows_or_json(args, rows)
    elif args.name == "fig7":
        U = haar_random_unitary(M, seed)
        rep = collision_census(evaluate_exact_full_domain(OwfParams(U, N, d), threads=args.threads))
        per_unitary = exp.census_over_unitaries(M, N, d, args.unitaries, seed, threads=args.threads)
        if args.format == "csv":
            _emit(args, _csv({"y": y, "count": int(c)} for y, c in enumerate(rep.occurrence.tolist())))
        else:
            _emit(args, _json({"census": rep.to_dict(), "occurrence": rep.occurrence.tolist(),
                               "per_unitary": per_unitary}))
    elif args.name == "fig9":
        rep = exp.birthday_over_unitaries(M, N, d, args.unitaries, args.repetitions, seed,
                                          threads=args.threads)
        if args.format == "csv":
            _emit(args, _csv({"theta": int(t), "p_hat": float(p)} for t, p in zip(rep.theta_grid, rep.success_curve)))
        else:
            _emit(args, _json(rep.to_dict()))
    elif args.name == "fig10":
        params = Algo1Params(args.bootstraps, args.round_size, args.max_rounds, args.xi)
        d_values = args.d_values or [31, 41, 51, 61, 75, 101, 151]
        rows = exp.bin_sweep(U, N, args.input_rank, d_values, params, args.runs, rng, threads=args.threads)
        _rows_or_json(args, rows)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    def unitary_flags(p, bins=True):
        p.add_argument("--unitary", required=True)
        p.add_argument("--bosons", "-N", type=int, default=3)
        if bins:
            p.add_argument("--bins", type=int, required=True)
        p.add_argument("--binning", choices=[b.value for b in Binning], default="contiguous")

    def algo1_flags(p):
        p.add_argument("--bootstraps", type=int, default=10_000)
        p.add_argument("--round-size", type=int, default=100_000)
        p.add_argument("--max-rounds", type=int, default=10)
        p.add_argument("--xi", type=float, default=1e-2)
        p.add_argument("--budget", type=int, default=None, help="sets max-rounds = ceil(budget / round-size)")

    parser = _Parser(prog="boson-owf", parents=[common],
                     description="Coarse-grained boson-sampling one-way function toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("unitary", parents=[common], help="generate or inspect a Haar unitary")
    p.add_argument("action", choices=("gen", "show"))
    p.add_argument("path", nargs="?")
    p.add_argument("--M", type=int)
    p.set_defaults(func=cmd_unitary)

    p = sub.add_parser("sample", parents=[common], help="draw coarse-grained labels")
    unitary_flags(p)
    p.add_argument("--input-rank", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("dist", parents=[common], help="exact fine or coarse distribution")
    unitary_flags(p, bins=False)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--input-rank", type=int, required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("mpb", parents=[common], help="adaptive MPB estimation")
    unitary_flags(p)
    p.add_argument("--input-rank", type=int, required=True)
    algo1_flags(p)
    p.set_defaults(func=cmd_mpb)

    p = sub.add_parser("owf", parents=[common], help="evaluate the one-way function")
    p.add_argument("action", choices=("eval", "table"))
    unitary_flags(p)
    p.add_argument("--input", type=int)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--retry-cap", type=int, default=None)
    algo1_flags(p)
    p.set_defaults(func=cmd_owf)

    p = sub.add_parser("analyze", parents=[common], help="security analysis")
    asub = p.add_subparsers(dest="action", parser_class=_Parser)
    asub.required = True
    q = asub.add_parser("census", parents=[common])
    unitary_flags(q)
    q.add_argument("--csv", default=None, help="also write y,count CSV here")
    q = asub.add_parser("birthday", parents=[common])
    unitary_flags(q)
    q.add_argument("--repetitions", type=int, default=1000)
    q = asub.add_parser("tmin", parents=[common])
    q.add_argument("--size", type=int, required=True)
    q.add_argument("--nu-max", type=int, required=True)
    q.add_argument("--eta", type=float, default=1e-2)
    q = asub.add_parser("cost", parents=[common])
    q.add_argument("--M", type=int, required=True)
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--omega", type=float, default=1e21)
    q.add_argument("--ncpu", type=int, default=10_000)
    q.add_argument("--nu-max", type=int, required=True)
    q.add_argument("--eta", type=float, default=1e-2)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("experiment", parents=[common], help="emit data for a standard experiment")
    p.add_argument("name")
    p.add_argument("--M", type=int, default=26)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--d", type=int, default=51)
    p.add_argument("--input-rank", type=int, default=16)
    p.add_argument("--unitaries", type=int, default=20)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--repetitions", type=int, default=1000)
    p.add_argument("--sample-sizes", type=int, nargs="+")
    p.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--d-values", type=int, nargs="+")
    algo1_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stdout.write(_json({"error": "UsageError", "message": str(exc)}))
        return EXIT_ERROR
    except (BosonOWFError, ValueError, OSError) as exc:
        sys.stdout.write(_json({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
