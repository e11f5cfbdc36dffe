"""Prior-free prediction regions and plausibility curves for future observations.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .datasets import BUNDLED, get_dataset
from .engine import (
    DEFAULT_MC_DRAWS,
    build_empirical_G,
    build_endpoint_Gs,
    curve,
    curve_from_endpoint_pairs,
    region,
    region_from_endpoint_pairs,
)
from .errors import NumericalFailure, ParameterDomainError
from .fileio import curve_to_csv, dumps_json, ingest, region_to_csv, render_curve_svg
from .gamma_solver import METHODS, GammaSolveConfig
from .models import MODELS, PredictionTarget, SampleData, make_sampler
from .randsets import AssertionKind
from .streams import UniformStream
from .validity import (
    SimScenario,
    binomial_grid,
    gamma_grid,
    grid_runner,
    lognormal_grid,
    reports_to_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
SEED_ENV = "IMPREDICTION_SEED"


class UsageError(Exception):
    pass


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _pair(text, kind, cast):
    try:
        a, b = text.split("/")
        return cast(a), int(b)
    except ValueError:
        raise UsageError(f"{kind} must look like A/B, got {text!r}") from None


def _params(text):
    out = {}
    for item in filter(None, (text or "").split(",")):
        try:
            k, v = item.split("=")
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"bad parameter {item!r}; use name=value,...") from None
    return out


def _load_data(args) -> SampleData:
    model = args.model
    if model == "binomial":
        if not args.count:
            raise UsageError("binomial model needs --count Y/N")
        y, n = _pair(args.count, "--count", int)
        return SampleData.binomial(y, n)
    if model == "poisson_process":
        if not args.arrival:
            raise UsageError("poisson_process model needs --arrival T_N/N")
        t_n, n = _pair(args.arrival, "--arrival", float)
        return SampleData.arrival(t_n, n)
    if not args.data:
        raise UsageError(f"{model} model needs --data (bundled name or file path)")
    values = get_dataset(args.data).values if args.data in BUNDLED else ingest(args.data)
    return SampleData.sample(values, model)


def _target(args) -> PredictionTarget:
    if args.model == "binomial":
        if args.future_trials is None and not args.target:
            raise UsageError("binomial model needs --future-trials M")
        if args.target:
            return PredictionTarget.parse(args.target)
        return PredictionTarget("binomial_count_of_m", m=args.future_trials)
    if args.model == "poisson_process" and not args.target:
        return PredictionTarget("arrival_n_plus_k", k=1)
    return PredictionTarget.parse(args.target or "next")


def _solver(args):
    return GammaSolveConfig(method=args.solver, moments=args.moments)


def _header(args, target, seed, command):
    return {
        "command": command,
        "model": args.model,
        "target": target.label(),
        "assertion": AssertionKind.parse(args.assertion).value,
        "alpha": args.alpha,
        "mc_draws": args.mc_draws,
        "seed": seed,
        "version": __version__,
    }


def _predictive(args):
    data = _load_data(args)
    target = _target(args)
    sampler = make_sampler(data, target, binomial_method=args.binomial_method, solver=_solver(args))
    seed = args.seed if args.seed is not None else _default_seed()
    stream = UniformStream(seed, 0)
    if sampler.paired:
        return data, target, seed, build_endpoint_Gs(sampler, args.mc_draws, stream)
    return data, target, seed, build_empirical_G(sampler, args.mc_draws, stream)


def cmd_interval(args):
    _, target, seed, G = _predictive(args)
    if isinstance(G, tuple):
        reg = region_from_endpoint_pairs(*G, args.alpha, args.assertion)
    else:
        reg = region(G, args.assertion, args.alpha)
    if args.format == "csv":
        return region_to_csv(reg)
    if args.format == "svg":
        raise UsageError("svg output is available for the plaus command only")
    payload = _header(args, target, seed, "interval")
    payload["region"] = reg.to_dict()
    return dumps_json(payload)


def cmd_plaus(args):
    _, target, seed, G = _predictive(args)
    if isinstance(G, tuple):
        c = curve_from_endpoint_pairs(*G, args.assertion)
        reg = region_from_endpoint_pairs(*G, args.alpha, args.assertion)
    else:
        c = curve(G, args.assertion)
        reg = region(G, args.assertion, args.alpha)
    if args.format == "csv":
        return curve_to_csv(c)
    if args.format == "svg":
        title = f"{args.model} {target.label()} ({args.data or args.count or args.arrival})"
        return render_curve_svg(c, args.alpha, title)
    payload = _header(args, target, seed, "plaus")
    payload["curve"] = {"assertion": c.assertion.value, "y": c.grid.tolist(), "pl": c.pl.tolist()}
    payload["region"] = reg.to_dict()
    return dumps_json(payload)


def _scenarios(args):
    seed = args.seed if args.seed is not None else _default_seed()
    if args.grid:
        kw = dict(replications=args.reps, mc_draws=args.mc_draws, seed=seed)
        if args.grid == "lognormal":
            return lognormal_grid(full=args.full, alpha=args.alpha, assertion=args.assertion, **kw)
        if args.grid == "gamma":
            return gamma_grid(full=args.full, alpha=args.alpha, assertion=args.assertion, **kw)
        return binomial_grid(alpha=args.alpha, **kw)
    if args.n is None:
        raise UsageError("--n is required unless --grid is given")
    if args.model == "binomial":
        target = PredictionTarget("binomial_count_of_m", m=args.future_trials or args.n)
    else:
        target = _target(args)
    return [
        SimScenario(args.model, _params(args.params), args.n, target, args.alpha, args.assertion,
                    args.reps, args.mc_draws, seed, args.binomial_method, _solver(args))
    ]


def cmd_study(args):
    reports = grid_runner(_scenarios(args), workers=args.workers)
    if args.format == "csv":
        return reports_to_csv(reports)
    if args.format == "svg":
        raise UsageError("svg output is available for the plaus command only")
    rows = []
    for rep in reports:
        row = rep.row()
        row["error"] = rep.error
        row["coverage_by_assertion"] = (
            {k.value: rep.coverage_for(k) for k in AssertionKind} if rep.error is None else {}
        )
        if args.command == "pit" and rep.error is None:
            row["pit_samples"] = rep.pit_samples.tolist()
        rows.append(_finite(row))
    return dumps_json({"command": args.command, "version": __version__, "reports": rows})


def _finite(obj):
    if isinstance(obj, float) and obj != obj:
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def cmd_datasets(args):
    if args.name:
        d = get_dataset(args.name)
        if args.format == "csv":
            return "value\r\n" + "".join(f"{v}\r\n" for v in d.values)
        return dumps_json({"name": d.name, "values": list(d.values), "units": d.units,
                           "description": d.description, "model": d.model})
    if args.format == "csv":
        return "name,n,units,model\r\n" + "".join(
            f"{d.name},{len(d.values)},{d.units},{d.model}\r\n" for d in BUNDLED.values()
        )
    return dumps_json({"datasets": [{"name": d.name, "n": len(d.values), "units": d.units,
                                     "model": d.model, "description": d.description} for d in BUNDLED.values()]})


def _add_common(p, study=False):
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--target", help="next | mean-of-m:M | max-of-m:M | kth-largest:M:K | arrival:K | count-of-m:M")
    p.add_argument("--assertion", default="singleton", type=AssertionKind.parse,
                   help="right (upper bound), left (lower bound) or singleton (two-sided)")
    p.add_argument("--alpha", type=float, default=0.10)
    p.add_argument("--mc-draws", type=int, default=DEFAULT_MC_DRAWS)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    p.add_argument("--future-trials", type=int, help="binomial: number of future trials m")
    p.add_argument("--solver", choices=METHODS, default="gamma_matched_approx")
    p.add_argument("--moments", choices=("exact", "asymptotic"), default="exact")
    p.add_argument("--binomial-method", choices=("endpoints", "modified"),
                   default="modified" if study else "endpoints")
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.add_argument("--output", "-o", help="write here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="imprediction", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("interval", cmd_interval, "prediction plausibility region"),
        ("plaus", cmd_plaus, "plausibility curve (json/csv/svg)"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--data", help="bundled dataset name or path to a one-column file")
        p.add_argument("--count", help="binomial: observed Y/N")
        p.add_argument("--arrival", help="poisson_process: T_N/N (time of the N-th arrival)")
        p.set_defaults(func=fn)
    for name in ("pit", "coverage"):
        p = sub.add_parser(name, help=f"{name} simulation study")
        _add_common(p, study=True)
        p.add_argument("--params", help="true parameters, e.g. mu=2,sigma2=10 or shape=5,scale=1")
        p.add_argument("--n", type=int, help="sample size of each simulated data set")
        p.add_argument("--reps", type=int, default=1000)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--grid", choices=("lognormal", "gamma", "binomial"), help="run a predefined grid")
        p.add_argument("--full", action="store_true", help="long-run full factorial grid")
        p.add_argument("--data", help=argparse.SUPPRESS)
        p.add_argument("--count", help=argparse.SUPPRESS)
        p.add_argument("--arrival", help=argparse.SUPPRESS)
        p.set_defaults(func=cmd_study)
    p = sub.add_parser("datasets", help="list or print bundled datasets")
    p.add_argument("--name", choices=sorted(BUNDLED))
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_datasets)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except (UsageError, ParameterDomainError) as exc:
        print(f"imprediction: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"imprediction: numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
