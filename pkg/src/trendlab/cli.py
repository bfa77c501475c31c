"""Command-line entry point: ``trendlab {simulate,urn,fit,oracle-check,sweep}``."""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .analysis import EstimationError, fit_exponent, predicted_exponent, yule_pdf
from .histogram import HistogramParseError, SizeHistogram, read_histogram, write_histogram
from .model import ConfigurationError, ModelParams, component_sizes, lcc_fraction, run
from .oracle import ENUMERATION_LIMIT, OracleLimitError, enumerate_rg, enumerate_urn, check_equivalence
from .sampling import replication_seed
from .urn import UrnParams, simulate_urn

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CHECK_FAILED = 4
EXIT_ESTIMATOR = 5

TV_TOLERANCE = 1e-12


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    replications: int
    output_dir: Path
    emit_events: bool = False
    exclude_lcc: Optional[bool] = None  # None: exclude exactly when p < 1
    lambda_text: Optional[str] = None

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")

    @property
    def drop_lcc(self) -> bool:
        return self.params.p < 1 if self.exclude_lcc is None else self.exclude_lcc


def thread_limit() -> int:
    raw = os.environ.get("TRENDLAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise CliError(f"TRENDLAB_THREADS must be an integer, got {raw!r}", EXIT_USAGE)
    return os.cpu_count() or 1


def _map(fn, jobs):
    jobs = list(jobs)
    workers = min(len(jobs), thread_limit())
    if workers <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _parse_ratio(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a ratio: {text!r}")
    return value


def _lambda_from(args) -> tuple:
    """Return ``(value, text)``; exact rational for ``--lambda-ratio``."""
    if getattr(args, "lambda_ratio", None) is not None:
        return args.lambda_ratio, f"{args.lambda_ratio.numerator}/{args.lambda_ratio.denominator}"
    if getattr(args, "lam", None) is not None:
        return args.lam, repr(args.lam)
    raise CliError("one of --lambda or --lambda-ratio is required", EXIT_USAGE)


def _prepare_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CliError(f"cannot write to {path}: {exc}", EXIT_IO)
    return path


def _write_json(path: Path, doc) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    return statistics.fmean(vals), (statistics.stdev(vals) if len(vals) > 1 else 0.0)


def _fit_or_none(sizes, exclude_lcc: bool):
    try:
        return fit_exponent(sizes, exclude_lcc=exclude_lcc).alpha_hat
    except EstimationError:
        return None


# -- simulate -----------------------------------------------------------------

def _simulate_replication(job):
    config, rep = job
    base = config.params
    seed = replication_seed(base.seed, rep)
    params = ModelParams(base.lam, base.p, base.q, base.steps, seed)
    graph, events = run(params, record_events=config.emit_events)
    sizes = component_sizes(graph)
    hist = SizeHistogram.from_sizes(sizes)
    header = {
        "artifact": f"trendlab {__version__}",
        "command": "simulate",
        "lambda": config.lambda_text or repr(base.lam),
        "p": repr(base.p),
        "q": repr(base.q),
        "steps": base.steps,
        "master_seed": base.seed,
        "replication": rep,
        "seed": seed,
    }
    out = config.output_dir
    write_histogram(out / f"hist_r{rep:03d}.tsv", hist, header)
    if events is not None:
        with open(out / f"events_r{rep:03d}.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# {json.dumps(header, sort_keys=True)}\n")
            for ev in events:
                fh.write(json.dumps(ev.to_record()))
                fh.write("\n")
    return {
        "replication": rep,
        "seed": seed,
        "node_count": graph.node_count,
        "component_count": graph.component_count,
        "lcc_fraction": lcc_fraction(graph),
        "alpha_hat": _fit_or_none(hist, config.drop_lcc),
    }


def simulate(config: RunConfig) -> dict:
    """Run all replications of ``config`` and write their outputs; returns the summary."""
    _prepare_dir(config.output_dir)
    reps = _map(_simulate_replication, [(config, r) for r in range(config.replications)])
    p = config.params
    mean, std = _mean_std(r["alpha_hat"] for r in reps)
    predicted = float(predicted_exponent(p.lam, p.p)) if p.p > 0 else None
    summary = {
        "artifact": f"trendlab {__version__}",
        "command": "simulate",
        "params": {"lambda": config.lambda_text or repr(p.lam), "p": p.p, "q": p.q,
                   "steps": p.steps, "seed": p.seed},
        "replications": reps,
        "exclude_lcc": config.drop_lcc,
        "estimator": "yule-mle",
        "aggregate": {"alpha_hat_mean": mean, "alpha_hat_std": std, "predicted_exponent": predicted},
    }
    _write_json(config.output_dir / "summary.json", summary)
    return summary


def cmd_simulate(args) -> int:
    lam, text = _lambda_from(args)
    try:
        params = ModelParams(lam, args.p, args.q, args.steps, args.seed)
        config = RunConfig(params, args.replications, Path(args.out), args.emit_events,
                           args.exclude_lcc, text)
    except ConfigurationError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    summary = simulate(config)
    agg = summary["aggregate"]
    print(f"wrote {config.replications} replication(s) to {config.output_dir}")
    if agg["alpha_hat_mean"] is not None:
        print(f"alpha_hat mean {agg['alpha_hat_mean']:.4f} (sd {agg['alpha_hat_std']:.4f}); "
              f"predicted {agg['predicted_exponent']}")
    return EXIT_OK


# -- urn ----------------------------------------------------------------------

def _urn_replication(job):
    params, rep, out, exclude_lcc = job
    seed = replication_seed(params.seed, rep)
    state = simulate_urn(UrnParams(params.p_bar, params.gamma, params.steps, seed))
    hist = SizeHistogram.from_sizes(state.bins)
    header = {
        "artifact": f"trendlab {__version__}",
        "command": "urn",
        "p_bar": repr(params.p_bar),
        "gamma": repr(params.gamma),
        "steps": params.steps,
        "master_seed": params.seed,
        "replication": rep,
        "seed": seed,
    }
    write_histogram(out / f"hist_r{rep:03d}.tsv", hist, header)
    return {
        "replication": rep,
        "seed": seed,
        "ball_count": hist.total,
        "bin_count": hist.n,
        "largest_bin_fraction": hist.largest / hist.total,
        "alpha_hat": _fit_or_none(hist, exclude_lcc),
    }


def cmd_urn(args) -> int:
    try:
        params = UrnParams(args.p_bar, args.gamma, args.steps, args.seed)
        if args.replications < 1:
            raise ConfigurationError("replications must be >= 1")
    except ConfigurationError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    out = _prepare_dir(Path(args.out))
    exclude = bool(args.exclude_lcc)
    reps = _map(_urn_replication, [(params, r, out, exclude) for r in range(args.replications)])
    mean, std = _mean_std(r["alpha_hat"] for r in reps)
    predicted = 1 + 1 / (1 - params.p_bar) if params.gamma == 1 and params.p_bar < 1 else None
    summary = {
        "artifact": f"trendlab {__version__}",
        "command": "urn",
        "params": {"p_bar": params.p_bar, "gamma": params.gamma, "steps": params.steps,
                   "seed": params.seed},
        "replications": reps,
        "exclude_lcc": exclude,
        "estimator": "yule-mle",
        "aggregate": {"alpha_hat_mean": mean, "alpha_hat_std": std, "predicted_exponent": predicted},
    }
    _write_json(out / "summary.json", summary)
    print(f"wrote {args.replications} replication(s) to {out}")
    if mean is not None:
        print(f"alpha_hat mean {mean:.4f} (sd {std:.4f}); predicted {predicted}")
    return EXIT_OK


# -- fit ----------------------------------------------------------------------

def _header_float(header, key):
    try:
        return float(Fraction(header[key]))
    except (KeyError, ValueError, ZeroDivisionError):
        return None


def cmd_fit(args) -> int:
    rows = []
    observed: dict[int, int] = {}
    for path in args.files:
        try:
            hist, header = read_histogram(path)
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}", EXIT_IO)
        except HistogramParseError as exc:
            raise CliError(f"parse error: {exc}", EXIT_IO)
        lam = _lambda_from(args)[0] if (args.lam is not None or args.lambda_ratio is not None) \
            else _header_float(header, "lambda")
        p = args.p if args.p is not None else _header_float(header, "p")
        if args.exclude_lcc is None:
            exclude = p is not None and p < 1
        else:
            exclude = args.exclude_lcc
        try:
            res = fit_exponent(hist, exclude_lcc=exclude, method=args.method)
        except EstimationError as exc:
            raise CliError(f"{path}: {exc}", EXIT_ESTIMATOR)
        rows.append((str(path), res, lam, p))
        counts = dict(hist.counts)
        if exclude:
            counts[max(counts)] -= 1
        for k, c in counts.items():
            if c:
                observed[k] = observed.get(k, 0) + c

    print("# file\talpha_hat\tn_used\tlcc_excluded\tpredicted_exponent")
    predictions = set()
    for path, res, lam, p in rows:
        pred = float(predicted_exponent(lam, p)) if lam is not None and p else None
        predictions.add(pred)
        print(f"{path}\t{res.alpha_hat:.6f}\t{res.n_used}\t{str(res.lcc_excluded).lower()}\t"
              f"{'' if pred is None else repr(pred)}")
    if len(predictions) == 1 and None not in predictions:
        alpha = predictions.pop()
        print(f"# predicted_exponent: {alpha!r}")
        total = sum(observed.values())
        print("# size\tobserved_fraction\tyule_pdf")
        for k in sorted(observed):
            print(f"{k}\t{observed[k] / total!r}\t{yule_pdf(k, alpha - 1)!r}")
    return EXIT_OK


# -- oracle-check -------------------------------------------------------------

def _fmt_dist(dist) -> str:
    parts = [f"{{{','.join(map(str, k))}}}:{v}" for k, v in sorted(dist.support.items())]
    return " ".join(parts)


def cmd_oracle_check(args) -> int:
    lam, text = _lambda_from(args)
    lam = Fraction(lam) if not isinstance(lam, Fraction) else lam
    if args.t_max > ENUMERATION_LIMIT:
        raise CliError(f"t_max {args.t_max} exceeds the enumeration limit {ENUMERATION_LIMIT}", EXIT_USAGE)
    if args.t_max < 1:
        raise CliError("t_max must be >= 1", EXIT_USAGE)
    p_bar = lam / (lam + 1)
    print(f"# lambda: {text}")
    print(f"# p_bar: {p_bar}")
    failed = False
    for t in range(1, args.t_max + 1):
        try:
            tv = check_equivalence(lam, t)
        except OracleLimitError as exc:
            raise CliError(str(exc), EXIT_USAGE)
        ok = tv <= TV_TOLERANCE
        failed |= not ok
        print(f"t={t}\ttv={float(tv)!r}\t{'ok' if ok else 'FAIL'}")
    if args.t_max >= 2:
        print(f"# rg t=2: {_fmt_dist(enumerate_rg(ModelParams(lam, 1, 0), 2))}")
        print(f"# urn t=2: {_fmt_dist(enumerate_urn(p_bar, 2))}")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# -- sweep --------------------------------------------------------------------

def cmd_sweep(args) -> int:
    out = _prepare_dir(Path(args.out))
    index = []
    for lam, p in itertools.product(args.lam, args.p):
        sub = out / f"lambda={lam!r}_p={p!r}"
        try:
            params = ModelParams(lam, p, args.q, args.steps, args.seed)
            config = RunConfig(params, args.replications, sub, args.emit_events, args.exclude_lcc)
        except ConfigurationError as exc:
            raise CliError(str(exc), EXIT_USAGE)
        summary = simulate(config)
        agg = summary["aggregate"]
        index.append({"lambda": lam, "p": p, "dir": sub.name, **agg})
        print(f"lambda={lam!r} p={p!r}: alpha_hat mean {agg['alpha_hat_mean']} "
              f"predicted {agg['predicted_exponent']}")
    _write_json(out / "sweep.json", {"artifact": f"trendlab {__version__}", "command": "sweep",
                                    "q": args.q, "steps": args.steps, "seed": args.seed,
                                    "replications": args.replications, "runs": index})
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def _add_lambda(parser, required=False):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--lambda", dest="lam", type=_finite, help="new-topic intensity (decimal)")
    group.add_argument("--lambda-ratio", type=_parse_ratio, help="new-topic intensity as a ratio, e.g. 1/3")


def _add_run_flags(parser):
    parser.add_argument("--q", type=_finite, default=0.9, help="superstar probability (default 0.9)")
    parser.add_argument("--steps", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--replications", type=int, default=1)
    parser.add_argument("--out", default="runs", help="output directory")
    parser.add_argument("--emit-events", action="store_true", help="write the per-step event log")
    parser.add_argument("--exclude-lcc", action=argparse.BooleanOptionalAction, default=None,
                        help="drop the largest component before fitting (default: when p < 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"trendlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="simulate the retweet-graph model")
    _add_lambda(sp, required=True)
    sp.add_argument("--p", type=_finite, required=True)
    _add_run_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    up = sub.add_parser("urn", help="simulate the Polya urn")
    up.add_argument("--p-bar", type=_finite, required=True)
    up.add_argument("--gamma", type=_finite, default=1.0)
    up.add_argument("--steps", type=int, default=100_000)
    up.add_argument("--seed", type=int, default=0)
    up.add_argument("--replications", type=int, default=1)
    up.add_argument("--out", default="urn-runs")
    up.add_argument("--exclude-lcc", action=argparse.BooleanOptionalAction, default=False)
    up.set_defaults(func=cmd_urn)

    fp = sub.add_parser("fit", help="fit exponents to histogram files")
    fp.add_argument("files", nargs="+", type=Path)
    _add_lambda(fp)
    fp.add_argument("--p", type=_finite)
    fp.add_argument("--exclude-lcc", action=argparse.BooleanOptionalAction, default=None)
    fp.add_argument("--method", choices=("yule", "continuous"), default="yule")
    fp.set_defaults(func=cmd_fit)

    op = sub.add_parser("oracle-check", help="exact graph/urn equivalence check at p = 1")
    _add_lambda(op, required=True)
    op.add_argument("--t-max", type=int, default=5)
    op.set_defaults(func=cmd_oracle_check)

    wp = sub.add_parser("sweep", help="simulate over a grid of lambda and p values")
    wp.add_argument("--lambda", dest="lam", type=_finite, nargs="+", required=True)
    wp.add_argument("--p", type=_finite, nargs="+", required=True)
    _add_run_flags(wp)
    wp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"trendlab {args.command}: error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"trendlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
