"""Command-line entry point: ``lppl-pm {backtest,fit,synth,baseline,evaluate}``.

Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 no feasible fit
on any evaluated day.
"""
import argparse
import csv
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .backtest import BacktestConfig, run_backtest
from .changepoint import run_dual_detectors
from .detector import is_ib_point
from .evaluation import format_kpis, load_alerts, load_events, match_alerts, save_alerts
from .exceptions import DataError, InsufficientHistoryError, LpplPmError, NoFeasibleFitError, ParseError
from .fitter import FitConstraints, fit_best
from .model import LpplParams, TransformKind
from .series import GAP_POLICIES, from_ordinal, load_series, save_series, to_ordinal
from .synthetic import SynthSpec, gen_lppl_series

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NO_FIT = 3
SEED_ENV = "LPPL_PM_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer")
    if seed < 0:
        raise UsageError(f"{SEED_ENV} must be non-negative")
    return seed


def _fixture(name):
    return resources.files("lppl_pm").joinpath("data", name)


def _add_common(p):
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed; falls back to ${SEED_ENV}, then 0")


def _add_input(p):
    p.add_argument("--input", "-i", required=True, help="CSV with header date,value")
    p.add_argument("--gap-policy", choices=GAP_POLICIES, default="reject",
                   help="how missing days are handled")


def _add_fit_options(p):
    d = FitConstraints()
    g = p.add_argument_group("fit")
    g.add_argument("--l-min", type=int, default=d.l_range[0], help="shortest window length")
    g.add_argument("--l-max", type=int, default=d.l_range[1], help="longest window length")
    g.add_argument("--m-min", type=float, default=d.m_range[0], help="exponent lower bound (open)")
    g.add_argument("--m-max", type=float, default=d.m_range[1], help="exponent upper bound (open)")
    g.add_argument("--omega-min", type=float, default=d.omega_range[0], help="angular frequency lower bound (open)")
    g.add_argument("--omega-max", type=float, default=d.omega_range[1], help="angular frequency upper bound (open)")
    g.add_argument("--n-starts", type=int, default=d.n_starts, help="random starts per window")
    g.add_argument("--max-iters", type=int, default=d.max_iters, help="iteration cap per start")
    g.add_argument("--margin", type=float, default=d.margin, help="interior margin kept from open bounds")
    g.add_argument("--tie-tol", type=float, default=d.tie_tol, help="mse tolerance treated as a tie between lengths")
    g.add_argument("--prefer", choices=("longest", "shortest"), default=d.prefer,
                   help="window length kept among tied fits")
    g.add_argument("--allow-negative-A", action="store_true", help="drop the A > 0 requirement")
    g.add_argument("--transform", choices=[t.value for t in TransformKind], default="log",
                   help="value transform before fitting")


def _add_backtest_options(p):
    d = BacktestConfig()
    g = p.add_argument_group("backtest")
    g.add_argument("--t1", type=float, default=d.thresholds[0], help="mse below this is Critical")
    g.add_argument("--t2", type=float, default=d.thresholds[1], help="mse below this is Monitoring")
    g.add_argument("--gap", type=int, default=d.gap, help="max days between alerts of one group")
    g.add_argument("--horizon", type=int, default=d.horizon, help="failure window end, days after the alert")
    g.add_argument("--min-history", type=int, default=d.min_history, help="points required before the first evaluated day")
    g.add_argument("--jobs", "-j", type=int, default=1, help="worker processes")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def _defaults_epilog():
    c, b = FitConstraints(), BacktestConfig()
    rows = [
        ("l_range", f"{c.l_range[0]}..{c.l_range[1]}"),
        ("m_range", f"({c.m_range[0]:g}, {c.m_range[1]:g})"),
        ("omega_range", f"({c.omega_range[0]:g}, {c.omega_range[1]:g})"),
        ("A_positive", c.A_positive),
        ("n_starts", c.n_starts),
        ("max_iters", c.max_iters),
        ("margin", f"{c.margin:g}"),
        ("tie_tol", f"{c.tie_tol:g}"),
        ("prefer", c.prefer),
        ("transform", b.transform.value),
        ("thresholds", f"({b.thresholds[0]:g}, {b.thresholds[1]:g})"),
        ("gap", b.gap),
        ("horizon", b.horizon),
        ("min_history", b.min_history),
        ("jobs", 1),
        ("seed", f"0 (or ${SEED_ENV}; --seed wins)"),
        ("baseline percentile", 75),
    ]
    body = "\n".join(f"  {k:<20} {v}" for k, v in rows)
    return ("configuration defaults:\n" + body +
            "\n\nexit codes: 0 ok, 1 usage, 2 data, 3 no feasible fit anywhere\n"
            "Run 'lppl-pm <command> --help' for the options of one command.")


def build_parser():
    fmt = _Formatter
    parser = _Parser(prog="lppl-pm", formatter_class=fmt,
                     description="Initial-breakdown detection with log-periodic power law fits.",
                     epilog=_defaults_epilog())
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("backtest", help="walk-forward IB detection", formatter_class=fmt)
    _add_input(p)
    p.add_argument("--out-dir", "-o", default=".", help="directory for alerts.json, fits.csv, plot.csv")
    _add_fit_options(p)
    _add_backtest_options(p)
    _add_common(p)

    p = sub.add_parser("fit", help="best fit for one end date", formatter_class=fmt)
    _add_input(p)
    p.add_argument("--end-date", default=None, help="ISO date of 'now' (default: last day)")
    _add_fit_options(p)
    _add_common(p)

    p = sub.add_parser("synth", help="synthetic LPPL series with a known IB day", formatter_class=fmt)
    p.add_argument("--out", "-o", required=True, help="output CSV; a .json sidecar is written next to it")
    p.add_argument("--l-max", type=int, default=85, help="length of the LPPL regime")
    p.add_argument("--A", type=float, default=5.0, help="level")
    p.add_argument("--B", type=float, default=0.025, help="power-law amplitude")
    p.add_argument("--m", type=float, default=0.5, help="exponent")
    p.add_argument("--C1", type=float, default=0.01, help="cosine amplitude")
    p.add_argument("--C2", type=float, default=0.0, help="sine amplitude")
    p.add_argument("--omega", type=float, default=7.0, help="angular frequency")
    p.add_argument("--noise", type=float, default=1e-3, help="noise sigma in log space on the LPPL regime")
    p.add_argument("--prefix", type=int, default=150, help="days of pure noise before the regime")
    p.add_argument("--prefix-sigma", type=float, default=0.02, help="noise sigma of the prefix")
    p.add_argument("--start", default="2019-08-23", help="ISO date of the first sample")
    _add_common(p)

    p = sub.add_parser("baseline", help="left/right changepoint detectors", formatter_class=fmt)
    _add_input(p)
    p.add_argument("--out", "-o", required=True, help="output CSV date,direction,statistic")
    p.add_argument("--percentile", type=float, default=75.0, help="trigger percentile of past excursion peaks")
    p.add_argument("--drift", type=float, default=0.5, help="allowance in running standard deviations")
    p.add_argument("--warmup", type=int, default=10, help="samples before any trigger")
    p.add_argument("--min-baseline", type=int, default=5, help="baseline samples before accumulating")
    p.add_argument("--negate", action="store_true", help="mirror the series first")
    _add_common(p)

    p = sub.add_parser("evaluate", help="score alerts against ground truth", formatter_class=fmt)
    p.add_argument("--alerts", default=None, help="alerts JSON (default: bundled reference alerts)")
    p.add_argument("--events", default=None, help="events CSV (default: bundled reference events)")
    _add_common(p)
    return parser


def _seed(args):
    return args.seed if args.seed is not None else _env_seed()


def _constraints(args):
    if args.seed is not None and args.seed < 0:
        raise UsageError("--seed must be non-negative")
    try:
        return FitConstraints(
            m_range=(args.m_min, args.m_max),
            omega_range=(args.omega_min, args.omega_max),
            l_range=(args.l_min, args.l_max),
            A_positive=not args.allow_negative_A,
            n_starts=args.n_starts,
            max_iters=args.max_iters,
            seed=_seed(args),
            margin=args.margin,
            tie_tol=args.tie_tol,
            prefer=args.prefer,
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_backtest(args):
    constraints = _constraints(args)
    try:
        config = BacktestConfig(constraints=constraints, transform=args.transform,
                                thresholds=(args.t1, args.t2), gap=args.gap,
                                horizon=args.horizon, min_history=args.min_history)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    series = load_series(args.input, args.gap_policy)
    report = run_backtest(series, config, jobs=args.jobs)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_alerts(report.grouped_alerts, out / "alerts.json")
    with (out / "fits.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "mse", "l_max", "ib_flag", "sign"])
        for f in report.fits:
            w.writerow([from_ordinal(f.date), repr(float(f.mse)), f.l_max, int(f.ib), f.sign])
    markers = {a.date: a for a in report.grouped_alerts}
    with (out / "plot.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "value", "alert", "class", "window_start", "window_end"])
        for d, v in zip(series.dates, series.values):
            a = markers.get(int(d))
            if a is None:
                w.writerow([from_ordinal(d), repr(float(v)), 0, "", "", ""])
            else:
                w.writerow([from_ordinal(d), repr(float(v)), 1, a.event_class.value,
                            from_ordinal(a.failure_window[0]), from_ordinal(a.failure_window[1])])
    print(f"{len(report.fits)} days evaluated, {len(report.raw_alerts)} raw alerts, "
          f"{len(report.grouped_alerts)} grouped alerts -> {out}")
    if report.feasible_days == 0:
        print("no feasible fit on any evaluated day", file=sys.stderr)
        return EXIT_NO_FIT
    return 0


def cmd_fit(args):
    constraints = _constraints(args)
    series = load_series(args.input, args.gap_policy)
    if args.end_date is None:
        end_index = len(series) - 1
    else:
        end = to_ordinal(args.end_date)
        end_index = end - int(series.dates[0])
        if not 0 <= end_index < len(series):
            raise UsageError(f"--end-date {args.end_date} is outside the series")
    fit = fit_best(series, end_index, constraints, TransformKind(args.transform))
    decision = is_ib_point(fit)
    out = {
        "end_date": from_ordinal(series.dates[end_index]),
        "mse": fit.mse,
        "l_max": fit.l_max,
        "converged": fit.converged,
        "ib": decision.is_ib,
        "sign": decision.sign,
        "params": fit.params.to_dict(),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_synth(args):
    seed = _seed(args)
    try:
        params = LpplParams(args.l_max, args.A, args.B, args.m, args.C1, args.C2, args.omega)
        spec = SynthSpec(params, noise_sigma=args.noise, seed=seed, prefix=args.prefix,
                         prefix_sigma=args.prefix_sigma, start=to_ordinal(args.start))
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc))
    series, ib_index = gen_lppl_series(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_series(series, out)
    meta = {"ib_day": from_ordinal(series.dates[ib_index]), "ib_index": ib_index,
            "params": params.to_dict(), "seed": seed, "noise": args.noise, "prefix": args.prefix}
    out.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"{len(series)} samples, IB day {meta['ib_day']} -> {out}")
    return 0


def cmd_baseline(args):
    if args.warmup < 0 or args.min_baseline < 2 or not 0 <= args.percentile <= 100:
        raise UsageError("need warmup >= 0, min-baseline >= 2 and 0 <= percentile <= 100")
    series = load_series(args.input, args.gap_policy)
    left, right = run_dual_detectors(series, args.percentile, negate=args.negate,
                                     warmup=args.warmup, drift=args.drift,
                                     min_baseline=args.min_baseline)
    rows = sorted(left + right, key=lambda d: (d.date, d.direction))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "direction", "statistic"])
        for d in rows:
            w.writerow([from_ordinal(d.date), d.direction, repr(float(d.statistic_at_trigger))])
    print(f"{len(left)} left and {len(right)} right detections -> {out}")
    return 0


def cmd_evaluate(args):
    with resources.as_file(_fixture("reference_alerts.json")) as default_alerts, \
            resources.as_file(_fixture("reference_events.csv")) as default_events:
        alerts = load_alerts(args.alerts or default_alerts)
        events = load_events(args.events or default_events)
    print(format_kpis(match_alerts(alerts, events)))
    return 0


COMMANDS = {
    "backtest": cmd_backtest,
    "fit": cmd_fit,
    "synth": cmd_synth,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"lppl-pm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoFeasibleFitError as exc:
        print(f"lppl-pm: no feasible fit: {exc}", file=sys.stderr)
        return EXIT_NO_FIT
    except (ParseError, DataError, InsufficientHistoryError, OSError) as exc:
        print(f"lppl-pm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LpplPmError as exc:
        print(f"lppl-pm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
