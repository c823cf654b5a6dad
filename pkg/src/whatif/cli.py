"""Command-line interface: batch runs of the same workflows the service
serves, plus the server launcher.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
All diagnostics go to stderr; JSON results go to --out or stdout and are
byte-identical across runs with the same seed and config.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import workflows
from .engine import EngineConfig
from .errors import DataError, NumericalError
from .tabular import load_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class UsageError(Exception):
    """Missing or inconsistent options after the --config merge."""


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--data", required=True, help="input CSV file")
    parser.add_argument("--delimiter", default=None)
    parser.add_argument("--metric", default=None,
                        help="numeric metric column (or 'metric' in --config)")
    parser.add_argument("--operator", default=None,
                        help="mean | sum | percentile:<q>")
    parser.add_argument("--direction", default=None,
                        choices=["minimize", "maximize"])
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", default=None,
                        help="JSON file with default option values")
    parser.add_argument("--n-sample", type=int, default=None)
    parser.add_argument("--out", default=None, help="output JSON path "
                        "(default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="whatif",
                     description="What-if scenario analysis on tabular data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("whatif", parents=[], help="evaluate one scenario")
    _add_common(p)
    p.add_argument("--column", required=True)
    p.add_argument("--value", required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--smoothing", type=float, default=None,
                   help="KDE bandwidth multiplier")
    p.add_argument("--baseline-mode", default=None,
                   choices=["raw", "bootstrap"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--plot-data", default=None,
                   help="also write histograms/densities to this file")

    p = sub.add_parser("margins", help="marginal curve plus optimal fraction")
    _add_common(p)
    p.add_argument("--column", required=True)
    p.add_argument("--value", required=True)
    p.add_argument("--fractions", default=None,
                   help="comma-separated fraction grid")
    p.add_argument("--iterations", type=int, default=None)

    p = sub.add_parser("recommend", help="full column/value sweep")
    _add_common(p)
    p.add_argument("--n-unique", type=int, default=None)
    p.add_argument("--n-buckets", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--init-points", type=int, default=None)
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--min-support", type=int, default=None)
    p.add_argument("--include-columns", default=None,
                   help="comma-separated sweep whitelist")
    p.add_argument("--exclude-columns", default=None,
                   help="comma-separated sweep blacklist")
    p.add_argument("--csv", default=None, help="also write ranked CSV here")
    p.add_argument("--progress", action="store_true",
                   help="line-delimited JSON progress on stderr")

    p = sub.add_parser("backtest", help="two-slice historical validation")
    _add_common(p)
    p.add_argument("--time-column", required=True)
    p.add_argument("--split", required=True,
                   help="boundary value; slice A is strictly before it")
    p.add_argument("--columns", default=None,
                   help="comma-separated categorical columns to replay")
    p.add_argument("--table", action="store_true",
                   help="print the human-readable table to stderr")

    p = sub.add_parser("serve", help="run the HTTP JSON service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    return parser


class _Options:
    """CLI args overlaid on --config file values, then built-in defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = {}
        if getattr(args, "config", None):
            with open(args.config, "r", encoding="utf-8") as fh:
                self.file = json.load(fh)

    def get(self, name: str, default=None):
        cli = getattr(self.args, name, None)
        if cli is not None:
            return cli
        return self.file.get(name, default)


def _load(opts: _Options):
    from .tabular import DEFAULT_MISSING_TOKENS

    return load_csv(opts.get("data"), delimiter=opts.get("delimiter", ","),
                    missing_tokens=opts.get("missing_tokens",
                                            DEFAULT_MISSING_TOKENS))


def _objective(opts: _Options):
    metric = opts.get("metric")
    if not metric:
        raise UsageError("--metric is required (flag or config file)")
    return workflows.make_objective(
        metric, opts.get("operator", "mean"), opts.get("q"),
        opts.get("direction", "minimize"))


def _emit(result: dict, out: Optional[str]) -> None:
    text = json.dumps(result, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_list(value) -> Optional[list[str]]:
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return list(value)
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _cmd_whatif(opts: _Options) -> int:
    dataset = _load(opts)
    result = workflows.whatif_report(
        dataset, opts.get("column"), opts.get("value"),
        float(opts.get("fraction")), _objective(opts),
        n_sample=int(opts.get("n_sample", 30)), seed=int(opts.get("seed", 0)),
        smoothing=float(opts.get("smoothing", 1.0)),
        baseline_mode=opts.get("baseline_mode", "raw"),
        alpha=float(opts.get("alpha", 0.05)))
    plot_path = opts.get("plot_data")
    if plot_path:
        plot = {"histograms": result["report"]["histograms"],
                "densities": result["report"]["densities"]}
        _emit(plot, plot_path)
    _emit(result, opts.get("out"))
    return EXIT_OK


def _cmd_margins(opts: _Options) -> int:
    dataset = _load(opts)
    fractions = opts.get("fractions")
    if isinstance(fractions, str):
        fractions = [float(v) for v in fractions.split(",") if v.strip()]
    result = workflows.margins_result(
        dataset, opts.get("column"), opts.get("value"), _objective(opts),
        fractions=fractions, n_sample=int(opts.get("n_sample", 30)),
        seed=int(opts.get("seed", 0)),
        iterations=int(opts.get("iterations", 15)))
    _emit(result, opts.get("out"))
    return EXIT_OK


def _cmd_recommend(opts: _Options) -> int:
    dataset = _load(opts)
    config = EngineConfig(
        objective=_objective(opts),
        n_sample=int(opts.get("n_sample", 30)),
        n_unique=int(opts.get("n_unique", 20)),
        n_buckets=int(opts.get("n_buckets", 10)),
        iterations=int(opts.get("iterations", 15)),
        init_points=int(opts.get("init_points", 5)),
        xi=float(opts.get("xi", 0.01)),
        master_seed=int(opts.get("seed", 0)),
        include_columns=_csv_list(opts.get("include_columns")),
        exclude_columns=_csv_list(opts.get("exclude_columns")) or (),
        min_support=int(opts.get("min_support", 5)))
    progress = None
    if opts.get("progress"):
        progress = lambda ev: print(json.dumps(ev, sort_keys=True),
                                    file=sys.stderr)
    result = workflows.recommend_result(dataset, config, progress=progress)
    csv_path = opts.get("csv")
    if csv_path:
        _write_csv_from_dict(result["recommendations"], csv_path)
    _emit(result, opts.get("out"))
    return EXIT_OK


def _write_csv_from_dict(rows: list[dict], path: str) -> None:
    import csv as _csv

    fields = ["rank", "column", "value", "current_fraction",
              "optimal_fraction", "baseline_metric", "projected_metric",
              "projected_std", "impact", "ks_p_value"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def _cmd_backtest(opts: _Options) -> int:
    dataset = _load(opts)
    split = opts.get("split")
    result = workflows.backtest_result(
        dataset, opts.get("time_column"), split, _objective(opts),
        columns=_csv_list(opts.get("columns")),
        n_sample=int(opts.get("n_sample", 30)), seed=int(opts.get("seed", 0)))
    if opts.get("table"):
        print(_table_from_dict(result), file=sys.stderr)
    _emit(result, opts.get("out"))
    return EXIT_OK


def _table_from_dict(result: dict) -> str:
    lines = [f"{'column':<20} {'value':<20} {'frac A':>8} {'frac B':>8} "
             f"{'simulated':>12} {'actual':>12} {'error':>9}"]
    for r in result["results"]:
        lines.append(f"{r['column']:<20} {r['value']:<20} "
                     f"{r['fraction_a']:>8.3f} {r['fraction_b']:>8.3f} "
                     f"{r['simulated_metric']:>12.4g} "
                     f"{r['actual_metric']:>12.4g} {r['abs_error']:>9.4f}")
    lines.append(f"MAE: {result['mae']:.4f} (+- {result['mae_std']:.4f})")
    return "\n".join(lines)


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(host=args.host, port=args.port, workers=args.workers)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "whatif":
            return _cmd_whatif(_Options(args))
        if args.command == "margins":
            return _cmd_margins(_Options(args))
        if args.command == "recommend":
            return _cmd_recommend(_Options(args))
        if args.command == "backtest":
            return _cmd_backtest(_Options(args))
        if args.command == "serve":
            return _cmd_serve(args)
        parser.error(f"unknown command {args.command!r}")
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"whatif: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"whatif: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DataError as exc:
        print(f"whatif: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"whatif: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
