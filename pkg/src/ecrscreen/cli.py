"""Command-line front end: ``ecrscreen screen|simulate|bootstrap``.

Option precedence, lowest to highest: built-in defaults, ``ECRSCREEN_*``
environment variables (e.g. ``ECRSCREEN_METHOD=rrcs``, ``ECRSCREEN_TOP_M=10``),
the ``--config`` file, then command-line flags.

Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .bootstrap import bootstrap_rank_intervals
from .data import read_csv
from .errors import ConfigurationError, ScreeningError
from .harness import load_run_config, run_grid, variance_filter
from .screening import (
    ScreeningConfig,
    default_top_m,
    iterative_screen,
    score_all,
    threshold_select,
    top_m_select,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ENV_PREFIX = "ECRSCREEN_"

# option name -> (type, default)
OPTIONS = {
    "input": (str, None),
    "response": (str, "0"),
    "delimiter": (str, ","),
    "no_header": (bool, False),
    "method": (str, "cch"),
    "k": (int, 2),
    "kn": (int, 2),
    "ridge": (float, 1e-8),
    "top_m": (int, None),
    "threshold": (float, None),
    "delta": (float, None),
    "stop_below": (int, None),
    "variance_keep": (int, None),
    "seed": (int, 0),
    "workers": (int, None),
    "out": (str, None),
    "B": (int, 200),
    "alpha": (float, 0.05),
    "top_k": (int, 20),
    "ranks_out": (str, None),
}


class UsageError(ConfigurationError):
    pass


def _coerce(name: str, value):
    kind = OPTIONS[name][0]
    if kind is bool and isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise UsageError(f"option {name!r}: cannot interpret {value!r} as {kind.__name__}") from None


def resolve(args: argparse.Namespace, section: str) -> dict:
    """Merge defaults, environment, config file section and flags."""
    file_opts = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            with path.open("rb") as fh:
                cfg = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        file_opts = cfg.get(section, {})
        bad = set(file_opts) - set(OPTIONS)
        if bad:
            raise UsageError(f"{path}: unknown keys in [{section}]: {sorted(bad)}")
    out = {}
    for name, (_, default) in OPTIONS.items():
        value = default
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            value = _coerce(name, env)
        if name in file_opts:
            value = _coerce(name, file_opts[name])
        flag = getattr(args, name, None)
        if flag is not None and flag is not False:
            value = flag
        out[name] = value
    if out["workers"] is None:
        out["workers"] = os.cpu_count() or 1
    return out


def _screening_config(opts) -> ScreeningConfig:
    return ScreeningConfig.make(opts["method"], opts["k"], opts["kn"], opts["ridge"])


def _load(opts):
    if not opts["input"]:
        raise UsageError("--input is required")
    data = read_csv(opts["input"], opts["response"], opts["delimiter"], not opts["no_header"])
    if opts["variance_keep"] is not None:
        data = variance_filter(data, opts["variance_keep"])
    return data


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    try:
        return Path(path).open("w", newline="", encoding="utf-8"), True
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def cmd_screen(args) -> int:
    opts = resolve(args, "screen")
    rules = [r for r in ("top_m", "threshold", "delta") if opts[r] is not None]
    if len(rules) > 1:
        raise UsageError(f"choose one selection rule, got {rules}")
    config = _screening_config(opts)
    data = _load(opts)
    scores = score_all(data, config)
    if opts["threshold"] is not None:
        active = threshold_select(scores, opts["threshold"])
    elif opts["delta"] is not None:
        active = iterative_screen(data, config, opts["delta"], opts["stop_below"])
    else:
        active = top_m_select(scores, opts["top_m"] if opts["top_m"] is not None else default_top_m(data.n))

    labels = data.covariate_labels
    order = sorted(range(data.p), key=lambda i: (-scores.scores[i], i))
    fh, close = _open_out(opts["out"])
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "covariate", "score", "selected", "argmax_subset"])
        for rank, i in enumerate(order, start=1):
            subset = ";".join(labels[j - 1] for j in scores.argmax_subsets[i])
            w.writerow([rank, labels[i], f"{scores.scores[i]:.12g}", int(i + 1 in active), subset])
    finally:
        if close:
            fh.close()
    print(f"screen: method={config.method} n={data.n} p={data.p} rule={active.rule}({active.parameter:g}) "
          f"selected={len(active)}", file=sys.stderr)
    return 0


def cmd_bootstrap(args) -> int:
    opts = resolve(args, "bootstrap")
    if opts["B"] < 2:
        raise UsageError(f"B must be >= 2, got {opts['B']}")
    config = _screening_config(opts)
    data = _load(opts)
    print(f"bootstrap: method={config.method} B={opts['B']} alpha={opts['alpha']:g} top_k={opts['top_k']} "
          f"seed={opts['seed']}", file=sys.stderr)
    result = bootstrap_rank_intervals(
        data, config, B=opts["B"], alpha=opts["alpha"], top_k=opts["top_k"], seed=opts["seed"],
        workers=opts["workers"],
    )
    fh, close = _open_out(opts["out"])
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["covariate", "point_rank", "lower", "upper", "influential"])
        for s in sorted(result.summaries, key=lambda s: (s.upper, s.point_rank, s.covariate)):
            w.writerow([s.label, s.point_rank, s.lower, s.upper, int(s.influential)])
    finally:
        if close:
            fh.close()
    if opts["ranks_out"]:
        with Path(opts["ranks_out"]).open("w", newline="", encoding="utf-8") as rf:
            w = csv.writer(rf, lineterminator="\n")
            w.writerow(["replicate", "covariate", "rank"])
            labels = data.covariate_labels
            for b, row in enumerate(result.ranks, start=1):
                for i, r in enumerate(row):
                    w.writerow([b, labels[i], int(r)])
    print(f"bootstrap: {len(result.influential())} influential covariates", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    if not args.config:
        raise UsageError("simulate needs --config")
    cells, run = load_run_config(args.config)
    if not cells:
        raise UsageError(f"{args.config}: the grid declares no cells")
    out = args.out or run.get("out") or os.environ.get(ENV_PREFIX + "OUT")
    if not out:
        raise UsageError("simulate needs --out (or out in [run])")
    workers = args.workers or run.get("workers") or os.environ.get(ENV_PREFIX + "WORKERS") or os.cpu_count() or 1
    run_grid(cells, out, workers=int(workers), progress=lambda msg: print(msg, file=sys.stderr, flush=True))
    return 0


def _add_common(p: argparse.ArgumentParser, data: bool = True):
    p.add_argument("--config", help="TOML file with option defaults (or the grid, for simulate)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    if not data:
        return
    p.add_argument("--input", help="input CSV file")
    p.add_argument("--response", help="response column name or 0-based position (default 0)")
    p.add_argument("--delimiter", help="field delimiter (default ',')")
    p.add_argument("--no-header", dest="no_header", action="store_true", default=None, help="CSV has no header row")
    p.add_argument("--method", type=str.lower, choices=["cch", "cck", "sis", "rrcs"])
    p.add_argument("--k", type=int, help="subset size (CCH/CCK)")
    p.add_argument("--kn", type=int, help="neighbourhood radius (CCH/CCK)")
    p.add_argument("--ridge", type=float, help="eigenvalue floor for PSD repair")
    p.add_argument("--variance-keep", dest="variance_keep", type=int, help="keep the N highest-variance covariates")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecrscreen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("screen", help="screen covariates of a CSV data set")
    _add_common(p)
    p.add_argument("--top-m", dest="top_m", type=int, help="keep the m highest scores (default floor(n/ln n))")
    p.add_argument("--threshold", type=float, help="keep scores strictly above this value")
    p.add_argument("--delta", type=float, help="iterative screening with shrink factor delta")
    p.add_argument("--stop-below", dest="stop_below", type=int, help="iterative stopping size (default n)")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("simulate", help="run a Monte Carlo grid from a run-config file")
    _add_common(p, data=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bootstrap", help="bootstrap rank intervals for a CSV data set")
    _add_common(p)
    p.add_argument("--B", "--replicates", dest="B", type=int, help="bootstrap replicates (default 200)")
    p.add_argument("--alpha", type=float, help="interval level (default 0.05)")
    p.add_argument("--top-k", dest="top_k", type=int, help="influential if upper rank <= top_k (default 20)")
    p.add_argument("--ranks-out", dest="ranks_out", help="long-form replicate,covariate,rank CSV")
    p.set_defaults(func=cmd_bootstrap)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"ecrscreen {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ScreeningError, OSError) as exc:
        print(f"ecrscreen {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
