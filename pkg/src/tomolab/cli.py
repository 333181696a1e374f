"""Command line entry point: ``tomolab run`` and ``tomolab summarize``.

Exit codes: 0 when every asserted check passes, 2 when at least one check
fails, 1 for usage errors (bad arguments, bad configuration, unreadable or
malformed files).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from collections import defaultdict

import numpy as np

from .experiments import (
    COLUMNS,
    DEFAULT_BANDS,
    ConfigError,
    ExperimentConfig,
    ResultRow,
    all_checks_pass,
    fit_loglog,
    run_experiment,
)

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2

# per-trial metric -> summary row it is fitted into
SLOPE_METRICS = {
    ("rate-sweep", "op_error"): "slope",
    ("adaptive-vs-nonadaptive", "infidelity_adaptive"): "slope_adaptive",
    ("adaptive-vs-nonadaptive", "infidelity_nonadaptive"): "slope_nonadaptive",
}


class MalformedCSV(ValueError):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([
            r.experiment, _fmt(r.trial), _fmt(r.d), _fmt(r.r), _fmt(r.n), _fmt(r.gamma), _fmt(r.epsilon),
            _fmt(r.C), r.metric, _fmt(r.estimate), _fmt(r.std_error), _fmt(r.bound), _fmt(r.passed),
        ])
    return buf.getvalue()


def write_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))


def _parse(value: str, kind):
    if value == "":
        return None
    if kind is bool:
        if value not in ("true", "false"):
            raise MalformedCSV(f"bad pass flag {value!r}")
        return value == "true"
    return kind(value)


def read_csv(path: str) -> list[ResultRow]:
    """Parse a CSV written by :func:`write_csv`.

    Raises:
        MalformedCSV: on a wrong header, wrong field count or unparsable value.
    """
    kinds = {"trial": int, "d": int, "r": int, "n": int, "gamma": float, "epsilon": float, "C": float,
             "estimate": float, "std_error": float, "bound": float, "pass": bool}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != COLUMNS:
            raise MalformedCSV(f"unexpected header {header!r}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(COLUMNS):
                raise MalformedCSV(f"line {lineno}: expected {len(COLUMNS)} fields, got {len(rec)}")
            raw = dict(zip(COLUMNS, rec))
            try:
                vals = {k: _parse(raw[k], kinds[k]) for k in kinds}
                if vals["estimate"] is None:
                    raise ValueError("missing estimate")
                rows.append(ResultRow(
                    raw["experiment"], raw["metric"], vals["estimate"], trial=vals["trial"], d=vals["d"],
                    r=vals["r"], n=vals["n"], gamma=vals["gamma"], epsilon=vals["epsilon"], C=vals["C"],
                    std_error=vals["std_error"], bound=vals["bound"], passed=vals["pass"],
                ))
            except ValueError as exc:
                raise MalformedCSV(f"line {lineno}: {exc}") from exc
    return rows


def summarize_rows(rows: list[ResultRow]) -> dict:
    """Refit log-log slopes of per-``n`` medians and collect asserted checks.

    Returns:
        ``{"fits": [...], "checks": [...]}``. Each fit dict holds experiment,
        metric, d, slope, intercept, ci_low, ci_high and (when an acceptance
        band is known) ``band`` and ``pass``.
    """
    groups: dict[tuple, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r.n is not None and r.trial is not None and (r.experiment, r.metric) in SLOPE_METRICS:
            groups[(r.experiment, r.metric, r.d)][r.n].append(r.estimate)
    fits = []
    for (exp, metric, d), by_n in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0)):
        ns = sorted(by_n)
        if len(ns) < 2:
            continue
        fit = fit_loglog(ns, [float(np.median(by_n[n])) for n in ns])
        entry = {"experiment": exp, "metric": metric, "d": d, "slope": fit.slope, "intercept": fit.intercept,
                 "ci_low": fit.ci_low, "ci_high": fit.ci_high}
        band = DEFAULT_BANDS.get((exp, SLOPE_METRICS[(exp, metric)]))
        if band is not None:
            entry["band"] = band
            entry["pass"] = band[0] <= fit.slope <= band[1]
        fits.append(entry)
    checks = [r for r in rows if r.passed is not None]
    return {"fits": fits, "checks": checks}


def _print_summary(summary: dict, out) -> None:
    if summary["fits"]:
        print("slope fits (median over trials vs n, 95% CI):", file=out)
        for f in summary["fits"]:
            band = f.get("band")
            verdict = "" if band is None else f"  band [{band[0]}, {band[1]}] {'PASS' if f['pass'] else 'FAIL'}"
            print(f"  {f['experiment']} {f['metric']} d={f['d']}: slope {f['slope']:.4f} "
                  f"[{f['ci_low']:.4f}, {f['ci_high']:.4f}] intercept {f['intercept']:.4f}{verdict}", file=out)
    print("checks:", file=out)
    for r in summary["checks"]:
        where = " ".join(f"{k}={v}" for k, v in (("d", r.d), ("n", r.n), ("trial", r.trial)) if v is not None)
        bound = "" if r.bound is None else f" bound={r.bound:.6g}"
        print(f"  {'PASS' if r.passed else 'FAIL'} {r.experiment} {r.metric} {where} value={r.estimate:.6g}{bound}",
              file=out)


def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("TOMOLAB_THREADS")
    if env is None or env == "":
        return 1
    try:
        value = int(env)
    except ValueError:
        raise ConfigError("TOMOLAB_THREADS", f"not an integer: {env!r}") from None
    if value < 1:
        raise ConfigError("TOMOLAB_THREADS", "must be positive")
    return value


def cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(raw, dict):
        print("error: config: top level must be a JSON object", file=sys.stderr)
        return EXIT_USAGE
    if args.seed is not None:
        raw["seed"] = args.seed
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads", "must be positive")
        threads = _resolve_threads(args.threads)
        cfg = ExperimentConfig.from_dict(raw)
    except (ConfigError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = run_experiment(cfg, threads)
    try:
        write_csv(rows, cfg.output)
    except OSError as exc:
        print(f"error: output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _print_summary(summarize_rows(rows), sys.stdout)
    return EXIT_OK if all_checks_pass(rows) else EXIT_CHECK


def cmd_summarize(args) -> int:
    try:
        rows = read_csv(args.csv)
    except (OSError, MalformedCSV) as exc:
        print(f"error: {args.csv}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    summary = summarize_rows(rows)
    _print_summary(summary, sys.stdout)
    ok = all(r.passed for r in summary["checks"]) and all(f.get("pass", True) for f in summary["fits"])
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tomolab", description="Tomography experiment harness.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("--config", required=True, help="path to the JSON configuration")
    run.add_argument("--threads", type=int, default=None, help="worker threads (default: TOMOLAB_THREADS or 1)")
    run.add_argument("--seed", type=int, default=None, help="override the seed in the config")
    run.set_defaults(func=cmd_run)
    summ = sub.add_parser("summarize", help="fit slopes and tabulate checks from a result CSV")
    summ.add_argument("csv", help="CSV written by 'tomolab run'")
    summ.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
