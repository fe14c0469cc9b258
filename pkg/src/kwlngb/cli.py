"""Command-line interface.

Subcommands: fit, discriminate, pcs, distance, samplesize, simulate, tables.
JSON goes to stdout (10 significant digits); table output is CSV with a
provenance comment header. Diagnostics go to stderr only.

Exit codes: 0 success, 2 input error, 3 convergence warning,
4 infeasible computation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from importlib import metadata

import numpy as np

from . import montecarlo
from .discrimination import (NullHypothesis, kw_null, lngb_null, min_sample_size,
                             null_analysis, pcs_kw, pcs_lngb, select_model)
from .distributions import KwParams, LngbParams, Sample
from .divergence import (KW_FROM_LNGB, LNGB_FROM_KW, hellinger, ks_distance,
                         power_divergence)
from .errors import (DegenerateSampleError, DomainError, InfeasibleError,
                     KwLngbError, UsageError)
from .fit import fit_kw, fit_lngb
from .specfun import QuadratureSpec

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_INFEASIBLE = 4

CONFIG_ENV_VAR = "KWLNGB_CONFIG"

_TABLE_BETA_GRID = (0.2, 0.5, 0.7, 1.2, 1.5, 2.0)
_TABLE_ALPHA_GRID = (0.2, 0.5, 0.7, 1.2, 1.5, 2.0)
_T3_ALPHAS = (1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
_T4_AS = (0.25, 0.35, 0.45, 1.25, 1.45, 2.0)
_PCS_SHAPES = (0.2, 0.5, 0.9, 1.5, 2.0, 3.0, 5.0)
_PCS_NS = (25, 40, 70, 85, 100, 150, 400)
_T3_PS = (0.25, 0.55, 0.75)


@dataclass
class RunConfig:
    """Runtime knobs; file values are overridden by CLI flags."""

    quad_abs_tol: float = 1e-10
    quad_rel_tol: float = 1e-9
    quad_depth: int = 20
    reps: int = 2000
    seed: int = 20230815
    parallelism: int = 1
    format: str = "json"

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.quad_abs_tol, self.quad_rel_tol, self.quad_depth)


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return cfg
    casts = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DomainError(f"{path}:{lineno}: expected key=value, got {raw!r}")
                key, _, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if key not in casts:
                    raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
                current = getattr(cfg, key)
                setattr(cfg, key, type(current)(value) if not isinstance(current, str) else value)
    except OSError as exc:
        raise DomainError(f"cannot read config file {path!r}: {exc}") from exc
    if cfg.format not in ("json", "csv"):
        raise DomainError(f"config format must be json or csv, got {cfg.format!r}")
    for name in ("quad_abs_tol", "quad_rel_tol"):
        if getattr(cfg, name) <= 0:
            raise DomainError(f"config {name} must be positive")
    return cfg


# -- dataset ingestion ---------------------------------------------------------

def read_dataset(path: str, column: str | None = None) -> Sample:
    """Parse a CSV of observations (one per row; optional header).

    Rejects non-numeric rows and values outside the open unit interval,
    reporting the offending 1-based row numbers.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh)]
    except OSError as exc:
        raise DomainError(f"cannot read data file {path!r}: {exc}") from exc
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise DomainError(f"{path!r} contains no data rows")

    def _numeric(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    header: list[str] | None = None
    if not all(_numeric(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DomainError(f"{path!r} has a header but no data rows")

    ncol = max(len(r) for r in rows)
    if column is not None:
        if header is None:
            raise DomainError("--column given but the file has no header row")
        if column not in header:
            raise DomainError(f"column {column!r} not found; file has {header}")
        idx = header.index(column)
    elif ncol > 1:
        names = header if header is not None else [f"col{i}" for i in range(ncol)]
        raise DomainError(f"file has {ncol} columns {names}; pick one with --column")
    else:
        idx = 0

    offset = 2 if header is not None else 1
    values, bad = [], []
    for i, row in enumerate(rows):
        cell = row[idx].strip() if idx < len(row) else ""
        if not _numeric(cell):
            bad.append(i + offset)
            continue
        v = float(cell)
        if not (0.0 < v < 1.0) or not math.isfinite(v):
            bad.append(i + offset)
            continue
        values.append(v)
    if bad:
        raise DomainError(
            f"{path!r}: rows with non-numeric values or values outside (0,1): {bad}")
    return Sample(np.asarray(values))


# -- serialization --------------------------------------------------------------

def _round_sig(v: float, sig: int = 10) -> float:
    if v == 0 or not math.isfinite(v):
        return v
    return float(f"{v:.{sig}g}")


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else _round_sig(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict) or str(type(obj)) == "<class 'mappingproxy'>":
        return {k: to_jsonable(v) for k, v in dict(obj).items()}
    return obj


def _fit_payload(fit) -> dict:
    if fit.model == "kw":
        params = {"alpha": fit.params.alpha, "delta": fit.params.delta}
    else:
        params = {"a": fit.params.a, "b": fit.params.b, "beta": fit.params.beta}
    return to_jsonable({
        "model": fit.model,
        "params": params,
        "loglik": fit.log_likelihood,
        "aic": fit.aic,
        "bic": fit.bic,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "gradient_norm": fit.gradient_norm,
        "n": fit.n,
        "at_beta_cap": fit.at_beta_cap,
    })


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


# -- subcommands ----------------------------------------------------------------

def _null_from_args(args) -> NullHypothesis:
    if args.null == "kw":
        if args.alpha is None or args.delta is None:
            raise DomainError("a KW null needs --alpha and --delta")
        return kw_null(args.alpha, args.delta)
    if args.a is None or args.b is None or args.beta is None:
        raise DomainError("an LNGB null needs --a, --b and --beta")
    return lngb_null(args.a, args.b, args.beta)


def cmd_fit(args, cfg: RunConfig) -> int:
    sample = read_dataset(args.data, args.column)
    fit = fit_kw(sample) if args.model == "kw" else fit_lngb(sample)
    _emit(_fit_payload(fit))
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def cmd_discriminate(args, cfg: RunConfig) -> int:
    sample = read_dataset(args.data, args.column)
    report = select_model(sample, cfg.quadrature())
    payload = {
        "kw_fit": _fit_payload(report.kw_fit),
        "lngb_fit": _fit_payload(report.lngb_fit),
        "w_n": report.w_n,  # loglik difference at full precision, by contract
        "pcs_lngb": to_jsonable(report.pcs_lngb),
        "pcs_kw": to_jsonable(report.pcs_kw),
        "selected": report.selected,
        "warnings": list(report.warnings),
    }
    _emit(payload)
    ok = report.kw_fit.converged and report.lngb_fit.converged
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_pcs(args, cfg: RunConfig) -> int:
    null = _null_from_args(args)
    analysis = null_analysis(null, cfg.quadrature())
    value = pcs_kw(analysis, args.n) if null.family == "kw" else pcs_lngb(analysis, args.n)
    if null.family == "kw":
        params = {"alpha": null.params.alpha, "delta": null.params.delta}
    else:
        params = {"a": null.params.a, "b": null.params.b, "beta": null.params.beta}
    _emit(to_jsonable({"null": null.family, "params": params, "n": args.n, "pcs": value}))
    return EXIT_OK


def cmd_distance(args, cfg: RunConfig) -> int:
    kw = KwParams(*args.kw)
    lngb = LngbParams(*args.lngb)
    quad = cfg.quadrature()
    if args.measure == "hellinger":
        res = hellinger(kw, lngb, quad)
    elif args.measure == "ks":
        res = ks_distance(kw, lngb)
    else:
        if args.lam is None:
            raise DomainError("--measure pwd needs --lambda")
        res = power_divergence(kw, lngb, args.lam, args.direction, quad)
    _emit(to_jsonable({"measure": res.measure, "value": res.value,
                       "method": res.method, "detail": dict(res.detail)}))
    return EXIT_OK


def cmd_samplesize(args, cfg: RunConfig) -> int:
    null = _null_from_args(args)
    analysis = null_analysis(null, cfg.quadrature())
    result = min_sample_size(analysis, args.p, args.tolerance_distance,
                             paper_formula=args.paper_formula)
    _emit(to_jsonable({"protection_level": result.protection_level,
                       "n_required": result.n_required,
                       "tolerance_distance": result.tolerance_distance,
                       "m_per_obs": analysis.m_per_obs,
                       "var_per_obs": analysis.var_per_obs}))
    return EXIT_OK


def cmd_simulate(args, cfg: RunConfig) -> int:
    null = _null_from_args(args)
    config = montecarlo.SimulationConfig(
        null, args.n, args.reps if args.reps is not None else cfg.reps,
        args.seed if args.seed is not None else cfg.seed,
        args.parallelism if args.parallelism is not None else cfg.parallelism)
    result = montecarlo.run_simulation(config, cfg.quadrature())
    if null.family == "kw":
        params = {"alpha": null.params.alpha, "delta": null.params.delta}
    else:
        params = {"a": null.params.a, "b": null.params.b, "beta": null.params.beta}
    _emit(to_jsonable({
        "config": {"null": null.family, "params": params, "n": config.n,
                   "reps": config.reps, "seed": config.seed,
                   "parallelism": config.parallelism},
        "successes": result.successes,
        "empirical_pcs": result.empirical_pcs,
        "asymptotic_pcs": result.asymptotic_pcs,
        "fit_failures": result.fit_failures,
        "unreliable": result.unreliable,
        "wall_time": result.wall_time,
    }))
    return EXIT_OK


# -- table regeneration ----------------------------------------------------------

def _version() -> str:
    try:
        return metadata.version("kwlngb")
    except metadata.PackageNotFoundError:
        return "unknown"


def _provenance(cfg: RunConfig, seed: int, reps: int | None) -> list[str]:
    lines = [f"# kwlngb {_version()}", f"# seed={seed}"]
    if reps is not None:
        lines.append(f"# reps={reps}")
    lines.append(f"# quad_abs_tol={cfg.quad_abs_tol} quad_rel_tol={cfg.quad_rel_tol}")
    return lines


def _fmt4(v: float) -> str:
    # 4 decimals matches the reference presentation for O(1) entries; small
    # magnitudes (log-ratio moments) keep 4 significant digits instead
    if isinstance(v, float):
        return f"{v:.4f}" if abs(v) >= 0.01 or v == 0 else f"{v:.4g}"
    return str(v)


def write_table_csv(header: list[str], rows: list[list], cfg: RunConfig,
                    seed: int, reps: int | None, out: io.TextIOBase) -> None:
    for line in _provenance(cfg, seed, reps):
        out.write(line + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row[0]] + [_fmt4(v) for v in row[1:]])


def read_table_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Parse table CSV produced by `tables`, skipping provenance comments."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def _moment_table(cfg: RunConfig, which: int) -> tuple[list[str], list[list]]:
    quad = cfg.quadrature()
    rows = []
    if which == 1:
        header = ["beta", "m_per_obs", "var_per_obs", "alpha_tilde", "delta_tilde"]
        for beta in _TABLE_BETA_GRID:
            an = null_analysis(lngb_null(1.2, 1.5, beta), quad)
            rows.append([beta, an.m_per_obs, an.var_per_obs,
                         an.pseudo_true.alpha, an.pseudo_true.delta])
    else:
        header = ["alpha", "m_per_obs", "var_per_obs", "a_tilde", "b_tilde", "beta_tilde"]
        for alpha in _TABLE_ALPHA_GRID:
            an = null_analysis(kw_null(alpha, 2.4), quad)
            rows.append([alpha, an.m_per_obs, an.var_per_obs, an.pseudo_true.a,
                         an.pseudo_true.b, an.pseudo_true.beta])
    return header, rows


def _distance_table(cfg: RunConfig, which: int) -> tuple[list[str], list[list]]:
    quad = cfg.quadrature()
    if which == 3:
        shapes = _T3_ALPHAS
        header = ["quantity"] + [f"alpha={a:g}" for a in shapes]
        nulls = [kw_null(alpha, 2.5) for alpha in shapes]
    else:
        shapes = _T4_AS
        header = ["quantity"] + [f"a={a:g}" for a in shapes]
        nulls = [lngb_null(a, 1.5, 2.5) for a in shapes]
    analyses = [null_analysis(h, quad) for h in nulls]
    rows = []
    for p in _T3_PS:
        rows.append([f"n(p={p})"]
                    + [min_sample_size(an, p).n_required for an in analyses])
    hl, pw = [], []
    for h, an in zip(nulls, analyses):
        if which == 3:
            kw_p, lngb_p = h.params, an.pseudo_true
        else:
            kw_p, lngb_p = an.pseudo_true, h.params
        hl.append(hellinger(kw_p, lngb_p, quad).value)
        pw.append(power_divergence(kw_p, lngb_p, -0.5, KW_FROM_LNGB, quad).value)
    rows.append(["hellinger"] + hl)
    rows.append(["pwd(lambda=-0.5)"] + pw)
    return header, rows


def _pcs_asymptotic_table(cfg: RunConfig, which: int) -> tuple[list[str], list[list]]:
    quad = cfg.quadrature()
    rows = []
    shapes = _PCS_SHAPES
    label = "alpha" if which == 5 else "a"
    header = [label] + [f"n={n}" for n in _PCS_NS]
    for shp in shapes:
        null = kw_null(shp, 2.5) if which == 5 else lngb_null(shp, 1.25, 1.5)
        an = null_analysis(null, quad)
        fn = pcs_kw if which == 5 else pcs_lngb
        rows.append([shp] + [fn(an, n) for n in _PCS_NS])
    return header, rows


def _pcs_empirical_table(cfg: RunConfig, which: int, reps: int, seed: int,
                         parallelism: int) -> tuple[list[str], list[list]]:
    label = "alpha" if which == 6 else "a"
    header = [label] + [f"n={n}" for n in _PCS_NS]
    if which == 6:
        nulls = [kw_null(shp, 2.5) for shp in _PCS_SHAPES]
    else:
        nulls = [lngb_null(shp, 1.25, 1.5) for shp in _PCS_SHAPES]
    matrix = montecarlo.pcs_table(nulls, list(_PCS_NS), reps, seed, parallelism,
                                  cfg.quadrature())
    rows = [[shp] + [cell["empirical"] for cell in row]
            for shp, row in zip(_PCS_SHAPES, matrix)]
    return header, rows


def cmd_tables(args, cfg: RunConfig) -> int:
    which = args.which
    if which not in range(1, 9):
        raise DomainError(f"unknown table id {which}; expected 1..8")
    reps = args.reps if args.reps is not None else cfg.reps
    seed = args.seed if args.seed is not None else cfg.seed
    par = args.parallelism if args.parallelism is not None else cfg.parallelism
    if which in (1, 2):
        header, rows = _moment_table(cfg, which)
        used_reps = None
    elif which in (3, 4):
        header, rows = _distance_table(cfg, which)
        used_reps = None
    elif which in (5, 7):
        header, rows = _pcs_asymptotic_table(cfg, which)
        used_reps = None
    else:
        header, rows = _pcs_empirical_table(cfg, which, reps, seed, par)
        used_reps = reps
    write_table_csv(header, rows, cfg, seed, used_reps, sys.stdout)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kwlngb",
        description="Discriminate Kumaraswamy vs Libby-Novick generalized beta "
                    "models for data on (0,1).")
    parser.add_argument("--config", help=f"config file (key=value); also read from "
                                         f"${CONFIG_ENV_VAR}")
    parser.add_argument("--quad-abs-tol", type=float, help="quadrature absolute tolerance")
    parser.add_argument("--quad-rel-tol", type=float, help="quadrature relative tolerance")
    parser.add_argument("--quad-depth", type=int, help="quadrature refinement depth")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="maximum-likelihood fit of one family")
    p.add_argument("--model", choices=("kw", "lngb"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--column")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("discriminate", help="fit both families and select by PCS")
    p.add_argument("--data", required=True)
    p.add_argument("--column")
    p.set_defaults(func=cmd_discriminate)

    def add_null_args(p):
        p.add_argument("--null", choices=("kw", "lngb"), required=True)
        p.add_argument("--alpha", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--beta", type=float)

    p = sub.add_parser("pcs", help="asymptotic probability of correct selection")
    add_null_args(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_pcs)

    p = sub.add_parser("distance", help="pseudo-distance between a KW and an LNGB law")
    p.add_argument("--measure", choices=("hellinger", "pwd", "ks"), required=True)
    p.add_argument("--kw", type=float, nargs=2, metavar=("ALPHA", "DELTA"), required=True)
    p.add_argument("--lngb", type=float, nargs=3, metavar=("A", "B", "BETA"), required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--direction", choices=(KW_FROM_LNGB, LNGB_FROM_KW),
                   default=KW_FROM_LNGB)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("samplesize", help="minimum n for a target PCS")
    add_null_args(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--tolerance-distance", type=float)
    p.add_argument("--paper-formula", action="store_true",
                   help="use the literature variant with |M| unsquared")
    p.set_defaults(func=cmd_samplesize)

    p = sub.add_parser("simulate", help="seeded Monte Carlo selection experiment")
    add_null_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--parallelism", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", help="regenerate a reference table as CSV")
    p.add_argument("--which", type=int, required=True)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--parallelism", type=int)
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.quad_abs_tol is not None:
            cfg.quad_abs_tol = args.quad_abs_tol
        if args.quad_rel_tol is not None:
            cfg.quad_rel_tol = args.quad_rel_tol
        if args.quad_depth is not None:
            cfg.quad_depth = args.quad_depth
        return args.func(args, cfg)
    except (DomainError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DegenerateSampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KwLngbError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
