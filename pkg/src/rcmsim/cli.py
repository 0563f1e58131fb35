"""Campaign runner: JSON configuration in, trial table and cell summary out.

A campaign is a grid of (density, offset) cells, each simulated for a fixed
number of trials under one kernel and one metric.  Output is two files: a
per-trial table (one row per trial, schema below) and a per-cell summary
holding empirical means with 99% confidence half-widths next to the
quadrature predictions, so theory-vs-experiment comparison needs no second
tool.  Runs are deterministic: the same config produces byte-identical
files at any worker count.

Config document (JSON, unknown keys are errors):

    {
      "model": {"kind": "unit_disk"},
      "rho_list": [500, 2000],
      "b_list": [0.0],
      "metric": "torus",            # torus | square | coupled
      "trials": 1000,
      "master_seed": 1,
      "epsilon": 0.25,              # optional, dependence-bound exponent
      "output_path": "runs/out.csv",
      "format": "csv"               # csv | json, optional
    }

Model specs: {"kind": "unit_disk"}, {"kind": "gaussian", "cutoff_eps": ...},
{"kind": "log_normal", "sigma_db": ..., "eta": ..., "cutoff_eps": ...},
{"kind": "table", "knots": [[0.0, 1.0], ...]} or {"kind": "table",
"path": "kernel.txt"}.

Cells with log rho + b <= 0 are skipped with a warning, not an error.
Exit codes: 0 success (possibly with skipped cells), 2 bad config or
parameters, 3 model validation failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import os
import sys
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path

import numpy as np

from .analysis import TrialRecord, coupled_statistics, trial_statistics
from .errors import ConfigError, ModelError, ParameterError, QuadratureError, RcmError
from .geometry import Metric
from .models import (ConnectionModel, gaussian, load_table, log_normal,
                     table_model, unit_disk)
from .sampler import (SampleParams, build_graph, couple_torus_to_square,
                      sample_points, truncation_bias)
from .theory import (ChenSteinParams, chen_stein_terms, empirical_distribution,
                     expected_isolated, poisson_pmf, theory_report, tv_distance)

SEED_ENV = "RCM_SEED"
SKIP_REASON = "log rho + b <= 0"
# two-sided 99% normal quantile
Z99 = 2.5758293035489004

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_IO = 4

TRIAL_COLUMNS = ("rho", "b", "metric", "trial", "n_points", "n_edges",
                 "isolated", "n_components", "connected", "mean_degree",
                 "isolated_torus", "isolated_square", "isolated_boundary")

SUMMARY_COLUMNS = ("rho", "b", "metric", "trials", "skipped", "reason",
                   "mean_isolated", "var_isolated", "ci99_isolated",
                   "p_no_isolated", "ci99_p_no_isolated",
                   "frac_connected", "ci99_frac_connected",
                   "mean_degree", "ci99_mean_degree",
                   "tv_to_poisson",
                   "theory_isolated", "theory_asymptotic_mean",
                   "theory_prob_no_isolated", "theory_mean_degree",
                   "theory_boundary_excess",
                   "chen_stein_b1", "chen_stein_b2",
                   "mean_boundary", "ci99_boundary")

_CONFIG_KEYS = {"model", "rho_list", "b_list", "metric", "trials",
                "master_seed", "epsilon", "output_path", "format"}
_MODEL_KEYS = {
    "unit_disk": set(),
    "gaussian": {"cutoff_eps"},
    "log_normal": {"sigma_db", "eta", "cutoff_eps"},
    "table": {"knots", "path", "cutoff_eps"},
}


@dataclass(frozen=True)
class CampaignConfig:
    model: ConnectionModel
    rho_list: tuple[float, ...]
    b_list: tuple[float, ...]
    metric: str
    trials: int
    master_seed: int
    epsilon: float
    output_path: str
    format: str


@dataclass(frozen=True)
class CellSummary:
    rho: float
    b: float
    metric: str
    trials: int
    skipped: bool
    reason: str | None
    mean_isolated: float | None = None
    var_isolated: float | None = None
    ci99_isolated: float | None = None
    p_no_isolated: float | None = None
    ci99_p_no_isolated: float | None = None
    frac_connected: float | None = None
    ci99_frac_connected: float | None = None
    mean_degree: float | None = None
    ci99_mean_degree: float | None = None
    tv_to_poisson: float | None = None
    theory_isolated: float | None = None
    theory_asymptotic_mean: float | None = None
    theory_prob_no_isolated: float | None = None
    theory_mean_degree: float | None = None
    theory_boundary_excess: float | None = None
    chen_stein_b1: float | None = None
    chen_stein_b2: float | None = None
    mean_boundary: float | None = None
    ci99_boundary: float | None = None


@dataclass(frozen=True)
class SweepSummary:
    cells: tuple[CellSummary, ...]


# ---------------------------------------------------------------------------
# configuration


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _real(doc, key, *, positive=False):
    v = doc[key]
    _require(isinstance(v, (int, float)) and not isinstance(v, bool),
             f"field {key!r} must be a number")
    v = float(v)
    _require(math.isfinite(v), f"field {key!r} must be finite")
    if positive:
        _require(v > 0.0, f"field {key!r} must be > 0")
    return v


def _integer(doc, key, *, lo=0, hi=None):
    v = doc[key]
    _require(isinstance(v, int) and not isinstance(v, bool),
             f"field {key!r} must be an integer")
    _require(v >= lo, f"field {key!r} must be >= {lo}")
    if hi is not None:
        _require(v <= hi, f"field {key!r} must be <= {hi}")
    return v


def build_model(spec) -> ConnectionModel:
    """Construct a kernel from its JSON spec (kind + parameters)."""
    _require(isinstance(spec, dict), "model spec must be an object")
    _require("kind" in spec, "model spec missing field 'kind'")
    kind = spec["kind"]
    _require(kind in _MODEL_KEYS, f"unknown model kind {kind!r}")
    allowed = _MODEL_KEYS[kind]
    for k in spec:
        _require(k == "kind" or k in allowed,
                 f"unknown key {k!r} for model kind {kind!r}")
    kwargs = {}
    if "cutoff_eps" in spec:
        kwargs["cutoff_eps"] = _real(spec, "cutoff_eps", positive=True)
    if kind == "unit_disk":
        return unit_disk()
    if kind == "gaussian":
        return gaussian(**kwargs)
    if kind == "log_normal":
        _require("sigma_db" in spec and "eta" in spec,
                 "log_normal model needs 'sigma_db' and 'eta'")
        return log_normal(_real(spec, "sigma_db", positive=True),
                          _real(spec, "eta", positive=True), **kwargs)
    # table
    _require(("knots" in spec) != ("path" in spec),
             "table model needs exactly one of 'knots' or 'path'")
    if "path" in spec:
        _require(isinstance(spec["path"], str), "field 'path' must be a string")
        return load_table(spec["path"], **kwargs)
    knots = spec["knots"]
    _require(isinstance(knots, list) and knots, "field 'knots' must be a nonempty list")
    pairs = []
    for item in knots:
        _require(isinstance(item, list) and len(item) == 2
                 and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                         for v in item),
                 "each knot must be a [radius, value] pair")
        pairs.append((float(item[0]), float(item[1])))
    return table_model(pairs, **kwargs)


def parse_config(doc) -> CampaignConfig:
    """Validate a parsed JSON document into a CampaignConfig.

    Unknown keys anywhere are hard errors; silent typos have ruined enough
    long runs.  The RCM_SEED environment variable, when set, overrides the
    configured master_seed.
    """
    _require(isinstance(doc, dict), "config must be a JSON object")
    for k in doc:
        _require(k in _CONFIG_KEYS, f"unknown config key {k!r}")
    for k in ("model", "rho_list", "b_list", "metric", "trials", "output_path"):
        _require(k in doc, f"config missing field {k!r}")

    model = build_model(doc["model"])

    for key in ("rho_list", "b_list"):
        _require(isinstance(doc[key], list) and doc[key],
                 f"field {key!r} must be a nonempty list")
    rho_list = tuple(
        _real({"rho_list": v}, "rho_list", positive=True) for v in doc["rho_list"]
    )
    b_list = tuple(_real({"b_list": v}, "b_list") for v in doc["b_list"])

    metric = doc["metric"]
    _require(metric in ("torus", "square", "coupled"),
             "field 'metric' must be 'torus', 'square' or 'coupled'")
    trials = _integer(doc, "trials", lo=1)
    seed = _integer(doc, "master_seed", lo=0, hi=2**64 - 1) if "master_seed" in doc else 0
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
        _require(0 <= seed < 2**64, f"{SEED_ENV} must fit in 64 bits")
    epsilon = _real(doc, "epsilon") if "epsilon" in doc else 0.25
    _require(0.0 < epsilon < 0.5, "field 'epsilon' must lie in (0, 1/2)")
    _require(isinstance(doc["output_path"], str) and doc["output_path"],
             "field 'output_path' must be a nonempty string")
    fmt = doc.get("format", "csv")
    _require(fmt in ("csv", "json"), "field 'format' must be 'csv' or 'json'")

    if not model.validation.ok:
        raise ModelError(f"model failed validation: {model.validation}")
    return CampaignConfig(model=model, rho_list=rho_list, b_list=b_list,
                          metric=metric, trials=trials, master_seed=seed,
                          epsilon=epsilon, output_path=doc["output_path"],
                          format=fmt)


def load_config(path) -> CampaignConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise _IoFailure(f"cannot read config {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    return parse_config(doc)


class _IoFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# campaign execution

_WORKER_STATE: dict = {}


def _init_worker(model, metric, seed):
    _WORKER_STATE["model"] = model
    _WORKER_STATE["metric"] = metric
    _WORKER_STATE["seed"] = seed


def _run_one(task):
    cell_idx, rho, b, trial = task
    model = _WORKER_STATE["model"]
    metric = _WORKER_STATE["metric"]
    seed = _WORKER_STATE["seed"]
    if metric == "coupled":
        params = SampleParams(rho, b, model, Metric.TORUS, seed, trial)
        rec = coupled_statistics(couple_torus_to_square(params))
    else:
        params = SampleParams(rho, b, model, Metric(metric), seed, trial)
        rec = trial_statistics(build_graph(params, sample_points(params)))
    return cell_idx, rec


def run_campaign(config: CampaignConfig, workers: int = 1
                 ) -> tuple[SweepSummary, list[TrialRecord], list[str]]:
    """Execute every (rho, b) cell; returns (summary, trial rows, warnings).

    The trial rows come back sorted by (cell, trial), which together with
    the counter-based sampler makes the output independent of the worker
    count.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    cells = []
    for rho in config.rho_list:
        for b in config.b_list:
            cells.append((rho, b))

    warnings: list[str] = []
    skipped: dict[int, str] = {}
    tasks = []
    for idx, (rho, b) in enumerate(cells):
        try:
            metric = Metric.TORUS if config.metric == "coupled" else Metric(config.metric)
            probe = SampleParams(rho, b, config.model, metric, config.master_seed, 0)
            build_graph(probe, np.empty((0, 2)))
        except ParameterError as e:
            reason = SKIP_REASON if math.log(rho) + b <= 0 else str(e)
            skipped[idx] = reason
            warnings.append(f"cell rho={rho:g} b={b:g} skipped: {reason}")
            continue
        tasks.extend((idx, rho, b, t) for t in range(config.trials))

    init_args = (config.model, config.metric, config.master_seed)
    if workers == 1 or not tasks:
        _init_worker(*init_args)
        results = [_run_one(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with multiprocessing.Pool(workers, initializer=_init_worker,
                                  initargs=init_args) as pool:
            results = pool.map(_run_one, tasks, chunksize=chunk)

    by_cell: dict[int, list[TrialRecord]] = {i: [] for i in range(len(cells))}
    for cell_idx, rec in results:
        by_cell[cell_idx].append(rec)

    rows: list[TrialRecord] = []
    summaries: list[CellSummary] = []
    for idx, (rho, b) in enumerate(cells):
        if idx in skipped:
            summaries.append(CellSummary(rho=rho, b=b, metric=config.metric,
                                         trials=0, skipped=True,
                                         reason=skipped[idx]))
            continue
        recs = sorted(by_cell[idx], key=lambda r: r.trial)
        rows.extend(recs)
        summaries.append(_summarize_cell(config, rho, b, recs, warnings))
    return SweepSummary(cells=tuple(summaries)), rows, warnings


def _mean_ci(values) -> tuple[float, float, float]:
    a = np.asarray(values, dtype=np.float64)
    mean = float(a.mean())
    var = float(a.var(ddof=1)) if a.size > 1 else 0.0
    return mean, var, Z99 * math.sqrt(var / a.size)


def _prop_ci(flags) -> tuple[float, float]:
    a = np.asarray(flags, dtype=np.float64)
    p = float(a.mean())
    return p, Z99 * math.sqrt(p * (1.0 - p) / a.size)


def _summarize_cell(config: CampaignConfig, rho: float, b: float,
                    recs: list[TrialRecord], warnings: list[str]) -> CellSummary:
    iso = [r.isolated for r in recs]
    mean_iso, var_iso, ci_iso = _mean_ci(iso)
    p0, ci_p0 = _prop_ci([r.isolated == 0 for r in recs])
    conn, ci_conn = _prop_ci([r.connected for r in recs])
    mdeg, _, ci_mdeg = _mean_ci([r.mean_degree for r in recs])

    # a coupled run's base statistics describe the square-metric graph
    theory_metric = Metric.SQUARE if config.metric in ("square", "coupled") \
        else Metric.TORUS
    tv = report = b1 = b2 = None
    try:
        report = theory_report(config.model, rho, b, theory_metric)
        lam = report.expected_isolated
        k_max = max(max(iso), 10)
        tv = tv_distance(empirical_distribution(iso, k_max),
                         poisson_pmf(lam, k_max))
    except RcmError as e:
        warnings.append(f"cell rho={rho:g} b={b:g}: theory unavailable: {e}")
    try:
        b1, b2 = chen_stein_terms(config.model, rho, b,
                                  ChenSteinParams(epsilon=config.epsilon))
    except RcmError as e:
        warnings.append(f"cell rho={rho:g} b={b:g}: dependence bounds unavailable: {e}")

    mean_bnd = ci_bnd = None
    if config.metric == "coupled":
        mean_bnd, _, ci_bnd = _mean_ci([r.isolated_boundary for r in recs])

    return CellSummary(
        rho=rho, b=b, metric=config.metric, trials=len(recs),
        skipped=False, reason=None,
        mean_isolated=mean_iso, var_isolated=var_iso, ci99_isolated=ci_iso,
        p_no_isolated=p0, ci99_p_no_isolated=ci_p0,
        frac_connected=conn, ci99_frac_connected=ci_conn,
        mean_degree=mdeg, ci99_mean_degree=ci_mdeg,
        tv_to_poisson=tv,
        theory_isolated=None if report is None else report.expected_isolated,
        theory_asymptotic_mean=None if report is None else report.asymptotic_mean,
        theory_prob_no_isolated=None if report is None else report.prob_no_isolated,
        theory_mean_degree=None if report is None else report.mean_degree,
        theory_boundary_excess=None if report is None else report.boundary_excess,
        chen_stein_b1=b1, chen_stein_b2=b2,
        mean_boundary=mean_bnd, ci99_boundary=ci_bnd,
    )


# ---------------------------------------------------------------------------
# serialization


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def format_trials_csv(rows: list[TrialRecord]) -> str:
    lines = [",".join(TRIAL_COLUMNS)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in TRIAL_COLUMNS))
    return "\n".join(lines) + "\n"


def parse_trials_csv(text: str) -> list[TrialRecord]:
    """Inverse of format_trials_csv; the round trip is lossless."""
    lines = text.splitlines()
    if not lines or lines[0] != ",".join(TRIAL_COLUMNS):
        raise ConfigError("trial table header does not match the schema")
    out = []
    for ln in lines[1:]:
        f = ln.split(",")
        if len(f) != len(TRIAL_COLUMNS):
            raise ConfigError(f"malformed trial row: {ln!r}")
        out.append(TrialRecord(
            rho=float(f[0]), b=float(f[1]), metric=f[2], trial=int(f[3]),
            n_points=int(f[4]), n_edges=int(f[5]), isolated=int(f[6]),
            n_components=int(f[7]), connected={"true": True, "false": False}[f[8]],
            mean_degree=float(f[9]),
            isolated_torus=int(f[10]) if f[10] else None,
            isolated_square=int(f[11]) if f[11] else None,
            isolated_boundary=int(f[12]) if f[12] else None,
        ))
    return out


def format_summary_csv(summary: SweepSummary) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for cell in summary.cells:
        lines.append(",".join(_fmt(getattr(cell, c)) for c in SUMMARY_COLUMNS))
    return "\n".join(lines) + "\n"


def _record_dict(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in dataclass_fields(obj)}


def format_trials_json(rows: list[TrialRecord]) -> str:
    return json.dumps([_record_dict(r) for r in rows], indent=2,
                      sort_keys=True) + "\n"


def format_summary_json(summary: SweepSummary) -> str:
    return json.dumps([_record_dict(c) for c in summary.cells], indent=2,
                      sort_keys=True) + "\n"


def summary_path(output_path: str) -> str:
    p = Path(output_path)
    return str(p.with_name(p.stem + "_summary" + p.suffix))


def write_outputs(config: CampaignConfig, summary: SweepSummary,
                  rows: list[TrialRecord]) -> tuple[str, str]:
    if config.format == "csv":
        trial_text = format_trials_csv(rows)
        summary_text = format_summary_csv(summary)
    else:
        trial_text = format_trials_json(rows)
        summary_text = format_summary_json(summary)
    out = Path(config.output_path)
    s_path = summary_path(config.output_path)
    try:
        if out.parent and not out.parent.exists():
            out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(trial_text)
        Path(s_path).write_text(summary_text)
    except OSError as e:
        raise _IoFailure(f"cannot write output: {e}") from e
    return str(out), s_path


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args, force_coupled: bool = False) -> int:
    config = load_config(args.config)
    if force_coupled and config.metric != "coupled":
        config = CampaignConfig(**{**_record_dict(config), "metric": "coupled"})
    if args.output is not None:
        config = CampaignConfig(**{**_record_dict(config), "output_path": args.output})
    if args.format is not None:
        config = CampaignConfig(**{**_record_dict(config), "format": args.format})
    summary, rows, warnings = run_campaign(config, workers=args.workers)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    trial_file, summary_file = write_outputs(config, summary, rows)
    print(f"{len(rows)} trial rows -> {trial_file}")
    print(f"{len(summary.cells)} summary rows -> {summary_file}")
    return EXIT_OK


def _model_from_arg(arg: str) -> ConnectionModel:
    if arg == "unit_disk":
        return unit_disk()
    if arg == "gaussian":
        return gaussian()
    try:
        text = Path(arg).read_text()
    except OSError as e:
        raise _IoFailure(f"cannot read model spec {arg}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"model spec is not valid JSON: {e}") from e
    return build_model(doc)


def _cmd_theory(args) -> int:
    model = _model_from_arg(args.model)
    if not model.validation.ok:
        raise ModelError(f"model failed validation: {model.validation}")
    e_tor, err_tor = expected_isolated(model, args.rho, args.b, Metric.TORUS,
                                       return_error=True)
    e_sq, err_sq = expected_isolated(model, args.rho, args.b, Metric.SQUARE,
                                     return_error=True)
    report = theory_report(model, args.rho, args.b, Metric.TORUS)
    doc = {
        "model": model.kind,
        "rho": args.rho,
        "b": args.b,
        "epsilon": args.epsilon,
        "expected_isolated_torus": e_tor,
        "quad_error_torus": err_tor,
        "expected_isolated_square": e_sq,
        "quad_error_square": err_sq,
        "boundary_excess": report.boundary_excess,
        "asymptotic_mean": report.asymptotic_mean,
        "prob_no_isolated": report.prob_no_isolated,
        "mean_degree": report.mean_degree,
        "truncation_bias": truncation_bias(model, args.rho, args.b),
    }
    try:
        b1, b2 = chen_stein_terms(model, args.rho, args.b,
                                  ChenSteinParams(epsilon=args.epsilon))
        doc["chen_stein_b1"] = b1
        doc["chen_stein_b2"] = b2
    except RcmError as e:
        doc["chen_stein_b1"] = doc["chen_stein_b2"] = None
        doc["chen_stein_error"] = str(e)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as e:
            raise _IoFailure(f"cannot write output: {e}") from e
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_validate_model(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as e:
        raise _IoFailure(f"cannot read config {args.config}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    spec = doc.get("model", doc) if isinstance(doc, dict) else doc
    model = build_model(spec)
    v = model.validation
    out = {
        "kind": model.kind,
        "cutoff": model.cutoff,
        "C": model.C,
        "C_error": model.C_error,
        "monotone_ok": v.monotone_ok,
        "range_ok": v.range_ok,
        "integral_finite": v.integral_finite,
        "tail_ok": v.tail_ok,
        "tail_witness": v.tail_witness,
        "ok": v.ok,
    }
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if v.ok else EXIT_MODEL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcmsim",
        description="Poisson random-connection-network simulation campaigns",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--workers", type=int, default=1,
                       help="worker processes (output is identical for any value)")
        p.add_argument("--output", default=None, help="override config output_path")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="override config format")

    p_sim = sub.add_parser("simulate", help="run the campaign in a config file")
    p_sim.add_argument("config")
    add_common(p_sim)

    p_cpl = sub.add_parser("couple",
                           help="run the campaign with the coupled torus/square metric")
    p_cpl.add_argument("config")
    add_common(p_cpl)

    p_th = sub.add_parser("theory", help="print quadrature predictions, no simulation")
    p_th.add_argument("--model", required=True,
                      help="'unit_disk', 'gaussian', or a path to a model spec JSON")
    p_th.add_argument("--rho", type=float, required=True)
    p_th.add_argument("--b", type=float, required=True)
    p_th.add_argument("--epsilon", type=float, default=0.25)
    p_th.add_argument("--output", default=None)

    p_val = sub.add_parser("validate-model", help="check a kernel spec and exit")
    p_val.add_argument("config", help="JSON file with a model spec or a 'model' key")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "couple":
            return _cmd_simulate(args, force_coupled=True)
        if args.command == "theory":
            return _cmd_theory(args)
        return _cmd_validate_model(args)
    except (ConfigError, ParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, QuadratureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except _IoFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
