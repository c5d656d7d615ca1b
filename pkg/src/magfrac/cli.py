"""Command-line front end: JSON config in, CSV/JSON reports and figures out.

Exit codes: 0 success, 1 numerical-contract failure, 2 configuration error.
Errors are emitted to stderr as a single JSON line with code, field and
message.  Identical semantic config plus seed reproduces byte-identical JSON
summaries; the worker cap (--threads) is an execution knob and is excluded
from the config echo (all reductions run in a fixed deterministic order).
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import report
from .domain import DomainSpec, build_grid, pair_region, split
from .errors import NumericalContractError, ValidationError
from .experiments import (
    indicator_report,
    punctured_inequality_check,
    ramp_decay_sweep,
    validate_exponent_conditions,
)
from .fields import (
    GridFunction,
    WeightFunction,
    affine_field,
    constant_field,
    make_indicator,
    ramp_function,
    rotation_field,
    linear_field,
    smoothed_random_function,
    zero_field,
)
from .operator import assemble
from .seminorm import SeminormParams, magnetic_seminorm
from .spectral import eigensolve, gap_report, write_eigenvectors_csv, write_spectrum_csv
from .variational import (
    OptimizerConfig,
    best_constant,
    energy,
    ground_states,
    poincare_constant,
)

COMMANDS = (
    "seminorm",
    "energy",
    "eigs",
    "poincare",
    "best-constant",
    "example1",
    "example2",
    "punctured",
    "validate",
)

_TOP_KEYS = {
    "command", "domain", "s", "p", "q", "r", "delta", "eps_list", "k", "count",
    "field", "function", "split", "region", "optimizer", "C", "eps_slack",
    "out", "seed", "threads", "plots", "eigenvectors", "N",
}
_DOMAIN_KEYS = {"kind", "bounds", "center", "radius", "n"}
_FIELD_KEYS = {"kind", "vector", "offset", "matrix", "slope"}
_FUNCTION_KEYS = {"kind", "eps", "value"}
_SPLIT_KEYS = {"kind", "axis", "threshold", "center", "radius"}
_OPT_KEYS = {"restarts", "max_iters", "grad_tol"}

_EPS_DEFAULT = [0.25, 0.125, 0.0625, 0.03125, 0.015625]


@dataclass
class RunConfig:
    command: str
    domain: dict
    s: float
    p: float
    q: float
    r: float
    delta: float
    eps_list: list
    k: int
    count: int
    field: dict
    function: dict
    split: dict
    region: str
    optimizer: OptimizerConfig
    C: float
    eps_slack: float
    out: str
    seed: int
    threads: int
    plots: bool
    eigenvectors: bool
    N: int
    echo: dict


def _fail(message, field=None):
    raise ValidationError(message, field=field)


def _check_keys(mapping, allowed, context):
    for key in mapping:
        if key not in allowed:
            _fail(f"unknown key {key!r} in {context}", field=key)


def _parse_q(value):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        _fail(f"cannot parse q value {value!r}", field="q")
    q = float(value)
    if q < 1.0:
        _fail("q must satisfy q >= 1 (or be 'inf')", field="q")
    return q


def _default_domain(command):
    if command == "example1":
        return {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0, "n": 64}
    if command == "example2":
        return {"kind": "rectangle", "bounds": [-1.0, 1.0, 0.0, 1.0], "n": [4096, 2048]}
    return {"kind": "interval", "bounds": [0.0, 1.0], "n": 64}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="magfrac",
        description=(
            "Discrete magnetic fractional seminorms, spectra, variational "
            "constants and punctured-inequality studies on uniform grids."
        ),
        epilog=(
            "Defaults: s=0.5 p=2 q=2 r=1.5 delta=1 k=10 seed=0 threads=1 "
            "out=magfrac-out; domain interval(0,1) n=64 (example1: unit ball "
            "n=64; example2: rectangle (-1,1)x(0,1) n=[4096,2048]). Flags "
            "override config-file values."
        ),
    )
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--command", choices=COMMANDS, help="operation to run")
    parser.add_argument("--out", help="output directory (default magfrac-out)")
    parser.add_argument("--seed", type=int, help="RNG seed (default 0)")
    parser.add_argument("--threads", type=int,
                        help="worker cap; results are deterministic regardless")
    parser.add_argument("--s", type=float, help="differentiability order in (0,1)")
    parser.add_argument("--p", type=float, help="seminorm exponent, p >= 1")
    parser.add_argument("--q", help="norm exponent, q >= 1 or 'inf'")
    parser.add_argument("--r", type=float, help="cross-region exponent, r >= 1")
    parser.add_argument("--delta", type=float, help="distance constraint in (0,1]")
    parser.add_argument("--n", type=int, help="cells per axis (overrides domain n)")
    return parser


def parse_config(args):
    """Merge the config file with flag overrides and validate every field."""
    raw = {}
    if args.config:
        if not os.path.exists(args.config):
            _fail(f"config file not found: {args.config}", field="config")
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as err:
            _fail(f"malformed JSON config: {err}", field="config")
        if not isinstance(raw, dict):
            _fail("config root must be a JSON object", field="config")
    _check_keys(raw, _TOP_KEYS, "config")

    for flag in ("command", "out", "seed", "threads", "s", "p", "q", "r", "delta"):
        value = getattr(args, flag)
        if value is not None:
            raw[flag] = value
    if args.n is not None:
        raw.setdefault("domain", _default_domain(raw.get("command", "")))
        raw["domain"] = dict(raw["domain"])
        raw["domain"]["n"] = args.n

    command = raw.get("command")
    if command is None:
        _fail("missing command", field="command")
    if command not in COMMANDS:
        _fail(f"unknown command {command!r}", field="command")

    domain = dict(raw.get("domain") or _default_domain(command))
    _check_keys(domain, _DOMAIN_KEYS, "domain")

    s = float(raw.get("s", 0.5))
    if not 0.0 < s < 1.0:
        _fail("s must lie in (0, 1)", field="s")
    p = float(raw.get("p", 2.0))
    if p < 1.0:
        _fail("p must satisfy p >= 1", field="p")
    q = _parse_q(raw.get("q", 2.0))
    r = float(raw.get("r", 1.5))
    if r < 1.0:
        _fail("r must satisfy r >= 1", field="r")
    delta = float(raw.get("delta", 1.0))
    if not 0.0 < delta <= 1.0:
        _fail("delta must lie in (0, 1]", field="delta")
    k = int(raw.get("k", 10))
    if k < 1:
        _fail("k must be positive", field="k")
    count = int(raw.get("count", 50))
    if count < 1:
        _fail("count must be positive", field="count")
    seed = int(raw.get("seed", 0))
    if seed < 0:
        _fail("seed must be nonnegative", field="seed")
    threads = int(raw.get("threads", 1))
    if threads < 1:
        _fail("threads must be positive", field="threads")
    plots = bool(raw.get("plots", True))
    eigenvectors = bool(raw.get("eigenvectors", False))
    c_value = float(raw.get("C", 1.0))
    if c_value < 0.0:
        _fail("C must be nonnegative", field="C")
    eps_slack = raw.get("eps_slack")
    if eps_slack is not None:
        eps_slack = float(eps_slack)
        if eps_slack <= 0.0:
            _fail("eps_slack must be positive", field="eps_slack")
    eps_list = [float(e) for e in raw.get("eps_list", _EPS_DEFAULT)]
    if any(not 0.0 < e < 1.0 for e in eps_list):
        _fail("eps_list entries must lie in (0, 1)", field="eps_list")

    field_cfg = dict(raw.get("field") or {"kind": "zero"})
    _check_keys(field_cfg, _FIELD_KEYS, "field")
    function_cfg = dict(raw.get("function") or {"kind": "random"})
    _check_keys(function_cfg, _FUNCTION_KEYS, "function")
    split_cfg = dict(raw.get("split") or {"kind": "halfspace", "axis": 0, "threshold": 0.0})
    _check_keys(split_cfg, _SPLIT_KEYS, "split")
    region = raw.get("region", "full")
    if region not in ("full", "product", "complement"):
        _fail("region must be full, product or complement", field="region")

    opt_cfg = dict(raw.get("optimizer") or {})
    _check_keys(opt_cfg, _OPT_KEYS, "optimizer")
    optimizer = OptimizerConfig(
        restarts=int(opt_cfg.get("restarts", 8)),
        max_iters=int(opt_cfg.get("max_iters", 5000)),
        grad_tol=float(opt_cfg.get("grad_tol", 1e-9)),
        seed=seed,
    )

    n_dim = raw.get("N")
    if n_dim is not None:
        n_dim = int(n_dim)
        if n_dim not in (1, 2):
            _fail("N must be 1 or 2", field="N")

    echo = {key: raw[key] for key in sorted(raw) if key not in ("threads", "out")}
    echo.setdefault("domain", domain)
    echo.setdefault("seed", seed)

    return RunConfig(
        command=command,
        domain=domain,
        s=s, p=p, q=q, r=r, delta=delta,
        eps_list=eps_list,
        k=k,
        count=count,
        field=field_cfg,
        function=function_cfg,
        split=split_cfg,
        region=region,
        optimizer=optimizer,
        C=c_value,
        eps_slack=eps_slack,
        out=str(raw.get("out", "magfrac-out")),
        seed=seed,
        threads=threads,
        plots=plots,
        eigenvectors=eigenvectors,
        N=n_dim,
        echo=echo,
    )


# ---------------------------------------------------------------------------
# config -> objects


def _make_domain(cfg):
    dom = cfg.domain
    kind = dom.get("kind")
    if kind == "interval":
        bounds = dom.get("bounds", [0.0, 1.0])
        spec = DomainSpec.interval(bounds[0], bounds[1])
    elif kind == "rectangle":
        b = dom.get("bounds")
        if b is None or len(b) != 4:
            _fail("rectangle needs bounds [a1,b1,a2,b2]", field="bounds")
        spec = DomainSpec.rectangle(*b)
    elif kind == "ball":
        spec = DomainSpec.ball(
            center=dom.get("center", [0.0, 0.0]),
            radius=dom.get("radius", 1.0),
            box=dom.get("bounds"),
        )
    else:
        _fail(f"unknown domain kind {kind!r}", field="kind")
    n = dom.get("n", 64)
    return build_grid(spec, n)


def _make_field(cfg_field, grid):
    kind = cfg_field.get("kind", "zero")
    if kind == "zero":
        return zero_field(grid)
    if kind == "constant":
        return constant_field(grid, cfg_field.get("vector", [1.0] * grid.dim))
    if kind == "rotation":
        return rotation_field(grid)
    if kind == "linear":
        return linear_field(grid, cfg_field.get("slope", 1.0))
    if kind == "affine":
        return affine_field(
            grid,
            cfg_field.get("offset", [0.0] * grid.dim),
            cfg_field.get("matrix", [[0.0] * grid.dim for _ in range(grid.dim)]),
        )
    _fail(f"unknown field kind {kind!r}", field="field")


def _make_split(cfg_split, grid):
    kind = cfg_split.get("kind", "halfspace")
    if kind == "halfspace":
        axis = int(cfg_split.get("axis", 0))
        if not 0 <= axis < grid.dim:
            _fail("split axis out of range", field="split")
        threshold = float(cfg_split.get("threshold", 0.0))
        return split(grid, lambda x: x[:, axis] <= threshold)
    if kind == "ball":
        center = np.asarray(cfg_split.get("center", [0.0] * grid.dim), dtype=float)
        radius = float(cfg_split.get("radius", 0.5))
        return split(grid, lambda x: np.linalg.norm(x - center, axis=1) < radius)
    _fail(f"unknown split kind {kind!r}", field="split")


def _make_function(cfg, grid):
    kind = cfg.function.get("kind", "random")
    if kind == "random":
        rng = np.random.default_rng(cfg.seed)
        return smoothed_random_function(grid, rng)
    if kind == "constant":
        return GridFunction.constant(grid, cfg.function.get("value", 1.0))
    if kind == "indicator":
        lam, _ = _make_split(cfg.split, grid)
        return make_indicator(lam)
    if kind == "ramp":
        return ramp_function(grid, cfg.function.get("eps", 0.25))
    _fail(f"unknown function kind {kind!r}", field="function")


def _make_region(cfg, grid):
    if cfg.region == "full":
        return pair_region("full", grid=grid)
    lam, gam = _make_split(cfg.split, grid)
    if cfg.region == "product":
        return pair_region("product", mask_a=lam, mask_b=lam)
    return pair_region("complement_of_product", mask_a=lam)


def _base_summary(cfg):
    return {
        "command": cfg.command,
        "schema_version": report.SCHEMA_VERSION,
        "seed": cfg.seed,
        "config": cfg.echo,
    }


# ---------------------------------------------------------------------------
# command handlers


def _cmd_seminorm(cfg, outdir):
    grid = _make_domain(cfg)
    field = _make_field(cfg.field, grid)
    f = _make_function(cfg, grid)
    region = _make_region(cfg, grid)
    params = SeminormParams(s=cfg.s, p=cfg.p, field=field)
    breakdown = magnetic_seminorm(f, params, region)
    payload = breakdown.to_dict(field=field)
    payload.update({"schema_version": report.SCHEMA_VERSION, "config": cfg.echo})
    report.write_json(os.path.join(outdir, "breakdown.json"), payload)
    report.write_grid_function_csv(f, os.path.join(outdir, "function.csv"), cfg.echo)
    outputs = ["breakdown.json", "function.csv"]
    if cfg.plots:
        report.fig_profile(f, os.path.join(outdir, "function.png"), title="input function")
        outputs.append("function.png")
    summary = _base_summary(cfg)
    summary.update(
        {
            "value": breakdown.value,
            "value_p": breakdown.value_p,
            "pair_count": breakdown.pair_count,
            "region": breakdown.region,
            "outputs": outputs,
        }
    )
    return summary


def _cmd_energy(cfg, outdir):
    grid = _make_domain(cfg)
    field = _make_field(cfg.field, grid)
    result = energy(grid, cfg.s, cfg.p, cfg.q, field, cfg.optimizer)
    payload = {
        "value": result.value,
        "iterations": result.iterations,
        "restarts_used": result.restarts_used,
        "final_gradient_norm": result.final_gradient_norm,
        "converged": result.converged,
        "method": result.method,
        "lower_confidence": result.lower_confidence,
        "optimizer": cfg.optimizer.describe(),
        "schema_version": report.SCHEMA_VERSION,
        "config": cfg.echo,
    }
    report.write_json(os.path.join(outdir, "energy.json"), payload)
    report.write_grid_function_csv(
        result.minimizer, os.path.join(outdir, "minimizer.csv"), cfg.echo
    )
    outputs = ["energy.json", "minimizer.csv"]
    if cfg.plots:
        report.fig_profile(result.minimizer, os.path.join(outdir, "minimizer.png"),
                           title="energy minimizer")
        report.fig_convergence(result.trace, os.path.join(outdir, "convergence.png"),
                               ylabel="seminorm ratio")
        outputs += ["minimizer.png", "convergence.png"]
    summary = _base_summary(cfg)
    summary.update(
        {
            "value": result.value,
            "converged": result.converged,
            "method": result.method,
            "outputs": outputs,
        }
    )
    return summary


def _cmd_eigs(cfg, outdir):
    grid = _make_domain(cfg)
    field = _make_field(cfg.field, grid)
    op = assemble(grid, cfg.s, field)
    spectrum = eigensolve(op, cfg.k)
    lines = report.provenance_lines(cfg.echo)
    write_spectrum_csv(spectrum, os.path.join(outdir, "spectrum.csv"), lines)
    outputs = ["spectrum.csv"]
    if cfg.eigenvectors:
        write_eigenvectors_csv(spectrum, os.path.join(outdir, "eigenvectors.csv"), lines)
        outputs.append("eigenvectors.csv")
    if cfg.plots:
        report.fig_spectrum(spectrum, os.path.join(outdir, "spectrum.png"))
        outputs.append("spectrum.png")
    gaps = gap_report(spectrum) if spectrum.k >= 2 else []
    summary = _base_summary(cfg)
    summary.update(
        {
            "lambda_1": float(spectrum.lambdas[0]),
            "lambda_k": float(spectrum.lambdas[-1]),
            "residual_max": float(np.max(spectrum.residuals)),
            "min_gap": min((row.gap for row in gaps), default=0.0),
            "degenerate_pairs": sum(1 for row in gaps if row.near_degenerate),
            "outputs": outputs,
        }
    )
    return summary


def _cmd_poincare(cfg, outdir):
    grid = _make_domain(cfg)
    weight = WeightFunction.uniform(grid)
    result = poincare_constant(grid, cfg.s, cfg.p, cfg.q, weight, cfg.optimizer)
    payload = {
        "constant": result.constant,
        "ratio_min": result.ratio_min,
        "iterations": result.iterations,
        "converged": result.converged,
        "optimizer": cfg.optimizer.describe(),
        "schema_version": report.SCHEMA_VERSION,
        "config": cfg.echo,
    }
    report.write_json(os.path.join(outdir, "poincare.json"), payload)
    report.write_grid_function_csv(
        result.extremizer, os.path.join(outdir, "extremizer.csv"), cfg.echo
    )
    outputs = ["poincare.json", "extremizer.csv"]
    if cfg.plots:
        report.fig_profile(result.extremizer, os.path.join(outdir, "extremizer.png"),
                           title="Poincare extremizer")
        outputs.append("extremizer.png")
    summary = _base_summary(cfg)
    summary.update({"constant": result.constant, "outputs": outputs})
    return summary


def _cmd_best_constant(cfg, outdir):
    grid = _make_domain(cfg)
    field = _make_field(cfg.field, grid)
    energy_result, gs = ground_states(grid, cfg.s, cfg.p, cfg.q, field, cfg.optimizer)
    result = best_constant(
        grid, cfg.s, cfg.p, cfg.q, field, cfg.delta, cfg.optimizer, energy_result, gs
    )
    payload = {
        "S": result.S,
        "constrained_ratio": result.constrained_ratio,
        "energy_value": result.energy_value,
        "distance": result.distance,
        "feasible": result.feasible,
        "constraint_dropped": result.constraint_dropped,
        "ground_states": len(gs.representatives),
        "optimizer": cfg.optimizer.describe(),
        "schema_version": report.SCHEMA_VERSION,
        "config": cfg.echo,
    }
    report.write_json(os.path.join(outdir, "best_constant.json"), payload)
    report.write_grid_function_csv(
        result.witness, os.path.join(outdir, "witness.csv"), cfg.echo
    )
    outputs = ["best_constant.json", "witness.csv"]
    if cfg.plots:
        report.fig_profile(result.witness, os.path.join(outdir, "witness.png"),
                           title="constrained minimizer")
        outputs.append("witness.png")
    summary = _base_summary(cfg)
    summary.update(
        {
            "S": result.S,
            "energy_value": result.energy_value,
            "feasible": result.feasible,
            "outputs": outputs,
        }
    )
    return summary


def _cmd_example1(cfg, outdir):
    dom = cfg.domain
    center_ok = tuple(dom.get("center", (0.0, 0.0))) == (0.0, 0.0)
    if dom.get("kind") != "ball" or dom.get("radius", 1.0) != 1.0 or not center_ok:
        _fail("example1 runs on the unit ball centered at the origin", field="domain")
    n = dom.get("n", 64)
    if not np.isscalar(n):
        _fail("example1 needs a scalar per-axis resolution", field="n")
    rep = indicator_report(cfg.s, cfg.p, cfg.q, int(n))
    payload = rep.to_dict()
    payload.update({"schema_version": report.SCHEMA_VERSION, "config": cfg.echo})
    report.write_json(os.path.join(outdir, "example1.json"), payload)
    outputs = ["example1.json"]
    if cfg.plots:
        report.fig_indicator(rep, os.path.join(outdir, "example1.png"))
        outputs.append("example1.png")
    summary = _base_summary(cfg)
    summary.update(
        {
            "sem_inner": rep.sem_inner,
            "sem_outer": rep.sem_outer,
            "norm_q": rep.norm_q,
            "rel_change": rep.rel_change,
            "refinement_stable": rep.refinement_stable,
            "outputs": outputs,
        }
    )
    return summary


def _cmd_example2(cfg, outdir):
    dom = cfg.domain
    bounds = tuple(dom.get("bounds", ()))
    if dom.get("kind") != "rectangle" or bounds != (-1.0, 1.0, 0.0, 1.0):
        _fail("example2 runs on the rectangle (-1,1)x(0,1)", field="domain")
    n = dom.get("n", [4096, 2048])
    if np.isscalar(n):
        n1, n2 = int(n), max(2, int(n) // 2)
    else:
        n1, n2 = int(n[0]), int(n[1])
    records, fit = ramp_decay_sweep(
        cfg.s, cfg.r, cfg.p, cfg.q, cfg.eps_list, n1, transverse=n2
    )
    rows = [rec.to_dict() for rec in records]
    report.write_rows_csv(
        os.path.join(outdir, "example2.csv"), list(rows[0].keys()), rows, cfg.echo
    )
    payload = {
        "fitted_slope": fit.slope,
        "expected_slope": fit.expected_slope,
        "within_tolerance": fit.within_tolerance,
        "n_points": fit.n_points,
        "records": rows,
        "schema_version": report.SCHEMA_VERSION,
        "config": cfg.echo,
    }
    report.write_json(os.path.join(outdir, "example2.json"), payload)
    outputs = ["example2.csv", "example2.json"]
    if cfg.plots:
        report.fig_decay(records, fit, os.path.join(outdir, "decay.png"))
        outputs.append("decay.png")
    summary = _base_summary(cfg)
    summary.update(
        {
            "fitted_slope": fit.slope,
            "expected_slope": fit.expected_slope,
            "within_tolerance": fit.within_tolerance,
            "outputs": outputs,
        }
    )
    return summary


def _cmd_punctured(cfg, outdir):
    grid = _make_domain(cfg)
    field = _make_field(cfg.field, grid)
    lam, _ = _make_split(cfg.split, grid)
    energy_result, gs = ground_states(grid, cfg.s, cfg.p, cfg.q, field, cfg.optimizer)
    sharp = best_constant(
        grid, cfg.s, cfg.p, cfg.q, field, cfg.delta, cfg.optimizer, energy_result, gs
    )
    if not math.isfinite(sharp.S):
        raise NumericalContractError("constrained constant did not resolve to a finite S")
    rng = np.random.default_rng(cfg.seed + 7)
    fs = [smoothed_random_function(grid, rng) for _ in range(cfg.count)]
    rep = punctured_inequality_check(
        cfg.s, cfg.p, cfg.q, cfg.r, field, cfg.delta, grid, lam,
        cfg.C, fs, sharp.S, energy_result.value, gs, eps_slack=cfg.eps_slack,
    )
    rows = [row.to_dict() for row in rep.rows]
    if rows:
        report.write_rows_csv(
            os.path.join(outdir, "punctured.csv"), list(rows[0].keys()), rows, cfg.echo
        )
    payload = rep.to_dict()
    payload.update({"schema_version": report.SCHEMA_VERSION, "config": cfg.echo})
    report.write_json(os.path.join(outdir, "punctured.json"), payload)
    outputs = ["punctured.csv", "punctured.json"] if rows else ["punctured.json"]
    if cfg.plots and rows:
        report.fig_punctured(rep.rows, os.path.join(outdir, "punctured.png"))
        outputs.append("punctured.png")
    summary = _base_summary(cfg)
    summary.update(
        {
            "S": rep.S,
            "energy_value": rep.energy_value,
            "minimal_C": rep.minimal_C,
            "rows": len(rep.rows),
            "skipped": rep.skipped,
            "all_hold_at_C": all(row.holds for row in rep.rows),
            "outputs": outputs,
        }
    )
    return summary


def _cmd_validate(cfg, outdir):
    dim = cfg.N if cfg.N is not None else (2 if cfg.domain.get("kind") != "interval" else 1)
    conditions = validate_exponent_conditions(cfg.s, cfg.p, cfg.q, cfg.r, dim)
    payload = conditions.to_dict()
    payload.update({"schema_version": report.SCHEMA_VERSION, "config": cfg.echo})
    report.write_json(os.path.join(outdir, "validate.json"), payload)
    summary = _base_summary(cfg)
    summary.update(
        {
            "any_abc": conditions.any_abc,
            "any_i_iii": conditions.any_i_iii,
            "boundary_outside_scope": conditions.boundary_outside_scope,
            "outputs": ["validate.json"],
        }
    )
    return summary


_HANDLERS = {
    "seminorm": _cmd_seminorm,
    "energy": _cmd_energy,
    "eigs": _cmd_eigs,
    "poincare": _cmd_poincare,
    "best-constant": _cmd_best_constant,
    "example1": _cmd_example1,
    "example2": _cmd_example2,
    "punctured": _cmd_punctured,
    "validate": _cmd_validate,
}


def run(cfg):
    outdir = cfg.out
    os.makedirs(outdir, exist_ok=True)
    return _HANDLERS[cfg.command](cfg, outdir)


def _emit_error(code, err):
    line = json.dumps(
        {"code": code, "field": getattr(err, "field", None), "message": str(err)},
        sort_keys=True,
    )
    print(line, file=sys.stderr)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args)
        summary = run(cfg)
    except ValidationError as err:
        _emit_error(2, err)
        return 2
    except NumericalContractError as err:
        _emit_error(1, err)
        return 1
    print(report.summary_line(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
