"""Scripted counterexample studies for the punctured-domain inequality.

Covers the indicator function whose sub-region seminorms both vanish, the
plateau/ramp family whose off-plateau seminorm decays like a power of the
ramp width, and the audited split-seminorm inequality with its exponent
conditions.
"""

import math
from dataclasses import dataclass

import numpy as np

from .domain import DomainSpec, build_grid, pair_region, split
from .errors import ValidationError
from .fields import (
    lp_norm,
    make_indicator,
    ramp_profile_1d,
    zero_field,
)
from .seminorm import (
    SeminormParams,
    magnetic_seminorm,
    reduced_kernel,
    seminorm_x1_only,
)
from .variational import ground_state_distance

__all__ = [
    "IndicatorReport",
    "RampRecord",
    "RampSweepFit",
    "PuncturedRow",
    "PuncturedReport",
    "ExponentConditions",
    "indicator_report",
    "ramp_decay_sweep",
    "punctured_inequality_check",
    "validate_exponent_conditions",
]


@dataclass(frozen=True)
class IndicatorReport:
    """Disk-in-disk indicator study at two resolutions."""

    s: float
    p: float
    q: float
    n: int
    sem_inner: float
    sem_outer: float
    norm_q: float
    full_value: float
    full_value_refined: float
    rel_change: float
    subcritical: bool
    refinement_stable: bool
    naive_lhs_zero: bool

    def to_dict(self):
        return {
            "s": self.s, "p": self.p, "q": self.q, "n": self.n,
            "sem_inner": self.sem_inner, "sem_outer": self.sem_outer,
            "norm_q": self.norm_q,
            "full_value": self.full_value,
            "full_value_refined": self.full_value_refined,
            "rel_change": self.rel_change,
            "subcritical": self.subcritical,
            "refinement_stable": self.refinement_stable,
            "naive_lhs_zero": self.naive_lhs_zero,
        }


def indicator_report(s, p, q, n):
    """Indicator of the half-radius disk inside the unit disk.

    Both sub-region seminorms vanish identically (the function is constant
    on each region) while its L^q norm stays positive, so the naive split
    bound fails for every constant.  The full-domain seminorm is compared
    across a refinement step: stable when s p < 1, growing otherwise.
    """
    values = {}
    firsts = None
    for res in (n, 2 * n):
        grid = build_grid(DomainSpec.ball(), res)
        lam, gam = split(grid, lambda x: np.linalg.norm(x, axis=1) < 0.5)
        f = make_indicator(lam)
        params = SeminormParams(s=s, p=p, field=zero_field(grid))
        full = magnetic_seminorm(f, params)
        values[res] = full.value
        if firsts is None:
            inner = magnetic_seminorm(f, params, pair_region("product", mask_a=lam, mask_b=lam))
            outer = magnetic_seminorm(f, params, pair_region("product", mask_a=gam, mask_b=gam))
            firsts = (inner.value, outer.value, lp_norm(f, q))
    rel_change = abs(values[2 * n] - values[n]) / values[n]
    subcritical = s * p < 1.0
    return IndicatorReport(
        s=s, p=p, q=q, n=n,
        sem_inner=firsts[0],
        sem_outer=firsts[1],
        norm_q=firsts[2],
        full_value=values[n],
        full_value_refined=values[2 * n],
        rel_change=rel_change,
        subcritical=subcritical,
        refinement_stable=rel_change <= 0.05,
        naive_lhs_zero=(firsts[0] == 0.0 and firsts[1] == 0.0),
    )


@dataclass(frozen=True)
class RampRecord:
    eps: float
    resolution: int
    transverse: int
    ramp_cells: float
    resolved: bool
    value_r: float
    seminorm_off_plateau: float
    seminorm_plateau_region: float
    norm_q: float
    norm_q_normalized: float
    mean: float

    def to_dict(self):
        return {
            "eps": self.eps,
            "resolution": self.resolution,
            "transverse": self.transverse,
            "ramp_cells": self.ramp_cells,
            "resolved": self.resolved,
            "value_r": self.value_r,
            "seminorm_off_plateau": self.seminorm_off_plateau,
            "seminorm_plateau_region": self.seminorm_plateau_region,
            "norm_q": self.norm_q,
            "norm_q_normalized": self.norm_q_normalized,
            "mean": self.mean,
        }


@dataclass(frozen=True)
class RampSweepFit:
    slope: float
    intercept: float
    expected_slope: float
    n_points: int
    within_tolerance: bool


def ramp_decay_sweep(s, r, p, q, eps_list, resolution, transverse=None):
    """Decay of the off-plateau seminorm power as the ramp width shrinks.

    Runs on the fixed (-1,1)x(0,1) rectangle with the exact transverse
    kernel reduction (the profile depends on x1 only).  Fits the log-log
    slope of the power sum against the ramp width over the resolved entries
    (ramp spanning at least four cells); the expected exponent is 1 - s r.
    Requires s r < 1 < s p.
    """
    if not (s * r < 1.0 < s * p):
        raise ValidationError("need s*r < 1 < s*p for the decay study", field="r")
    eps_arr = [float(e) for e in eps_list]
    if not eps_arr or any(not 0.0 < e < 1.0 for e in eps_arr):
        raise ValidationError("ramp widths must lie in (0, 1)", field="eps_list")
    n1 = int(resolution)
    if n1 < 8:
        raise ValidationError("resolution too small for the ramp study", field="n")
    n2 = int(transverse) if transverse else max(2, n1 // 2)
    h1 = 2.0 / n1
    h2 = 1.0 / n2
    x1 = -1.0 + (np.arange(n1) + 0.5) * h1
    gamma_lo = int(np.searchsorted(x1, 0.0, side="right"))
    kern_r = reduced_kernel(n1, h1, n2, h2, s, r)
    kern_p = reduced_kernel(n1, h1, n2, h2, s, p)
    measure = 2.0

    records = []
    for eps in eps_arr:
        ramp_cells = eps / h1
        resolved = ramp_cells >= 4.0
        profile = ramp_profile_1d(x1, eps)
        value_r = seminorm_x1_only(profile, kern_r, r, lo=gamma_lo)
        plateau = seminorm_x1_only(profile, kern_p, p, hi=gamma_lo)
        if q == math.inf:
            nq = float(np.max(np.abs(profile)))
            nq_normalized = nq
        else:
            power = float(np.sum(np.abs(profile) ** q) * h1)
            nq = power ** (1.0 / q)
            nq_normalized = (power / measure) ** (1.0 / q)
        mean = float(np.sum(profile) * h1 / measure)
        records.append(
            RampRecord(
                eps=eps,
                resolution=n1,
                transverse=n2,
                ramp_cells=ramp_cells,
                resolved=resolved,
                value_r=value_r,
                seminorm_off_plateau=value_r ** (1.0 / r),
                seminorm_plateau_region=plateau ** (1.0 / p),
                norm_q=nq,
                norm_q_normalized=nq_normalized,
                mean=mean,
            )
        )

    fitted = [rec for rec in records if rec.resolved]
    if len(fitted) < 2:
        raise ValidationError(
            "fewer than two ramp widths span four cells at this resolution",
            field="eps_list",
        )
    logs = np.log([rec.eps for rec in fitted])
    logv = np.log([rec.value_r for rec in fitted])
    coeffs = np.polyfit(logs, logv, 1)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    expected = 1.0 - s * r
    fit = RampSweepFit(
        slope=slope,
        intercept=intercept,
        expected_slope=expected,
        n_points=len(fitted),
        within_tolerance=abs(slope - expected) <= 0.1,
    )
    return records, fit


@dataclass(frozen=True)
class ExponentConditions:
    """Truth table for the exponent hypotheses of the split inequality."""

    dim: int
    s: float
    p: float
    q: float
    r: float
    cond_a: bool
    cond_b: bool
    cond_c: bool
    cond_i: bool
    cond_ii: bool
    cond_iii: bool
    q_limit_p: float
    q_limit_r: float
    q_limit_one: float
    boundary_outside_scope: bool

    @property
    def any_abc(self):
        return self.cond_a or self.cond_b or self.cond_c

    @property
    def any_i_iii(self):
        return self.cond_i or self.cond_ii or self.cond_iii

    def to_dict(self):
        return {
            "dim": self.dim, "s": self.s, "p": self.p, "q": self.q, "r": self.r,
            "a": self.cond_a, "b": self.cond_b, "c": self.cond_c,
            "i": self.cond_i, "ii": self.cond_ii, "iii": self.cond_iii,
            "q_limit_p": self.q_limit_p,
            "q_limit_r": self.q_limit_r,
            "q_limit_one": self.q_limit_one,
            "any_abc": self.any_abc,
            "any_i_iii": self.any_i_iii,
            "boundary_outside_scope": self.boundary_outside_scope,
        }


def validate_exponent_conditions(s, p, q, r, dim):
    """Evaluate the (a)/(b)/(c) and (i)/(ii)/(iii) exponent conditions.

    Also flags the boundary case s r < N with q exactly at the critical
    exponent N r / (N - s r), which the split inequality does not cover.
    """
    nn = float(dim)
    sp = s * p
    sr = s * r
    q_limit_p = nn * p / (nn - sp) if sp < nn else math.inf
    q_limit_r = nn * r / (nn - sr) if sr < nn else math.inf
    q_limit_one = nn / (nn - s)
    cond_a = (r == 1.0) and (q < q_limit_one)
    cond_b = (sr > nn) and (q == math.inf)
    cond_c = (sr < nn) and (q < q_limit_r) and (q_limit_one <= q < math.inf)
    cond_i = (sp < nn) and (q < q_limit_p)
    cond_ii = (sp == nn) and (q < math.inf)
    cond_iii = sp > nn
    boundary = (sr < nn) and (q == q_limit_r)
    return ExponentConditions(
        dim=dim, s=s, p=p, q=q, r=r,
        cond_a=cond_a, cond_b=cond_b, cond_c=cond_c,
        cond_i=cond_i, cond_ii=cond_ii, cond_iii=cond_iii,
        q_limit_p=q_limit_p, q_limit_r=q_limit_r, q_limit_one=q_limit_one,
        boundary_outside_scope=boundary,
    )


@dataclass(frozen=True)
class PuncturedRow:
    sem_inner: float
    sem_cross: float
    norm_q: float
    distance: float
    lhs: float
    rhs: float
    holds: bool

    def to_dict(self):
        return {
            "sem_inner": self.sem_inner,
            "sem_cross": self.sem_cross,
            "norm_q": self.norm_q,
            "distance": self.distance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class PuncturedReport:
    s: float
    p: float
    q: float
    r: float
    delta: float
    C_input: float
    eps_slack: float
    S: float
    energy_value: float
    rows: tuple
    skipped: int
    minimal_C: float
    conditions: ExponentConditions
    outside_hypotheses: bool

    def to_dict(self):
        return {
            "s": self.s, "p": self.p, "q": self.q, "r": self.r,
            "delta": self.delta,
            "C_input": self.C_input,
            "eps_slack": self.eps_slack,
            "S": self.S,
            "energy_value": self.energy_value,
            "rows": [row.to_dict() for row in self.rows],
            "skipped": self.skipped,
            "minimal_C": self.minimal_C,
            "conditions": self.conditions.to_dict(),
            "outside_hypotheses": self.outside_hypotheses,
        }


def _minimal_constant(rows, tol=1e-12):
    """Smallest C making every sampled row hold, located by bisection."""
    need = [(row.rhs - row.sem_inner, row.sem_cross) for row in rows]

    def ok(c):
        return all(a <= c * b + tol * max(1.0, abs(a)) for a, b in need)

    if ok(0.0):
        return 0.0
    hi = 1.0
    while not ok(hi):
        hi *= 2.0
        if hi > 1e15:
            return math.inf
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return hi


def punctured_inequality_check(
    s, p, q, r, field, delta, grid, lam_mask, C, fs, S, E, gs, eps_slack=None
):
    """Audit the split-seminorm lower bound on a sample of functions.

    For each feasible f (distance from the ground-state set at least
    delta times its norm) the inner-region seminorm at (s, p) plus C times
    the cross-region seminorm at (s, r) is compared against
    (1/(S + eps_slack) + E) ||f||_q.  Functions inside the ground-state
    manifold are skipped and counted.  Also reports the minimal sample-wide
    C found by bisection.  The exponent conditions are validated and echoed;
    the check itself runs regardless, with a warning when outside them.
    """
    if not r < p:
        raise ValidationError("need r < p", field="r")
    if S is None or E is None or not math.isfinite(S):
        raise ValidationError("punctured check needs finite S and E inputs", field="S")
    if eps_slack is None:
        eps_slack = 0.1 * S
    conditions = validate_exponent_conditions(s, p, q, r, grid.dim)
    rhs_factor = 1.0 / (S + eps_slack) + E
    params_p = SeminormParams(s=s, p=p, field=field)
    params_r = SeminormParams(s=s, p=r, field=field)
    region_inner = pair_region("product", mask_a=lam_mask, mask_b=lam_mask)
    region_cross = pair_region("complement_of_product", mask_a=lam_mask)
    rows = []
    skipped = 0
    for f in fs:
        nq = lp_norm(f, q)
        dist = ground_state_distance(f, gs, q)
        if dist < delta * nq * (1.0 - 1e-9):
            skipped += 1
            continue
        inner = magnetic_seminorm(f, params_p, region_inner).value
        cross = magnetic_seminorm(f, params_r, region_cross).value
        lhs = inner + C * cross
        rhs = rhs_factor * nq
        rows.append(
            PuncturedRow(
                sem_inner=inner,
                sem_cross=cross,
                norm_q=nq,
                distance=dist,
                lhs=lhs,
                rhs=rhs,
                holds=lhs >= rhs * (1.0 - 1e-12),
            )
        )
    minimal = _minimal_constant(rows) if rows else math.inf
    return PuncturedReport(
        s=s, p=p, q=q, r=r,
        delta=delta,
        C_input=C,
        eps_slack=eps_slack,
        S=S,
        energy_value=E,
        rows=tuple(rows),
        skipped=skipped,
        minimal_C=minimal,
        conditions=conditions,
        outside_hypotheses=not (conditions.any_abc and conditions.any_i_iii),
    )
