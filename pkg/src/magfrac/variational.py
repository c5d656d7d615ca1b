"""Variational energies, ground states, Poincare constants and the sharp
constrained constant.

All objectives are ratios of a seminorm to an L^q norm, minimized by
normalized gradient descent on the packed real/imaginary parts: candidates
are renormalized to the unit constraint each step, the initial step is
Barzilai-Borwein-warmed and safeguarded by Armijo backtracking with factor
one half.  Restarts draw smoothed complex Gaussian fields and run
independently with per-restart seeds; the best result wins, ties broken by
the canonical (phase-normalized, lexicographically smallest) iterate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .domain import pair_region
from .errors import NumericalContractError, ValidationError
from .fields import GridFunction, lp_norm, smoothed_random_function, zero_field
from .seminorm import SeminormParams, magnetic_seminorm

__all__ = [
    "OptimizerConfig",
    "EnergyResult",
    "GroundStateSet",
    "PoincareResult",
    "BestConstantResult",
    "energy",
    "ground_states",
    "ground_state_distance",
    "poincare_constant",
    "best_constant",
    "small_support_poincare_check",
    "energy_objective",
    "trace_norm_bound",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Multistart descent settings; every field must stay positive."""

    restarts: int = 8
    max_iters: int = 5000
    armijo_factor: float = 0.5
    armijo_slope: float = 1e-4
    grad_tol: float = 1e-9
    seed: int = 0
    cluster_tol: float = 1e-3
    penalty_rounds: int = 5
    penalty_growth: float = 10.0
    penalty_start: float = 10.0
    subgradient_step: float = 0.2
    smoothing_temps: tuple = (1e-2, 1e-3, 1e-4, 1e-5)
    store_trace: bool = False

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("optimizer counts must be positive")
        for name in ("armijo_factor", "armijo_slope", "grad_tol", "cluster_tol",
                     "penalty_growth", "penalty_start", "subgradient_step"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"optimizer field {name} must be positive")

    def describe(self):
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "armijo_factor": self.armijo_factor,
            "grad_tol": self.grad_tol,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EnergyResult:
    value: float
    minimizer: GridFunction
    iterations: int
    restarts_used: int
    final_gradient_norm: float
    converged: bool
    method: str = "gradient"
    lower_confidence: bool = False
    trace: tuple = ()
    trace_iterates: tuple = ()


@dataclass(frozen=True)
class GroundStateSet:
    """Clustered unit-norm minimizers; approximates the true manifold from
    above, so distances computed against it are upper bounds."""

    representatives: tuple
    values: tuple
    q: float


@dataclass(frozen=True)
class PoincareResult:
    constant: float
    ratio_min: float
    extremizer: GridFunction
    iterations: int
    converged: bool


@dataclass(frozen=True)
class BestConstantResult:
    S: float
    witness: GridFunction
    constrained_ratio: float
    energy_value: float
    distance: float
    feasible: bool
    constraint_dropped: bool


# ---------------------------------------------------------------------------
# cached dense pair data


class _SeminormForm:
    """Dense kernel weights and phases for repeated (gradient) evaluation.

    Memory is O(n^2); intended for optimizer-scale grids.
    """

    def __init__(self, grid, s, p, field, region=None):
        from .fields import pair_phases

        if region is None:
            region = pair_region("full", grid=grid)
        if not region.is_symmetric:
            raise ValidationError("optimizer regions must be symmetric")
        x = grid.centers
        n = x.shape[0]
        diff = x[:, None, :] - x[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        np.fill_diagonal(dist, 1.0)
        member = region.member_block(np.arange(n))
        np.fill_diagonal(member, False)
        w = dist ** (-(grid.dim + s * p)) * grid.cell_volume**2
        w[~member] = 0.0
        self.weights = w
        if field.is_zero:
            self.phase = None
        else:
            theta = pair_phases(field, x[:, None, :], x[None, :, :])
            self.phase = np.exp(1j * theta)
        self.grid = grid
        self.s = s
        self.p = p
        self.field = field

    def _differences(self, v):
        if self.phase is None:
            return v[:, None] - v[None, :]
        return v[:, None] - self.phase * v[None, :]

    def power(self, v):
        g = self._differences(v)
        ag = np.abs(g)
        pw = ag * ag if self.p == 2.0 else ag**self.p
        return float(np.sum(pw * self.weights))

    def power_and_grad(self, v):
        g = self._differences(v)
        ag = np.abs(g)
        if self.p == 2.0:
            value = float(np.sum(ag * ag * self.weights))
            grad = 4.0 * np.sum(self.weights * g, axis=1)
        else:
            value = float(np.sum(ag**self.p * self.weights))
            safe = np.where(ag > 0.0, ag, 1.0)
            w = np.where(ag > 0.0, safe ** (self.p - 2.0), 0.0) * self.weights
            grad = 2.0 * self.p * np.sum(w * g, axis=1)
        return value, grad


# ---------------------------------------------------------------------------
# norm helpers


def _lq_value(v, vol, q):
    if q == math.inf:
        return float(np.max(np.abs(v)))
    return float((np.sum(np.abs(v) ** q) * vol) ** (1.0 / q))


def _lq_grad(v, vol, q, norm=None):
    """Complex-packed gradient of the L^q norm (q < inf)."""
    if norm is None:
        norm = _lq_value(v, vol, q)
    if norm == 0.0:
        return np.zeros_like(v)
    av = np.abs(v)
    scaled = np.where(av > 0.0, av ** (q - 2.0), 0.0)
    return norm ** (1.0 - q) * scaled * v * vol


def _smooth_max(v, temp):
    av = np.abs(v)
    m = float(av.max())
    w = np.exp((av - m) / temp)
    total = float(w.sum())
    value = m + temp * math.log(total)
    unit = np.where(av > 0.0, v / np.where(av > 0, av, 1.0), 0.0)
    grad = (w / total) * unit
    return value, grad


# ---------------------------------------------------------------------------
# objectives


class _RatioObjective:
    """Seminorm-to-L^q ratio restricted to the unit L^q sphere."""

    def __init__(self, form, q, temp=None):
        self.form = form
        self.q = q
        self.temp = temp

    def normalize(self, v):
        n = _lq_value(v, self.form.grid.cell_volume, self.q)
        if n == 0.0:
            raise ValidationError("cannot normalize the zero function")
        return v / n

    def value(self, v):
        num = self.form.power(v) ** (1.0 / self.form.p)
        if self.q == math.inf and self.temp is not None:
            den, _ = _smooth_max(v, self.temp)
            return num / den
        return num / _lq_value(v, self.form.grid.cell_volume, self.q)

    def value_and_grad(self, v):
        p = self.form.p
        vol = self.form.grid.cell_volume
        power, pgrad = self.form.power_and_grad(v)
        if power == 0.0:
            return 0.0, np.zeros_like(v)
        num = power ** (1.0 / p)
        ngrad = (1.0 / p) * power ** (1.0 / p - 1.0) * pgrad
        if self.q == math.inf:
            if self.temp is not None:
                den, dgrad = _smooth_max(v, self.temp)
            else:
                den = _lq_value(v, vol, math.inf)
                _, dgrad = _smooth_max(v, 1e-6)
        else:
            den = _lq_value(v, vol, self.q)
            dgrad = _lq_grad(v, vol, self.q, den)
        val = num / den
        grad = ngrad / den - (num / den**2) * dgrad
        return val, grad


class _CenteredRatioObjective:
    """Seminorm over the weighted-mean-centered L^q norm (zero potential)."""

    def __init__(self, form, q, gvals, temp=None):
        self.form = form
        self.q = q
        self.gvals = gvals
        self.temp = temp

    def _center(self, v):
        mu = np.sum(v * self.gvals) * self.form.grid.cell_volume
        return v - mu

    def _den_and_grad(self, h):
        vol = self.form.grid.cell_volume
        if self.q == math.inf:
            return _smooth_max(h, self.temp if self.temp is not None else 1e-6)
        den = _lq_value(h, vol, self.q)
        return den, _lq_grad(h, vol, self.q, den)

    def normalize(self, v):
        h = self._center(v)
        n = _lq_value(h, self.form.grid.cell_volume, self.q)
        if n == 0.0:
            raise ValidationError("cannot normalize a weighted-constant function")
        return h / n

    def value(self, v):
        num = self.form.power(v) ** (1.0 / self.form.p)
        h = self._center(v)
        if self.q == math.inf and self.temp is not None:
            den, _ = _smooth_max(h, self.temp)
        else:
            den = _lq_value(h, self.form.grid.cell_volume, self.q)
        return num / den

    def value_and_grad(self, v):
        p = self.form.p
        vol = self.form.grid.cell_volume
        power, pgrad = self.form.power_and_grad(v)
        if power == 0.0:
            return 0.0, np.zeros_like(v)
        h = self._center(v)
        den, hgrad = self._den_and_grad(h)
        # chain rule through the centering shift: d(conj h_m)/d(conj v_k)
        # equals delta_mk - conj(g_k) vol, so the mean of hgrad couples back
        dgrad = hgrad - np.conj(self.gvals) * vol * np.sum(hgrad)
        num = power ** (1.0 / p)
        ngrad = (1.0 / p) * power ** (1.0 / p - 1.0) * pgrad
        val = num / den
        grad = ngrad / den - (num / den**2) * dgrad
        return val, grad


class _PenalizedObjective:
    """Ratio objective plus an exterior quadratic distance penalty."""

    def __init__(self, ratio, reps, q, delta, weight):
        self.ratio = ratio
        self.reps = reps
        self.q = q
        self.delta = delta
        self.weight = weight

    def normalize(self, v):
        return self.ratio.normalize(v)

    def value(self, v):
        d, _ = _distance_to_set(v, self.reps, self.ratio.form.grid, self.q)
        gap = max(0.0, self.delta - d)
        return self.ratio.value(v) + self.weight * gap * gap

    def value_and_grad(self, v):
        val, grad = self.ratio.value_and_grad(v)
        d, residual = _distance_to_set(v, self.reps, self.ratio.form.grid, self.q)
        gap = self.delta - d
        if gap > 0.0:
            vol = self.ratio.form.grid.cell_volume
            dgrad = _lq_grad(residual, vol, self.q if self.q != math.inf else 2.0, d)
            val += self.weight * gap * gap
            grad = grad - 2.0 * self.weight * gap * dgrad
        return val, grad


# ---------------------------------------------------------------------------
# distance to the (approximate) ground-state set


def _golden_min(fun, lo, hi, iters=70):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def _scaled_distance(fvals, repvals, grid, q):
    """min over complex c of ||f - c rep||_q, plus the optimal residual."""
    vol = grid.cell_volume
    if q == 2.0:
        denom = float(np.sum(np.abs(repvals) ** 2) * vol)
        c = complex(np.sum(fvals * np.conj(repvals)) * vol / denom)
        residual = fvals - c * repvals
        return _lq_value(residual, vol, 2.0), residual

    fn = _lq_value(fvals, vol, q)
    rn = _lq_value(repvals, vol, q)
    top = 2.0 * fn / rn if rn > 0 else 0.0

    def at(modulus, phase):
        return _lq_value(fvals - modulus * np.exp(1j * phase) * repvals, vol, q)

    best = (at(0.0, 0.0), 0.0, 0.0)
    phases = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    for ph in phases:
        m, val = _golden_min(lambda t: at(t, ph), 0.0, top)
        if val < best[0]:
            best = (val, m, ph)
    width = 2.0 * math.pi / 64
    ph, _ = _golden_min(
        lambda t: _golden_min(lambda m: at(m, t), 0.0, top)[1],
        best[2] - width,
        best[2] + width,
        iters=40,
    )
    m, val = _golden_min(lambda t: at(t, ph), 0.0, top)
    if val < best[0]:
        best = (val, m, ph)
    val, m, ph = best
    residual = fvals - m * np.exp(1j * ph) * repvals
    return val, residual


def _distance_to_set(fvals, reps, grid, q):
    best = (math.inf, None)
    for rep in reps:
        d, residual = _scaled_distance(fvals, rep, grid, q)
        if d < best[0]:
            best = (d, residual)
    return best


def _restore_feasibility(v, reps, grid, q, delta, ratio_obj, rounds=4):
    """Shrink ground-state components of a unit-norm iterate until the
    distance constraint holds (exterior penalties land slightly infeasible).

    Removing the projection onto the nearest representative and
    renormalizing can only raise the relative distance; the fully stripped
    endpoint has relative distance one, so a bisection always terminates for
    delta <= 1.
    """
    qq = q if q != math.inf else 2.0
    for _ in range(rounds):
        d, _ = _distance_to_set(v, reps, grid, q)
        if d >= delta:
            return v
        best = None
        for rep in reps:
            drep, residual = _scaled_distance(v, rep, grid, qq)
            if best is None or drep < best[0]:
                best = (drep, residual)
        residual = best[1]

        def rel_distance(t):
            cand = ratio_obj.normalize(v + t * (residual - v))
            dd, _ = _distance_to_set(cand, reps, grid, q)
            return dd

        lo, hi = 0.0, 1.0
        if rel_distance(1.0) < delta:
            v = ratio_obj.normalize(residual)
            continue
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if rel_distance(mid) >= delta:
                hi = mid
            else:
                lo = mid
        v = ratio_obj.normalize(v + hi * (residual - v))
    return v


def ground_state_distance(f, gs, q):
    """L^q distance from ``f`` to the span of the stored representatives.

    Returns ``inf`` for an empty set (infimum over nothing).  The result is
    an upper bound on the distance to the true ground-state manifold.
    """
    reps = [r.values for r in gs.representatives]
    if not reps:
        return math.inf
    d, _ = _distance_to_set(f.values, reps, f.grid, q)
    return d


# ---------------------------------------------------------------------------
# descent engine


def _descent(v0, objective, cfg, max_iters=None, store_trace=False):
    """Normalized gradient descent with BB-warmed Armijo backtracking."""
    max_iters = max_iters or cfg.max_iters
    v = objective.normalize(v0)
    val, grad = objective.value_and_grad(v)
    trace = [val]
    iterates = [v.copy()] if store_trace else None
    alpha = 1.0
    prev_v = None
    prev_grad = None
    iters = 0
    converged = False
    for iters in range(1, max_iters + 1):
        gnorm = float(np.linalg.norm(grad))
        if val <= 1e-13 or gnorm <= cfg.grad_tol * max(1.0, abs(val)):
            converged = True
            break
        if prev_v is not None:
            dv = v - prev_v
            dg = grad - prev_grad
            denom = float(np.real(np.vdot(dv, dg)))
            if denom > 1e-300:
                alpha = min(max(float(np.real(np.vdot(dv, dv))) / denom, 1e-14), 1e8)
            else:
                alpha = min(alpha * 2.0, 1e8)
        step = alpha
        accepted = False
        for _ in range(60):
            try:
                cand = objective.normalize(v - step * grad)
            except ValidationError:
                step *= cfg.armijo_factor
                continue
            cval = objective.value(cand)
            if cval <= val - cfg.armijo_slope * step * gnorm * gnorm:
                accepted = True
                break
            step *= cfg.armijo_factor
        if not accepted:
            converged = gnorm <= 1e-6 * max(1.0, abs(val))
            break
        prev_v, prev_grad = v, grad
        v = cand
        val, grad = objective.value_and_grad(v)
        alpha = step
        trace.append(val)
        if store_trace:
            iterates.append(v.copy())
    gnorm = float(np.linalg.norm(grad))
    return v, val, gnorm, iters, converged, trace, iterates


def _subgradient_descent(v0, objective, cfg, max_iters=None, store_trace=False):
    """Diminishing-step normalized subgradient method for p = 1 objectives."""
    max_iters = max_iters or cfg.max_iters
    v = objective.normalize(v0)
    best_v = v
    best_val = objective.value(v)
    trace = [best_val]
    iterates = [v.copy()] if store_trace else None
    gnorm = math.inf
    for k in range(1, max_iters + 1):
        _, grad = objective.value_and_grad(v)
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            break
        step = cfg.subgradient_step / math.sqrt(k)
        v = objective.normalize(v - step * grad / gnorm)
        val = objective.value(v)
        trace.append(val)
        if store_trace:
            iterates.append(v.copy())
        if val < best_val:
            best_val, best_v = val, v
    return best_v, best_val, gnorm, max_iters, False, trace, iterates


def _canonical_key(v):
    av = np.abs(v)
    idx = int(np.argmax(av))
    pivot = v[idx]
    u = v * (np.conj(pivot) / abs(pivot)) if abs(pivot) > 0 else v
    return np.round(np.concatenate([u.real, u.imag]), 10).tobytes()


# ---------------------------------------------------------------------------
# public operations


def _multistart(grid, objective_factory, cfg, method):
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    outcomes = []
    total_iters = 0
    for k in range(cfg.restarts):
        rng = np.random.default_rng(seeds[k])
        v0 = smoothed_random_function(grid, rng).values
        if method == "subgradient":
            obj = objective_factory(None)
            out = _subgradient_descent(v0, obj, cfg, store_trace=cfg.store_trace)
            v, val, gnorm, iters, converged, trace, iterates = out
        elif method == "annealed":
            v = v0
            trace = []
            iterates = [] if cfg.store_trace else None
            for temp in cfg.smoothing_temps:
                obj = objective_factory(temp)
                out = _descent(
                    v, obj, cfg,
                    max_iters=max(1, cfg.max_iters // len(cfg.smoothing_temps)),
                    store_trace=cfg.store_trace,
                )
                v, val, gnorm, iters, converged, t, its = out
                trace.extend(t)
                if cfg.store_trace:
                    iterates.extend(its)
                total_iters += iters
            exact = objective_factory(None)
            val = exact.value(v)
            iters = 0
        else:
            obj = objective_factory(None)
            out = _descent(v0, obj, cfg, store_trace=cfg.store_trace)
            v, val, gnorm, iters, converged, trace, iterates = out
        total_iters += iters
        outcomes.append(
            {
                "v": v,
                "value": val,
                "gnorm": gnorm,
                "converged": converged,
                "trace": trace,
                "iterates": iterates,
            }
        )
    best = min(
        outcomes,
        key=lambda o: (o["value"], _canonical_key(o["v"])),
    )
    return best, outcomes, total_iters


def energy(grid, s, p, q, field, cfg=None):
    """Infimum of the magnetic seminorm over the unit L^q sphere.

    For p > 1 this runs smooth multistart descent; p = 1 falls back to a
    diminishing-step subgradient method and flags the result as lower
    confidence.  q = inf anneals a log-sum-exp smoothing of the max norm and
    reports the exact-max objective of the final iterate.
    """
    if p < 1.0:
        raise ValidationError("energy needs p >= 1", field="p")
    cfg = cfg or OptimizerConfig()
    form = _SeminormForm(grid, s, p, field)
    if p == 1.0:
        method = "subgradient"
    elif q == math.inf:
        method = "annealed"
    else:
        method = "gradient"
    factory = lambda temp: _RatioObjective(form, q, temp)
    best, outcomes, total_iters = _multistart(grid, factory, cfg, method)
    return EnergyResult(
        value=best["value"],
        minimizer=GridFunction(best["v"], grid),
        iterations=total_iters,
        restarts_used=cfg.restarts,
        final_gradient_norm=best["gnorm"],
        converged=best["converged"] if method != "subgradient" else False,
        method=method,
        lower_confidence=method == "subgradient",
        trace=tuple(best["trace"]),
        trace_iterates=tuple(best["iterates"]) if best["iterates"] else (),
    )


def ground_states(grid, s, p, q, field, cfg=None):
    """Energy plus the clustered set of near-optimal restart minimizers."""
    if p < 1.0:
        raise ValidationError("energy needs p >= 1", field="p")
    cfg = cfg or OptimizerConfig()
    form = _SeminormForm(grid, s, p, field)
    method = "subgradient" if p == 1.0 else ("annealed" if q == math.inf else "gradient")
    factory = lambda temp: _RatioObjective(form, q, temp)
    best, outcomes, total_iters = _multistart(grid, factory, cfg, method)
    result = EnergyResult(
        value=best["value"],
        minimizer=GridFunction(best["v"], grid),
        iterations=total_iters,
        restarts_used=cfg.restarts,
        final_gradient_norm=best["gnorm"],
        converged=best["converged"] if method != "subgradient" else False,
        method=method,
        lower_confidence=method == "subgradient",
        trace=tuple(best["trace"]),
        trace_iterates=tuple(best["iterates"]) if best["iterates"] else (),
    )
    reps = []
    vals = []
    cutoff = best["value"] * (1.0 + 1e-6) + 1e-15
    for out in sorted(outcomes, key=lambda o: (o["value"], _canonical_key(o["v"]))):
        if out["value"] > cutoff:
            continue
        candidate = out["v"]
        distinct = True
        for rep in reps:
            d, _ = _scaled_distance(candidate, rep, grid, q if q != math.inf else 2.0)
            if d <= cfg.cluster_tol:
                distinct = False
                break
        if distinct:
            reps.append(candidate)
            vals.append(out["value"])
    gs = GroundStateSet(
        representatives=tuple(GridFunction(_phase_normalized(r), grid) for r in reps),
        values=tuple(vals),
        q=q,
    )
    return result, gs


def _phase_normalized(v):
    av = np.abs(v)
    idx = int(np.argmax(av))
    pivot = v[idx]
    if abs(pivot) > 0:
        return v * (np.conj(pivot) / abs(pivot))
    return v


def poincare_constant(grid, s, p, q, g, cfg=None):
    """Smallest constant bounding the centered L^q norm by the seminorm.

    Maximizes ||f - (integral of f g)||_q / [f]_{s,p} over non-constant f by
    minimizing the reciprocal ratio (zero potential; the weight must be
    normalized to unit integral).
    """
    g.check_normalized(tol=1e-9)
    if g.grid is not grid:
        raise ValidationError("weight grid mismatch")
    cfg = cfg or OptimizerConfig()
    form = _SeminormForm(grid, s, p, zero_field(grid))
    factory = lambda temp: _CenteredRatioObjective(form, q, g.values, temp)
    method = "annealed" if q == math.inf else "gradient"
    best, _, total_iters = _multistart(grid, factory, cfg, method)
    ratio = best["value"]
    if ratio <= 0.0:
        raise NumericalContractError("degenerate reciprocal ratio in the maximizer")
    return PoincareResult(
        constant=1.0 / ratio,
        ratio_min=ratio,
        extremizer=GridFunction(best["v"], grid),
        iterations=total_iters,
        converged=best["converged"],
    )


def best_constant(grid, s, p, q, field, delta, cfg, energy_result, gs):
    """Sharp constant of the distance-constrained lower bound.

    Minimizes the seminorm ratio subject to distance >= delta from the
    ground-state set via an exterior quadratic penalty with geometrically
    increasing weight; the reciprocal gap to the unconstrained energy gives
    the constant.  An empty ground-state set makes the constraint vacuous
    (reported, not an error).
    """
    if not 0.0 < delta <= 1.0:
        raise ValidationError("need 0 < delta <= 1", field="delta")
    cfg = cfg or OptimizerConfig()
    form = _SeminormForm(grid, s, p, field)
    reps = [r.values for r in gs.representatives]
    if not reps:
        best_out, _, _ = _multistart(
            grid, lambda temp: _RatioObjective(form, q, temp), cfg, "gradient"
        )
        return BestConstantResult(
            S=math.inf,
            witness=GridFunction(best_out["v"], grid),
            constrained_ratio=best_out["value"],
            energy_value=energy_result.value,
            distance=math.inf,
            feasible=True,
            constraint_dropped=True,
        )

    seeds = np.random.SeedSequence(cfg.seed + 1).spawn(cfg.restarts)
    candidates = []
    iters_per_round = max(50, cfg.max_iters // cfg.penalty_rounds)
    for k in range(cfg.restarts):
        rng = np.random.default_rng(seeds[k])
        v = smoothed_random_function(grid, rng).values
        weight = cfg.penalty_start
        ratio_obj = _RatioObjective(form, q)
        for _ in range(cfg.penalty_rounds):
            obj = _PenalizedObjective(ratio_obj, reps, q, delta, weight)
            v, _, _, _, _, _, _ = _descent(v, obj, cfg, max_iters=iters_per_round)
            weight *= cfg.penalty_growth
        v = _restore_feasibility(v, reps, grid, q, delta, ratio_obj)
        d, _ = _distance_to_set(v, reps, grid, q)
        ratio = _RatioObjective(form, q).value(v)
        candidates.append((ratio, d, v))
    feasible_set = [c for c in candidates if c[1] >= delta - 1e-6]
    flagged = not feasible_set
    pool = feasible_set if feasible_set else candidates
    ratio, dist, v = min(pool, key=lambda c: (c[0], _canonical_key(c[2])))
    gap = ratio - energy_result.value
    s_value = math.inf if gap <= 0.0 else 1.0 / gap
    return BestConstantResult(
        S=s_value,
        witness=GridFunction(v, grid),
        constrained_ratio=ratio,
        energy_value=energy_result.value,
        distance=dist,
        feasible=not flagged,
        constraint_dropped=False,
    )


def small_support_poincare_check(f, s, p, q, delta, grid, poincare_c):
    """Norm bound for functions vanishing on at least delta of the volume.

    Verifies ||f||_q <= [C / (1 - (1-delta)^(1-1/q))] [f]_{s,p} with C the
    computed Poincare constant; q = 1 is rejected (the prefactor blows up).
    Returns (lhs, rhs, holds).
    """
    if q == 1.0:
        raise ValidationError("q = 1 degenerates the support prefactor", field="q")
    if not 0.0 < delta < 1.0:
        raise ValidationError("need 0 < delta < 1", field="delta")
    support = float(np.count_nonzero(np.abs(f.values) > 0.0) * grid.cell_volume)
    if support > (1.0 - delta) * grid.measure + 1e-12:
        raise ValidationError("support exceeds the allowed volume fraction")
    exponent = 1.0 if q == math.inf else 1.0 - 1.0 / q
    factor = poincare_c / (1.0 - (1.0 - delta) ** exponent)
    params = SeminormParams(s=s, p=p, field=zero_field(grid))
    semi = magnetic_seminorm(f, params).value
    lhs = lp_norm(f, q)
    rhs = factor * semi
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-9)


def energy_objective(grid, s, p, q, field):
    """Expose the ratio objective (value / gradient) for audits and tests."""
    form = _SeminormForm(grid, s, p, field)
    return _RatioObjective(form, q)


def trace_norm_bound(grid, s, p, q, field, seminorm_sup, poincare_c_pp):
    """Uniform full-norm bound along a bounded-energy, unit-L^q trace.

    Chains the diamagnetic bound, the centered Poincare inequality at
    exponents (s, p, p) and the two-seminorm comparison into an explicit
    constant K with ||f||_{W^{s,p}} <= K for every iterate with unit L^q
    norm and magnetic seminorm at most ``seminorm_sup``.
    """
    omega = 2.0 if grid.dim == 1 else 2.0 * math.pi
    kappa = (2.0**p) * omega / (s * p) + (field.sup_bound**p) * omega / (p - s * p)
    q_exp = 0.0 if q == math.inf else 1.0 / q
    lp_bound = poincare_c_pp * seminorm_sup + grid.measure ** (1.0 / p - q_exp)
    plain_power = 2.0 ** (p - 1.0) * (seminorm_sup**p + kappa * lp_bound**p)
    return (lp_bound**p + plain_power) ** (1.0 / p)
