"""Discrete magnetic fractional seminorms over pair regions.

The p-th power of the seminorm is the double sum over ordered off-diagonal
index pairs (i, j) in the region of

    |f_i - exp(i theta_ij) f_j|^p * |x_i - x_j|^(-(N + s p)) * vol_i * vol_j

with theta_ij = (x_i - x_j) . A((x_i + x_j)/2).  Diagonal pairs are always
excluded (principal-value convention).  Sums are accumulated over fixed-order
row blocks so results are deterministic regardless of worker count.
"""

import math
from dataclasses import dataclass

import numpy as np

from .domain import pair_region
from .errors import ValidationError
from .fields import VectorFieldSpec, lp_norm, pair_phases, zero_field

__all__ = [
    "SeminormParams",
    "SeminormBreakdown",
    "magnetic_seminorm",
    "diamagnetic_gap",
    "embedding_check",
    "embedding_norm_bound",
    "norm_equivalence_check",
    "pair_power_sum",
    "reduced_kernel",
    "seminorm_x1_only",
]

_BLOCK_TARGET = 2_500_000


@dataclass(frozen=True)
class SeminormParams:
    """Differentiability order s in (0,1), integrability p >= 1, potential."""

    s: float
    p: float
    field: VectorFieldSpec

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValidationError("need 0 < s < 1", field="s")
        if not self.p >= 1.0:
            raise ValidationError("need p >= 1", field="p")


@dataclass(frozen=True)
class SeminormBreakdown:
    """Seminorm evaluation record: p-th power sum, its root, pair count."""

    value_p: float
    value: float
    pair_count: int
    region: str
    s: float
    p: float

    def to_dict(self, field=None):
        out = {
            "s": self.s,
            "p": self.p,
            "region": self.region,
            "value": self.value,
            "value_p": self.value_p,
            "pair_count": self.pair_count,
        }
        if field is not None:
            out["field"] = field.describe()
        return out


def _block_size(n):
    return max(1, _BLOCK_TARGET // max(n, 1))


def _pair_blocks(grid, region):
    """Yield (row_slice, dist, member) with diagonal entries removed."""
    x = grid.centers
    n = x.shape[0]
    block = _block_size(n)
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        rows = np.arange(i0, i1)
        diff = x[rows, None, :] - x[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        member = region.member_block(rows)
        member[np.arange(i1 - i0), rows] = False
        yield rows, diff, dist, member


def _accumulate(values, grid, s, p, field, region, want_grad=False):
    """Blocked evaluation of the power sum, optionally with its gradient.

    The gradient (with respect to the packed real/imaginary parts, returned
    in complex form) is valid for symmetric regions only, where it equals
    2p * sum_j w_kj |g_kj|^(p-2) g_kj.
    """
    if want_grad and not region.is_symmetric:
        raise ValidationError("gradient path requires a symmetric pair region")
    n = grid.n_cells
    exponent = grid.dim + s * p
    vv = grid.cell_volume**2
    totals = []
    count = 0
    grad = np.zeros(n, dtype=np.complex128) if want_grad else None
    for rows, diff, dist, member in _pair_blocks(grid, region):
        np.putmask(dist, ~member, 1.0)
        kern = dist ** (-exponent) * vv
        kern[~member] = 0.0
        if field.is_zero:
            g = values[rows, None] - values[None, :]
        else:
            theta = pair_phases(field, grid.centers[rows, None, :], grid.centers[None, :, :])
            g = values[rows, None] - np.exp(1j * theta) * values[None, :]
        ag = np.abs(g)
        if p == 2.0:
            pw = ag * ag
        else:
            pw = ag**p
        totals.append(float(np.sum(pw * kern)))
        count += int(member.sum())
        if want_grad:
            if p == 2.0:
                w = kern
            else:
                safe = np.where(ag > 0.0, ag, 1.0)
                w = np.where(ag > 0.0, safe ** (p - 2.0), 0.0) * kern
            grad[rows] = 2.0 * p * np.sum(w * g, axis=1)
    return math.fsum(totals), count, grad


def magnetic_seminorm(f, params, region=None):
    """Evaluate the (magnetic) seminorm of ``f`` over a pair region.

    With a zero potential this is the plain fractional seminorm.  Returns a
    :class:`SeminormBreakdown` whose ``value`` is the 1/p-th root of the
    accumulated power sum.
    """
    if region is None:
        region = pair_region("full", grid=f.grid)
    if region.grid is not f.grid:
        raise ValidationError("pair region and function live on different grids")
    value_p, count, _ = _accumulate(f.values, f.grid, params.s, params.p, params.field, region)
    return SeminormBreakdown(
        value_p=value_p,
        value=value_p ** (1.0 / params.p),
        pair_count=count,
        region=region.describe(),
        s=params.s,
        p=params.p,
    )


def seminorm_value_and_grad(f_values, grid, s, p, field, region):
    """Power sum and its complex-packed gradient (symmetric regions)."""
    value_p, _, grad = _accumulate(f_values, grid, s, p, field, region, want_grad=True)
    return value_p, grad


def diamagnetic_gap(f, field, pairs):
    """Minimum pointwise slack |e^{-i theta} f_i - f_j| - ||f_i| - |f_j||.

    The slack is nonnegative in exact arithmetic for every potential.
    """
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.size == 0:
        raise ValidationError("need a nonempty sample of index pairs")
    xi = f.grid.centers[pairs[:, 0]]
    xj = f.grid.centers[pairs[:, 1]]
    theta = pair_phases(field, xi, xj)
    fi = f.values[pairs[:, 0]]
    fj = f.values[pairs[:, 1]]
    lhs = np.abs(np.exp(-1j * theta) * fi - fj)
    rhs = np.abs(np.abs(fi) - np.abs(fj))
    return float(np.min(lhs - rhs))


def pair_power_sum(grid, exponent, region):
    """Blocked sum of |x_i - x_j|^exponent * vol^2 over the region (i != j)."""
    vv = grid.cell_volume**2
    totals = []
    for rows, _, dist, member in _pair_blocks(grid, region):
        np.putmask(dist, ~member, 1.0)
        term = dist**exponent * vv
        term[~member] = 0.0
        totals.append(float(np.sum(term)))
    return math.fsum(totals)


def embedding_check(f, s1, s2, r, p, region, field=None):
    """Hoelder comparison of seminorm power sums at two orders.

    Returns (lhs, rhs) where lhs is the power-r sum at order s1 and rhs the
    product bound built from the power-p sum at order s2 and the distance
    moment with exponent (N r + s2 r p - N p - s1 r p)/(p - r).  The
    inequality lhs <= rhs holds at the discrete level (it is Hoelder on the
    pair sum itself).
    """
    if not (0.0 < s1 < s2 < 1.0):
        raise ValidationError("need 0 < s1 < s2 < 1", field="s")
    if not 1.0 <= r < p:
        raise ValidationError("need 1 <= r < p (r = p is rejected)", field="r")
    if field is None:
        field = zero_field(f.grid)
    grid = f.grid
    lhs, _, _ = _accumulate(f.values, grid, s1, r, field, region)
    big, _, _ = _accumulate(f.values, grid, s2, p, field, region)
    nn = grid.dim
    moment_exp = (nn * r + s2 * r * p - nn * p - s1 * r * p) / (p - r)
    moment = pair_power_sum(grid, moment_exp, region)
    rhs = big ** (r / p) * moment ** ((p - r) / p)
    return lhs, rhs


def embedding_norm_bound(f, s1, s2, r, p, field=None):
    """Domain-level comparison constant for the full pair region.

    Returns (lhs, rhs) with lhs the power-r sum at order s1 and
    rhs = (omega |Omega| (p-r)/((s2-s1) r p) R^((s2-s1) r p/(p-r)))^((p-r)/p)
    times the r-th power of the order-s2 seminorm, where R exceeds the grid
    diameter by one cell diagonal.
    """
    if not (0.0 < s1 < s2 < 1.0):
        raise ValidationError("need 0 < s1 < s2 < 1", field="s")
    if not 1.0 <= r < p:
        raise ValidationError("need 1 <= r < p (r = p is rejected)", field="r")
    if field is None:
        field = zero_field(f.grid)
    grid = f.grid
    region = pair_region("full", grid=grid)
    lhs, _, _ = _accumulate(f.values, grid, s1, r, field, region)
    big, _, _ = _accumulate(f.values, grid, s2, p, field, region)
    omega = 2.0 if grid.dim == 1 else 2.0 * math.pi
    radius = grid.diameter() + grid.cell_diagonal
    expo = (s2 - s1) * r * p / (p - r)
    factor = omega * grid.measure * ((p - r) / ((s2 - s1) * r * p)) * radius**expo
    rhs = factor ** ((p - r) / p) * big ** (r / p)
    return lhs, rhs


def norm_equivalence_check(f, s, p, field):
    """Two-sided comparison of the plain and magnetic seminorm powers.

    Returns (lhs_plain, rhs_combo, lhs_mag, rhs_combo2) where each lhs is a
    seminorm power sum and each rhs is 2^(p-1) * (other power sum +
    kappa * ||f||_p^p) with kappa = 2^p omega/(s p) + |A|_sup^p omega/(p - s p)
    and omega the unit-sphere measure (2 in 1D, 2 pi in 2D).
    """
    grid = f.grid
    region = pair_region("full", grid=grid)
    zero = zero_field(grid)
    plain, _, _ = _accumulate(f.values, grid, s, p, zero, region)
    mag, _, _ = _accumulate(f.values, grid, s, p, field, region)
    omega = 2.0 if grid.dim == 1 else 2.0 * math.pi
    kappa = (2.0**p) * omega / (s * p) + (field.sup_bound**p) * omega / (p - s * p)
    fp = lp_norm(f, p) ** p
    rhs_combo = 2.0 ** (p - 1.0) * (mag + kappa * fp)
    rhs_combo2 = 2.0 ** (p - 1.0) * (plain + kappa * fp)
    return plain, rhs_combo, mag, rhs_combo2


def reduced_kernel(n1, h1, n2, h2, s, p):
    """Transverse-summed pair kernel for x1-dependent functions on a rectangle.

    K[m] aggregates the 2D kernel over all transverse index pairs for an x1
    lag of m cells, volumes included:

        K[m] = h1^2 h2^2 sum_k (n2 - |k|) ((m h1)^2 + (k h2)^2)^(-(2 + s p)/2)

    so that the full 2D pair sum of an x1-only function equals the 1D lag sum
    weighted by K.  K[0] is set to zero (same-column pairs never contribute
    for x1-only functions and the diagonal is excluded anyway).
    """
    expo = -(2.0 + s * p) / 2.0
    k = np.arange(-(n2 - 1), n2)
    mult = (n2 - np.abs(k)).astype(float)
    t2 = (k * h2) ** 2
    out = np.zeros(n1, dtype=float)
    chunk = max(1, _BLOCK_TARGET // (2 * n2))
    for m0 in range(1, n1, chunk):
        m = np.arange(m0, min(m0 + chunk, n1))
        d2 = (m * h1)[:, None] ** 2 + t2[None, :]
        out[m] = (d2**expo * mult[None, :]).sum(axis=1)
    return out * (h1 * h2) ** 2


def seminorm_x1_only(values_1d, kernel, r, lo=0, hi=None):
    """Power sum over the index window [lo, hi) via the reduced kernel.

    ``values_1d`` is the per-x1-cell profile; ``kernel`` comes from
    :func:`reduced_kernel` built for the same lattice.  Equals the full 2D
    ordered pair sum over the window's product region.
    """
    v = np.asarray(values_1d)
    if hi is None:
        hi = v.shape[0]
    length = hi - lo
    if length < 2:
        return 0.0
    window = v[lo:hi]
    parts = []
    for m in range(1, length):
        d = np.abs(window[m:] - window[:-m])
        if r == 2.0:
            sm = float(np.sum(d * d))
        else:
            sm = float(np.sum(d**r))
        parts.append(kernel[m] * sm)
    return 2.0 * math.fsum(parts)
