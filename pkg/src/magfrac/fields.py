"""Complex grid functions, L^q norms, magnetic potentials and stock profiles."""

import math
from dataclasses import dataclass

import numpy as np

from .domain import Grid
from .errors import ValidationError

__all__ = [
    "GridFunction",
    "VectorFieldSpec",
    "WeightFunction",
    "lp_norm",
    "weighted_mean",
    "eval_field",
    "zero_field",
    "constant_field",
    "affine_field",
    "rotation_field",
    "linear_field",
    "ramp_function",
    "make_indicator",
    "gauge_transform",
    "smoothed_random_function",
]


@dataclass(frozen=True)
class GridFunction:
    """Complex value per active cell."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_cells,):
            raise ValidationError("value count must equal active cell count")
        if not np.all(np.isfinite(v)):
            raise ValidationError("grid function values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @staticmethod
    def constant(grid, c=1.0):
        return GridFunction(np.full(grid.n_cells, c, dtype=np.complex128), grid)

    @staticmethod
    def from_callable(grid, fn):
        return GridFunction(np.asarray(fn(grid.centers), dtype=np.complex128), grid)


@dataclass(frozen=True)
class VectorFieldSpec:
    """Bounded vector potential, evaluable on the grid bounding box.

    Supported kinds: ``zero``, ``constant`` and ``affine`` (degree-one
    polynomial per component, A(x) = offset + matrix @ x), which covers every
    field exercised by the test suite, e.g. the planar rotation (x2, -x1).
    ``sup_bound`` is the exact sup of |A| over the box (affine fields attain
    it at a box corner).
    """

    kind: str
    dim: int
    box_lo: np.ndarray
    box_hi: np.ndarray
    offset: np.ndarray = None
    matrix: np.ndarray = None
    sup_bound: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "affine"):
            raise ValidationError(f"unknown field kind {self.kind!r}", field="field")

    @property
    def is_zero(self):
        return self.kind == "zero"

    def describe(self):
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "constant":
            return {"kind": "constant", "vector": [float(v) for v in self.offset]}
        return {
            "kind": "affine",
            "offset": [float(v) for v in self.offset],
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }


def _box_corners(lo, hi):
    if lo.shape[0] == 1:
        return np.array([[lo[0]], [hi[0]]])
    return np.array([[lo[0], lo[1]], [lo[0], hi[1]], [hi[0], lo[1]], [hi[0], hi[1]]])


def zero_field(grid):
    return VectorFieldSpec("zero", grid.dim, grid.box_lo, grid.box_hi)


def constant_field(grid, vector):
    a = np.asarray(vector, dtype=float).reshape(-1)
    if a.shape[0] != grid.dim:
        raise ValidationError("constant field dimension mismatch", field="field")
    return VectorFieldSpec(
        "constant", grid.dim, grid.box_lo, grid.box_hi,
        offset=a, sup_bound=float(np.linalg.norm(a)),
    )


def affine_field(grid, offset, matrix):
    b = np.asarray(offset, dtype=float).reshape(-1)
    m = np.asarray(matrix, dtype=float)
    if b.shape[0] != grid.dim or m.shape != (grid.dim, grid.dim):
        raise ValidationError("affine field shape mismatch", field="field")
    corners = _box_corners(grid.box_lo, grid.box_hi)
    sup = float(max(np.linalg.norm(b + corners @ m.T, axis=1)))
    return VectorFieldSpec(
        "affine", grid.dim, grid.box_lo, grid.box_hi,
        offset=b, matrix=m, sup_bound=sup,
    )


def rotation_field(grid):
    """Planar rotation potential A(x) = (x2, -x1)."""
    if grid.dim != 2:
        raise ValidationError("rotation field needs a 2D grid", field="field")
    return affine_field(grid, [0.0, 0.0], [[0.0, 1.0], [-1.0, 0.0]])


def linear_field(grid, slope=1.0):
    """1D analogue of the rotation potential: A(x) = slope * x."""
    if grid.dim != 1:
        raise ValidationError("linear field needs a 1D grid", field="field")
    return affine_field(grid, [0.0], [[float(slope)]])


def eval_field(field, points, check_box=True):
    """Evaluate the potential at an (m, dim) array of points."""
    pts = np.asarray(points, dtype=float)
    squeeze = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != field.dim:
        raise ValidationError("point dimension mismatch", field="field")
    if check_box:
        lo, hi = field.box_lo, field.box_hi
        eps = 1e-12 * (1.0 + np.abs(hi - lo))
        if np.any(pts < lo - eps) or np.any(pts > hi + eps):
            raise ValidationError("point outside the field bounding box")
    if field.kind == "zero":
        out = np.zeros_like(pts)
    elif field.kind == "constant":
        out = np.broadcast_to(field.offset, pts.shape).copy()
    else:
        out = field.offset + pts @ field.matrix.T
    return out[0] if squeeze else out


def pair_phases(field, xi, xj):
    """Phases (xi - xj) . A((xi + xj) / 2) for broadcastable center arrays."""
    diff = xi - xj
    if field.kind == "zero":
        return np.zeros(diff.shape[:-1])
    mid = 0.5 * (xi + xj)
    a = eval_field(field, mid.reshape(-1, field.dim), check_box=False)
    a = a.reshape(mid.shape)
    return np.einsum("...d,...d->...", diff, a)


@dataclass(frozen=True)
class WeightFunction:
    """Integration weight used for the mean-shift term; normalized so that
    the weighted cell volumes sum to one."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).copy()
        if v.shape != (self.grid.n_cells,):
            raise ValidationError("weight length must equal active cell count")
        if not np.all(np.isfinite(v)):
            raise ValidationError("weight values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def total(self):
        return complex(np.sum(self.values) * self.grid.cell_volume)

    def normalized(self):
        t = self.total
        if abs(t) < 1e-300:
            raise ValidationError("weight integrates to zero, cannot normalize")
        return WeightFunction(self.values / t, self.grid)

    def check_normalized(self, tol=1e-12):
        if abs(self.total - 1.0) > tol:
            raise ValidationError("weight is not normalized to unit integral")

    @staticmethod
    def uniform(grid):
        return WeightFunction(np.full(grid.n_cells, 1.0 / grid.measure), grid)


def lp_norm(f, q):
    """Volume-weighted L^q norm; ``q = math.inf`` gives the max norm."""
    if q == math.inf:
        return float(np.max(np.abs(f.values)))
    q = float(q)
    if q < 1:
        raise ValidationError("norm exponent must satisfy q >= 1", field="q")
    av = np.abs(f.values)
    return float((np.sum(av**q) * f.grid.cell_volume) ** (1.0 / q))


def weighted_mean(f, g):
    """Discrete weighted mean: sum of f * g * cell volume."""
    if f.grid is not g.grid and f.grid.n_cells != g.grid.n_cells:
        raise ValidationError("grid mismatch between function and weight")
    return complex(np.sum(f.values * g.values) * f.grid.cell_volume)


def ramp_function(grid, eps):
    """Plateau / linear ramp / plateau profile depending only on x1.

    Constant (2 - 3*eps)/(2 + eps) for x1 <= 0, a linear ramp of width
    ``eps`` reaching -1 at x1 = eps, and -1 beyond.  Sampled at cell centers.
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValidationError("ramp width must lie in (0, 1)", field="eps")
    x1 = grid.centers[:, 0]
    top = (2.0 - 3.0 * eps) / (2.0 + eps)
    slope = 2.0 * (2.0 - eps) / (eps * (2.0 + eps))
    vals = np.where(x1 <= 0.0, top, np.where(x1 <= eps, top - slope * x1, -1.0))
    return GridFunction(vals.astype(np.complex128), grid)


def ramp_profile_1d(x1, eps):
    """The ramp profile evaluated on a bare x1 array (reduced-kernel path)."""
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValidationError("ramp width must lie in (0, 1)", field="eps")
    top = (2.0 - 3.0 * eps) / (2.0 + eps)
    slope = 2.0 * (2.0 - eps) / (eps * (2.0 + eps))
    return np.where(x1 <= 0.0, top, np.where(x1 <= eps, top - slope * x1, -1.0))


def make_indicator(mask):
    """Characteristic function of a cell subset."""
    return GridFunction(mask.member.astype(np.complex128), mask.grid)


def gauge_transform(f, a):
    """Multiply by the plane-wave factor exp(i a . x)."""
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape[0] != f.grid.dim:
        raise ValidationError("gauge vector dimension mismatch")
    if not np.all(np.isfinite(a)):
        raise ValidationError("gauge vector must be finite")
    phase = np.exp(1j * (f.grid.centers @ a))
    return GridFunction(phase * f.values, f.grid)


def _neighbor_average(values, grid):
    """One lattice-neighbor averaging pass (active neighbors only)."""
    shape = grid.n_per_axis
    index = -np.ones(shape, dtype=np.int64)
    coords = tuple(grid.lattice[:, d] for d in range(grid.dim))
    index[coords] = np.arange(grid.n_cells)
    acc = values.copy()
    cnt = np.ones(grid.n_cells)
    for d in range(grid.dim):
        for step in (-1, 1):
            shifted = grid.lattice.copy()
            shifted[:, d] += step
            ok = (shifted[:, d] >= 0) & (shifted[:, d] < shape[d])
            nb = index[tuple(shifted[ok, dd] for dd in range(grid.dim))]
            valid = nb >= 0
            rows = np.flatnonzero(ok)[valid]
            acc[rows] += values[nb[valid]]
            cnt[rows] += 1.0
    return acc / cnt


def smoothed_random_function(grid, rng):
    """Complex Gaussian field smoothed by one grid-averaging pass."""
    raw = rng.standard_normal(grid.n_cells) + 1j * rng.standard_normal(grid.n_cells)
    return GridFunction(_neighbor_average(raw, grid), grid)
