"""Uniform-grid domains, cell subsets and pair regions over the product grid.

Cells are represented by centers and a single shared volume (midpoint
quadrature everywhere); masked shapes (disks) keep only the cells whose
center lies inside the shape.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "DomainSpec",
    "Grid",
    "SubsetMask",
    "PairRegion",
    "build_grid",
    "split",
    "pair_region",
]


@dataclass(frozen=True)
class DomainSpec:
    """Geometric description of the domain to be gridded.

    kind is one of ``interval``, ``rectangle`` or ``ball``.  ``bounds`` holds
    (a, b) for intervals and (a1, b1, a2, b2) for rectangles and for the
    bounding box of a ball.  Lengths are dimensionless.
    """

    kind: str
    bounds: tuple
    center: tuple = None
    radius: float = None

    def __post_init__(self):
        if self.kind not in ("interval", "rectangle", "ball"):
            raise ValidationError(f"unknown domain kind {self.kind!r}", field="kind")
        b = tuple(float(v) for v in self.bounds)
        object.__setattr__(self, "bounds", b)
        if self.kind == "interval":
            if len(b) != 2:
                raise ValidationError("interval bounds must be (a, b)", field="bounds")
            if not b[0] < b[1]:
                raise ValidationError("degenerate interval: a >= b", field="bounds")
        else:
            if len(b) != 4:
                raise ValidationError("2D bounds must be (a1, b1, a2, b2)", field="bounds")
            if not (b[0] < b[1] and b[2] < b[3]):
                raise ValidationError("degenerate rectangle: a >= b on an axis", field="bounds")
        if self.kind == "ball":
            if self.center is None or self.radius is None:
                raise ValidationError("ball needs center and radius", field="center")
            c = tuple(float(v) for v in self.center)
            if len(c) != 2:
                raise ValidationError("ball center must be 2D", field="center")
            r = float(self.radius)
            if not r > 0:
                raise ValidationError("ball radius must be positive", field="radius")
            if (c[0] - r < b[0] or c[0] + r > b[1] or c[1] - r < b[2] or c[1] + r > b[3]):
                raise ValidationError("ball must lie inside its bounding box", field="radius")
            object.__setattr__(self, "center", c)
            object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return 1 if self.kind == "interval" else 2

    @staticmethod
    def interval(a, b):
        return DomainSpec("interval", (a, b))

    @staticmethod
    def rectangle(a1, b1, a2, b2):
        return DomainSpec("rectangle", (a1, b1, a2, b2))

    @staticmethod
    def ball(center=(0.0, 0.0), radius=1.0, box=None):
        cx, cy = (float(center[0]), float(center[1]))
        r = float(radius)
        if box is None:
            box = (cx - r, cx + r, cy - r, cy + r)
        return DomainSpec("ball", tuple(box), center=(cx, cy), radius=r)


def _freeze(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform cell grid: active cell centers, one shared cell volume.

    ``active_mask`` covers the full bounding-box lattice in x1-major order
    (the x2 index varies fastest); ``lattice`` holds the integer lattice
    coordinates of each active cell in the same order as ``centers``.
    """

    spec: DomainSpec
    dim: int
    n_per_axis: tuple
    centers: np.ndarray
    cell_volume: float
    active_mask: np.ndarray
    lattice: np.ndarray
    box_lo: np.ndarray
    box_hi: np.ndarray

    @property
    def n_cells(self):
        return self.centers.shape[0]

    @property
    def volumes(self):
        return np.full(self.n_cells, self.cell_volume)

    @property
    def measure(self):
        return self.n_cells * self.cell_volume

    @property
    def cell_diagonal(self):
        widths = (self.box_hi - self.box_lo) / np.asarray(self.n_per_axis, dtype=float)
        return float(np.linalg.norm(widths))

    def diameter(self):
        """Exact max distance between active cell centers (O(n^2), desk scale)."""
        x = self.centers
        best = 0.0
        step = max(1, 2_000_000 // max(x.shape[0], 1))
        for i0 in range(0, x.shape[0], step):
            d = np.linalg.norm(x[i0:i0 + step, None, :] - x[None, :, :], axis=-1)
            best = max(best, float(d.max()))
        return best


def build_grid(spec, n):
    """Build the uniform grid for ``spec`` with ``n`` cells per axis.

    ``n`` is an int (used for every axis) or a per-axis tuple.  For disk
    domains a cell is active iff its center lies strictly inside the disk.
    """
    if spec.dim == 1:
        npa = (int(n),) if np.isscalar(n) else (int(n[0]),)
    else:
        npa = (int(n), int(n)) if np.isscalar(n) else (int(n[0]), int(n[1]))
    for m in npa:
        if m < 2:
            raise ValidationError(f"need at least 2 cells per axis, got {m}", field="n")

    if spec.dim == 1:
        a, b = spec.bounds
        h = (b - a) / npa[0]
        idx = np.arange(npa[0])
        centers = (a + (idx + 0.5) * h)[:, None]
        active = np.ones(npa[0], dtype=bool)
        lattice = idx[:, None].astype(np.int64)
        lo, hi = np.array([a]), np.array([b])
        vol = h
    else:
        a1, b1, a2, b2 = spec.bounds
        h1 = (b1 - a1) / npa[0]
        h2 = (b2 - a2) / npa[1]
        i1, i2 = np.meshgrid(np.arange(npa[0]), np.arange(npa[1]), indexing="ij")
        i1 = i1.ravel()
        i2 = i2.ravel()
        xs = a1 + (i1 + 0.5) * h1
        ys = a2 + (i2 + 0.5) * h2
        centers = np.column_stack([xs, ys])
        if spec.kind == "ball":
            cx, cy = spec.center
            active = (xs - cx) ** 2 + (ys - cy) ** 2 < spec.radius**2
            if not active.any():
                raise ValidationError("no cell center falls inside the ball", field="n")
        else:
            active = np.ones(len(xs), dtype=bool)
        lattice = np.column_stack([i1, i2]).astype(np.int64)
        centers = centers[active]
        lattice = lattice[active]
        lo, hi = np.array([a1, a2]), np.array([b1, b2])
        vol = h1 * h2

    return Grid(
        spec=spec,
        dim=spec.dim,
        n_per_axis=npa,
        centers=_freeze(np.ascontiguousarray(centers, dtype=float)),
        cell_volume=float(vol),
        active_mask=_freeze(active),
        lattice=_freeze(lattice),
        box_lo=_freeze(lo.astype(float)),
        box_hi=_freeze(hi.astype(float)),
    )


@dataclass(frozen=True)
class SubsetMask:
    """Boolean membership per active cell; cell-aligned, never split."""

    member: np.ndarray
    grid: Grid

    def __post_init__(self):
        m = np.asarray(self.member, dtype=bool)
        if m.shape != (self.grid.n_cells,):
            raise ValidationError("mask length must equal active cell count")
        object.__setattr__(self, "member", _freeze(m.copy()))

    @property
    def count(self):
        return int(self.member.sum())

    @property
    def measure(self):
        return self.count * self.grid.cell_volume

    def complement(self):
        return SubsetMask(~self.member, self.grid)


def split(grid, predicate):
    """Partition active cells by a center predicate into (inside, rest).

    ``predicate`` is applied to the (n, dim) center array and may return a
    boolean array, or be a per-point callable.
    """
    try:
        member = np.asarray(predicate(grid.centers), dtype=bool)
        if member.shape != (grid.n_cells,):
            raise TypeError
    except TypeError:
        member = np.array([bool(predicate(x)) for x in grid.centers])
    lam = SubsetMask(member, grid)
    return lam, lam.complement()


@dataclass(frozen=True)
class PairRegion:
    """Subset of index pairs (i, j) of active cells, decidable in O(1) per pair.

    Kinds: ``full`` (all pairs), ``product`` (i in A and j in B) and
    ``complement_of_product`` (at least one index outside the given mask).
    """

    kind: str
    grid: Grid
    mask_a: SubsetMask = None
    mask_b: SubsetMask = None

    def __post_init__(self):
        if self.kind not in ("full", "product", "complement_of_product"):
            raise ValidationError(f"unknown pair-region kind {self.kind!r}")
        for m in (self.mask_a, self.mask_b):
            if m is not None and m.grid is not self.grid:
                raise ValidationError("mask grid does not match pair-region grid")

    def member_block(self, row_index):
        """Boolean (len(row_index), n) membership matrix for the given rows."""
        n = self.grid.n_cells
        rows = np.asarray(row_index)
        if self.kind == "full":
            return np.ones((rows.shape[0], n), dtype=bool)
        if self.kind == "product":
            return self.mask_a.member[rows, None] & self.mask_b.member[None, :]
        return ~(self.mask_a.member[rows, None] & self.mask_a.member[None, :])

    def pair_count(self):
        """Number of member index pairs, diagonal included."""
        n = self.grid.n_cells
        if self.kind == "full":
            return n * n
        if self.kind == "product":
            return self.mask_a.count * self.mask_b.count
        return n * n - self.mask_a.count**2

    @property
    def is_symmetric(self):
        if self.kind in ("full", "complement_of_product"):
            return True
        return self.mask_a is self.mask_b or bool(
            np.array_equal(self.mask_a.member, self.mask_b.member)
        )

    def describe(self):
        if self.kind == "full":
            return "full"
        if self.kind == "product":
            return f"product({self.mask_a.count},{self.mask_b.count})"
        return f"complement_of_product({self.mask_a.count})"


def pair_region(kind, grid=None, mask_a=None, mask_b=None):
    """Build a pair region; masks must live on the same grid."""
    if kind == "full":
        if grid is None:
            raise ValidationError("full pair region needs a grid")
        return PairRegion("full", grid)
    if kind == "product":
        if mask_a is None or mask_b is None:
            raise ValidationError("product pair region needs two masks")
        if mask_a.grid is not mask_b.grid:
            raise ValidationError("mask grid mismatch")
        return PairRegion("product", mask_a.grid, mask_a, mask_b)
    if kind == "complement_of_product":
        if mask_a is None:
            raise ValidationError("complement_of_product needs a mask")
        return PairRegion("complement_of_product", mask_a.grid, mask_a)
    raise ValidationError(f"unknown pair-region kind {kind!r}")
