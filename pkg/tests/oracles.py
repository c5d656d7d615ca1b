"""Independent brute-force references, kept free of the package's engines.

Everything here is written with plain Python loops straight from the
defining formulas so it can serve as an oracle for the vectorized paths.
"""

import cmath
import math


def field_at(field, point):
    """Evaluate a potential from its raw spec data (no package code path)."""
    if field.kind == "zero":
        return [0.0] * field.dim
    if field.kind == "constant":
        return [float(v) for v in field.offset]
    out = []
    for row in range(field.dim):
        acc = float(field.offset[row])
        for col in range(field.dim):
            acc += float(field.matrix[row][col]) * point[col]
        out.append(acc)
    return out


def naive_seminorm_power(f, s, p, field, member=None):
    """Ordered-pair double loop for the magnetic seminorm power sum."""
    grid = f.grid
    x = grid.centers
    vol = grid.cell_volume
    n = grid.n_cells
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if member is not None and not member(i, j):
                continue
            d = math.dist(x[i], x[j])
            mid = [(x[i][k] + x[j][k]) / 2.0 for k in range(grid.dim)]
            a = field_at(field, mid)
            theta = sum((x[i][k] - x[j][k]) * a[k] for k in range(grid.dim))
            diff = f.values[i] - cmath.exp(1j * theta) * f.values[j]
            total += abs(diff) ** p * d ** (-(grid.dim + s * p)) * vol * vol
    return total


def naive_operator_apply(grid, s, field, values):
    """Pointwise operator action computed row by row from the formula."""
    x = grid.centers
    vol = grid.cell_volume
    n = grid.n_cells
    out = []
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            if i == j:
                continue
            d = math.dist(x[i], x[j])
            mid = [(x[i][k] + x[j][k]) / 2.0 for k in range(grid.dim)]
            a = field_at(field, mid)
            theta = sum((x[i][k] - x[j][k]) * a[k] for k in range(grid.dim))
            kern = vol * d ** (-(grid.dim + 2.0 * s))
            acc += kern * (values[i] - cmath.exp(1j * theta) * values[j])
        out.append(acc)
    return out


def ramp_value(x1, eps):
    """Reference evaluation of the plateau/ramp profile at one point."""
    top = (2.0 - 3.0 * eps) / (2.0 + eps)
    slope = 2.0 * (2.0 - eps) / (eps * (2.0 + eps))
    if x1 <= 0.0:
        return top
    if x1 <= eps:
        return top - slope * x1
    return -1.0


def ramp_sq_integral_midpoint(eps, n_points=1_000_000):
    """Composite-midpoint value of the squared-profile integral on (-1, 1)."""
    h = 2.0 / n_points
    total = 0.0
    for i in range(n_points):
        x = -1.0 + (i + 0.5) * h
        total += ramp_value(x, eps) ** 2 * h
    return total
