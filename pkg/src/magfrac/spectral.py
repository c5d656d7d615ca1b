"""Spectra of the regional operator and the deflated variational eigenvalues.

Eigenvalues are the stationary values of the discrete energy: the quadratic
form (squared seminorm) over the squared mass norm.  Equivalently they are
the plain Hermitian eigenvalues of the form matrix (twice the pointwise
operator matrix) on uniform grids.  The reference solver is a full dense
Hermitian decomposition; the deflated path below is an independent
locally-optimal descent realizing the iterative min characterization.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NumericalContractError, ValidationError
from .fields import GridFunction

__all__ = ["Spectrum", "GapRow", "eigensolve", "deflated_energy", "gap_report"]

RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-8


def _phase_normalize(columns):
    """Rotate each column so its largest-modulus entry is real positive."""
    out = columns.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0:
            out[:, k] = col * (np.conj(pivot) / abs(pivot))
    return out


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with mass-orthonormal eigenfunctions."""

    lambdas: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    scale: float
    grid: object

    @property
    def k(self):
        return self.lambdas.shape[0]

    def eigenfunction(self, n):
        return GridFunction(self.vectors[:, n], self.grid)


def eigensolve(op, k):
    """First ``k`` eigenpairs of the discrete energy eigenproblem.

    Solves the dense Hermitian problem for the form matrix, mass-normalizes
    the eigenvectors, applies the deterministic phase convention and checks
    the residual contract (violations raise, they are never silent).
    """
    n = op.n
    if not 1 <= k <= n:
        raise ValidationError("eigenpair count k out of range", field="k")
    h = op.form_matrix
    lam, vec = np.linalg.eigh(h)
    scale = float(max(abs(lam[0]), abs(lam[-1])))
    lam = lam[:k]
    vec = _phase_normalize(vec[:, :k]) / np.sqrt(op.grid.cell_volume)
    res = np.linalg.norm(h @ vec - vec * lam[None, :], axis=0) * np.sqrt(
        op.grid.cell_volume
    )
    if scale > 0 and np.any(res > RESIDUAL_TOL * scale):
        raise NumericalContractError(
            f"eigenpair residual {res.max():.3e} exceeds {RESIDUAL_TOL:.0e} * |H|"
        )
    lam = lam.copy()
    lam.setflags(write=False)
    return Spectrum(lambdas=lam, vectors=vec, residuals=res, scale=scale, grid=op.grid)


def _project_out(u, basis):
    if basis.shape[1]:
        u = u - basis @ (basis.conj().T @ u)
    return u


def deflated_energy(op, known, seed=0, max_iters=20000, tol=1e-12):
    """Minimize the energy over the mass-orthogonal complement of ``known``.

    ``known`` is a list of mass-orthonormal grid functions (or an (n, m)
    array).  Uses locally optimal steepest descent with exact 2x2
    Rayleigh-Ritz steps; independent of the dense decomposition path.
    Returns (value, minimizer).
    """
    h = op.form_matrix
    n = op.n
    sqv = np.sqrt(op.grid.cell_volume)
    if isinstance(known, (list, tuple)):
        cols = [f.values if isinstance(f, GridFunction) else np.asarray(f) for f in known]
        phi = np.column_stack(cols) if cols else np.zeros((n, 0), dtype=np.complex128)
    else:
        phi = np.asarray(known, dtype=np.complex128).reshape(n, -1)
    basis = phi * sqv  # Euclidean-orthonormal for uniform mass
    if basis.shape[1]:
        gram = basis.conj().T @ basis
        if np.max(np.abs(gram - np.eye(basis.shape[1]))) > 1e-8:
            raise ValidationError("known eigenfunctions are not mass-orthonormal")

    rng = np.random.default_rng(seed)
    scale = float(np.linalg.norm(h))
    best = None
    for _ in range(3):
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        u = _project_out(u, basis)
        u /= np.linalg.norm(u)
        rho = float(np.real(np.conj(u) @ (h @ u)))
        for _ in range(max_iters):
            hu = h @ u
            r = hu - rho * u
            r = _project_out(r, basis)
            r -= (np.conj(u) @ r) * u
            rn = np.linalg.norm(r)
            if rn <= tol * max(scale, 1e-300):
                break
            r /= rn
            hr = h @ r
            a = rho
            b = complex(np.conj(u) @ hr)
            c = float(np.real(np.conj(r) @ hr))
            # smallest eigenpair of the 2x2 section [[a, b], [conj(b), c]]
            half = 0.5 * (a + c)
            disc = np.sqrt(0.25 * (a - c) ** 2 + abs(b) ** 2)
            mu = half - disc
            if abs(b) > 0:
                t = (mu - a) / b
                new = u + t * r
            else:
                new = u if a <= c else r
            new = _project_out(new, basis)
            new /= np.linalg.norm(new)
            u = new
            rho = float(np.real(np.conj(u) @ (h @ u)))
        if best is None or rho < best[0]:
            best = (rho, u)
    value, u = best
    f = GridFunction(u / sqv, op.grid)
    return value, f


@dataclass(frozen=True)
class GapRow:
    n: int
    lam: float
    gap: float
    near_degenerate: bool


def gap_report(spectrum):
    """Consecutive spectral gaps with near-degeneracy flags."""
    if spectrum.k < 2:
        raise ValidationError("need at least two eigenvalues for gaps", field="k")
    lam = spectrum.lambdas
    lam_max = float(np.max(np.abs(lam))) if spectrum.scale == 0 else spectrum.scale
    rows = []
    for i in range(spectrum.k - 1):
        gap = float(lam[i + 1] - lam[i])
        rows.append(
            GapRow(
                n=i + 1,
                lam=float(lam[i]),
                gap=gap,
                near_degenerate=gap < DEGENERACY_TOL * max(lam_max, 1e-300),
            )
        )
    return rows


def write_spectrum_csv(spectrum, path, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "lambda", "residual"])
        for i in range(spectrum.k):
            writer.writerow(
                [i + 1, repr(float(spectrum.lambdas[i])), repr(float(spectrum.residuals[i]))]
            )


def write_eigenvectors_csv(spectrum, path, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["cell_index"]
            + [f"re_{k + 1}" for k in range(spectrum.k)]
            + [f"im_{k + 1}" for k in range(spectrum.k)]
        )
        for i in range(spectrum.vectors.shape[0]):
            row = spectrum.vectors[i]
            writer.writerow(
                [i]
                + [repr(float(v.real)) for v in row]
                + [repr(float(v.imag)) for v in row]
            )
