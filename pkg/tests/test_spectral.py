import numpy as np
import pytest

from magfrac import (
    DomainSpec,
    ValidationError,
    build_grid,
    constant_field,
    zero_field,
)
from magfrac.domain import Grid
from magfrac.operator import assemble
from magfrac.spectral import deflated_energy, eigensolve, gap_report


def test_two_cell_spectrum_analytic():
    """Form eigenvalues of the 2-cell problem: {0, 4 h / d^(1+2s)}."""
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 2)
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 2)
    h, d = grid.cell_volume, 0.5
    assert spec.lambdas[0] == pytest.approx(0.0, abs=1e-14)
    assert spec.lambdas[1] == pytest.approx(4.0 * h / d**2, rel=1e-13)


def test_zero_field_kernel_is_constant():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 32)
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 4)
    assert abs(spec.lambdas[0]) <= 1e-10 * spec.lambdas[1]
    ground = spec.vectors[:, 0]
    assert np.max(np.abs(ground - ground[0])) <= 1e-8 * np.abs(ground[0])


def test_constant_field_spectrum_matches_zero_field():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 24)
    spec0 = eigensolve(assemble(grid, 0.5, zero_field(grid)), 6)
    speca = eigensolve(assemble(grid, 0.5, constant_field(grid, [3.0])), 6)
    scale = spec0.lambdas[-1]
    assert np.max(np.abs(spec0.lambdas - speca.lambdas)) <= 1e-9 * scale


def test_mass_orthonormality_and_phase_convention():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 20)
    op = assemble(grid, 0.4, constant_field(grid, [1.0]))
    spec = eigensolve(op, 5)
    gram = spec.vectors.conj().T @ spec.vectors * grid.cell_volume
    assert np.max(np.abs(gram - np.eye(5))) <= 1e-10
    for k in range(5):
        col = spec.vectors[:, k]
        pivot = col[int(np.argmax(np.abs(col)))]
        assert pivot.real > 0.0
        assert abs(pivot.imag) <= 1e-10 * abs(pivot)


def test_residual_contract():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 40)
    op = assemble(grid, 0.6, zero_field(grid))
    spec = eigensolve(op, 10)
    assert np.all(spec.residuals <= 1e-8 * spec.scale)


def test_eigensolve_k_out_of_range():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 8)
    op = assemble(grid, 0.5, zero_field(grid))
    with pytest.raises(ValidationError):
        eigensolve(op, 0)
    with pytest.raises(ValidationError):
        eigensolve(op, 9)


def test_deflated_energy_reproduces_eigenvalues():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 32)
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 5)
    val0, _ = deflated_energy(op, [])
    assert abs(val0 - spec.lambdas[0]) <= 1e-7 * max(spec.lambdas[1], 1.0)
    val1, _ = deflated_energy(op, [spec.eigenfunction(0)])
    assert val1 == pytest.approx(spec.lambdas[1], rel=1e-7)
    val3, _ = deflated_energy(op, [spec.eigenfunction(j) for j in range(3)])
    assert val3 == pytest.approx(spec.lambdas[3], rel=1e-7)


def test_deflated_energy_complex_operator():
    grid = build_grid(DomainSpec.rectangle(0.0, 1.0, 0.0, 1.0), (9, 9))
    from magfrac import rotation_field

    op = assemble(grid, 0.5, rotation_field(grid))
    spec = eigensolve(op, 4)
    for n in range(4):
        known = [spec.eigenfunction(j) for j in range(n)]
        val, _ = deflated_energy(op, known)
        assert val == pytest.approx(spec.lambdas[n], rel=1e-7)


def test_deflated_energy_rejects_skew_basis():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 10)
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 2)
    bad = spec.vectors[:, :2] @ np.array([[1.0, 0.4], [0.0, 1.0]])
    with pytest.raises(ValidationError):
        deflated_energy(op, bad)


def test_gap_report_two_cells():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 2)
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 2)
    rows = gap_report(spec)
    assert len(rows) == 1
    assert rows[0].gap == pytest.approx(4.0 * grid.cell_volume / 0.5**2, rel=1e-13)
    assert not rows[0].near_degenerate


def test_gap_report_strictly_increasing_interval():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 128)
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 10)
    rows = gap_report(spec)
    assert spec.lambdas[0] == pytest.approx(0.0, abs=1e-10 * spec.lambdas[1])
    assert all(row.gap > 0.0 for row in rows)


def _two_ball_grid(n=12, separation=1000.0):
    """Two mirror-symmetric disks, far enough apart that the polynomially
    decaying cross coupling sits below the degeneracy threshold."""
    single = build_grid(DomainSpec.ball(radius=0.5, center=(0.0, 0.0)), n)
    left = single.centers
    right = left + np.array([separation, 0.0])
    centers = np.vstack([left, right])
    lattice = np.vstack(
        [single.lattice, single.lattice + np.array([10 * n, 0], dtype=np.int64)]
    )
    return Grid(
        spec=single.spec,
        dim=2,
        n_per_axis=(20 * n, n),
        centers=centers,
        cell_volume=single.cell_volume,
        active_mask=np.ones(len(centers), dtype=bool),
        lattice=lattice,
        box_lo=np.array([-0.5, -0.5]),
        box_hi=np.array([separation + 0.5, 0.5]),
    )


def test_mirror_symmetric_balls_flag_degeneracy():
    grid = _two_ball_grid()
    op = assemble(grid, 0.5, zero_field(grid))
    spec = eigensolve(op, 6)
    rows = gap_report(spec)
    assert any(row.near_degenerate for row in rows)
