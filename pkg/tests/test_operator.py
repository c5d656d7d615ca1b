import numpy as np
import pytest

from magfrac import (
    DomainSpec,
    GridFunction,
    ValidationError,
    build_grid,
    constant_field,
    make_indicator,
    rotation_field,
    split,
    zero_field,
)
from magfrac.operator import (
    apply_operator,
    assemble,
    export_matrix_csv,
    hermitian_residual,
    quadratic_form,
)
from magfrac.seminorm import SeminormParams, magnetic_seminorm

from oracles import naive_operator_apply


def test_two_cell_matrix_analytic():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 2)
    op = assemble(grid, 0.5, zero_field(grid))
    h = grid.cell_volume
    d = 0.5
    kappa = h / d ** (1.0 + 2.0 * 0.5)
    expected = kappa * np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(op.matrix.real, expected, rtol=1e-14)
    assert np.allclose(op.matrix.imag, 0.0)


def test_zero_field_matrix_real_symmetric():
    grid = build_grid(DomainSpec.rectangle(0.0, 1.0, 0.0, 1.0), (5, 5))
    op = assemble(grid, 0.4, zero_field(grid))
    assert np.max(np.abs(op.matrix.imag)) == 0.0
    assert np.allclose(op.matrix, op.matrix.T)


def test_diagonal_is_kernel_row_sum():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 6)
    op = assemble(grid, 0.3, zero_field(grid))
    x = grid.centers[:, 0]
    for i in range(6):
        want = sum(
            grid.cell_volume * abs(x[i] - x[j]) ** (-(1.0 + 0.6))
            for j in range(6)
            if j != i
        )
        assert op.matrix[i, i].real == pytest.approx(want, rel=1e-13)
        assert op.matrix[i, i].imag == 0.0


def test_gauge_conjugation_to_zero_field():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 12)
    a = 1.7
    op_a = assemble(grid, 0.5, constant_field(grid, [a]))
    op_0 = assemble(grid, 0.5, zero_field(grid))
    u = np.exp(1j * a * grid.centers[:, 0])
    conj = np.conj(u)[:, None] * op_a.matrix * u[None, :]
    scale = np.max(np.abs(op_0.matrix))
    assert np.max(np.abs(conj - op_0.matrix)) <= 1e-12 * scale


def test_weighted_hermitian_symmetry():
    grid = build_grid(DomainSpec.rectangle(0.0, 1.0, 0.0, 1.0), (6, 6))
    op = assemble(grid, 0.5, rotation_field(grid))
    lhs = op.mass[:, None] * op.matrix
    rhs = np.conj(op.mass[None, :] * op.matrix).T
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(lhs))


def test_apply_annihilates_constants():
    grid = build_grid(DomainSpec.ball(), 12)
    op = assemble(grid, 0.5, zero_field(grid))
    f = GridFunction.constant(grid, 1.0)
    out = apply_operator(op, f)
    assert np.max(np.abs(out.values)) <= 1e-13 * np.max(np.abs(op.matrix))


def test_apply_kills_gauge_wave():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 16)
    a = 2.0
    op = assemble(grid, 0.5, constant_field(grid, [a]))
    f = GridFunction(np.exp(1j * a * grid.centers[:, 0]), grid)
    out = apply_operator(op, f)
    assert np.max(np.abs(out.values)) <= 1e-12 * np.max(np.abs(op.matrix))


def test_apply_matches_naive_sum():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 5)
    rng = np.random.default_rng(0)
    f = GridFunction(rng.standard_normal(5) + 1j * rng.standard_normal(5), grid)
    field = constant_field(grid, [1.0])
    op = assemble(grid, 0.5, field)
    got = apply_operator(op, f).values
    want = naive_operator_apply(grid, 0.5, field, f.values)
    assert np.allclose(got, want, rtol=1e-12)


def test_quadratic_form_matches_seminorm_power():
    grid = build_grid(DomainSpec.rectangle(0.0, 1.0, 0.0, 1.0), (6, 6))
    field = rotation_field(grid)
    op = assemble(grid, 0.5, field)
    rng = np.random.default_rng(1)
    params = SeminormParams(0.5, 2.0, field)
    for _ in range(10):
        f = GridFunction(
            rng.standard_normal(grid.n_cells) + 1j * rng.standard_normal(grid.n_cells),
            grid,
        )
        qf = quadratic_form(op, f)
        sem = magnetic_seminorm(f, params).value_p
        assert qf == pytest.approx(sem, rel=1e-10)
        assert qf >= -1e-12 * np.sum(np.abs(f.values) ** 2)


def test_quadratic_form_indicator_oracle():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 4)
    lam, _ = split(grid, lambda x: x[:, 0] <= 0.5)
    f = make_indicator(lam)
    op = assemble(grid, 0.5, zero_field(grid))
    sem = magnetic_seminorm(f, SeminormParams(0.5, 2.0, zero_field(grid))).value_p
    assert quadratic_form(op, f) == pytest.approx(sem, rel=1e-12)


def test_hermitian_residual_zero_field():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 20)
    op = assemble(grid, 0.5, zero_field(grid))
    assert hermitian_residual(op) <= 1e-13


def test_hermitian_residual_rotation_field():
    grid = build_grid(DomainSpec.rectangle(0.0, 1.0, 0.0, 1.0), (16, 16))
    op = assemble(grid, 0.5, rotation_field(grid))
    assert hermitian_residual(op) <= 1e-11


def test_assemble_rejects_bad_s():
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 4)
    for s in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValidationError):
            assemble(grid, s, zero_field(grid))


def test_apply_dimension_mismatch():
    g1 = build_grid(DomainSpec.interval(0.0, 1.0), 4)
    g2 = build_grid(DomainSpec.interval(0.0, 1.0), 6)
    op = assemble(g1, 0.5, zero_field(g1))
    f = GridFunction.constant(g2, 1.0)
    with pytest.raises(ValidationError):
        apply_operator(op, f)


def test_matrix_csv_export(tmp_path):
    grid = build_grid(DomainSpec.interval(0.0, 1.0), 3)
    op = assemble(grid, 0.5, zero_field(grid))
    path = tmp_path / "op.csv"
    export_matrix_csv(op, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "i,j,re,im"
    assert len(lines) == 1 + 9
    i, j, re, im = lines[1].split(",")
    assert (int(i), int(j)) == (0, 0)
    assert float(re) == pytest.approx(op.matrix[0, 0].real)
