import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_lab import hardy, symbols
from toeplitz_lab.errors import (
    DimensionMismatch,
    NoConvergence,
    NotAnIsometry,
    NotCommuting,
    SafeSubspaceEmpty,
)

PHI1 = symbols.singular(1.0)
BLASCHKE = symbols.blaschke(0.3, 0.5j)


def test_shift_moves_basis_vectors():
    s = hardy.shift_op(8, 1)
    out = hardy.apply(s, hardy.basis_vector(8, 2))
    assert np.array_equal(out.coeffs, np.eye(8)[3])


def test_shift_power_zero_is_identity():
    assert np.array_equal(hardy.shift_op(5, 0).matrix, np.eye(5))


def test_shift_is_isometry_and_adjoint_is_not():
    s = hardy.shift_op(16, 1)
    assert hardy.isometry_defect(s) == 0.0
    assert hardy.isometry_defect(hardy.adjoint(s)) == 1.0


def test_toeplitz_matrix_is_lower_triangular_with_symbol_column():
    op = hardy.toeplitz_op(PHI1, 32)
    coeffs = symbols.fourier_coeffs(PHI1, 32).coeffs
    assert np.array_equal(op.matrix, np.tril(op.matrix))
    assert np.allclose(op.matrix[:, 0], coeffs)
    assert np.allclose(op.matrix[5, 2], coeffs[3])


def test_monomial_symbol_gives_shift():
    op = hardy.toeplitz_op(symbols.monomial(2), 10)
    assert np.array_equal(op.matrix, hardy.shift_op(10, 2).matrix)


def test_analytic_products_are_exact_compressions():
    a = hardy.toeplitz_op(PHI1, 64)
    b = hardy.toeplitz_op(BLASCHKE, 64)
    ab = hardy.compose(a, b)
    assert np.allclose(ab.matrix, a.matrix @ b.matrix, atol=1e-13)
    assert ab.safe_dim == 64 and ab.certified


def test_shift_junction_is_identity():
    s = hardy.shift_op(12, 3)
    prod = hardy.compose(hardy.adjoint(s), s)
    assert np.array_equal(prod.matrix, np.eye(12))
    assert prod.defect_bound == 0.0


def test_finite_blaschke_is_isometry_to_roundoff():
    assert hardy.isometry_defect(hardy.toeplitz_op(BLASCHKE, 128)) < 1e-12


def test_singular_junction_within_its_estimate():
    n = 256
    a = hardy.toeplitz_op(symbols.singular(1.0), n)
    b = hardy.toeplitz_op(symbols.singular(1.5), n)
    target = hardy.toeplitz_op(symbols.singular(0.5), n)
    prod = hardy.compose(hardy.adjoint(a), b)
    err = hardy.max_column_norm(prod.block() - target.block())
    assert err <= prod.defect_bound
    assert err < 1e-5


def test_singular_isometry_defect_within_estimate():
    op = hardy.toeplitz_op(PHI1, 128)
    gram = hardy.compose(hardy.adjoint(op), op)
    assert hardy.isometry_defect(op) <= gram.defect_bound


def test_dense_compose_shrinks_safe_block_by_reach():
    s = hardy.shift_op(16, 1)
    # S S* is exact; S* S can pull e_N back into the block, so one coordinate is lost
    prod = hardy._compose_dense(s, hardy.adjoint(s))
    assert prod.safe_dim == 16
    prod = hardy._compose_dense(hardy.adjoint(s), s)
    assert prod.safe_dim == 15


def test_unbounded_leak_marks_uncertified():
    t = hardy.toeplitz_op(PHI1, 32)
    tt = hardy.compose(t, hardy.adjoint(t))
    prod = hardy.compose(tt, tt)
    assert not prod.certified


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hardy.compose(hardy.shift_op(4, 1), hardy.shift_op(5, 1))


def test_commuting_symbols():
    s = hardy.shift_op(64, 1)
    assert hardy.commutator_gap(s, hardy.toeplitz_op(PHI1, 64)) < 1e-15


def test_op_norm_of_shift():
    assert hardy.op_norm(hardy.shift_op(64, 3)) == pytest.approx(1.0, abs=1e-12)


def test_op_norm_reports_clustered_spectrum():
    # the compressed singular symbol has many singular values within 1e-5 of 1
    with pytest.raises(NoConvergence) as info:
        hardy.op_norm(hardy.toeplitz_op(PHI1, 256))
    assert 0.999 < info.value.estimate <= 1.0 + 1e-12


def test_op_norm_matches_svd():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((20, 20))
    op = hardy.TruncatedOperator(m.astype(complex), 20)
    assert hardy.op_norm(op) == pytest.approx(np.linalg.norm(m, 2), rel=1e-8)
    assert hardy.op_norm(hardy.identity_op(6, 2.0)) == pytest.approx(2.0)


def test_apply_tracks_tail_for_inner_symbol():
    n = 128
    out = hardy.apply(hardy.toeplitz_op(PHI1, n), hardy.basis_vector(n, 0))
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    assert out.tail == pytest.approx(symbols.fourier_coeffs(PHI1, n).tail_bound, abs=1e-12)


def test_columns_of_isometric_generator_have_unit_norm():
    n = 64
    op = hardy.toeplitz_op(PHI1, n)
    for j in (0, 10, 63):
        assert hardy.apply(op, hardy.basis_vector(n, j)).norm() == pytest.approx(1.0, abs=1e-12)


def test_range_projection():
    proj = hardy.range_projection(6, 2)
    x = hardy.HardyVector(np.ones(6, dtype=complex), tail=0.5)
    out = hardy.apply(proj, x)
    assert np.array_equal(out.coeffs, [0, 0, 1, 1, 1, 1])
    assert out.tail == 0.5


def test_wold_of_shift():
    w = hardy.wold_decompose(hardy.shift_op(32, 1))
    assert w.wandering_dim == 1
    assert np.allclose(np.abs(w.wandering_basis[0].coeffs), np.eye(32)[0])
    assert w.reconstruction_defect < 1e-12


@pytest.mark.parametrize("j", [2, 3])
def test_wold_of_component_shift(j):
    space = hardy.MultiHardy(j, 16)
    w = hardy.wold_decompose(space.component_shift())
    assert w.wandering_dim == j


def test_wold_rejects_non_isometry():
    with pytest.raises(NotAnIsometry):
        hardy.wold_decompose(hardy.adjoint(hardy.shift_op(16, 1)))


def test_symbol_recovery_for_blaschke():
    n = 64
    rec = hardy.symbol_of_commuting_isometry(hardy.toeplitz_op(BLASCHKE, n), 1e-8)
    assert np.allclose(rec.series.coeffs, symbols.fourier_coeffs(BLASCHKE, n).coeffs, atol=1e-12)
    assert rec.residual < 1e-12


def test_symbol_recovery_for_singular_symbol():
    n = 64
    rec = hardy.symbol_of_commuting_isometry(hardy.toeplitz_op(PHI1, n), 0.1)
    assert np.allclose(rec.series.coeffs, symbols.fourier_coeffs(PHI1, n).coeffs, atol=1e-9)


def test_symbol_recovery_rejects_adjoint_shift():
    with pytest.raises(NotAnIsometry):
        hardy.symbol_of_commuting_isometry(hardy.adjoint(hardy.shift_op(16, 1)), 1e-8)


def test_symbol_recovery_rejects_non_commuting_isometry():
    n = 16
    signs = np.diag([(-1) ** k for k in range(n)]).astype(complex)
    s = hardy.shift_op(n, 1)
    op = hardy.TruncatedOperator(signs @ s.matrix, n, down=1, up=-1)
    assert hardy.isometry_defect(op) < 1e-15
    with pytest.raises(NotCommuting):
        hardy.symbol_of_commuting_isometry(op, 1e-8)


def test_empty_safe_block():
    op = hardy.TruncatedOperator(np.eye(4, dtype=complex), 0)
    with pytest.raises(SafeSubspaceEmpty):
        hardy.isometry_defect(op)


def test_interleaved_extension_basis_action():
    ext = hardy.interleaved_extension(8)
    space = ext.space
    t = ext.T.matrix
    assert np.array_equal(t @ space.basis_vector(1, 3).coeffs, space.basis_vector(2, 3).coeffs)
    assert np.array_equal(t @ space.basis_vector(2, 3).coeffs, space.basis_vector(1, 4).coeffs)
    assert np.array_equal(ext.pi1.matrix @ space.basis_vector(2, 3).coeffs,
                          space.basis_vector(2, 4).coeffs)


def test_multi_hardy_index():
    space = hardy.MultiHardy(2, 4)
    assert [space.index(1, 0), space.index(2, 0), space.index(1, 1)] == [0, 1, 2]
    with pytest.raises(IndexError):
        space.index(3, 0)


def test_operator_json_layout():
    data = hardy.shift_op(3, 1).to_dict()
    assert set(data) == {"n", "safe_dim", "defect", "rows"}
    assert data["rows"][1][:2] == [1.0, 0.0]
    json.dumps(data)


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_shift_composition_associative(a, b, c):
    n = 24
    ops = [hardy.shift_op(n, k) for k in (a, b, c)]
    left = hardy.compose(hardy.compose(ops[0], hardy.adjoint(ops[1])), ops[2])
    right = hardy.compose(ops[0], hardy.compose(hardy.adjoint(ops[1]), ops[2]))
    s = min(left.safe_dim, right.safe_dim)
    assert np.array_equal(left.block(s), right.block(s))


@given(st.floats(0.1, 2.0))
def test_adjoint_involution(mass):
    op = hardy.toeplitz_op(symbols.singular(mass), 16)
    back = hardy.adjoint(hardy.adjoint(op))
    assert np.array_equal(back.matrix, op.matrix)
    assert back.kind == op.kind and back.down == op.down and back.up == op.up


def test_power_iteration_cap():
    m = np.diag([1.0, 1.0 - 1e-13, 0.5]).astype(complex)
    m[0, 1] = 1e-7
    op = hardy.TruncatedOperator(m, 3)
    assert math.isfinite(hardy.op_norm(op))
