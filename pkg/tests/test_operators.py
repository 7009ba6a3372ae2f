"""Operator-layer tests.

The noiselet and wavelet checks compare the fast implementations against
slow, explicitly-constructed reference matrices built straight from the
defining recursions, so the two sides share no code.
"""

import math

import numpy as np
import pytest

from sparsedyn.operators import (
    IdentityOperator,
    MatrixOperator,
    MeasurementFrame,
    NoiseletOperator,
    StackedOperator,
    WaveletConfig,
    dwt_forward,
    dwt_inverse,
    gaussian_sensing,
    noiselet_operator,
    wavelet_synthesis_operator,
)

C0 = (1.0 - 1.0j) / 2.0
C1 = (1.0 + 1.0j) / 2.0


def adjoint_gap(op, rng, trials=100):
    """Max relative defect of <Ax, u> == <x, A'u> over random pairs."""
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(op.in_dim)
        u = rng.standard_normal(op.out_dim)
        lhs = float(np.dot(op.apply(x), u))
        rhs = float(np.dot(x, op.adjoint(u)))
        scale = max(abs(lhs), abs(rhs), 1e-30)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def reference_complex_noiselet(n):
    # Direct row recursion: rows 2r and 2r+1 of the size-2m matrix come
    # from row r of the size-m matrix with stage coefficients C0, C1.
    if n == 1:
        return np.array([[1.0 + 0.0j]])
    prev = reference_complex_noiselet(n // 2)
    rows = []
    for r in prev:
        rows.append(np.concatenate((C0 * r, C1 * r)))
        rows.append(np.concatenate((C1 * r, C0 * r)))
    return np.array(rows)


def reference_real_noiselet(n):
    if n == 1:
        return np.eye(1)
    T = reference_complex_noiselet(n)
    out = np.empty((n, n))
    out[0::2] = math.sqrt(2.0) * T[: n // 2].real
    out[1::2] = math.sqrt(2.0) * T[: n // 2].imag
    return out


def reference_analysis_matrix(s, h, g):
    # One decimation stage as an explicit s x s matrix, periodic wrap.
    A = np.zeros((s, s))
    for i in range(s // 2):
        for k in range(len(h)):
            A[i, (2 * i + k) % s] += h[k]
            A[s // 2 + i, (2 * i + k) % s] += g[k]
    return A


def qmf(h):
    g = np.asarray(h)[::-1].copy()
    g[1::2] *= -1.0
    return g


# ---------------------------------------------------------------------------
# base operator machinery
# ---------------------------------------------------------------------------


def test_matrix_operator_roundtrip_and_materialize():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((4, 6))
    op = MatrixOperator(A)
    x = rng.standard_normal(6)
    assert np.allclose(op.apply(x), A @ x)
    assert np.allclose(op.adjoint(A @ x), A.T @ (A @ x))
    assert np.array_equal(op.materialize(), A)


def test_operator_rejects_bad_shapes():
    op = MatrixOperator(np.eye(3))
    with pytest.raises(ValueError):
        op.apply(np.zeros(4))
    with pytest.raises(ValueError):
        op.adjoint(np.zeros((3, 1)))
    with pytest.raises(ValueError):
        LinearOperatorBad = MatrixOperator(np.zeros((3, 0)))  # noqa: F841


def test_adjoint_consistency_dense():
    rng = np.random.default_rng(1)
    op = MatrixOperator(rng.standard_normal((4, 6)))
    assert adjoint_gap(op, rng, trials=100) < 1e-10


def test_composition_matches_matrix_product():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((5, 7))
    B = rng.standard_normal((7, 4))
    comp = MatrixOperator(A) @ MatrixOperator(B)
    assert comp.in_dim == 4 and comp.out_dim == 5
    assert np.allclose(comp.materialize(), A @ B, atol=1e-12)
    assert adjoint_gap(comp, rng) < 1e-10
    with pytest.raises(ValueError):
        MatrixOperator(A) @ MatrixOperator(A)


def test_identity_composition_shortcut():
    rng = np.random.default_rng(3)
    op = MatrixOperator(rng.standard_normal((3, 5)))
    assert (op @ IdentityOperator(5)) is op
    assert (IdentityOperator(3) @ op) is op


def test_stacked_operator():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((2, 5))
    B = rng.standard_normal((3, 5))
    st = StackedOperator([MatrixOperator(A), MatrixOperator(B)], scales=[1.0, 2.0])
    ref = np.vstack((A, 2.0 * B))
    assert np.allclose(st.materialize(), ref, atol=1e-12)
    assert adjoint_gap(st, rng) < 1e-10


# ---------------------------------------------------------------------------
# gaussian sensing
# ---------------------------------------------------------------------------


def test_gaussian_sensing_unit_columns():
    rng = np.random.default_rng(5)
    op = gaussian_sensing(70, 500, rng)
    norms = np.linalg.norm(op.matrix, axis=0)
    assert np.max(np.abs(norms - 1.0)) < 1e-12


def test_gaussian_sensing_scalar_case():
    rng = np.random.default_rng(6)
    op = gaussian_sensing(1, 1, rng)
    assert abs(abs(op.matrix[0, 0]) - 1.0) < 1e-12


def test_gaussian_sensing_rejects_zero_dims():
    rng = np.random.default_rng(7)
    with pytest.raises(ValueError):
        gaussian_sensing(0, 5, rng)
    with pytest.raises(ValueError):
        gaussian_sensing(5, 0, rng)


def test_gaussian_sensing_deterministic_per_seed():
    a = gaussian_sensing(8, 12, np.random.default_rng(42)).matrix
    b = gaussian_sensing(8, 12, np.random.default_rng(42)).matrix
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# noiselets
# ---------------------------------------------------------------------------


def test_noiselet_trivial_case_identity():
    op = noiselet_operator(1, [0])
    assert np.allclose(op.materialize(), np.eye(1))


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_noiselet_matches_reference_construction(n):
    op = noiselet_operator(n, np.arange(n))
    assert np.max(np.abs(op.materialize() - reference_real_noiselet(n))) < 1e-12


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_noiselet_full_transform_orthonormal(n):
    T = noiselet_operator(n, np.arange(n)).materialize()
    assert np.max(np.abs(T.T @ T - np.eye(n))) < 1e-12


def test_noiselet_subset_selects_rows():
    full = noiselet_operator(8, np.arange(8)).materialize()
    sub = noiselet_operator(8, [0, 3, 5])
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = rng.standard_normal(8)
        assert np.allclose(sub.apply(x), full[[0, 3, 5]] @ x, atol=1e-12)


def test_noiselet_adjoint_consistency():
    rng = np.random.default_rng(9)
    op = noiselet_operator(64, num_rows=20, rng=rng)
    assert adjoint_gap(op, rng, trials=100) < 1e-10


def test_noiselet_random_subset_is_sorted_unique():
    rng = np.random.default_rng(10)
    op = noiselet_operator(256, num_rows=100, rng=rng)
    assert op.out_dim == 100
    assert np.all(np.diff(op.rows) > 0)


def test_noiselet_rejects_bad_inputs():
    with pytest.raises(ValueError):
        noiselet_operator(12, [0, 1])
    with pytest.raises(ValueError):
        noiselet_operator(8, [0, 0, 1])
    with pytest.raises(ValueError):
        noiselet_operator(8, [0, 8])
    with pytest.raises(ValueError):
        noiselet_operator(8, [])
    with pytest.raises(ValueError):
        noiselet_operator(8)


# ---------------------------------------------------------------------------
# wavelets
# ---------------------------------------------------------------------------


def test_wavelet_config_validation():
    with pytest.raises(ValueError):
        WaveletConfig(size=12, levels=1)
    with pytest.raises(ValueError):
        WaveletConfig(size=16, levels=1, taps=5)
    with pytest.raises(ValueError):
        WaveletConfig(size=16, levels=0)
    with pytest.raises(ValueError):
        WaveletConfig(size=16, levels=4, taps=4)  # stage of length 2 < 4 taps
    with pytest.raises(ValueError):
        WaveletConfig(size=16, levels=1, ndim=3)
    WaveletConfig(size=16, levels=3, taps=4)  # 16 -> 8 -> 4 all >= taps


def test_dwt_rejects_shape_mismatch():
    cfg = WaveletConfig(size=8, levels=1, taps=2)
    with pytest.raises(ValueError):
        dwt_forward(np.zeros(16), cfg)
    cfg2 = WaveletConfig(size=8, levels=1, taps=2, ndim=2)
    with pytest.raises(ValueError):
        dwt_forward(np.zeros(8), cfg2)


@pytest.mark.parametrize("taps", [2, 4, 6, 8])
def test_dwt_roundtrip_1d(taps):
    cfg = WaveletConfig(size=64, levels=3, taps=taps)
    rng = np.random.default_rng(11)
    x = rng.standard_normal(64)
    back = dwt_inverse(dwt_forward(x, cfg), cfg)
    assert np.max(np.abs(back - x)) < 1e-10


@pytest.mark.parametrize("taps", [2, 4, 6, 8])
def test_dwt_roundtrip_2d(taps):
    cfg = WaveletConfig(size=16, levels=2, taps=taps, ndim=2)
    rng = np.random.default_rng(12)
    x = rng.standard_normal((16, 16))
    back = dwt_inverse(dwt_forward(x, cfg), cfg)
    assert np.max(np.abs(back - x)) < 1e-10


def test_dwt_energy_preservation():
    rng = np.random.default_rng(13)
    cfg = WaveletConfig(size=128, levels=4, taps=4)
    for _ in range(10):
        x = rng.standard_normal(128)
        z = dwt_forward(x, cfg)
        assert abs(np.linalg.norm(z) - np.linalg.norm(x)) < 1e-10 * np.linalg.norm(x)


def test_dwt_constant_vector_has_zero_details():
    cfg = WaveletConfig(size=32, levels=1, taps=4)
    z = dwt_forward(np.full(32, 3.7), cfg)
    assert np.max(np.abs(z[16:])) < 1e-12


def test_haar_single_coarse_coefficient_synthesizes_constant():
    # Unit coefficient in the coarsest slot, two Haar levels, length 4:
    # synthesis spreads it to a constant with value 1/2.
    cfg = WaveletConfig(size=4, levels=2, taps=2)
    z = np.zeros(4)
    z[0] = 1.0
    assert np.allclose(dwt_inverse(z, cfg), np.full(4, 0.5), atol=1e-14)


def test_dwt_zero_maps_to_zero():
    cfg = WaveletConfig(size=16, levels=2, taps=4)
    assert np.all(dwt_forward(np.zeros(16), cfg) == 0.0)


def test_dwt_matches_staged_reference_matrices_1d():
    # Multilevel analysis equals the product of explicit one-stage
    # periodic filter matrices applied to successive approximation blocks.
    cfg = WaveletConfig(size=16, levels=2, taps=4)
    h = np.array([1.0 + math.sqrt(3), 3.0 + math.sqrt(3), 3.0 - math.sqrt(3), 1.0 - math.sqrt(3)])
    h /= 4.0 * math.sqrt(2.0)
    g = qmf(h)
    rng = np.random.default_rng(14)
    x = rng.standard_normal(16)
    stage1 = reference_analysis_matrix(16, h, g)
    ref = stage1 @ x
    stage2 = reference_analysis_matrix(8, h, g)
    ref[:8] = stage2 @ ref[:8]
    assert np.max(np.abs(dwt_forward(x, cfg) - ref)) < 1e-12


def test_wavelet_synthesis_operator_orthonormal_and_adjoint():
    cfg = WaveletConfig(size=16, levels=2, taps=4)
    W = wavelet_synthesis_operator(cfg)
    M = W.materialize()
    assert np.max(np.abs(M.T @ M - np.eye(16))) < 1e-10
    rng = np.random.default_rng(15)
    assert adjoint_gap(W, rng, trials=100) < 1e-10


def test_wavelet_synthesis_operator_2d_flat_roundtrip():
    cfg = WaveletConfig(size=8, levels=2, taps=2, ndim=2)
    W = wavelet_synthesis_operator(cfg)
    rng = np.random.default_rng(16)
    z = rng.standard_normal(64)
    assert np.max(np.abs(W.adjoint(W.apply(z)) - z)) < 1e-10


def test_compose_sensing_with_synthesis():
    cfg = WaveletConfig(size=16, levels=2, taps=4)
    W = wavelet_synthesis_operator(cfg)
    rng = np.random.default_rng(17)
    phi = gaussian_sensing(6, 16, rng)
    A = phi @ W
    assert np.allclose(A.materialize(), phi.matrix @ W.materialize(), atol=1e-12)
    assert adjoint_gap(A, rng) < 1e-10


# ---------------------------------------------------------------------------
# measurement frames
# ---------------------------------------------------------------------------


def test_measurement_frame_validates_length():
    rng = np.random.default_rng(18)
    op = gaussian_sensing(4, 9, rng)
    MeasurementFrame(op, np.zeros(4), 0.1)
    with pytest.raises(ValueError):
        MeasurementFrame(op, np.zeros(5), 0.1)
    with pytest.raises(ValueError):
        MeasurementFrame(op, np.zeros(4), -1.0)
