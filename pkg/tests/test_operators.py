import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxpoint import (
    CircularConvolution1D,
    CircularConvolution2D,
    Composition,
    DenseOperator,
    DimensionError,
    HatSynthesis,
    ScaledOperator,
    estimate_norm,
    identity,
    make_hat_synthesis,
)
from proxpoint.operators import load_dense_csv, load_vector_csv
from proxpoint.problems import DeconvSpec, HologramSpec, hologram_operator


def _all_kinds():
    rng = np.random.default_rng(7)
    dense = DenseOperator(rng.standard_normal((6, 4)))
    conv1 = CircularConvolution1D(rng.standard_normal(16))
    conv1d = CircularConvolution1D(rng.standard_normal(16), method="direct")
    conv2 = CircularConvolution2D(rng.standard_normal((9, 7)), domain_shape=(5, 4))
    conv2_full = CircularConvolution2D(rng.standard_normal((6, 6)))
    hats = make_hat_synthesis(4, 16)
    comp = Composition(conv1, hats)
    scaled = ScaledOperator(dense, 0.3)
    holo = hologram_operator(HologramSpec(image_size=12, kernel_radius=4))
    return {
        "dense": dense,
        "circular_conv_1d": conv1,
        "circular_conv_1d_direct": conv1d,
        "circular_conv_2d": conv2,
        "circular_conv_2d_full": conv2_full,
        "hat_synthesis": hats,
        "composition": comp,
        "scaled": scaled,
        "hologram": holo,
    }


KINDS = _all_kinds()


def test_identity_apply():
    np.testing.assert_array_equal(identity(3).apply([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])


def test_delta_kernel_is_identity(rng):
    kernel = np.zeros(10)
    kernel[0] = 1.0
    u = rng.standard_normal(10)
    np.testing.assert_allclose(CircularConvolution1D(kernel).apply(u), u, atol=1e-14)


def test_small_cyclic_convolution():
    op = CircularConvolution1D([1.0, 1.0, 0.0, 0.0])
    np.testing.assert_allclose(op.apply([1.0, 0.0, 0.0, 0.0]), [1.0, 1.0, 0.0, 0.0], atol=1e-15)
    # the direct sum must agree exactly on this case as well
    direct = CircularConvolution1D([1.0, 1.0, 0.0, 0.0], method="direct")
    np.testing.assert_array_equal(direct.apply([1.0, 0.0, 0.0, 0.0]), [1.0, 1.0, 0.0, 0.0])


def test_cyclic_convolution_wraps():
    # u = e_3 is shifted past the end back to index 0
    op = CircularConvolution1D([1.0, 1.0, 0.0, 0.0], method="direct")
    np.testing.assert_array_equal(op.apply([0.0, 0.0, 0.0, 1.0]), [1.0, 0.0, 0.0, 1.0])


def test_dense_adjoint_example():
    op = DenseOperator([[0.0, 1.0], [2.0, 0.0]])
    np.testing.assert_array_equal(op.apply_adjoint([1.0, 1.0]), [2.0, 1.0])


def test_symmetric_kernel_is_self_adjoint(rng):
    half = rng.standard_normal(9)
    kernel = np.concatenate([half, half[:0:-1]])  # k[i] == k[-i mod n]
    op = CircularConvolution1D(kernel)
    u = rng.standard_normal(op.domain_dim)
    np.testing.assert_allclose(op.apply(u), op.apply_adjoint(u), atol=1e-12)


def test_dense_inner_product(rng):
    A = rng.standard_normal((6, 4))
    op = DenseOperator(A)
    u, v = rng.standard_normal(4), rng.standard_normal(6)
    assert abs(op.apply(u) @ v - u @ op.apply_adjoint(v)) <= 1e-10


@pytest.mark.parametrize("name", sorted(KINDS))
def test_adjoint_consistency_200_pairs(name):
    op = KINDS[name]
    rng = np.random.default_rng(2024)
    for _ in range(200):
        u = rng.standard_normal(op.domain_dim)
        v = rng.standard_normal(op.range_dim)
        lhs = op.apply(u) @ v
        rhs = u @ op.apply_adjoint(v)
        assert abs(lhs - rhs) <= 1e-10 * (1 + np.linalg.norm(u) * np.linalg.norm(v))


@pytest.mark.parametrize("name", sorted(KINDS))
def test_linearity(name):
    op = KINDS[name]
    rng = np.random.default_rng(99)
    u, w = rng.standard_normal((2, op.domain_dim))
    a, b = 1.7, -0.4
    lhs = op.apply(a * u + b * w)
    rhs = a * op.apply(u) + b * op.apply(w)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.linalg.norm(rhs))


@pytest.mark.parametrize("name", sorted(KINDS))
def test_todense_matches_apply(name):
    op = KINDS[name]
    rng = np.random.default_rng(5)
    u = rng.standard_normal(op.domain_dim)
    np.testing.assert_allclose(op.todense() @ u, op.apply(u), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 7, 64, 255, 256])
def test_fft_matches_direct_sum(n):
    rng = np.random.default_rng(n)
    kernel = rng.standard_normal(n)
    fast, slow = CircularConvolution1D(kernel), CircularConvolution1D(kernel, method="direct")
    for _ in range(5):
        u, v = rng.standard_normal((2, n))
        ref = slow.apply(u)
        assert np.linalg.norm(fast.apply(u) - ref) <= 1e-10 * max(np.linalg.norm(ref), 1e-300)
        ref = slow.apply_adjoint(v)
        assert np.linalg.norm(fast.apply_adjoint(v) - ref) <= 1e-10 * np.linalg.norm(ref)


def test_fft_against_explicit_sum(rng):
    # an independent loop over the defining sum
    n = 12
    k, u = rng.standard_normal((2, n))
    expected = np.array([sum(k[(i - j) % n] * u[j] for j in range(n)) for i in range(n)])
    np.testing.assert_allclose(CircularConvolution1D(k).apply(u), expected, atol=1e-12)


def test_2d_convolution_against_explicit_sum(rng):
    kernel = rng.standard_normal((5, 6))
    u = rng.standard_normal((3, 4))
    op = CircularConvolution2D(kernel, domain_shape=(3, 4), offset=(1, 2))
    full = np.zeros((5, 6))
    full[1:4, 2:6] = u
    expected = np.zeros((5, 6))
    for i in range(5):
        for j in range(6):
            expected[i, j] = sum(
                kernel[(i - a) % 5, (j - b) % 6] * full[a, b] for a in range(5) for b in range(6)
            )
    np.testing.assert_allclose(op.apply(u.ravel()), expected.ravel(), atol=1e-12)


def test_composition_dims_and_adjoint(rng):
    A = DenseOperator(rng.standard_normal((3, 5)))
    B = DenseOperator(rng.standard_normal((5, 2)))
    C = Composition(A, B)
    assert (C.domain_dim, C.range_dim) == (2, 3)
    v = rng.standard_normal(3)
    np.testing.assert_allclose(C.apply_adjoint(v), B.apply_adjoint(A.apply_adjoint(v)))
    assert C.kind == "composition"
    assert (A @ B).shape == (3, 2)


def test_composition_mismatch():
    with pytest.raises(DimensionError):
        Composition(DenseOperator(np.ones((2, 3))), DenseOperator(np.ones((4, 2))))


def test_dimension_error_names_lengths():
    with pytest.raises(DimensionError, match="expected length 3, got 2"):
        identity(3).apply([1.0, 2.0])
    with pytest.raises(DimensionError):
        DenseOperator(np.ones((2, 3))).apply_adjoint(np.ones(3))


def test_non_finite_input_rejected():
    with pytest.raises(ValueError):
        identity(2).apply([1.0, np.nan])
    with pytest.raises(ValueError):
        identity(2).apply_adjoint([np.inf, 0.0])


def test_hat_column_example():
    B = make_hat_synthesis(2, 8)
    np.testing.assert_allclose(B.todense()[:, 0], [1, 0.5, 0, 0, 0, 0, 0, 0.5])
    np.testing.assert_allclose(B.todense()[:, 1], [0, 0, 0, 0.5, 1, 0.5, 0, 0])


def test_hat_full_resolution_is_identity():
    B = make_hat_synthesis(6, 6)
    for j in range(6):
        e = np.zeros(6)
        e[j] = 1.0
        out = B.apply(e)
        assert out[j] == 1.0 and np.argmax(out) == j
    np.testing.assert_allclose(B.todense(), np.eye(6))


def test_hat_zero_and_divisibility():
    B = make_hat_synthesis(4, 16)
    np.testing.assert_array_equal(B.apply(np.zeros(4)), np.zeros(16))
    assert isinstance(B, HatSynthesis) and B.kind == "hat_synthesis"
    with pytest.raises(ValueError):
        make_hat_synthesis(3, 16)
    with pytest.raises(ValueError):
        make_hat_synthesis(32, 16)


def test_estimate_norm_identity():
    est = estimate_norm(identity(5))
    assert est.converged and abs(est.value - 1.0) <= 1e-9


def test_estimate_norm_diagonal():
    est = estimate_norm(DenseOperator(np.diag([3.0, 1.0])))
    assert abs(est.value - 3.0) <= 1e-6


def test_estimate_norm_matches_svd(rng):
    A = rng.standard_normal((8, 8))
    # independent oracle: eigen-decomposition of A^T A
    true = np.sqrt(np.linalg.eigvalsh(A.T @ A).max())
    est = estimate_norm(DenseOperator(A), max_iters=10_000, tol=1e-14)
    assert est.converged
    assert abs(est.value - true) <= 1e-6 * true
    assert est.value <= true * (1 + 1e-6)


@given(st.integers(0, 2**31 - 1), st.integers(1, 9), st.integers(1, 9))
def test_estimate_norm_bounds(seed, m, n):
    A = np.random.default_rng(seed).standard_normal((m, n))
    true = np.linalg.norm(A, 2)
    est = estimate_norm(DenseOperator(A), max_iters=20_000)
    assert est.value >= 0
    assert est.value <= true * (1 + 1e-6)
    if est.converged:
        assert est.value >= true * (1 - 1e-3)


def test_estimate_norm_zero_operator():
    est = estimate_norm(DenseOperator(np.zeros((3, 4))))
    assert est.value == 0.0 and est.converged


def test_estimate_norm_circulant_matches_fourier():
    spec = DeconvSpec()
    from proxpoint.problems import deconvolution_kernel

    op = CircularConvolution1D(deconvolution_kernel(spec.grid_size, 5.0))
    est = estimate_norm(op)
    assert abs(est.value - op.spectral_norm()) <= 1e-6 * op.spectral_norm()


def test_estimate_norm_argument_checks():
    with pytest.raises(ValueError):
        estimate_norm(identity(2), max_iters=0)
    with pytest.raises(ValueError):
        estimate_norm(identity(2), tol=0.0)


def test_operator_is_immutable():
    op = CircularConvolution1D([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        op.kernel[0] = 5.0


def test_scipy_adapter(rng):
    op = KINDS["composition"]
    lo = op.to_scipy()
    u = rng.standard_normal(op.domain_dim)
    v = rng.standard_normal(op.range_dim)
    np.testing.assert_allclose(lo.matvec(u), op.apply(u))
    np.testing.assert_allclose(lo.rmatvec(v), op.apply_adjoint(v))


def test_csv_loaders(tmp_path):
    path = tmp_path / "A.csv"
    path.write_text("1,2,3\n4,5,6\n")
    op = load_dense_csv(path)
    assert op.shape == (2, 3)
    np.testing.assert_array_equal(op.apply([1.0, 0.0, 0.0]), [1.0, 4.0])
    vec = tmp_path / "g.csv"
    vec.write_text("1.5\n-2\n")
    np.testing.assert_array_equal(load_vector_csv(vec), [1.5, -2.0])
