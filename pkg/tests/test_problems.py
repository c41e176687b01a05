import itertools

import numpy as np
import pytest

from proxpoint import (
    DeconvSpec,
    HologramSpec,
    InnerParams,
    PppParams,
    fresnel_kernel,
    make_deconvolution_problem,
    make_hologram_problem,
    make_random_fbi_problem,
    objective,
    oracle_solve,
    random_particles,
    run_ppp,
)
from proxpoint.problems import DEFAULT_SPIKES, deconvolution_kernel, hologram_operator


def _adjoint_ok(op, seed=0, pairs=20):
    rng = np.random.default_rng(seed)
    for _ in range(pairs):
        u, v = rng.standard_normal(op.domain_dim), rng.standard_normal(op.range_dim)
        if abs(op.apply(u) @ v - u @ op.apply_adjoint(v)) > 1e-10 * (
            1 + np.linalg.norm(u) * np.linalg.norm(v)
        ):
            return False
    return True


# deconvolution ------------------------------------------------------------------


def test_lorentzian_samples():
    k = deconvolution_kernel(256, 5.0)
    assert k[0] == 1.0 and k[5] == 0.5 and k[-5] == 0.5
    assert np.all(k == k[(-np.arange(256)) % 256])  # symmetric on the circle


def test_default_spec():
    spec = DeconvSpec()
    assert (spec.grid_size, spec.n_coeffs, spec.kernel_width_param) == (256, 64, 5.0)
    assert spec.spikes == DEFAULT_SPIKES and len(spec.spikes) == 4
    assert spec.noise_sigma == 0.0


def test_no_spikes_gives_zero():
    p, truth = make_deconvolution_problem(DeconvSpec(spikes=()))
    np.testing.assert_array_equal(p.g, 0.0)
    np.testing.assert_array_equal(oracle_solve(p, 0), 0.0)


def test_noiseless_truth_objective():
    p, truth = make_deconvolution_problem(DeconvSpec())
    assert objective(p, truth) == p.alpha * np.abs(truth).sum()


def test_deconvolution_adjoint():
    p, _ = make_deconvolution_problem(DeconvSpec())
    assert _adjoint_ok(p.K)


def test_noise_is_seeded():
    spec = DeconvSpec(noise_sigma=0.01)
    a, _ = make_deconvolution_problem(spec, seed=3)
    b, _ = make_deconvolution_problem(spec, seed=3)
    c, _ = make_deconvolution_problem(spec, seed=4)
    np.testing.assert_array_equal(a.g, b.g)
    assert not np.array_equal(a.g, c.g)


def test_single_spike_recovered():
    # 32-coefficient instance so the oracle can certify uniqueness
    spec = DeconvSpec(n_coeffs=32, spikes=((13, 1.0),), alpha=1e-4)
    p, truth = make_deconvolution_problem(spec)
    ustar = oracle_solve(p, 3)
    assert np.argmax(np.abs(ustar)) == 13
    inner = InnerParams(method="gcg", sigma=0.9, mu=0.05)
    u, _ = run_ppp(p, params=PppParams(inner=inner, max_outer_iters=100_000))
    assert np.argmax(np.abs(u)) == 13
    assert np.linalg.norm(u - ustar) <= 1e-6


@pytest.mark.parametrize(
    "kwargs",
    [{"n_coeffs": 48}, {"spikes": ((64, 1.0),)}, {"noise_sigma": -1.0}, {"alpha": 0.0},
     {"kernel_samples": (1.0, 0.0)}],
)
def test_deconv_spec_validation(kwargs):
    with pytest.raises(ValueError):
        DeconvSpec(**kwargs)


def test_custom_kernel_samples():
    kernel = np.zeros(256)
    kernel[0] = 1.0
    spec = DeconvSpec(kernel_samples=tuple(kernel))
    p, truth = make_deconvolution_problem(spec)
    np.testing.assert_allclose(p.g[8 * 4], truth[8], atol=1e-12)  # node 8 of spacing 4


# holography -------------------------------------------------------------------------


def test_fresnel_kernel_formula():
    spec = HologramSpec(image_size=16)
    fk = fresnel_kernel(spec)
    R = spec.radius
    assert fk.samples[R, R] == 0.0
    assert np.linalg.norm(fk.samples) == pytest.approx(1.0, abs=1e-15)
    # raw value at (1, 2) pixels
    r2 = (1**2 + 2**2) * spec.pixel_pitch**2
    lz = spec.wavelength * spec.distance
    raw = np.sin(np.pi * r2 / lz) / lz
    assert fk.samples[R + 1, R + 2] * fk.raw_norm == pytest.approx(raw, rel=1e-12)
    assert fk.chirp_rate == pytest.approx(np.pi * spec.pixel_pitch**2 / lz)


def test_fresnel_quarter_period():
    # choose the pitch so that r^2 = lambda z / 2 at one pixel offset
    lz = 630e-9 * 0.25
    spec = HologramSpec(image_size=4, pixel_pitch=np.sqrt(lz / 2))
    fk = fresnel_kernel(spec)
    R = spec.radius
    assert fk.samples[R, R + 1] * fk.raw_norm == pytest.approx(1.0 / lz, rel=1e-12)


def test_fresnel_symmetry():
    s = fresnel_kernel(HologramSpec(image_size=20)).samples
    np.testing.assert_array_equal(s, s.T)
    np.testing.assert_array_equal(s, s[::-1, :])
    np.testing.assert_array_equal(s, s[:, ::-1])


def test_hologram_zero_particles():
    p, truth = make_hologram_problem(HologramSpec(image_size=16))
    np.testing.assert_array_equal(p.g, 0.0)
    assert truth.shape == (16, 16)


def test_single_centered_particle_reproduces_kernel():
    spec = HologramSpec(image_size=16, particles=((8, 8, 2.5),))
    p, _ = make_hologram_problem(spec)
    R = spec.radius
    grid = p.g.reshape(16 + 2 * R, 16 + 2 * R)
    kern = fresnel_kernel(spec).samples
    # the particle sits at padded position (8 + R, 8 + R)
    window = grid[8 : 8 + 2 * R + 1, 8 : 8 + 2 * R + 1]
    np.testing.assert_allclose(window, 2.5 * kern, atol=1e-12)


def test_hologram_adjoint():
    op = hologram_operator(HologramSpec(image_size=20))
    assert _adjoint_ok(op)


def test_hologram_spec_validation():
    with pytest.raises(ValueError):
        HologramSpec(wavelength=0.0)
    with pytest.raises(ValueError):
        HologramSpec(distance=-1.0)
    with pytest.raises(ValueError):
        HologramSpec(image_size=8, particles=((8, 0, 1.0),))


def test_dimensionless_group_controls_kernel():
    # scaling pitch^2 and lambda*z together leaves the normalized kernel unchanged
    a = fresnel_kernel(HologramSpec(image_size=12))
    b = fresnel_kernel(HologramSpec(image_size=12, pixel_pitch=20e-6, distance=1.0))
    np.testing.assert_allclose(a.samples, b.samples, atol=1e-15)


def test_random_particles():
    parts = random_particles(20, 64, seed=0)
    assert len(parts) == 20
    assert parts == random_particles(20, 64, seed=0)
    for (r1, c1, _), (r2, c2, _) in itertools.combinations(parts, 2):
        assert (r1 - r2) ** 2 + (c1 - c2) ** 2 >= 9
    with pytest.raises(ValueError):
        random_particles(50, 4, seed=0)


# random FBI -----------------------------------------------------------------------------


def test_fbi_zero_sparsity():
    p, truth = make_random_fbi_problem(10, 20, 0, 0.1, seed=0)
    np.testing.assert_array_equal(truth, 0.0)
    np.testing.assert_array_equal(p.g, 0.0)


def test_fbi_reproducible_and_normalized():
    a, ta = make_random_fbi_problem(12, 30, 4, 0.1, seed=5)
    b, tb = make_random_fbi_problem(12, 30, 4, 0.1, seed=5)
    np.testing.assert_array_equal(a.K.todense(), b.K.todense())
    np.testing.assert_array_equal(a.g, b.g)
    np.testing.assert_array_equal(ta, tb)
    assert np.linalg.norm(a.K.todense(), 2) <= 1.0
    assert np.count_nonzero(ta) == 4


def test_fbi_column_triples_full_rank():
    p, _ = make_random_fbi_problem(20, 40, 3, 0.1, seed=0)
    A = p.K.todense()
    rng = np.random.default_rng(1)
    for _ in range(50):
        cols = rng.choice(40, size=3, replace=False)
        assert np.linalg.svd(A[:, cols], compute_uv=False).min() > 1e-8


def test_fbi_sparsity_limit():
    with pytest.raises(ValueError):
        make_random_fbi_problem(4, 10, 3, 0.1)
