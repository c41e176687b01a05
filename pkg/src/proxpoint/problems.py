"""Test-problem generators: 1-d deconvolution, in-line holography, random FBI."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .operators import (
    CircularConvolution1D,
    CircularConvolution2D,
    Composition,
    DenseOperator,
    make_hat_synthesis,
)
from .prox import Problem

__all__ = [
    "DeconvSpec",
    "HologramSpec",
    "FresnelKernel",
    "DEFAULT_SPIKES",
    "deconvolution_kernel",
    "fresnel_kernel",
    "random_particles",
    "make_deconvolution_problem",
    "hologram_operator",
    "make_hologram_problem",
    "make_random_fbi_problem",
]

# (coefficient index, amplitude)
DEFAULT_SPIKES = ((8, 1.0), (22, -0.7), (38, 0.8), (52, 0.5))


@dataclass(frozen=True)
class DeconvSpec:
    grid_size: int = 256
    n_coeffs: int = 64
    kernel_width_param: float = 5.0
    spikes: tuple = DEFAULT_SPIKES
    noise_sigma: float = 0.0
    alpha: float = 1e-3
    kernel_samples: Optional[tuple] = None  # overrides the Lorentzian kernel

    def __post_init__(self):
        if self.grid_size % self.n_coeffs:
            raise ValueError("grid_size must be divisible by n_coeffs")
        for idx, _ in self.spikes:
            if not 0 <= idx < self.n_coeffs:
                raise ValueError(f"spike index {idx} outside [0, {self.n_coeffs})")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.kernel_samples is not None and len(self.kernel_samples) != self.grid_size:
            raise ValueError("kernel_samples must have grid_size entries")


@dataclass(frozen=True)
class HologramSpec:
    image_size: int = 64
    pixel_pitch: float = 10e-6  # meters
    wavelength: float = 630e-9  # meters
    distance: float = 0.25  # meters
    particles: tuple = ()  # (row, col, amplitude) in pixels
    alpha: float = 1e-3
    kernel_radius: Optional[int] = None  # pixels, default image_size // 2
    noise_sigma: float = 0.0

    def __post_init__(self):
        if not self.wavelength > 0 or not self.distance > 0 or not self.pixel_pitch > 0:
            raise ValueError("wavelength, distance and pixel_pitch must be positive")
        for r, c, _ in self.particles:
            if not (0 <= r < self.image_size and 0 <= c < self.image_size):
                raise ValueError(f"particle ({r}, {c}) lies outside the image")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def radius(self):
        return self.image_size // 2 if self.kernel_radius is None else self.kernel_radius

    @property
    def chirp_rate(self):
        """Dimensionless ``pi * pitch**2 / (wavelength * distance)``."""
        return np.pi * self.pixel_pitch**2 / (self.wavelength * self.distance)


@dataclass(frozen=True)
class FresnelKernel:
    samples: np.ndarray  # (2R+1, 2R+1), unit l2 norm, origin at the center
    raw_norm: float  # l2 norm before normalization, in 1/m^2
    chirp_rate: float


def deconvolution_kernel(grid_size, width):
    """``1 / (1 + x^2 / width^2)`` on the signed circular grid, origin at 0."""
    idx = np.arange(grid_size)
    x = np.where(idx < grid_size // 2 + 1, idx, idx - grid_size).astype(np.float64)
    return 1.0 / (1.0 + x**2 / width**2)


def fresnel_kernel(spec):
    """Real part of the Fresnel chirp, ``sin(pi r^2 / (lambda z)) / (lambda z)``.

    Sampled on a ``(2R+1) x (2R+1)`` pixel grid centered on the origin with
    ``r`` measured in meters, then scaled to unit l2 norm.
    """
    R = spec.radius
    offsets = np.arange(-R, R + 1, dtype=np.float64)
    r2 = offsets[:, None] ** 2 + offsets[None, :] ** 2
    lz = spec.wavelength * spec.distance
    raw = np.sin(spec.chirp_rate * r2) / lz
    norm = float(np.linalg.norm(raw))
    return FresnelKernel(raw / norm, norm, spec.chirp_rate)


def random_particles(count, image_size, seed, min_separation=3.0, amplitude=1.0):
    """Draw ``count`` particle positions at least ``min_separation`` apart."""
    rng = np.random.default_rng(seed)
    chosen = []
    attempts = 0
    while len(chosen) < count:
        attempts += 1
        if attempts > 10_000 * max(count, 1):
            raise ValueError("cannot place particles with the requested separation")
        r, c = (int(v) for v in rng.integers(0, image_size, size=2))
        if all((r - a) ** 2 + (c - b) ** 2 >= min_separation**2 for a, b, _ in chosen):
            chosen.append((r, c, float(amplitude)))
    return tuple(chosen)


def make_deconvolution_problem(spec, seed=0):
    """Circular blur of a hat-function synthesis, ``K = A B``.

    Returns
    -------
    problem : Problem
    truth : ndarray
        The sparse coefficient vector built from ``spec.spikes``.
    """
    if spec.kernel_samples is not None:
        kernel = np.asarray(spec.kernel_samples, dtype=np.float64)
    else:
        kernel = deconvolution_kernel(spec.grid_size, spec.kernel_width_param)
    K = Composition(
        CircularConvolution1D(kernel), make_hat_synthesis(spec.n_coeffs, spec.grid_size)
    )
    truth = np.zeros(spec.n_coeffs)
    for idx, amp in spec.spikes:
        truth[idx] += amp
    g = K.matvec(truth)
    if spec.noise_sigma > 0:
        g = g + spec.noise_sigma * np.random.default_rng(seed).standard_normal(g.shape)
    return Problem(K, g, spec.alpha), truth


def hologram_operator(spec):
    """2-d circular convolution with the normalized Fresnel kernel.

    The ``image_size``-square domain is zero-embedded in a grid padded by
    one kernel radius on each side, so the data live on that larger grid.
    """
    kern = fresnel_kernel(spec).samples
    R = spec.radius
    size = spec.image_size + 2 * R
    wrapped = np.zeros((size, size))
    wrapped[: 2 * R + 1, : 2 * R + 1] = kern
    wrapped = np.roll(wrapped, (-R, -R), axis=(0, 1))
    return CircularConvolution2D(
        wrapped, domain_shape=(spec.image_size, spec.image_size), offset=(R, R)
    )


def make_hologram_problem(spec, seed=0):
    """Hologram of point particles in one plane.

    Returns
    -------
    problem : Problem
    truth : ndarray
        ``(image_size, image_size)`` particle image.
    """
    K = hologram_operator(spec)
    truth = np.zeros((spec.image_size, spec.image_size))
    for r, c, amp in spec.particles:
        truth[r, c] += amp
    g = K.matvec(truth.ravel())
    if spec.noise_sigma > 0:
        g = g + spec.noise_sigma * np.random.default_rng(seed).standard_normal(g.shape)
    return Problem(K, g, spec.alpha), truth


def make_random_fbi_problem(m, n, sparsity, alpha, seed=0):
    """Gaussian ``m x n`` operator scaled to ``||K|| <= 1`` and a sparse truth.

    Gaussian matrices are injective on every set of at most ``m`` columns
    with probability one, which is the finite-basis-injectivity property
    the linear convergence results rely on.
    """
    if 2 * sparsity > m:
        raise ValueError("sparsity must not exceed m / 2")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, 2) * (1.0 + 1e-12)
    truth = np.zeros(n)
    support = rng.choice(n, size=sparsity, replace=False)
    truth[support] = rng.choice([-1.0, 1.0], size=sparsity) * rng.uniform(0.5, 1.5, size=sparsity)
    K = DenseOperator(A)
    return Problem(K, K.matvec(truth), alpha), truth
