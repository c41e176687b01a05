"""Linear operators K: R^n -> R^m with forward and adjoint application.

Every operator acts on flat float64 vectors. Two-dimensional operators
reshape internally, so solvers never need to know about image shapes.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "DimensionError",
    "LinearOperator",
    "DenseOperator",
    "CircularConvolution1D",
    "CircularConvolution2D",
    "Composition",
    "ScaledOperator",
    "HatSynthesis",
    "NormEstimate",
    "identity",
    "estimate_norm",
    "make_hat_synthesis",
    "load_dense_csv",
    "load_vector_csv",
]


class DimensionError(ValueError):
    """Raised when a vector does not have the length an operator expects."""

    def __init__(self, what, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected length {expected}, got {actual}")


def _check_input(x, size, what):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        x = x.ravel()
    if x.shape[0] != size:
        raise DimensionError(what, size, x.shape[0])
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{what}: input contains non-finite entries")
    return x


class LinearOperator:
    """Base class for a bounded linear map between coefficient and data space.

    Subclasses implement ``matvec`` and ``rmatvec`` on flat float64 arrays
    without any checking; ``apply`` and ``apply_adjoint`` wrap them with
    dimension and finiteness validation. Hot loops call the unchecked pair.
    Operators are immutable once built.
    """

    kind = "abstract"

    def __init__(self, domain_dim, range_dim):
        if domain_dim < 1 or range_dim < 1:
            raise ValueError("operator dimensions must be positive")
        self.domain_dim = int(domain_dim)
        self.range_dim = int(range_dim)

    @property
    def shape(self):
        return (self.range_dim, self.domain_dim)

    def matvec(self, u):
        raise NotImplementedError

    def rmatvec(self, v):
        raise NotImplementedError

    def apply(self, u):
        """Return ``K u`` after validating ``u``."""
        return self.matvec(_check_input(u, self.domain_dim, f"{self.kind}.apply"))

    def apply_adjoint(self, v):
        """Return ``K* v`` after validating ``v``."""
        return self.rmatvec(
            _check_input(v, self.range_dim, f"{self.kind}.apply_adjoint")
        )

    def todense(self):
        """Materialize the operator column by column (small sizes only)."""
        cols = np.eye(self.domain_dim)
        return np.column_stack([self.matvec(c) for c in cols])

    def to_scipy(self):
        """Wrap as a :class:`scipy.sparse.linalg.LinearOperator`."""
        from scipy.sparse.linalg import LinearOperator as _SciPyOp

        return _SciPyOp(
            self.shape,
            matvec=self.matvec,
            rmatvec=self.rmatvec,
            dtype=np.float64,
        )

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            return Composition(self, other)
        return self.apply(other)

    def __mul__(self, scalar):
        return ScaledOperator(self, scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"<{type(self).__name__} {self.range_dim}x{self.domain_dim}>"


class DenseOperator(LinearOperator):
    kind = "dense"

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("dense operator needs a 2-d matrix")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("dense operator matrix contains non-finite entries")
        matrix.setflags(write=False)
        self.matrix = matrix
        super().__init__(matrix.shape[1], matrix.shape[0])

    def matvec(self, u):
        return self.matrix @ u

    def rmatvec(self, v):
        return self.matrix.T @ v

    def todense(self):
        return self.matrix.copy()


def identity(n):
    return DenseOperator(np.eye(n))


class CircularConvolution1D(LinearOperator):
    """Cyclic convolution ``(k * u)_i = sum_j k_{(i-j) mod n} u_j``.

    ``kernel`` is indexed with its origin at position 0 (wrapped layout).
    ``method='direct'`` evaluates the defining sum and exists mostly as a
    cross-check for the FFT path.
    """

    kind = "circular_conv_1d"

    def __init__(self, kernel, method="fft"):
        kernel = np.array(kernel, dtype=np.float64).ravel()
        if method not in ("fft", "direct"):
            raise ValueError(f"unknown convolution method {method!r}")
        kernel.setflags(write=False)
        self.kernel = kernel
        self.method = method
        n = kernel.shape[0]
        self._kernel_hat = np.fft.rfft(kernel)
        # index matrix (i - j) mod n for the direct sum
        self._circ = None
        if method == "direct":
            idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
            self._circ = kernel[idx]
        super().__init__(n, n)

    def matvec(self, u):
        if self._circ is not None:
            return self._circ @ u
        return np.fft.irfft(np.fft.rfft(u) * self._kernel_hat, n=self.domain_dim)

    def rmatvec(self, v):
        if self._circ is not None:
            return self._circ.T @ v
        return np.fft.irfft(
            np.fft.rfft(v) * np.conj(self._kernel_hat), n=self.domain_dim
        )

    def spectral_norm(self):
        """Exact norm: the largest Fourier magnitude of the kernel."""
        return float(np.max(np.abs(self._kernel_hat)))


class CircularConvolution2D(LinearOperator):
    """Two-dimensional cyclic convolution on a ``(rows, cols)`` grid.

    ``kernel`` has the grid shape with its origin at ``[0, 0]``. When
    ``domain_shape`` is smaller than the grid, inputs are zero-embedded
    at ``offset`` (centered by default) before convolving, so a margin of
    one kernel radius keeps the cyclic wrap-around away from the data.
    The adjoint is correlation followed by cropping.
    """

    kind = "circular_conv_2d"

    def __init__(self, kernel, domain_shape=None, offset=None):
        kernel = np.array(kernel, dtype=np.float64)
        if kernel.ndim != 2:
            raise ValueError("2-d convolution needs a 2-d kernel")
        kernel.setflags(write=False)
        self.kernel = kernel
        self.grid_shape = kernel.shape
        if domain_shape is None:
            domain_shape = kernel.shape
        domain_shape = tuple(int(s) for s in domain_shape)
        if any(d > g for d, g in zip(domain_shape, self.grid_shape)):
            raise ValueError("domain_shape must fit inside the kernel grid")
        if offset is None:
            offset = tuple((g - d) // 2 for d, g in zip(domain_shape, self.grid_shape))
        self.domain_shape = domain_shape
        self.offset = tuple(int(o) for o in offset)
        self._kernel_hat = np.fft.rfft2(kernel)
        self._window = (
            slice(self.offset[0], self.offset[0] + domain_shape[0]),
            slice(self.offset[1], self.offset[1] + domain_shape[1]),
        )
        super().__init__(int(np.prod(domain_shape)), int(np.prod(self.grid_shape)))

    def _embed(self, u):
        if self.domain_shape == self.grid_shape:
            return u.reshape(self.grid_shape)
        full = np.zeros(self.grid_shape)
        full[self._window] = u.reshape(self.domain_shape)
        return full

    def matvec(self, u):
        out = np.fft.irfft2(
            np.fft.rfft2(self._embed(u)) * self._kernel_hat, s=self.grid_shape
        )
        return out.ravel()

    def rmatvec(self, v):
        out = np.fft.irfft2(
            np.fft.rfft2(v.reshape(self.grid_shape)) * np.conj(self._kernel_hat),
            s=self.grid_shape,
        )
        return out[self._window].ravel()


class Composition(LinearOperator):
    """``outer @ inner``: apply ``inner`` first."""

    kind = "composition"

    def __init__(self, outer, inner):
        if outer.domain_dim != inner.range_dim:
            raise DimensionError(
                "composition", outer.domain_dim, inner.range_dim
            )
        self.outer = outer
        self.inner = inner
        super().__init__(inner.domain_dim, outer.range_dim)

    def matvec(self, u):
        return self.outer.matvec(self.inner.matvec(u))

    def rmatvec(self, v):
        return self.inner.rmatvec(self.outer.rmatvec(v))


class ScaledOperator(LinearOperator):
    kind = "scaled"

    def __init__(self, base, scale):
        self.base = base
        self.scale = float(scale)
        super().__init__(base.domain_dim, base.range_dim)

    def matvec(self, u):
        return self.scale * self.base.matvec(u)

    def rmatvec(self, v):
        return self.scale * self.base.rmatvec(v)


class HatSynthesis(LinearOperator):
    """Synthesis with piecewise-linear tents on a circular grid.

    Coefficient ``j`` contributes a tent of peak 1 centered at grid node
    ``j * spacing`` with ``spacing = grid_size // n_coeffs``; the tent
    falls linearly to zero at a circular distance of ``spacing / 2``.
    """

    kind = "hat_synthesis"

    def __init__(self, n_coeffs, grid_size):
        n_coeffs, grid_size = int(n_coeffs), int(grid_size)
        if n_coeffs < 1 or grid_size < n_coeffs:
            raise ValueError("need grid_size >= n_coeffs >= 1")
        if grid_size % n_coeffs:
            raise ValueError(
                f"grid_size {grid_size} is not divisible by n_coeffs {n_coeffs}"
            )
        self.n_coeffs = n_coeffs
        self.grid_size = grid_size
        self.spacing = grid_size // n_coeffs
        half_width = self.spacing / 2.0
        offsets = np.arange(grid_size)
        dist = np.minimum(offsets, grid_size - offsets)
        profile = np.clip(1.0 - dist / half_width, 0.0, None)
        columns = np.stack(
            [np.roll(profile, j * self.spacing) for j in range(n_coeffs)], axis=1
        )
        columns.setflags(write=False)
        self.matrix = columns
        super().__init__(n_coeffs, grid_size)

    def matvec(self, u):
        return self.matrix @ u

    def rmatvec(self, v):
        return self.matrix.T @ v


def make_hat_synthesis(n_coeffs, grid_size):
    return HatSynthesis(n_coeffs, grid_size)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    iterations: int
    converged: bool


def _power_seed(n):
    # All-ones is an eigenvector of every circulant K*K, so it is perturbed
    # by a fixed pseudo-random component to reach the dominant mode.
    rng = np.random.default_rng(20090101)
    x = np.ones(n) + 0.5 * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def estimate_norm(op, max_iters=1000, tol=1e-12):
    """Estimate ``||K||`` by power iteration on ``K* K``.

    Parameters
    ----------
    op : LinearOperator
    max_iters : int
        Iteration cap, at least 1.
    tol : float
        Relative change between successive estimates that counts as
        converged.

    Returns
    -------
    NormEstimate
        The estimate never exceeds the true norm (it is a Rayleigh
        quotient), up to rounding.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = _power_seed(op.domain_dim)
    prev = None
    for it in range(1, max_iters + 1):
        kx = op.matvec(x)
        value = float(np.linalg.norm(kx))
        if value == 0.0:
            return NormEstimate(0.0, it, True)
        if prev is not None and abs(value - prev) <= tol * value:
            return NormEstimate(value, it, True)
        prev = value
        x = op.rmatvec(kx)
        x /= np.linalg.norm(x)
    return NormEstimate(value, max_iters, False)


def load_dense_csv(path):
    """Read a header-free, row-major CSV matrix into a DenseOperator."""
    matrix = np.loadtxt(Path(path), delimiter=",", ndmin=2)
    return DenseOperator(matrix)


def load_vector_csv(path):
    """Read a CSV vector (one row or one column)."""
    return np.loadtxt(Path(path), delimiter=",", ndmin=1).ravel()
