"""Soft-thresholding, sign-set projection, objectives and inexactness certificates.

Everything here is a pure function of its inputs. The problem solved is

    min_u  Psi(u) = 1/2 ||K u - g||^2 + alpha ||u||_1

and the regularized subproblem adds ``mu/2 ||u - anchor||^2``.
"""

from dataclasses import dataclass

import numpy as np

from .operators import DimensionError, LinearOperator, ScaledOperator, estimate_norm

__all__ = [
    "Problem",
    "Certificate",
    "soft_threshold",
    "objective",
    "regularized_objective",
    "sign_set_projection",
    "certificate",
    "certificate_from_gradient",
]


@dataclass(frozen=True)
class Problem:
    """An instance ``(K, g, alpha)`` of the l1-regularized least-squares problem."""

    K: LinearOperator
    g: np.ndarray
    alpha: float

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.float64).ravel()
        if g.shape[0] != self.K.range_dim:
            raise DimensionError("Problem.g", self.K.range_dim, g.shape[0])
        if not np.all(np.isfinite(g)):
            raise ValueError("Problem.g contains non-finite entries")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n(self):
        return self.K.domain_dim

    def gradient(self, u):
        """``K*(K u - g)``, the gradient of the data term."""
        return self.K.rmatvec(self.K.matvec(u) - self.g)

    def normalized(self, margin=1.01, max_iters=1000, tol=1e-12):
        """Return ``(problem, c)`` with ``||K / c|| <= 1``.

        When the estimated norm exceeds one, ``K``, ``g`` and ``alpha`` are
        divided by ``c``, ``c`` and ``c**2`` with ``c = margin * ||K||``. The
        objective scales by ``1/c**2`` and the minimizer is unchanged. Otherwise
        the problem itself is returned with ``c = 1``.
        """
        est = estimate_norm(self.K, max_iters=max_iters, tol=tol)
        if est.value <= 1.0:
            return self, 1.0
        c = margin * est.value
        scaled = Problem(ScaledOperator(self.K, 1.0 / c), self.g / c, self.alpha / c**2)
        return scaled, c


@dataclass(frozen=True)
class Certificate:
    """Inexactness certificate for an approximate subproblem solution ``y``.

    ``v`` is an element of ``T(y) = K*(K y - g) + alpha Sign(y)`` and
    ``v + mu (y - anchor) + eps = 0``.
    """

    v: np.ndarray
    eps: np.ndarray
    norm_v: float
    norm_eps: float


def soft_threshold(u, c):
    """Componentwise shrinkage ``sign(u) * max(|u| - c, 0)``.

    Entries with ``|u_i| <= c`` map to an exact zero.
    """
    if c < 0:
        raise ValueError(f"threshold must be nonnegative, got {c}")
    u = np.asarray(u, dtype=np.float64)
    return np.sign(u) * np.maximum(np.abs(u) - c, 0.0)


def _check_len(p, u, what):
    u = np.asarray(u, dtype=np.float64).ravel()
    if u.shape[0] != p.n:
        raise DimensionError(what, p.n, u.shape[0])
    return u


def objective(p, u):
    u = _check_len(p, u, "objective")
    r = p.K.matvec(u) - p.g
    return 0.5 * float(r @ r) + p.alpha * float(np.abs(u).sum())


def regularized_objective(p, u, mu, anchor):
    if not mu > 0:
        raise ValueError("mu must be positive")
    u = _check_len(p, u, "regularized_objective")
    anchor = _check_len(p, anchor, "regularized_objective.anchor")
    d = u - anchor
    return objective(p, u) + 0.5 * mu * float(d @ d)


def sign_set_projection(y, u, alpha):
    """Project ``u`` onto the set ``alpha * Sign(y)``.

    Coordinates with ``y_i != 0`` are pinned to ``alpha * sign(y_i)``;
    where ``y_i == 0`` (tested exactly) ``u_i`` is clipped to
    ``[-alpha, alpha]``.
    """
    y = np.asarray(y, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if y.shape != u.shape:
        raise DimensionError("sign_set_projection", y.shape[0], u.shape[0])
    return np.where(y == 0.0, np.clip(u, -alpha, alpha), alpha * np.sign(y))


def certificate_from_gradient(y, grad, anchor, mu, alpha):
    """Certificate given a precomputed ``grad = K*(K y - g)``."""
    step = mu * (y - anchor)
    r = -grad - step
    eps = r - sign_set_projection(y, r, alpha)
    v = -step - eps
    return Certificate(v, eps, float(np.linalg.norm(v)), float(np.linalg.norm(eps)))


def certificate(p, y, anchor, mu):
    """Build ``(v, eps)`` for the approximate subproblem solution ``y``.

    With ``r = -K*(K y - g) - mu (y - anchor)`` the residual is
    ``eps = r - P(r)``, ``P`` the projection onto ``alpha Sign(y)``, and
    ``v = -mu (y - anchor) - eps``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    y = _check_len(p, y, "certificate.y")
    anchor = _check_len(p, anchor, "certificate.anchor")
    return certificate_from_gradient(y, p.gradient(y), anchor, mu, p.alpha)
