"""Approximate solvers for the regularized subproblem

    min_y  1/2 ||K y - g||^2 + alpha ||y||_1 + mu/2 ||y - anchor||^2

Both solvers take one step at a time and stop as soon as the certificate
passes the relative accuracy test

    ||eps|| <= sigma * max(||v||, mu ||y - anchor||).

The problem is expected to satisfy ``||K|| <= 1`` (see
:meth:`Problem.normalized`), which makes the default step size 1 valid
for damped soft-thresholding.
"""

from dataclasses import dataclass

import numpy as np

from .prox import Certificate, certificate_from_gradient, soft_threshold

__all__ = [
    "InnerParams",
    "SubproblemResult",
    "damped_ista_step",
    "gcg_search_direction",
    "gcg_step_size",
    "solve_subproblem",
    "sigma_test",
]

METHODS = ("damped_ista", "gcg")


@dataclass(frozen=True)
class InnerParams:
    method: str = "damped_ista"
    sigma: float = 0.9
    mu: float = 0.05
    step_size: float = 1.0
    max_inner_iters: int = 10_000

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0.0 <= self.sigma < 1.0:
            raise ValueError(f"sigma must lie in [0, 1), got {self.sigma}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        # assumes ||K|| <= 1, so the admissible range is (0, 2)
        if not 0.0 < self.step_size < 2.0:
            raise ValueError(f"step_size must lie in (0, 2), got {self.step_size}")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be >= 1")


@dataclass(frozen=True)
class SubproblemResult:
    y: np.ndarray
    cert: Certificate
    inner_iters: int
    terminated_by: str  # "sigma_test" or "max_iters"
    residual: np.ndarray  # K y - g, cached for the outer loop
    gradient: np.ndarray  # K*(K y - g)


def sigma_test(cert, y, anchor, mu, sigma):
    """The accuracy test that accepts ``y`` as an approximate solution."""
    return cert.norm_eps <= sigma * max(cert.norm_v, mu * float(np.linalg.norm(y - anchor)))


def _ista_update(y, grad, anchor, mu, s, alpha):
    return soft_threshold(y - s * grad + s * mu * anchor, s * alpha) / (1.0 + s * mu)


def damped_ista_step(p, y, anchor, mu, s):
    """One damped soft-thresholding step for the subproblem.

    ``(1 + s mu)^-1 S_{s alpha}(y - s K*(K y - g) + s mu anchor)``.
    The step size must satisfy ``0 < s < 2 / ||K||^2``; only the bound for
    normalized operators, ``0 < s < 2``, is checked here.
    """
    if not 0.0 < s < 2.0:
        raise ValueError(f"step size {s} outside (0, 2)")
    y = np.asarray(y, dtype=np.float64)
    return _ista_update(y, p.gradient(y), anchor, mu, s, p.alpha)


def _phi(u, anchor, mu, alpha):
    d = u - anchor
    return alpha * float(np.abs(u).sum()) + 0.5 * mu * float(d @ d)


def _gcg_direction(grad, anchor, mu, alpha):
    return soft_threshold(mu * anchor - grad, alpha) / mu


def gcg_search_direction(p, y, anchor, mu):
    """Minimizer ``w`` of ``<K*(K y - g), w> + alpha ||w||_1 + mu/2 ||w - anchor||^2``."""
    y = np.asarray(y, dtype=np.float64)
    return _gcg_direction(p.gradient(y), np.asarray(anchor, dtype=np.float64), mu, p.alpha)


def _clamped_ratio(num, den, diff_sq):
    if den == 0.0 or den < 1e-14 * diff_sq:
        return 1.0 if num > 0 else 0.0
    return min(1.0, max(0.0, num / den))


def _gcg_numerator(y, w, grad, anchor, mu, alpha):
    """``Phi(y) - Phi(w) + <K y - g, K (y - w)>`` without cancellation.

    ``w`` minimizes the linearized objective, so ``grad + mu (w - anchor)
    = -alpha xi`` with ``xi`` in ``Sign(w)``. Substituting gives
    ``mu/2 ||y - w||^2 + alpha sum(|y_i| - |w_i| - xi_i (y_i - w_i))``,
    a sum of nonnegative terms that stays accurate when ``y`` is close to
    ``w``; subtracting the two ``Phi`` values loses every digit there.
    """
    d = y - w
    xi = np.where(w != 0.0, np.sign(w), np.clip((mu * anchor - grad) / alpha, -1.0, 1.0))
    bregman = np.abs(y) - np.abs(w) - xi * d
    return 0.5 * mu * float(d @ d) + alpha * float(np.maximum(bregman, 0.0).sum())


def gcg_step_size(p, y, w, anchor, mu):
    """Step along ``w - y`` for the conditional gradient method.

    ``min{1, (Phi(y) - Phi(w) + <K y - g, K (y - w)>) / ||K (y - w)||^2}``,
    clamped below at 0. This minimizes the data term plus the chord of
    ``Phi`` between ``y`` and ``w``, an upper bound of the subproblem
    objective on the segment. A vanishing denominator yields 1 for a
    positive numerator and 0 otherwise.

    When ``w`` is the search direction computed at ``y`` the numerator is
    evaluated in a cancellation-free form; for any other ``w`` the formula
    is evaluated as written.
    """
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    anchor = np.asarray(anchor, dtype=np.float64)
    diff = y - w
    resid = p.K.matvec(y) - p.g
    grad = p.K.rmatvec(resid)
    k_diff = p.K.matvec(diff)
    if np.array_equal(w, _gcg_direction(grad, anchor, mu, p.alpha)):
        num = _gcg_numerator(y, w, grad, anchor, mu, p.alpha)
    else:
        num = _phi(y, anchor, mu, p.alpha) - _phi(w, anchor, mu, p.alpha) + float(resid @ k_diff)
    return _clamped_ratio(num, float(k_diff @ k_diff), float(diff @ diff))


def solve_subproblem(p, anchor, params, warm_start=None, *, residual=None):
    """Iterate the chosen inner method until the accuracy test passes.

    Parameters
    ----------
    p : Problem
        Normalized so that ``||K|| <= 1``.
    anchor : ndarray
        The current outer iterate.
    params : InnerParams
    warm_start : ndarray, optional
        Starting point; defaults to ``anchor``.
    residual : ndarray, optional
        ``K warm_start - g`` if already known, saving one application of K.

    Returns
    -------
    SubproblemResult
        ``terminated_by`` is ``"max_iters"`` when the cap was hit before the
        test passed; the caller decides what to do with such a result.
    """
    anchor = np.asarray(anchor, dtype=np.float64)
    y = anchor.copy() if warm_start is None else np.array(warm_start, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("warm start contains non-finite entries")
    K, g, alpha = p.K, p.g, p.alpha
    mu, sigma, s = params.mu, params.sigma, params.step_size
    resid = K.matvec(y) - g if residual is None else residual
    grad = K.rmatvec(resid)
    gcg = params.method == "gcg"

    for k in range(1, params.max_inner_iters + 1):
        w = None
        if gcg:
            w = _gcg_direction(grad, anchor, mu, alpha)
            diff = y - w
            k_diff = K.matvec(diff)
            resid_w = resid - k_diff
            num = _gcg_numerator(y, w, grad, anchor, mu, alpha)
            t = _clamped_ratio(num, float(k_diff @ k_diff), float(diff @ diff))
            if t == 1.0:
                y, resid, w = w, resid_w, None
            else:
                y = y - t * diff
                resid = resid - t * k_diff
        else:
            y = _ista_update(y, grad, anchor, mu, s, alpha)
            resid = K.matvec(y) - g
        grad = K.rmatvec(resid)
        if not np.all(np.isfinite(grad)):
            raise FloatingPointError(f"non-finite values in inner iteration {k}")
        cert = certificate_from_gradient(y, grad, anchor, mu, alpha)
        if sigma_test(cert, y, anchor, mu, sigma):
            return SubproblemResult(y, cert, k, "sigma_test", resid, grad)
        if w is not None:
            # Partial steps never produce exact zeros, so coordinates of y
            # that should vanish keep a pinned sign forever; the search
            # point w is soft-thresholded and may pass where y cannot.
            grad_w = K.rmatvec(resid_w)
            cert_w = certificate_from_gradient(w, grad_w, anchor, mu, alpha)
            if sigma_test(cert_w, w, anchor, mu, sigma):
                return SubproblemResult(w, cert_w, k, "sigma_test", resid_w, grad_w)
    return SubproblemResult(y, cert, params.max_inner_iters, "max_iters", resid, grad)
