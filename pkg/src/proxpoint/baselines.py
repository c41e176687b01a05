"""Plain iterated soft-thresholding, the reference method for comparisons."""

import logging
from dataclasses import dataclass

import numpy as np

from .ppp import SolverTrace, TraceRow
from .prox import soft_threshold

__all__ = ["IstaParams", "ista_run"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IstaParams:
    step_size: float = 1.0
    max_iters: int = 1000
    tol: float = 0.0

    def __post_init__(self):
        # the operator is normalized to ||K|| <= 1 before iterating
        if not 0.0 < self.step_size < 2.0:
            raise ValueError(f"step_size must lie in (0, 2), got {self.step_size}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


def ista_run(p, u0=None, params=None):
    """Iterate ``u <- S_{s alpha}(u - s K*(K u - g))``.

    Stops after ``max_iters`` steps or once successive iterates are within
    ``tol``. Like :func:`run_ppp` the problem is normalized first.

    Returns
    -------
    solution : ndarray
    trace : SolverTrace
        One row per iteration with ``inner_iters = 1``; ``trace.psi`` is the
        objective history. ``norm_v`` is the norm of the subgradient
        ``(u_k - u_{k+1})/s - grad(u_k) + grad(u_{k+1})`` of the new iterate,
        ``norm_eps`` and ``mu`` are zero.
    """
    params = IstaParams() if params is None else params
    q, scale = p.normalized()
    K, g, alpha = q.K, q.g, q.alpha
    s = params.step_size
    u = np.zeros(q.n) if u0 is None else np.array(u0, dtype=np.float64).ravel()
    resid = K.matvec(u) - g
    grad = K.rmatvec(resid)
    trace = SolverTrace(status="max_outer")
    for k in range(params.max_iters):
        u_next = soft_threshold(u - s * grad, s * alpha)
        resid = K.matvec(u_next) - g
        grad_next = K.rmatvec(resid)
        if not np.all(np.isfinite(grad_next)):
            raise FloatingPointError(f"non-finite values at iteration {k}")
        sub = (u - u_next) / s - grad + grad_next
        psi = 0.5 * float(resid @ resid) + alpha * float(np.abs(u_next).sum())
        trace.rows.append(
            TraceRow(k, 1, scale**2 * psi, float(np.linalg.norm(sub)), 0.0, 0.0)
        )
        step = float(np.linalg.norm(u_next - u))
        u, grad = u_next, grad_next
        if step <= params.tol:
            trace.status = "converged"
            break
    logger.info("ista finished: status=%s iters=%d", trace.status, trace.n_outer)
    return u, trace
