"""Exact minimizers of small l1 problems by support/sign enumeration.

A point ``u`` minimizes ``1/2 ||K u - g||^2 + alpha ||u||_1`` iff
``0 in K*(K u - g) + alpha Sign(u)``. For a support ``I`` and signs ``s``
the smooth part of that inclusion is the linear system

    K_I* K_I u_I = K_I* g - alpha s

and a solution is accepted when ``sign(u_I) = s`` and
``|K_j*(K u - g)| <= alpha`` off the support. Supports are enumerated in
order of size and all sign patterns of one size are solved in a single
batched call.
"""

from itertools import combinations

import numpy as np

from .operators import DenseOperator
from .prox import Problem

__all__ = ["OracleError", "oracle_solve", "subproblem_oracle", "kkt_violation"]


class OracleError(RuntimeError):
    pass


def kkt_violation(K, g, alpha, u):
    """Largest violation of the optimality inclusion at ``u`` (dense ``K``)."""
    grad = K.T @ (K @ u - g)
    on = u != 0
    viol_on = np.abs(grad[on] + alpha * np.sign(u[on]))
    viol_off = np.maximum(np.abs(grad[~on]) - alpha, 0.0)
    return float(max(viol_on.max(initial=0.0), viol_off.max(initial=0.0)))


def _sign_patterns(k):
    if k == 0:
        return np.zeros((1, 0))
    grid = np.array(np.meshgrid(*([[-1.0, 1.0]] * k), indexing="ij"))
    return grid.reshape(k, -1).T


def oracle_solve(p, max_support, tol=1e-10, cond_limit=1e12):
    """Global minimizer of ``p`` with at most ``max_support`` nonzeros.

    Parameters
    ----------
    p : Problem
        Small instance; the operator is materialized densely.
    max_support : int
        Largest support size to enumerate.
    tol : float
        Slack on the off-support dual bound ``|K_j*(K u - g)| <= alpha``.
    cond_limit : float
        Supports whose Gram matrix is worse conditioned are skipped (the
        reduced system has no unique solution there).

    Raises
    ------
    OracleError
        If no support of size ``<= max_support`` verifies.
    """
    K = p.K.todense()
    g, alpha = p.g, p.alpha
    m, n = K.shape
    ktg = K.T @ g
    gram_full = K.T @ K

    for k in range(0, min(max_support, n) + 1):
        if k == 0:
            if np.max(np.abs(ktg), initial=0.0) <= alpha + tol:
                return np.zeros(n)
            continue
        if k > m:
            break
        supports = np.array(list(combinations(range(n), k)))
        gram = gram_full[supports[:, :, None], supports[:, None, :]]
        ok = np.linalg.cond(gram) < cond_limit
        if not ok.any():
            continue
        supports, gram = supports[ok], gram[ok]
        signs = _sign_patterns(k)
        rhs = ktg[supports][:, None, :] - alpha * signs[None, :, :]
        coef = np.linalg.solve(gram[:, None, :, :], rhs[..., None])[..., 0]
        consistent = np.all(coef * signs[None, :, :] > 0, axis=-1)
        for ci, si in zip(*np.nonzero(consistent)):
            u = np.zeros(n)
            u[supports[ci]] = coef[ci, si]
            grad = K.T @ (K @ u - g)
            off = np.ones(n, dtype=bool)
            off[supports[ci]] = False
            if np.all(np.abs(grad[off]) <= alpha + tol):
                return u
    raise OracleError(
        f"no support of size <= {max_support} satisfies the optimality conditions"
    )


def subproblem_oracle(p, anchor, mu, max_support=None):
    """Exact minimizer of the regularized subproblem.

    ``1/2 ||K y - g||^2 + mu/2 ||y - anchor||^2`` equals the data term of
    the stacked operator ``[K; sqrt(mu) I]`` with data
    ``[g; sqrt(mu) anchor]``, so the enumeration oracle applies directly.
    """
    K = p.K.todense()
    n = K.shape[1]
    root = np.sqrt(mu)
    stacked = Problem(
        DenseOperator(np.vstack([K, root * np.eye(n)])),
        np.concatenate([p.g, root * np.asarray(anchor, dtype=np.float64)]),
        p.alpha,
    )
    return oracle_solve(stacked, n if max_support is None else max_support)
