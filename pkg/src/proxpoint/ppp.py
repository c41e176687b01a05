"""Projection proximal-point outer loop for l1-regularized least squares.

Each outer step solves the regularized subproblem approximately (see
:mod:`proxpoint.inner`), then projects the current iterate onto the
hyperplane ``{x : <v, x - y> = 0}`` that separates it from the solution
set.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .inner import InnerParams, SubproblemResult, solve_subproblem

__all__ = [
    "PppParams",
    "TraceRow",
    "SolverTrace",
    "OuterStep",
    "project_hyperplane",
    "run_ppp",
    "TRACE_HEADER",
]

logger = logging.getLogger(__name__)

TRACE_HEADER = ("n", "inner_iters", "psi", "norm_v", "norm_eps", "mu")

STATUSES = ("converged", "max_outer", "budget_exhausted", "aborted")


@dataclass(frozen=True)
class PppParams:
    """Outer-loop configuration.

    ``mu_schedule`` maps the outer index to ``mu_n``; when omitted the
    constant ``inner.mu`` is used. A schedule must stay positive and
    bounded. ``v_tol=None`` selects ``1e-9 * (1 + ||K* g||)`` on the
    normalized problem. ``total_iter_budget`` caps the inner iterations
    summed over all outer steps.
    """

    inner: InnerParams = field(default_factory=InnerParams)
    mu_schedule: Optional[Callable[[int], float]] = None
    max_outer_iters: int = 1000
    v_tol: Optional[float] = None
    y_tol: float = 1e-12
    total_iter_budget: Optional[int] = None

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if self.v_tol is not None and self.v_tol < 0:
            raise ValueError("v_tol must be nonnegative")
        if self.y_tol < 0:
            raise ValueError("y_tol must be nonnegative")
        if self.total_iter_budget is not None and self.total_iter_budget < 0:
            raise ValueError("total_iter_budget must be nonnegative")

    def mu(self, n):
        mu = self.inner.mu if self.mu_schedule is None else float(self.mu_schedule(n))
        if not mu > 0:
            raise ValueError(f"mu schedule returned non-positive value {mu} at n={n}")
        return mu


class TraceRow(NamedTuple):
    n: int
    inner_iters: int
    psi: float
    norm_v: float
    norm_eps: float
    mu: float


@dataclass
class SolverTrace:
    """Per-outer-iteration log plus the final status of a run."""

    rows: list = field(default_factory=list)
    status: str = "max_outer"
    message: str = ""

    @property
    def psi(self):
        return np.array([r.psi for r in self.rows])

    @property
    def n_outer(self):
        return len(self.rows)

    @property
    def total_inner(self):
        return sum(r.inner_iters for r in self.rows)

    def to_csv(self, target=None):
        """Write ``n,inner_iters,psi,norm_v,norm_eps,mu`` rows.

        Floats use 15 significant digits. Returns the text when ``target``
        is None, otherwise writes to the given path.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for r in self.rows:
            writer.writerow(
                [r.n, r.inner_iters]
                + [f"{x:.15g}" for x in (r.psi, r.norm_v, r.norm_eps, r.mu)]
            )
        text = buf.getvalue()
        if target is None:
            return text
        with open(target, "w", newline="") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != TRACE_HEADER:
                raise ValueError(f"unexpected trace header {header}")
            rows = [
                TraceRow(int(a), int(b), float(c), float(d), float(e), float(f))
                for a, b, c, d, e, f in reader
            ]
        return cls(rows=rows, status="unknown")


@dataclass(frozen=True)
class OuterStep:
    """What a callback sees after each completed outer iteration.

    All quantities refer to ``problem``, the normalized instance the solver
    actually iterates on.
    """

    n: int
    anchor: np.ndarray
    result: SubproblemResult
    u_next: np.ndarray
    mu: float
    problem: object


def project_hyperplane(u, y, v):
    """Orthogonal projection of ``u`` onto ``{x : <v, x - y> = 0}``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    vv = float(v @ v)
    if vv == 0.0:
        raise ValueError("cannot project onto a hyperplane with zero normal")
    return u - (float(v @ (u - np.asarray(y, dtype=np.float64))) / vv) * v


def run_ppp(p, u0=None, params=None, callback=None):
    """Minimize ``1/2 ||K u - g||^2 + alpha ||u||_1`` by projection proximal point.

    Parameters
    ----------
    p : Problem
        Rescaled internally when ``||K|| > 1``; results are reported in the
        original scaling.
    u0 : ndarray, optional
        Starting point, zero by default.
    params : PppParams, optional
    callback : callable, optional
        Called with an :class:`OuterStep` after every completed outer
        iteration.

    Returns
    -------
    solution : ndarray
    trace : SolverTrace
        One row per completed outer iteration; ``psi`` is the objective at
        the new outer iterate in original units, the remaining columns are
        in the normalized units the solver works in. An inner loop cut
        short by the budget leaves no row and no projection.
    """
    params = PppParams() if params is None else params
    u = np.zeros(p.n) if u0 is None else np.array(u0, dtype=np.float64).ravel()
    if u.shape[0] != p.n:
        raise ValueError(f"u0 has length {u.shape[0]}, expected {p.n}")
    if not np.all(np.isfinite(u)):
        raise ValueError("u0 contains non-finite entries")

    q, scale = p.normalized()
    K, g, alpha = q.K, q.g, q.alpha
    psi_factor = scale**2
    v_tol = params.v_tol
    if v_tol is None:
        v_tol = 1e-9 * (1.0 + float(np.linalg.norm(K.rmatvec(g))))
    budget = params.total_iter_budget
    trace = SolverTrace()
    resid = K.matvec(u) - g
    used = 0

    for n in range(params.max_outer_iters):
        mu = params.mu(n)
        cap = params.inner.max_inner_iters
        budget_bound = False
        if budget is not None:
            left = budget - used
            if left <= 0:
                trace.status = "budget_exhausted"
                break
            if left <= cap:
                cap, budget_bound = left, True
        inner = InnerParams(
            method=params.inner.method,
            sigma=params.inner.sigma,
            mu=mu,
            step_size=params.inner.step_size,
            max_inner_iters=cap,
        )
        res = solve_subproblem(q, u, inner, residual=resid)
        used += res.inner_iters
        if res.terminated_by == "max_iters":
            if budget_bound:
                trace.status = "budget_exhausted"
            else:
                trace.status = "aborted"
                trace.message = (
                    f"inner solver hit max_inner_iters={cap} at outer step {n} "
                    f"without passing the accuracy test "
                    f"(||eps||={res.cert.norm_eps:.3e}, ||v||={res.cert.norm_v:.3e})"
                )
                logger.warning(trace.message)
            break

        y, v = res.y, res.cert.v
        done = res.cert.norm_v <= v_tol or float(np.linalg.norm(y - u)) <= params.y_tol
        if done:
            u_next, resid_next = y, res.residual
        else:
            vv = float(v @ v)
            t = float(v @ (u - y)) / vv
            u_next = u - t * v
            resid_next = K.matvec(u_next) - g
        psi = 0.5 * float(resid_next @ resid_next) + alpha * float(np.abs(u_next).sum())
        if not np.isfinite(psi):
            raise FloatingPointError(f"objective became non-finite at outer step {n}")
        trace.rows.append(
            TraceRow(n, res.inner_iters, psi_factor * psi, res.cert.norm_v,
                     res.cert.norm_eps, mu)
        )
        if callback is not None:
            callback(OuterStep(n, u, res, u_next, mu, q))
        u, resid = u_next, resid_next
        if done:
            trace.status = "converged"
            break
    else:
        trace.status = "max_outer"

    logger.info(
        "ppp finished: status=%s outer=%d inner=%d", trace.status,
        trace.n_outer, trace.total_inner,
    )
    return u, trace
