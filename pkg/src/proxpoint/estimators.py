"""scikit-learn style wrappers around the solvers.

Both estimators minimize ``1/2 ||X w - y||^2 + alpha ||w||_1`` without an
intercept. Unlike :class:`sklearn.linear_model.Lasso` the data term is not
divided by the number of samples, so ``alpha`` here corresponds to
``n_samples * alpha`` there.
"""

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_coef_init, check_design, check_n_features
from .baselines import IstaParams, ista_run
from .inner import InnerParams
from .ppp import PppParams, run_ppp
from .prox import Problem, objective

__all__ = ["ProximalPointLasso", "IstaLasso"]


class _L1Base(RegressorMixin, BaseEstimator):
    def _problem(self, X, y):
        if y is None:
            raise ValueError(
                f"{type(self).__name__} requires y to be passed, but the target y is None"
            )
        op, y = check_design(X, y)
        return Problem(op, y, float(self.alpha))

    def _store(self, problem, coef, trace):
        self.coef_ = coef
        self.trace_ = trace
        self.status_ = trace.status
        self.n_iter_ = trace.n_outer
        self.objective_ = objective(problem, coef)
        self.n_features_in_ = problem.n
        return self

    def predict(self, X):
        """Apply the fitted coefficients, ``X @ coef_``.

        Parameters
        ----------
        X : array of shape (n_samples, n_features) or LinearOperator
        """
        check_is_fitted(self, "coef_")
        op, _ = check_design(X)
        check_n_features(self, op)
        return op.apply(self.coef_)


class ProximalPointLasso(_L1Base):
    """l1-regularized least squares by projection proximal point.

    Parameters
    ----------
    alpha : float
        Weight of the l1 penalty.
    inner : {"damped_ista", "gcg"}
        Method for the regularized subproblems.
    mu : float
        Proximal weight of each subproblem.
    sigma : float in [0, 1)
        Relative accuracy demanded from the subproblems.
    step_size : float in (0, 2)
        Step of damped soft-thresholding, relative to ``1 / ||X||^2``.
    max_iter : int
        Outer iteration limit.
    max_inner_iter : int
        Inner iteration limit per subproblem; reaching it aborts the fit.
    total_iter_budget : int, optional
        Cap on inner iterations summed over the whole fit.
    v_tol, y_tol : float, optional
        Stopping tolerances, see :class:`PppParams`.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    trace_ : SolverTrace
    status_ : str
        ``converged``, ``max_outer``, ``budget_exhausted`` or ``aborted``.
    n_iter_ : int
        Completed outer iterations.
    objective_ : float
        Objective value at ``coef_``.
    """

    def __init__(self, alpha=1e-3, *, inner="damped_ista", mu=0.05, sigma=0.9, step_size=1.0,
                 max_iter=1000, max_inner_iter=10_000, total_iter_budget=None, v_tol=None,
                 y_tol=1e-12):
        self.alpha = alpha
        self.inner = inner
        self.mu = mu
        self.sigma = sigma
        self.step_size = step_size
        self.max_iter = max_iter
        self.max_inner_iter = max_inner_iter
        self.total_iter_budget = total_iter_budget
        self.v_tol = v_tol
        self.y_tol = y_tol

    def _params(self):
        return PppParams(
            inner=InnerParams(
                method=self.inner,
                sigma=self.sigma,
                mu=self.mu,
                step_size=self.step_size,
                max_inner_iters=self.max_inner_iter,
            ),
            max_outer_iters=self.max_iter,
            v_tol=self.v_tol,
            y_tol=self.y_tol,
            total_iter_budget=self.total_iter_budget,
        )

    def fit(self, X, y, coef_init=None):
        """Fit the coefficients.

        Parameters
        ----------
        X : array of shape (n_samples, n_features) or LinearOperator
        y : array of shape (n_samples,)
        coef_init : array of shape (n_features,), optional
            Starting point, zero by default.

        Returns
        -------
        self
        """
        params = self._params()
        problem = self._problem(X, y)
        u0 = check_coef_init(coef_init, problem.n)
        coef, trace = run_ppp(problem, u0=u0, params=params)
        return self._store(problem, coef, trace)


class IstaLasso(_L1Base):
    """l1-regularized least squares by plain iterated soft-thresholding.

    Parameters
    ----------
    alpha : float
    step_size : float in (0, 2)
        Relative to ``1 / ||X||^2``.
    max_iter : int
    tol : float
        Stop once successive iterates are this close.
    """

    def __init__(self, alpha=1e-3, *, step_size=1.0, max_iter=1000, tol=0.0):
        self.alpha = alpha
        self.step_size = step_size
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y, coef_init=None):
        params = IstaParams(step_size=self.step_size, max_iters=self.max_iter, tol=self.tol)
        problem = self._problem(X, y)
        u0 = check_coef_init(coef_init, problem.n)
        coef, trace = ista_run(problem, u0=u0, params=params)
        return self._store(problem, coef, trace)
