import numpy as np

from proxpoint import DenseOperator, Problem


def scalar_problem(g=2.0, alpha=0.5):
    """K = identity on R^1."""
    return Problem(DenseOperator(np.eye(1)), np.array([g]), alpha)


def random_dense_problem(rng, m, n, alpha=0.05, normalize=True):
    A = rng.standard_normal((m, n))
    if normalize:
        A /= np.linalg.norm(A, 2) * (1 + 1e-12)
    return Problem(DenseOperator(A), rng.standard_normal(m), alpha)
