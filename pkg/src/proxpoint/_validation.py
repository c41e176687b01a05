"""Input checks shared by the estimators."""

import numpy as np
from sklearn.utils.validation import check_array, check_X_y

from .operators import DenseOperator, LinearOperator


def check_design(X, y=None):
    """Turn ``X`` into a :class:`LinearOperator` and validate ``y``.

    ``X`` may be a 2-d array (samples by features) or a ready-made
    operator, in which case ``y`` must have ``X.range_dim`` entries.

    Returns
    -------
    op : LinearOperator
    y : ndarray or None
    """
    if isinstance(X, LinearOperator):
        if y is None:
            return X, None
        y = check_array(y, ensure_2d=False, dtype=np.float64).ravel()
        if y.shape[0] != X.range_dim:
            raise ValueError(
                f"y has {y.shape[0]} entries but the operator range has {X.range_dim}"
            )
        return X, y
    if y is None:
        return DenseOperator(check_array(X, dtype=np.float64)), None
    X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
    return DenseOperator(X), y


def check_coef_init(coef, n_features):
    if coef is None:
        return None
    coef = check_array(coef, ensure_2d=False, dtype=np.float64).ravel()
    if coef.shape[0] != n_features:
        raise ValueError(f"coef_init has {coef.shape[0]} entries, expected {n_features}")
    return coef


def check_n_features(estimator, op):
    if op.domain_dim != estimator.n_features_in_:
        raise ValueError(
            f"X has {op.domain_dim} features, but {type(estimator).__name__} "
            f"is expecting {estimator.n_features_in_} features as input"
        )
