"""scikit-learn transformer exposing an orthonormal polynomial basis as features."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .orthopoly import cached_table, eval_basis
from .weights import Weight, legendre


class OrthonormalBasis(TransformerMixin, BaseEstimator):
    """Map scalar inputs in ``[-1, 1]`` to ``p_0(x) .. p_{degree}(x)``.

    Parameters
    ----------
    weight : Weight, optional
        Measure defining the basis; Legendre when omitted.
    degree : int
        Highest polynomial degree.

    Examples
    --------
    >>> X = np.array([[0.0], [0.5]])
    >>> OrthonormalBasis(degree=2).fit_transform(X).shape
    (2, 3)
    """

    def __init__(self, weight: Weight | None = None, degree: int = 8):
        self.weight = weight
        self.degree = degree

    def fit(self, X=None, y=None):
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        w = self.weight if self.weight is not None else legendre()
        self.table_ = cached_table(w, max(self.degree + 1, 16))
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "table_")
        x = np.asarray(X, dtype=float)
        if x.ndim == 2:
            if x.shape[1] != 1:
                raise ValueError("expected a single input column")
            x = x[:, 0]
        if np.any(np.abs(x) > 1):
            raise ValueError("inputs must lie in [-1, 1]")
        return eval_basis(self.table_, self.degree, x)[0].T
