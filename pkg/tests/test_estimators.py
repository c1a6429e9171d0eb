import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.linear_model import LinearRegression
from sklearn.pipeline import make_pipeline

from gjortho.estimators import OrthonormalBasis
from gjortho.weights import chebyshev, gjlog

GJLOG = gjlog([-1, 0.3, 1], [0.25, 1, -0.25], [1, -1, -1])


def test_legendre_features():
    X = np.array([[0.0], [0.5], [1.0]])
    F = OrthonormalBasis(degree=2).fit_transform(X)
    want = np.column_stack([np.full(3, 2 ** -0.5), np.sqrt(1.5) * X[:, 0],
                            np.sqrt(2.5) * (1.5 * X[:, 0] ** 2 - 0.5)])
    assert np.allclose(F, want, atol=1e-14)


def test_one_dimensional_input():
    est = OrthonormalBasis(weight=chebyshev(), degree=3).fit()
    assert est.transform(np.linspace(-1, 1, 5)).shape == (5, 4)


def test_gram_matrix_is_identity():
    # the Gauss rule of the basis measure turns features into an orthonormality check
    from gjortho.orthopoly import cached_table, gauss_rule
    est = OrthonormalBasis(weight=GJLOG, degree=6).fit()
    r = gauss_rule(cached_table(GJLOG, 16), 10)
    F = est.transform(r.nodes)
    assert np.allclose(F.T @ (r.cotes[:, None] * F), np.eye(7), atol=1e-10)


def test_pipeline_fits_polynomial():
    x = np.linspace(-1, 1, 50)[:, None]
    y = 3 * x[:, 0] ** 3 - x[:, 0] + 0.5
    model = make_pipeline(OrthonormalBasis(degree=3), LinearRegression()).fit(x, y)
    assert np.allclose(model.predict(x), y, atol=1e-10)


def test_clone_and_params():
    est = OrthonormalBasis(weight=GJLOG, degree=5)
    c = clone(est)
    assert c.get_params() == {"weight": GJLOG, "degree": 5}


def test_errors():
    with pytest.raises(NotFittedError):
        OrthonormalBasis().transform([[0.0]])
    est = OrthonormalBasis().fit()
    with pytest.raises(ValueError):
        est.transform([[0.0, 1.0]])
    with pytest.raises(ValueError):
        est.transform([[1.5]])
    with pytest.raises(ValueError):
        OrthonormalBasis(degree=-1).fit()
