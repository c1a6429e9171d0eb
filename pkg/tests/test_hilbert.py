import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as spi

from gjortho.conditions import conjugate
from gjortho.hilbert import (CSV_HEADER, condition_sup, growth_slope, local_products,
                             profile_ratio, transform, transform_values, weighted_ratio)
from gjortho.weights import WeightSpec, gjlog, legendre

PROBE = np.linspace(-0.95, 0.95, 39)


def mid(G, g=0.0):
    return gjlog([-1, 0, 1], [0, G, 0], [0, g, 0])


def end(G, g=0.0):
    return gjlog([-1, 1], [G, 0], [g, 0])


class TestTransform:
    def test_constant(self):
        for x in (-0.7, 0.0, 0.5):
            assert transform(np.ones_like, x).value == pytest.approx(
                math.log((1 + x) / (1 - x)), abs=1e-13)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_chebyshev_pairs(self, k):
        g = lambda y: np.sin(k * np.arccos(np.clip(y, -1, 1)))  # sqrt(1-y^2) U_{k-1}(y)
        got = transform_values(g, PROBE, tol=1e-12)
        want = math.pi * np.cos(k * np.arccos(PROBE))
        assert np.max(np.abs(got - want)) <= 1e-8

    @pytest.mark.parametrize("x", [-0.6, 0.1, 0.85])
    def test_against_scipy_cauchy(self, x):
        # QUADPACK computes PV int g(y) / (y - x) dy, the negative of the transform
        g = lambda y: np.exp(y) * np.cos(2 * y)
        ref = -spi.quad(g, -1, 1, weight="cauchy", wvar=x, epsabs=1e-14)[0]
        assert transform(g, x).value == pytest.approx(ref, abs=1e-11)

    def test_vector_matches_scalar(self):
        g = lambda y: 1 / (2 + y)
        vec = transform_values(g, PROBE[::5])
        sc = [transform(g, x).value for x in PROBE[::5]]
        assert np.allclose(vec, sc, atol=1e-9)

    @given(st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=15)
    def test_linearity(self, a, b):
        f, g = np.exp, lambda y: np.abs(y - 0.3)
        lhs = transform_values(lambda y: a * f(y) + b * g(y), PROBE, tol=1e-12, breakpoints=[0.3])
        rhs = (a * transform_values(f, PROBE, tol=1e-12)
               + b * transform_values(g, PROBE, tol=1e-12, breakpoints=[0.3]))
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * (1 + abs(a) + abs(b))

    def test_parity(self):
        g = lambda y: np.cos(3 * y) + y * y
        H = transform_values(g, PROBE, tol=1e-12)
        assert np.max(np.abs(H + H[::-1])) <= 1e-9

    def test_outside(self):
        with pytest.raises(ValueError):
            transform(np.ones_like, 1.0)
        with pytest.raises(ValueError):
            transform_values(np.ones_like, [0.0, -1.0])


class TestWeightedRatio:
    def test_closed_form_matches_numeric(self):
        g = lambda y: np.sqrt(1 - y * y)
        known = weighted_ratio(g, legendre(), legendre(), 2, Hg=lambda x: math.pi * x).ratio
        numeric = weighted_ratio(g, legendre(), legendre(), 2).ratio
        assert numeric == pytest.approx(known, rel=1e-6)
        # ||pi x||_2 / ||sqrt(1 - y^2)||_2 = pi sqrt(2/3) / sqrt(4/3)
        assert known == pytest.approx(math.pi / math.sqrt(2), rel=1e-9)

    def test_bad_p(self):
        with pytest.raises(ValueError):
            weighted_ratio(np.ones_like, legendre(), legendre(), 1.0)

    def test_l2_bound_for_bump(self):
        r = weighted_ratio(lambda y: np.exp(-20 * y * y), legendre(), legendre(), 2).ratio
        assert 0 < r <= math.pi + 0.01

    def test_endpoint_decay_lowers_ratio(self):
        g = lambda y: np.exp(-20 * y * y)
        rs = [weighted_ratio(g, gjlog([-1, 1], [G, G]), legendre(), 2).ratio
              for G in (0.0, 0.2, 0.4)]
        assert rs[0] > rs[1] > rs[2]

    @pytest.mark.parametrize("p", [2.0, 3.0])
    def test_sliding_profile_diverges_on_log_boundary(self, p):
        # equal log exponents on the critical power: growth like log(1/delta), so the
        # per-halving step is (k + 1) / k and passes 1.1 only while k <= 9
        q = conjugate(p)
        U = V = mid(1 / q, 1.0)
        ds = [2.0 ** -k for k in range(2, 15)]
        rs = [profile_ratio(U, V, p, 0.0, d).ratio for d in ds]
        steps = [b / a for a, b in zip(rs, rs[1:])]
        assert min(steps[:7]) >= 1.1
        assert growth_slope(ds, rs) > 0.2

    def test_sliding_profile_saturates_when_admissible(self):
        ds = [2.0 ** -k for k in range(2, 15)]
        rs = [profile_ratio(mid(0.2), mid(0.2), 2.0, 0.0, d).ratio for d in ds]
        assert growth_slope(ds, rs) < 0.2

    def test_profile_lower_bound(self):
        U = V = legendre()
        d = 0.05
        low = profile_ratio(U, V, 2.0, 0.0, d).ratio
        # the indicator of [-d, d] has transform log|(x + d) / (x - d)|
        full = weighted_ratio(lambda y: (np.abs(y) <= d) * 1.0, U, V, 2.0, breakpoints=[-d, d],
                              Hg=lambda x: np.log(np.abs((x + d) / (x - d)))).ratio
        assert 0 < low <= full * (1 + 1e-6)


class TestLocalProducts:
    def test_flat(self):
        # U = V = 1, p = 2: int_0^1 (delta + t)^-2 * delta and delta * int (t + delta)^-2
        d = 0.01
        a, b = local_products(0, 0, 0, 0, 2.0, d)
        want = (1 / d - 1 / (1 + d)) * d
        assert a == pytest.approx(want, rel=1e-10) and b == pytest.approx(want, rel=1e-10)

    def test_divergent(self):
        a, _ = local_products(0.5, 0, 0.5, 0, 2.0, 0.01)
        assert a == math.inf

    def test_slope_of_loglog_power(self):
        d = 2.0 ** -np.arange(2, 25)
        assert growth_slope(d, np.log(1 / d) ** 1.5) == pytest.approx(1.5, rel=1e-12)
        assert growth_slope(d, np.ones_like(d)) == pytest.approx(0.0, abs=1e-12)


def _matrix():
    cases = []
    for p in (2.0, 3.0):
        q = conjugate(p)
        cases += [(mid(0.2), mid(0.2), p), (mid(0.2), mid(0), p), (mid(0), mid(0.2), p),
                  (mid(0.3), mid(-0.3), p), (mid(1 / q, 1), mid(1 / q, 1), p),
                  (mid(1 / q, 0), mid(1 / q, 1), p), (mid(1 / q), mid(1 / q), p),
                  (mid(-1 / p), mid(-1 / p), p), (end(0.2, 1), end(0.2, 0), p),
                  (end(-0.2), end(-0.2, -1), p)]
    return cases


EXPECTED = {"holds": {"no growth detected"}, "boundary": {"no growth detected"},
            "fails": {"growing", "divergent"}}


def test_condition_matrix_agrees():
    cases = _matrix()
    seen = set()
    for U, V, p in cases:
        rep = condition_sup(U, V, p)
        seen.add(rep.symbolic)
        assert rep.verdict in EXPECTED[rep.symbolic], (U, V, p, rep.slopes)
    assert len(cases) == 20 and seen == {"holds", "fails", "boundary"}


def test_condition_sup_csv():
    rep = condition_sup(WeightSpec(), WeightSpec(), 2.0, delta_grid=[0.1, 0.01, 0.001])
    rows = rep.csv_rows()
    assert len(rows) == 2 * 3 and all(len(r) == len(CSV_HEADER) for r in rows)


def test_condition_sup_bad_grid():
    with pytest.raises(ValueError):
        condition_sup(WeightSpec(), WeightSpec(), 2.0, delta_grid=[0.5, 1.5])
