import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gjortho.errors import DegreeOutOfRange, NotIntegrable
from gjortho.orthopoly import (RecurrenceTable, cached_table, cd_kernel, christoffel, eval_basis,
                               eval_poly, gauss_rule, modified_chebyshev, orthonormality_residual,
                               recurrence_table)
from gjortho.quad import integrate
from gjortho.weights import chebyshev, gjlog, jacobi, legendre

GJLOG = gjlog([-1, 0.3, 1], [0.25, 1, -0.25], [1, -1, -1])


@pytest.fixture(scope="module")
def leg():
    return cached_table(legendre(), 80)


@pytest.fixture(scope="module")
def cheb():
    return cached_table(chebyshev(), 80)


@pytest.fixture(scope="module")
def gjt():
    return cached_table(GJLOG, 80)


class TestRecurrence:
    def test_legendre(self, leg):
        k = np.arange(1, 41)
        assert np.max(np.abs(leg.a[:40])) <= 1e-14
        assert np.allclose(leg.b[:40], k / np.sqrt(4 * k * k - 1), atol=1e-13)
        assert leg.b[0] == pytest.approx(0.5773503, abs=1e-7)

    def test_chebyshev(self, cheb):
        assert cheb.b[0] == pytest.approx(1 / math.sqrt(2), abs=1e-13)
        assert np.allclose(cheb.b[1:40], 0.5, atol=1e-13)

    def test_symmetric_measure(self):
        t = cached_table(gjlog([-1, -0.4, 0.4, 1], [0.3, -0.2, -0.2, 0.3], [1, 1, 1, 1]), 40)
        assert np.max(np.abs(t.a)) <= 1e-10

    def test_matches_modified_chebyshev(self, gjt):
        # two independent constructions: discretized Stieltjes and modified moments
        mc = modified_chebyshev(GJLOG, 12)
        k = mc.n_max
        assert k == 11
        assert np.allclose(mc.a, gjt.a[:k], atol=1e-9)
        assert np.allclose(mc.b, gjt.b[:k], atol=1e-9)

    def test_jacobi_closed_form(self):
        a, b = 0.5, -0.3
        t = recurrence_table(jacobi(a, b), 20)
        n = np.arange(20)
        # monic Jacobi coefficients for (1 - x)**a (1 + x)**b
        s = 2 * n + a + b
        diag = (b * b - a * a) / (s * (s + 2))
        assert np.allclose(t.a, diag, atol=1e-12)

    def test_not_integrable(self):
        with pytest.raises(NotIntegrable):
            recurrence_table(jacobi(-1.0, 0.0), 8)

    def test_orthonormality_residual(self, gjt):
        assert orthonormality_residual(gjt, 12) <= 1e-8

    def test_csv_round_trip(self, gjt):
        back = RecurrenceTable.from_csv(gjt.to_csv())
        assert np.array_equal(back.a, gjt.a) and np.array_equal(back.b, gjt.b)
        assert back.mu0 == gjt.mu0 and back.measure == GJLOG


class TestEval:
    def test_legendre_values(self, leg):
        assert eval_poly(leg, 0, 0.3)[0] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        v, d = eval_poly(leg, 1, 1.0)
        assert v == pytest.approx(math.sqrt(1.5), abs=1e-14)
        assert d == pytest.approx(math.sqrt(1.5), abs=1e-14)

    def test_first_zero(self, gjt):
        assert abs(eval_poly(gjt, 1, gjt.a[0])[0]) <= 1e-14

    def test_degree_out_of_range(self, leg):
        with pytest.raises(DegreeOutOfRange):
            eval_poly(leg, 81, 0.0)

    @given(st.floats(-1, 1), st.integers(1, 40))
    def test_derivative_matches_numpy(self, x, n):
        leg = cached_table(legendre(), 80)
        B = eval_basis(leg, n, np.array([x]), nderiv=2)
        c = np.zeros(n + 1)
        c[n] = math.sqrt(n + 0.5)
        P = np.polynomial.Legendre(c)
        for j in range(3):
            assert B[j, n, 0] == pytest.approx(P.deriv(j)(x), rel=1e-9, abs=1e-9 * n ** (2 * j))


class TestGauss:
    def test_legendre_two(self, leg):
        r = gauss_rule(leg, 2)
        assert np.allclose(r.nodes, [1 / math.sqrt(3), -1 / math.sqrt(3)], atol=1e-15)
        assert np.allclose(r.cotes, 1.0, atol=1e-14)

    def test_chebyshev_four(self, cheb):
        r = gauss_rule(cheb, 4)
        k = np.arange(1, 5)
        assert np.allclose(r.nodes, np.cos((2 * k - 1) * np.pi / 8), atol=1e-14)
        assert np.allclose(r.cotes, math.pi / 4, atol=1e-14)

    @pytest.mark.parametrize("name", ["leg", "cheb", "gjt"])
    def test_mass(self, name, request):
        t = request.getfixturevalue(name)
        for n in (1, 5, 33):
            assert np.sum(gauss_rule(t, n).cotes) == pytest.approx(t.mu0, rel=1e-13)

    @pytest.mark.parametrize("name", ["leg", "cheb", "gjt"])
    def test_exactness(self, name, request):
        t = request.getfixturevalue(name)
        rng = np.random.default_rng(2)
        for n in (4, 8, 16, 32):
            r = gauss_rule(t, n)
            for _ in range(50):
                c = rng.standard_normal(2 * n)
                P = np.polynomial.Polynomial(c)
                ref = integrate(P, t.measure).value
                scale = np.sum(np.abs(c)) * t.mu0
                assert abs(np.sum(r.cotes * P(r.nodes)) - ref) <= 1e-9 * scale

    @pytest.mark.parametrize("name", ["leg", "cheb", "gjt"])
    def test_interlacing(self, name, request):
        t = request.getfixturevalue(name)
        for n in (2, 7, 30):
            x, y = gauss_rule(t, n).nodes, gauss_rule(t, n + 1).nodes
            assert np.all(y[:-1] > x) and np.all(x > y[1:])

    def test_nodes_descending_inside(self, gjt):
        r = gauss_rule(gjt, 40)
        assert np.all(np.diff(r.nodes) < 0) and np.all(np.abs(r.nodes) < 1)


class TestChristoffel:
    def test_cotes_numbers(self, gjt):
        r = gauss_rule(gjt, 12)
        assert np.allclose(christoffel(gjt, 12, r.nodes), r.cotes, rtol=1e-10)

    def test_legendre_n1(self, leg):
        assert christoffel(leg, 1, 0.37) == pytest.approx(2.0, abs=1e-14)

    def test_chebyshev_scale(self, cheb):
        val = christoffel(cheb, 8, 0.0)
        assert 1 / 3 <= val / (math.pi / 8) <= 3

    def test_cd_kernel(self, leg):
        assert cd_kernel(leg, 1, 0.2, -0.7) == pytest.approx(0.5, abs=1e-15)
        x = np.linspace(-0.9, 0.9, 7)
        assert np.allclose(cd_kernel(leg, 10, x, x), 1 / christoffel(leg, 10, x), rtol=1e-13)
        y = x + 0.3
        y = np.clip(y, -1, 1)
        assert np.allclose(cd_kernel(leg, 10, x, y, method="cd"),
                           cd_kernel(leg, 10, x, y, method="direct"), atol=1e-9)
