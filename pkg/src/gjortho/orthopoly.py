"""Orthonormal polynomials for a weight on ``[-1, 1]``.

The polynomials satisfy

    x p_k(x) = b_{k+1} p_{k+1}(x) + a_k p_k(x) + b_k p_{k-1}(x),
    p_0 = 1 / sqrt(mu0),

with ``mu0`` the total mass.  Coefficients come from a discretised
Stieltjes procedure on the composite rule of :func:`gjortho.quad.discretize`,
repeated at doubled resolution until the coefficients agree.  A modified
Chebyshev algorithm with Legendre moments is available as an independent
cross-check.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (ConvergenceFailure, DegreeOutOfRange, EigenFailure, NotIntegrable)
from .quad import discretize, integrate
from .weights import Verdict, Weight, WeightSpec, classify, regularized_density, varphi

DEFAULT_NMAX = 512


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """Recurrence coefficients of the orthonormal polynomials of a measure.

    Attributes
    ----------
    measure : Weight
    n_max : int
        Number of stored steps; ``p_0 .. p_{n_max}`` are available.
    a : ndarray, shape (n_max,)
        Diagonal coefficients ``a_0 .. a_{n_max-1}``.
    b : ndarray, shape (n_max,)
        Off-diagonal coefficients ``b_1 .. b_{n_max}`` (``b[k-1] = b_k``).
    mu0 : float
        Total mass of the measure.
    """

    measure: Weight
    n_max: int
    a: np.ndarray
    b: np.ndarray
    mu0: float
    converged_change: float = field(default=0.0, compare=False)

    def check_degree(self, n: int) -> None:
        if n < 0 or n > self.n_max:
            raise DegreeOutOfRange(f"degree {n} outside 0..{self.n_max}")

    def to_csv(self) -> str:
        """Serialise to CSV: a header row with ``mu0`` and the weight record."""
        out = io.StringIO()
        wr = csv.writer(out, lineterminator="\n")
        rec = self.measure.to_dict() if isinstance(self.measure, WeightSpec) else None
        wr.writerow(["mu0", repr(self.mu0), "weight", json.dumps(rec, sort_keys=True)])
        wr.writerow(["k", "a_k", "b_k+1"])
        for k in range(self.n_max):
            wr.writerow([k, repr(float(self.a[k])), repr(float(self.b[k]))])
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str, measure: Weight | None = None) -> "RecurrenceTable":
        rows = list(csv.reader(io.StringIO(text)))
        mu0 = float(rows[0][1])
        if measure is None:
            measure = WeightSpec.from_dict(json.loads(rows[0][3]))
        body = rows[2:]
        a = np.array([float(r[1]) for r in body])
        b = np.array([float(r[2]) for r in body])
        return cls(measure, len(body), a, b, mu0)


def _stieltjes(x, w, n):
    """Discretised Stieltjes procedure on the rule ``(x, w)``."""
    mu0 = float(np.sum(w))
    a = np.empty(n)
    b = np.empty(n)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(mu0))
    bk = 0.0
    for k in range(n):
        wp = w * p
        a[k] = float(np.dot(wp, x * p))
        r = (x - a[k]) * p - bk * p_prev
        # one step of reorthogonalisation against p_k keeps the procedure stable
        r -= float(np.dot(wp, r)) * p
        bk = math.sqrt(float(np.dot(w * r, r)))
        b[k] = bk
        p_prev, p = p, r / bk
    return a, b, mu0


def recurrence_table(weight: Weight, n_max: int = DEFAULT_NMAX, tol: float = 1e-13,
                     max_refine: int = 3) -> RecurrenceTable:
    """Recurrence coefficients up to ``n_max``.

    Raises
    ------
    NotIntegrable
        If the weight is not in ``L^1``.
    ConvergenceFailure
        If refinement does not settle the coefficients to ``tol`` (relative).
    """
    if classify(weight).L1 != Verdict.HOLDS:
        raise NotIntegrable("the weight is not integrable")
    degree = 2 * n_max + 2
    prev = None
    change = math.inf
    for level in range(max_refine + 1):
        x, w = discretize(weight, degree, refine=2 ** level)
        a, b, mu0 = _stieltjes(x, w, n_max)
        if prev is not None:
            change = max(np.max(np.abs(a - prev[0])), np.max(np.abs(b - prev[1])))
            if change <= tol:
                return RecurrenceTable(weight, n_max, a, b, mu0, float(change))
        prev = (a, b)
    raise ConvergenceFailure(f"recurrence coefficients changed by {change:.2e} on refinement")


def modified_chebyshev(weight: Weight, n: int, tol: float = 1e-13) -> RecurrenceTable:
    """Recurrence coefficients from modified moments against monic Legendre.

    Independent of the Stieltjes route: moments are adaptive integrals.
    Only well conditioned for small ``n`` (about 20 or less).
    """
    # monic Legendre: pi_{k+1} = x pi_k - k^2/(4k^2-1) pi_{k-1}
    K = 2 * n
    ak = np.zeros(K)
    bk = np.array([2.0] + [k * k / (4.0 * k * k - 1.0) for k in range(1, K)])

    def monic(x):
        out = np.empty((K, len(x)))
        out[0] = 1.0
        if K > 1:
            out[1] = x
        for k in range(1, K - 1):
            out[k + 1] = x * out[k] - bk[k] * out[k - 1]
        return out

    mom = np.asarray(integrate(monic, weight, tol=tol).value)
    alpha = np.zeros(n)
    beta = np.zeros(n)
    sig_prev = np.zeros(K)
    sig = mom.copy()
    alpha[0] = ak[0] + mom[1] / mom[0]
    beta[0] = mom[0]
    for k in range(1, n):
        new = np.zeros(K)
        for l in range(k, K - k):
            new[l] = (sig[l + 1] - (alpha[k - 1] - ak[l]) * sig[l]
                      - beta[k - 1] * sig_prev[l] + bk[l] * sig[l - 1])
        alpha[k] = ak[k] + new[k + 1] / new[k] - sig[k] / sig[k - 1]
        beta[k] = new[k] / sig[k - 1]
        sig_prev, sig = sig, new
    # orthonormal b_k = sqrt(beta_k) for k >= 1; b_n is not available here
    b = np.sqrt(beta[1:])
    return RecurrenceTable(weight, n - 1, alpha[: n - 1], b, float(mom[0]))


def eval_basis(table: RecurrenceTable, n: int, x, nderiv: int = 0) -> np.ndarray:
    """Values and derivatives of ``p_0 .. p_n`` at ``x``.

    Returns
    -------
    ndarray, shape (nderiv + 1, n + 1, len(x))
        ``out[j, k]`` is the ``j``-th derivative of ``p_k``.
    """
    table.check_degree(n)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((nderiv + 1, n + 1, x.size))
    out[0, 0] = 1.0 / math.sqrt(table.mu0)
    a, b = table.a, table.b
    for k in range(n):
        bprev = b[k - 1] if k > 0 else 0.0
        for j in range(nderiv + 1):
            t = (x - a[k]) * out[j, k]
            if j > 0:
                t = t + j * out[j - 1, k]
            if k > 0:
                t = t - bprev * out[j, k - 1]
            out[j, k + 1] = t / b[k]
    return out


def eval_poly(table: RecurrenceTable, n: int, x):
    """``(p_n(x), p_n'(x))``.

    Examples
    --------
    >>> from gjortho.weights import legendre
    >>> t = recurrence_table(legendre(), 8)
    >>> v, d = eval_poly(t, 1, 1.0)
    >>> round(float(v), 10)
    1.2247448714
    """
    scalar = np.ndim(x) == 0
    B = eval_basis(table, n, x, 1)
    v, d = B[0, n], B[1, n]
    if scalar:
        return float(v[0]), float(d[0])
    return v, d


@dataclass(frozen=True, eq=False)
class GaussRule:
    """Gauss rule with ``n`` nodes in descending order."""

    n: int
    nodes: np.ndarray
    cotes: np.ndarray
    derivs: np.ndarray


def gauss_rule(table: RecurrenceTable, n: int) -> GaussRule:
    """Nodes, Cotes numbers and ``p_n'`` at the nodes.

    Eigenvalues of the Jacobi matrix are polished by one Newton step on
    ``p_n``; Cotes numbers are the Christoffel function at the polished
    nodes.

    Examples
    --------
    >>> from gjortho.weights import legendre
    >>> r = gauss_rule(recurrence_table(legendre(), 8), 2)
    >>> np.round(r.nodes, 12).tolist(), np.round(r.cotes, 12).tolist()
    ([0.57735026919, -0.57735026919], [1.0, 1.0])
    """
    if n < 1:
        raise ValueError("n must be positive")
    table.check_degree(n)
    try:
        if n == 1:
            x = np.array([table.a[0]])
        else:
            x = eigh_tridiagonal(table.a[:n], table.b[: n - 1], eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    for _ in range(2):
        B = eval_basis(table, n, x, 1)
        step = B[0, n] / B[1, n]
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    x = np.clip(np.sort(x)[::-1], -1.0, 1.0)
    B = eval_basis(table, n, x, 1)
    lam = 1.0 / np.sum(B[0, :n] ** 2, axis=0)
    return GaussRule(n, x, lam, B[1, n])


def christoffel(table: RecurrenceTable, n: int, x):
    """``lambda_n(x) = 1 / sum_{k<n} p_k(x)**2``."""
    scalar = np.ndim(x) == 0
    B = eval_basis(table, n, x)
    lam = 1.0 / np.sum(B[0, :n] ** 2, axis=0)
    return float(lam[0]) if scalar else lam


def cd_kernel(table: RecurrenceTable, n: int, x, y, method: str = "auto"):
    """Christoffel-Darboux kernel ``K_n(x, y) = sum_{k<n} p_k(x) p_k(y)``.

    ``method="cd"`` uses the quotient ``b_n (p_n(x) p_{n-1}(y) -
    p_{n-1}(x) p_n(y)) / (x - y)``; ``"direct"`` the sum; ``"auto"`` the
    quotient away from the diagonal.  ``x`` and ``y`` broadcast.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf, yf = x.ravel(), y.ravel()
    Bx = eval_basis(table, n, xf)[0]
    By = eval_basis(table, n, yf)[0]
    direct = np.sum(Bx[:n] * By[:n], axis=0)
    if method == "direct":
        return direct.reshape(shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = table.b[n - 1] * (Bx[n] * By[n - 1] - Bx[n - 1] * By[n]) / (xf - yf)
    if method == "cd":
        return quot.reshape(shape)
    near = np.abs(xf - yf) < 1e-6
    return np.where(near, direct, quot).reshape(shape)


def orthonormality_residual(table: RecurrenceTable, kmax: int, tol: float = 1e-12) -> float:
    """``max_{j,k<=kmax} |int p_j p_k dalpha - delta_jk|`` by adaptive quadrature."""
    def gram(x):
        B = eval_basis(table, kmax, x)[0]
        return (B[:, None, :] * B[None, :, :]).reshape((kmax + 1) ** 2, -1)

    G = np.asarray(integrate(gram, table.measure, tol=tol).value).reshape(kmax + 1, kmax + 1)
    return float(np.max(np.abs(G - np.eye(kmax + 1))))


@functools.lru_cache(maxsize=32)
def cached_table(weight: Weight, n_max: int = DEFAULT_NMAX) -> RecurrenceTable:
    """Memoised :func:`recurrence_table` (weights are immutable)."""
    return recurrence_table(weight, n_max)


def table_at_least(table: RecurrenceTable, n: int) -> RecurrenceTable:
    """``table`` itself or a longer table for the same measure."""
    if table.n_max >= n:
        return table
    return cached_table(table.measure, max(n, DEFAULT_NMAX))


def envelope_ratios(table: RecurrenceTable, n: int, x) -> dict:
    """Normalised size ratios of ``p_n``, ``p_n'`` at the zeros, and ``lambda_n``.

    With ``D(x) = regularized_density(measure, n, x) * phi(n, x)`` the
    returned arrays are ``|p_n(x)| D**0.5``, ``lambda_n(x) n / D`` on ``x``,
    and ``|p_n'(x_k)| phi(n, x_k) D(x_k)**0.5 / n`` on the zeros.  Each
    should stay within fixed bounds as ``n`` grows.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    B = eval_basis(table, n, x)[0]
    D = regularized_density(table.measure, n, x) * varphi(x, n)
    rule = gauss_rule(table, n)
    Dk = regularized_density(table.measure, n, rule.nodes) * varphi(rule.nodes, n)
    return {"pn": np.abs(B[n]) * np.sqrt(D),
            "christoffel": n / np.sum(B[:n] ** 2, axis=0) / D,
            "derivative": np.abs(rule.derivs) * varphi(rule.nodes, n) * np.sqrt(Dk) / n}
