"""Lagrange and Hermite interpolation at the zeros of orthonormal polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .conditions import ConditionReport, mz_check
from .errors import NumericalBreakdown, SizeMismatch
from .orthopoly import GaussRule, RecurrenceTable, cached_table, eval_basis, eval_poly, gauss_rule
from .quad import DEFAULT_TOL, lp_norm
from .weights import Weight, WeightSpec

NODE_TOL = 1e-12
# Newton form is built in s = 2x so that node products stay O(1) on [-1, 1].
_SCALE = 2.0


@dataclass(frozen=True)
class JetData:
    """Values ``f^(j)(x_k)`` for ``j < m`` at each node, shape ``(n, m)``."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != len(x):
            raise SizeMismatch(f"jet table shape {v.shape} does not match {len(x)} nodes")
        if v.shape[1] < 1:
            raise SizeMismatch("jets must hold at least the function value")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_functions(cls, nodes, derivs: Sequence[Callable]) -> "JetData":
        """Evaluate ``derivs[j]`` (the j-th derivative) at every node."""
        x = np.asarray(nodes, dtype=float)
        vals = np.column_stack([np.broadcast_to(np.asarray(d(x), dtype=float), x.shape)
                                for d in derivs])
        return cls(x, vals)


@dataclass(frozen=True, eq=False)
class PolyEvaluator:
    """Interpolating polynomial; call as ``P(x, deriv=0)``."""

    kind: str
    degree: int
    nodes: np.ndarray
    _eval: Callable = field(repr=False)

    def __call__(self, x, deriv: int = 0):
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if deriv < 0:
            raise ValueError("deriv must be nonnegative")
        out = self._eval(xs, int(deriv))
        return float(out[0]) if scalar else out


def lagrange(rule: GaussRule, table: RecurrenceTable, fvals) -> PolyEvaluator:
    """Lagrange interpolant at the nodes of ``rule``.

    Values use the fundamental polynomials
    ``l_k(x) = p_n(x) / (p_n'(x_k) (x - x_k))``; derivatives use the
    equivalent orthonormal expansion whose coefficients come from the Gauss
    rule.

    Examples
    --------
    >>> from gjortho.weights import chebyshev
    >>> from gjortho.orthopoly import recurrence_table, gauss_rule
    >>> t = recurrence_table(chebyshev(), 8)
    >>> r = gauss_rule(t, 3)
    >>> L = lagrange(r, t, np.abs(r.nodes))
    >>> round(L(0.5), 7)
    0.2886751
    """
    f = np.asarray(fvals, dtype=float)
    n = rule.n
    if f.shape != (n,):
        raise SizeMismatch(f"expected {n} values, got shape {f.shape}")
    x_k, dp = rule.nodes, rule.derivs
    coef = eval_basis(table, n - 1, x_k)[0] @ (rule.cotes * f)

    def evaluate(x, deriv):
        if deriv:
            if deriv >= n:
                return np.zeros_like(x)
            return coef @ eval_basis(table, n - 1, x, nderiv=deriv)[deriv]
        pn = eval_poly(table, n, x)[0]
        diff = x[:, None] - x_k[None, :]
        near = np.abs(diff) < NODE_TOL
        with np.errstate(divide="ignore", invalid="ignore"):
            val = pn * np.sum(f / (dp * diff), axis=1)
        hit = near.any(axis=1)
        if hit.any():
            val[hit] = f[np.argmax(near[hit], axis=1)]
        return val

    return PolyEvaluator("fundamental-lagrange", n - 1, x_k, evaluate)


def expansion(table: RecurrenceTable, coeffs) -> PolyEvaluator:
    """Polynomial ``sum_j c_j p_j`` in the orthonormal basis of ``table``."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or len(c) == 0:
        raise SizeMismatch("coefficients must be a nonempty 1-d array")
    deg = len(c) - 1
    table.check_degree(deg)

    def evaluate(x, deriv):
        if deriv > deg:
            return np.zeros_like(x)
        return c @ eval_basis(table, deg, x, nderiv=deriv)[deriv]

    return PolyEvaluator("orthonormal", deg, np.empty(0), evaluate)


def _leja_order(x: np.ndarray) -> np.ndarray:
    idx = [int(np.argmax(np.abs(x)))]
    with np.errstate(divide="ignore"):
        prod = np.log(np.abs(x - x[idx[0]]))
        for _ in range(len(x) - 1):
            prod[idx] = -np.inf
            j = int(np.argmax(prod))
            idx.append(j)
            prod = prod + np.log(np.abs(x - x[j]))
    return np.array(idx)


def _confluent_differences(z: np.ndarray, jets: np.ndarray, m: int) -> np.ndarray:
    """Newton coefficients for nodes ``z`` where each node appears ``m`` times in a row."""
    N = len(z)
    node_of = np.repeat(np.arange(N // m), m)
    c = jets[node_of, 0].copy()
    for j in range(1, N):
        prev = c.copy()
        for i in range(N - 1, j - 1, -1):
            if node_of[i] == node_of[i - j]:
                c[i] = jets[node_of[i], j] / math.factorial(j)
            else:
                c[i] = (prev[i] - prev[i - 1]) / (z[i] - z[i - j])
        if not np.all(np.isfinite(c[j:])) or np.max(np.abs(c[j:])) > 1e290:
            raise NumericalBreakdown(f"divided differences overflow at order {j}")
    return c


def hermite(rule: GaussRule, table: RecurrenceTable, jets: JetData, m: int) -> PolyEvaluator:
    """Hermite interpolant of degree ``m n - 1`` matching ``m`` jet entries per node.

    The polynomial is kept in confluent Newton form over Leja-ordered nodes.
    Derivatives are computed by differentiating the nested form exactly.

    Raises
    ------
    SizeMismatch
        If the jets do not cover the nodes of ``rule`` to order ``m``.
    NumericalBreakdown
        If the divided differences overflow.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if len(jets.nodes) != rule.n or jets.m < m:
        raise SizeMismatch(f"need jets of order {m} at {rule.n} nodes")
    order = _leja_order(rule.nodes)
    s_nodes = _SCALE * rule.nodes[order]
    # d^j/ds^j = SCALE^-j d^j/dx^j
    vals = jets.values[order, :m] / _SCALE ** np.arange(m)
    z = np.repeat(s_nodes, m)
    c = _confluent_differences(z, vals, m)
    N = len(z)

    def evaluate(x, deriv):
        s = _SCALE * x
        D = np.zeros((deriv + 1, len(x)))
        D[0] = c[N - 1]
        for j in range(N - 2, -1, -1):
            t = s - z[j]
            for k in range(deriv, 0, -1):
                D[k] = t * D[k] + k * D[k - 1]
            D[0] = c[j] + t * D[0]
        return D[deriv] * _SCALE ** deriv

    return PolyEvaluator("confluent-newton", N - 1, rule.nodes, evaluate)


def best_error(f: Callable, n: int, grid: int = 20001) -> float:
    """Upper-bound proxy for the best uniform approximation error ``E_n(f)``.

    Uniform error of the degree-``n`` Chebyshev interpolant on a dense grid
    that mixes equispaced and Chebyshev points.  It exceeds ``E_n(f)`` by at
    most the Lebesgue constant factor.
    """
    coef = npcheb.chebinterpolate(lambda x: np.asarray(f(x), dtype=float) * np.ones_like(x), n)
    x = np.unique(np.concatenate([np.linspace(-1, 1, grid),
                                  np.cos(np.linspace(0, np.pi, grid)), [0.0]]))
    return float(np.max(np.abs(npcheb.chebval(x, coef) - f(x))))


@dataclass(frozen=True)
class SweepResult:
    """Rows ``(n, error)`` of a convergence sweep with the theory verdict."""

    rows: list
    p: float
    m: int
    k: int
    alpha_id: str
    beta_id: str
    report: ConditionReport

    @property
    def verdict(self) -> str:
        return self.report.overall.value

    def csv_rows(self) -> list[list]:
        return [[n, err, self.p, self.m, self.k, self.alpha_id, self.beta_id, self.verdict]
                for n, err in self.rows]


_SIZE_PROBE = np.linspace(-1, 1, 257)
_NOISE = 1e-13


def mn_scale(n: int, m: int, k: int) -> float:
    """Growth of rounding error in the ``k``-th derivative of a degree ``mn`` interpolant."""
    return float(m * n) ** (2 * k)


CSV_HEADER = ["n", "error", "p", "m", "k", "alpha_id", "beta_id", "verdict_of_theory"]


def converge_sweep(f_derivs: Sequence[Callable], alpha: Weight, beta: Weight, p: float, m: int,
                   k: int, ns: Sequence[int], u: Weight | None = None,
                   breakpoints: Sequence[float] = (), tol: float = 1e-9) -> SweepResult:
    """Errors ``||H^(k) - f^(k)||`` in ``L^p(dbeta)`` of Hermite interpolants.

    Parameters
    ----------
    f_derivs : sequence of callables
        ``f`` and its first ``m - 1`` derivatives (at least ``k + 1`` of them).
    breakpoints : sequence of float
        Points where ``f^(k)`` is not smooth, passed to the quadrature.
    """
    if not 0 <= k < m:
        raise ValueError("need 0 <= k < m")
    if len(f_derivs) < m:
        raise SizeMismatch(f"need {m} derivative callables, got {len(f_derivs)}")
    report = mz_check(alpha, beta, u if u is not None else WeightSpec(), p, m)
    table = cached_table(alpha, max(max(ns) + 1, 16))
    rows = []
    for n in ns:
        rule = gauss_rule(table, n)
        H = hermite(rule, table, JetData.from_functions(rule.nodes, f_derivs[:m]), m)
        fk = f_derivs[k]
        with np.errstate(all="ignore"):
            size = float(np.max(np.abs(np.broadcast_to(fk(_SIZE_PROBE), _SIZE_PROBE.shape))))
        # errors at the rounding level of f^(k) are resolved only to that level:
        # normalised noise raised to p then sits below the quadrature tolerance
        noise = _NOISE * mn_scale(n, m, k) * (size if math.isfinite(size) else 0.0)
        floor = noise / tol ** (1.0 / p)
        err = lp_norm(lambda x: H(x, k) - fk(x), beta, p, tol=tol, breakpoints=breakpoints,
                      floor=floor)
        rows.append((int(n), float(err)))
    return SweepResult(rows, p, m, k, repr(alpha), repr(beta), report)
