"""Fourier-orthogonal expansions and partial-sum operators.

Besides coefficients and partial sums, the module splits the
Christoffel-Darboux kernel into the three pieces used to transfer
partial-sum bounds to Hilbert transform bounds, and estimates the norm of
the partial-sum operator between weighted ``L^p`` spaces by adversarial
sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSample, IllConditioned
from .orthopoly import (RecurrenceTable, cached_table, cd_kernel, eval_basis, gauss_rule,
                        table_at_least)
from .quad import DEFAULT_TOL, Region, integrate
from .sampling import RatioSample, as_sampler
from .weights import Weight, WeightSpec, product


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coefficients ``c_0 .. c_{n-1}`` in the orthonormal basis of ``table``."""

    table: RecurrenceTable
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be a finite 1-d array")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.coeffs)


def project(f, table: RecurrenceTable, n: int, tol: float = DEFAULT_TOL) -> CoefficientVector:
    """Coefficients ``c_k = int f p_k dalpha`` for ``k < n``.

    Examples
    --------
    >>> from gjortho.weights import legendre
    >>> from gjortho.orthopoly import recurrence_table
    >>> c = project(lambda x: x, recurrence_table(legendre(), 8), 2)
    >>> np.round(c.coeffs, 7).tolist()
    [0.0, 0.8164966]
    """
    table.check_degree(n)

    def integrand(x):
        return eval_basis(table, n - 1, x)[0] * np.asarray(f(x), dtype=float)

    val = integrate(integrand, table.measure, tol=tol).value
    return CoefficientVector(table, np.atleast_1d(np.asarray(val, dtype=float)))


def partial_sum(coeffs: CoefficientVector, table: RecurrenceTable, x):
    """``sum_k c_k p_k(x)`` by backward (Clenshaw) recurrence."""
    c = coeffs.coeffs
    n = len(c)
    table.check_degree(n)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a, b = table.a, table.b
    y1 = np.zeros_like(x)  # y_{k+1}
    y2 = np.zeros_like(x)  # y_{k+2}
    for k in range(n - 1, -1, -1):
        yk = c[k] + (x - a[k]) / b[k] * y1
        if k + 1 < n:
            yk = yk - b[k] / b[k + 1] * y2
        y2, y1 = y1, yk
    out = y1 / math.sqrt(table.mu0)
    return float(out[0]) if scalar else out


@dataclass(frozen=True, eq=False)
class PollardSplit:
    """``K_n = alpha_n h1 + beta_n (h2 + h3)`` fitted on a probe grid."""

    alpha_n: float
    beta_n: float
    qtable: RecurrenceTable
    residual: float


def _probe_pairs(k: int = 24):
    t = np.cos((np.arange(k) + 0.5) * np.pi / k) * 0.97
    X, Y = np.meshgrid(t, t + 0.013)
    keep = np.abs(X - Y) > 0.05
    return X[keep], np.clip(Y[keep], -0.99, 0.99)


def pollard_split(table: RecurrenceTable, n: int, probe=None) -> PollardSplit:
    """Least-squares fit of the three-piece kernel decomposition.

    ``h1 = p_n(x) p_n(y)``, ``h2 = (1 - y**2) p_n(x) q_{n-1}(y) / (x - y)``
    and ``h3 = h2(y, x)``, where ``q_k`` are orthonormal for
    ``(1 - x**2) dalpha``.

    Raises
    ------
    IllConditioned
        If the two fitted columns are numerically dependent.
    """
    table.check_degree(n)
    qtable = cached_table(product([(table.measure, 1.0)], phi_exponent=2.0), max(n + 1, 16))
    x, y = probe if probe is not None else _probe_pairs()
    K = cd_kernel(table, n, x, y, method="direct")
    px = eval_basis(table, n, x)[0][n]
    py = eval_basis(table, n, y)[0][n]
    qx = eval_basis(qtable, n - 1, x)[0][n - 1]
    qy = eval_basis(qtable, n - 1, y)[0][n - 1]
    h1 = px * py
    h2 = (1 - y * y) * px * qy / (x - y)
    h3 = (1 - x * x) * py * qx / (y - x)
    A = np.column_stack([h1, h2 + h3])
    scale = np.linalg.norm(A, axis=0)
    if np.any(scale == 0) or np.linalg.cond(A / scale) > 1e12:
        raise IllConditioned("kernel split columns are dependent on the probe grid")
    coef, *_ = np.linalg.lstsq(A, K, rcond=None)
    res = float(np.max(np.abs(K - A @ coef)) / np.max(np.abs(K)))
    return PollardSplit(float(coef[0]), float(coef[1]), qtable, res)


# ---------------------------------------------------------------------------
# operator norm estimation


def _anchors(*weights: Weight) -> np.ndarray:
    pts = set()
    for w in weights:
        pts.update(w.points.tolist())
    return np.array(sorted(pts))


def _weighted_norm(lam, vals, wts, p):
    return float(np.sum(lam * np.abs(vals * wts) ** p)) ** (1.0 / p)


def operator_norm_estimate(table: RecurrenceTable, n: int, p: float, u: Weight | None = None,
                           w: Weight | None = None, sampler=None, trials: int = 200,
                           restrict: Region | None = None) -> RatioSample:
    """Lower bound for ``||S_n||`` from ``L^p(u^p dalpha)`` to ``L^p(w^p dalpha)``.

    Norms are evaluated with the Gauss rule of ``dalpha`` on ``4n + 64``
    nodes.  Trials cycle through four sample kinds: two of random
    coefficient vectors (random degree in ``[n/2, 2n]``), one dual
    sign profile ``sgn(P)|P|**(q-1)`` built from ``p_{n-1}, p_n,
    p_{n+1}``, and one Gaussian bump of width about ``1/n`` at a singular
    point or endpoint.

    Parameters
    ----------
    restrict : Region, optional
        Multiply every sample by the indicator of this region.

    Returns
    -------
    RatioSample
        The largest ratio with a witness describing the sample.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    sampler = as_sampler(sampler)
    rng = sampler.rng
    u = u if u is not None else WeightSpec()
    w = w if w is not None else WeightSpec()
    M = 4 * n + 64
    big = table_at_least(table, M)
    rule = gauss_rule(big, M)
    x, lam = rule.nodes, rule.cotes
    kmax = 2 * n + 1
    B = eval_basis(big, kmax, x)[0]
    uw = u.evaluate(x)
    ww = w.evaluate(x)
    anchors = _anchors(table.measure, u, w)
    mask = restrict.contains(x) if restrict is not None else None
    q = p / (p - 1.0)
    best = None
    for t in range(trials):
        kind = t % 4
        if kind in (0, 1):
            deg = int(rng.integers(max(1, n // 2), 2 * n + 1))
            c = rng.standard_normal(deg)
            f = c @ B[:deg]
            wit = {"kind": "coefficients", "degree": deg, "coeffs": np.round(c, 15).tolist()}
        elif kind == 2:
            j = int(rng.integers(max(1, n - 1), n + 2))
            mix = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.0))
            P = B[j - 1] + mix * B[j]
            width = 1e-3 * float(np.max(np.abs(P)))
            f = np.tanh(P / width) * np.abs(P) ** (q - 1) / uw
            wit = {"kind": "dual-profile", "j": j, "mix": mix}
        else:
            c0 = float(anchors[int(rng.integers(len(anchors)))])
            width = float(rng.uniform(0.25, 4.0)) / n
            f = np.exp(-((x - c0) / width) ** 2) / uw
            wit = {"kind": "bump", "center": c0, "width": width}
        if mask is not None:
            f = np.where(mask, f, 0.0)
        den = _weighted_norm(lam, f, uw, p)
        if not den > 1e-300:
            continue
        coef = B[:n] @ (lam * f)
        S = coef @ B[:n]
        r = _weighted_norm(lam, S, ww, p) / den
        if best is None or r > best[0]:
            best = (r, dict(wit, trial=t, seed=sampler.seed))
    if best is None:
        raise DegenerateSample("every sampled denominator vanished")
    return RatioSample(best[0], best[1], n, p, 1, "fourier")
