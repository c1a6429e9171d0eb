"""Finite Hilbert transform on [-1, 1] and checks of the two-weight
local conditions that bound it between weighted ``L^p`` spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .conditions import conjugate, hilbert_check
from .errors import DivergentIntegrand, ZeroDenominator
from .quad import DEFAULT_TOL, Region, integrate, integrate_local, local_mass
from .sampling import RatioSample
from .weights import Weight, gjlog, legendre, product

SLOPE_WINDOW = 8
SLOPE_THRESHOLD = 0.2
DEFAULT_DELTAS = tuple(2.0 ** -k for k in range(2, 25))
CSV_HEADER = ["i", "delta", "u_kernel_product", "v_kernel_product", "slope", "verdict"]
_FLAT = legendre()


@dataclass(frozen=True)
class PVResult:
    value: float
    error_estimate: float


def _transform_many(g: Callable, x: np.ndarray, tol: float, breakpoints: Sequence[float]):
    """Principal values at every ``x`` by subtracting ``g(x)`` under the integral."""
    gx = np.asarray(g(x), dtype=float) * np.ones_like(x)

    def regular(y):
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (np.asarray(g(y), dtype=float)[None, :] - gx[:, None]) / (x[:, None] - y[None, :])
        return np.nan_to_num(q, nan=0.0, posinf=0.0, neginf=0.0)

    res = integrate(regular, _FLAT, tol=tol, breakpoints=tuple(breakpoints))
    val = np.atleast_1d(res.value) + gx * np.log((1.0 + x) / (1.0 - x))
    return val, res.error_estimate


def transform(g: Callable, x: float, tol: float = DEFAULT_TOL,
              breakpoints: Sequence[float] = ()) -> PVResult:
    """Principal value ``int_{-1}^1 g(y) / (x - y) dy`` for ``|x| < 1``.

    The smooth remainder ``int (g(y) - g(x)) / (x - y) dy`` is integrated
    adaptively with a breakpoint at ``x``; the subtracted part contributes
    ``g(x) log((1 + x) / (1 - x))``.

    Examples
    --------
    >>> round(transform(np.ones_like, 0.5).value, 7)
    1.0986123
    >>> round(transform(lambda y: np.sqrt(1 - y * y), 0.3).value, 7)
    0.9424778
    """
    if not -1.0 < x < 1.0:
        raise ValueError("x must lie in (-1, 1)")
    gx = float(np.asarray(g(np.array([x])), dtype=float).ravel()[0])

    def regular(y):
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (np.asarray(g(y), dtype=float) - gx) / (x - y)
        return np.nan_to_num(q, nan=0.0, posinf=0.0, neginf=0.0)

    res = integrate(regular, _FLAT, tol=tol, breakpoints=(x, *breakpoints))
    return PVResult(float(res.value) + gx * math.log((1.0 + x) / (1.0 - x)),
                    res.error_estimate)


def transform_values(g: Callable, x, tol: float = 1e-9, breakpoints: Sequence[float] = ()):
    """Vectorised :func:`transform` over an array of points in ``(-1, 1)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) >= 1):
        raise ValueError("points must lie in (-1, 1)")
    return _transform_many(g, x, tol, breakpoints)[0]


def weighted_ratio(g: Callable, U: Weight, V: Weight, p: float,
                   breakpoints: Sequence[float] = (), Hg: Callable | None = None,
                   tol: float = 1e-7) -> RatioSample:
    """``||H(g) U||_p / ||g V||_p``.

    Parameters
    ----------
    breakpoints : sequence of float
        Points where ``g`` is not smooth; used by both integrals.
    Hg : callable, optional
        Known transform of ``g`` (for instance a closed form); otherwise it
        is computed numerically at every outer quadrature point.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    Hfun = Hg if Hg is not None else (lambda x: transform_values(g, x, tol * 1e-2, breakpoints))
    den = integrate(lambda y: np.abs(np.asarray(g(y), dtype=float)) ** p,
                    product([(V, p)]), tol=tol, breakpoints=tuple(breakpoints)).value
    if not den > 0:
        raise ZeroDenominator("||g V||_p vanishes")
    num = integrate(lambda x: np.abs(Hfun(x)) ** p, product([(U, p)]), tol=tol,
                    breakpoints=tuple(breakpoints)).value
    ratio = (float(num) / float(den)) ** (1.0 / p)
    return RatioSample(ratio, {"kind": "given"}, 0, p, 1, "hilbert")


# ---------------------------------------------------------------------------
# local two-weight conditions


def local_products(GU: float, gU: float, GV: float, gV: float, p: float, delta: float):
    """Both local products for factors ``t**G log(e/t)**g`` of ``U`` and ``V``.

    ``u_kernel_product = int_0^1 U**p/(delta+t)**p dt * (int_0^delta V**-q dt)**(p-1)``
    and ``v_kernel_product = int_0^delta U**p dt * (int_0^1 V**-q/(t+delta)**q dt)**(p-1)``.
    A divergent factor gives ``inf``.
    """
    q = conjugate(p)
    a, b = p * GU, p * gU
    c, d = -q * GV, -q * gV

    def weighted(G, g, r):
        f = lambda t: (delta + t) ** (-r)
        try:
            near = float(integrate_local(f, G, g, delta, tol=1e-13).value)
        except DivergentIntegrand:
            return math.inf
        # t = 1 + x puts the local factor at x = -1
        w = gjlog([-1.0, 1.0], [G, 0.0], [g, 0.0])
        cuts = tuple(-1.0 + delta * 2.0 ** k for k in range(1, int(-math.log2(delta)) + 1))
        scale = near if near > 0 else 1.0
        far = integrate(lambda x: f(1.0 + x) / scale, w, Region(((-1.0 + delta, 0.0),)),
                        tol=1e-11, breakpoints=cuts).value
        return near + scale * float(far)

    pu = weighted(a, b, p) * local_mass(c, d, delta) ** (p - 1)
    pv = local_mass(a, b, delta) * weighted(c, d, q) ** (p - 1)
    return pu, pv


def growth_slope(deltas, values, window: int = SLOPE_WINDOW) -> float:
    """Least-squares slope of ``log(value)`` against ``log log(1/delta)``."""
    d = np.asarray(deltas, dtype=float)[-window:]
    v = np.asarray(values, dtype=float)[-window:]
    if not np.all(np.isfinite(v)):
        return math.inf
    return float(np.polyfit(np.log(np.log(1.0 / d)), np.log(v), 1)[0])


@dataclass(frozen=True)
class ConditionSupReport:
    """Per-point products over the ``delta`` grid with growth verdicts."""

    p: float
    points: tuple
    deltas: tuple
    products: dict
    slopes: dict
    symbolic: str

    def verdict_at(self, i: int) -> str:
        s = self.slopes[i]
        if not math.isfinite(s):
            return "divergent"
        return "growing" if s > SLOPE_THRESHOLD else "no growth detected"

    @property
    def verdict(self) -> str:
        vs = [self.verdict_at(i) for i in range(len(self.points))]
        for v in ("divergent", "growing"):
            if v in vs:
                return v
        return "no growth detected"

    @property
    def sup(self) -> float:
        return max(max(max(a, b) for a, b in rows) for rows in self.products.values())

    def csv_rows(self) -> list[list]:
        out = []
        for i in range(len(self.points)):
            for delta, (a, b) in zip(self.deltas, self.products[i]):
                out.append([i, delta, a, b, self.slopes[i], self.verdict_at(i)])
        return out


def condition_sup(U: Weight, V: Weight, p: float, delta_grid=DEFAULT_DELTAS) -> ConditionSupReport:
    """Evaluate both local products at every singular point over ``delta_grid``.

    The slope reported per point is the larger of the two products' slopes
    over the last grid points.

    Examples
    --------
    >>> from gjortho.weights import WeightSpec
    >>> rep = condition_sup(WeightSpec(), WeightSpec(), 2.0)
    >>> rep.sup <= 1.0, rep.verdict
    (True, 'no growth detected')
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    deltas = tuple(sorted((float(d) for d in delta_grid), reverse=True))
    if any(not 0 < d < 1 for d in deltas):
        raise ValueError("delta grid must lie in (0, 1)")
    pts = tuple(sorted(set(U.points.tolist()) | set(V.points.tolist())))
    products, slopes = {}, {}
    for i, c in enumerate(pts):
        GU, gU = U.exponents_at(c)
        GV, gV = V.exponents_at(c)
        rows = [local_products(GU, gU, GV, gV, p, d) for d in deltas]
        products[i] = rows
        slopes[i] = max(growth_slope(deltas, [r[0] for r in rows]),
                        growth_slope(deltas, [r[1] for r in rows]))
    symbolic = hilbert_check(U, V, p).overall.value
    return ConditionSupReport(p, pts, deltas, products, slopes, symbolic)


def profile_ratio(U: Weight, V: Weight, p: float, point: float, delta: float,
                  tol: float = 1e-8) -> RatioSample:
    """Lower bound for the weighted ratio at the dual profile ``g = V**-q``
    supported on ``delta``-neighbourhood of ``point``.

    ``H(g)`` is a regular integral away from the support, so the numerator
    is integrated only outside the ``2 delta``-neighbourhood; dropping that
    part keeps the result a lower bound of the full ratio.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    q = conjugate(p)
    lo, hi = max(-1.0, point - delta), min(1.0, point + delta)
    support = Region(((lo, hi),))
    Vq = product([(V, -q)])
    den = float(integrate(np.ones_like, Vq, support, tol=tol).value)
    outer = [(a, b) for a, b in ((-1.0, point - 2 * delta), (point + 2 * delta, 1.0)) if a < b]
    if not outer:
        raise ValueError("delta too large for the interval")

    def Hg(x):
        res = integrate(lambda y: 1.0 / (x[:, None] - y[None, :]), Vq, support, tol=tol * 1e-2)
        return np.atleast_1d(res.value)

    num = float(integrate(lambda x: np.abs(Hg(np.atleast_1d(x))) ** p, product([(U, p)]),
                          Region(tuple(outer)), tol=tol).value)
    # |g V|**p = V**(p - pq) = V**-q, so den is already the p-th power
    ratio = (num / den) ** (1.0 / p) if den > 0 else 0.0
    return RatioSample(ratio, {"kind": "profile", "point": point, "delta": delta}, 0, p, 1,
                       "hilbert")
