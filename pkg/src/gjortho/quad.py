"""Adaptive quadrature against generalized Jacobi-log weights.

Integrals ``int f(x) w(x) dx`` are computed in the angle variable
``x = cos(theta)``.  The interval is split at every singular point of the
weight; each piece adjacent to a singular point is covered by geometric
shells (ratio 1/4) shrinking towards it, and the part closer than the
last shell is added analytically from the local model
``|x - c|**G * log(e/|x - c|)**g``.  Distances to the singular point are
computed from the angle offset, so nothing is lost to cancellation in
``1 - x`` near the endpoints.  Pieces without singular ends use a global
adaptive Gauss-Kronrod (7, 15) scheme.
"""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import DivergentIntegrand, EmptyRegion, NoConvergence
from .weights import Verdict, Weight, integrable_exponents, local_factor

DEFAULT_TOL = 1e-10
SHELL_RATIO = 0.25
MAX_SUBDIVISIONS = 20000
MAX_SHELLS = 420

# Gauss-Kronrod (7, 15) abscissae and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[[1, 3, 5, 13, 11, 9, 7]] = [_WG[0], _WG[1], _WG[2], _WG[0], _WG[1], _WG[2], _WG[3]]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class Region:
    """Finite union of disjoint closed subintervals of ``[-1, 1]``.

    Attributes
    ----------
    intervals : tuple of (float, float)
        Sorted, pairwise disjoint, each with ``a < b``.
    tag : str
        Where the region came from (``"full"``, ``"delta_n"``, ...).
    """

    intervals: tuple = ((-1.0, 1.0),)
    tag: str = "full"

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise EmptyRegion("region has no intervals")
        prev = -math.inf
        for a, b in ivs:
            if not (-1.0 <= a < b <= 1.0) or a < prev:
                raise ValueError(f"bad region intervals {ivs}")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x >= a) & (x <= b)
        return out


FULL = Region()


@dataclass(frozen=True)
class IntegralResult:
    """Value of an integral with its error estimate and work count."""

    value: float | np.ndarray
    error_estimate: float
    subdivisions: int

    def __float__(self) -> float:
        return float(self.value)


def local_mass(Gamma: float, gamma: float, d: float) -> float:
    """``int_0^d s**Gamma * log(e/s)**gamma ds`` for ``0 < d <= 1``.

    Returns ``inf`` when the integral diverges.
    """
    if d <= 0:
        return 0.0
    a = Gamma + 1.0
    u0 = 1.0 - math.log(d)
    if abs(a) <= 1e-14:
        if gamma < -1:
            return u0 ** (gamma + 1) / (-gamma - 1)
        return math.inf
    if a < 0:
        return math.inf
    if gamma == 0.0:
        return d ** a / a
    val = mpmath.e ** a * mpmath.mpf(a) ** (-gamma - 1) * mpmath.gammainc(gamma + 1, a * u0)
    return float(val)


def _gk15(F, lo, hi):
    """Kronrod estimate and error on ``[lo, hi]`` for a vector integrand."""
    half = 0.5 * (hi - lo)
    s = lo + half * (GK_NODES + 1.0)
    v = np.atleast_2d(F(s))
    k = half * (v @ GK_WEIGHTS)
    g = half * (v @ G_WEIGHTS)
    err = np.abs(k - g)
    # QUADPACK-style sharpening of the raw difference
    resasc = half * (np.abs(v - (k / (2 * half))[:, None]) @ GK_WEIGHTS)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200 * err / resasc) ** 1.5), err)
    err = np.maximum(scaled, 50 * np.finfo(float).eps * np.abs(k))
    return k, float(np.max(err)) if err.size else 0.0


class _Budget:
    def __init__(self, limit):
        self.used = 0
        self.limit = limit

    def take(self, k=1):
        self.used += k
        if self.used > self.limit:
            raise NoConvergence("subdivision budget exhausted")


def _adaptive(F, lo, hi, tol_abs, budget: _Budget, rel: float = 0.0):
    """Global adaptive GK15 on one interval; returns (value, error)."""
    k, e = _gk15(F, lo, hi)
    heap = [(-e, lo, hi, k)]
    total = k.copy()
    err = e
    while err > max(tol_abs, rel * float(np.max(np.abs(total)))):
        negerr, a, b, val = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if m <= a or m >= b or (b - a) < 1e-15 * max(abs(a), abs(b), 1e-300):
            # cannot refine further; keep the estimate as is
            heapq.heappush(heap, (0.0, a, b, val))
            err += negerr
            if all(item[0] == 0.0 for item in heap):
                break
            continue
        budget.take()
        k1, e1 = _gk15(F, a, m)
        k2, e2 = _gk15(F, m, b)
        total = total - val + k1 + k2
        err = err + negerr + e1 + e2
        heapq.heappush(heap, (-e1, a, m, k1))
        heapq.heappush(heap, (-e2, m, b, k2))
    # recompute to avoid drift from repeated subtraction
    total = sum(item[3] for item in heap)
    err = sum(-item[0] for item in heap)
    return total, err


def _graded(F, length, tail, tol_abs, budget: _Budget, rel: float):
    """Integrate over offsets ``[0, length]`` with the singular end at 0.

    ``tail(s)`` returns ``(tail_value, predicted)`` where ``tail_value`` is
    the analytic integral over ``[0, s]`` and ``predicted(s1, s2)`` the model
    integral over a shell; ``None`` when no model is available.
    """
    total = None
    err = 0.0
    hi = length
    sums = []
    good = 0
    growth = 0
    model = tail
    for k in range(MAX_SHELLS):
        lo = hi * SHELL_RATIO
        budget.take()
        S, e = _adaptive(F, lo, hi, tol_abs / 8, budget, rel)
        total = S if total is None else total + S
        err += e
        sums.append(S)
        smax = float(np.max(np.abs(S)))
        if k >= 1:
            prev = float(np.max(np.abs(sums[-2])))
            growth = growth + 1 if smax > 1.5 * prev and smax > 0 else 0
            if growth >= 5:
                raise DivergentIntegrand("shell contributions keep growing")
        scale = max(1.0, float(np.max(np.abs(total))))
        if model is not None:
            T, P = model(lo), model.predict(lo, hi)
            if T is not None and np.all(np.isfinite(T)):
                mism = float(np.max(np.abs(S - P)))
                rel_mism = mism / max(smax, 1e-300)
                tail_err = rel_mism * float(np.max(np.abs(T)))
                if k >= 2 and rel_mism < 0.05 and tail_err <= 0.25 * max(tol_abs, rel * scale):
                    good += 1
                else:
                    good = 0
                if good >= 2:
                    return total + T, err + tail_err, k
        if k >= 3 and smax <= 1e-3 * tol_abs and len(sums) >= 2 and \
                float(np.max(np.abs(sums[-2]))) <= 1e-3 * tol_abs:
            T = model(lo) if model is not None else None
            if T is None or not np.all(np.isfinite(T)):
                return total, err + smax, k
            if float(np.max(np.abs(T))) <= 1e-2 * tol_abs:
                return total + T, err + float(np.max(np.abs(T))), k
        hi = lo
        if hi < 1e-300:
            break
    if model is not None:
        T = model(hi)
        if T is not None and not np.all(np.isfinite(T)):
            raise DivergentIntegrand("integrand is not integrable at a singular point")
        if T is not None:
            return total + T, err + float(np.max(np.abs(sums[-1]))), MAX_SHELLS
    return total, err + float(np.max(np.abs(sums[-1]))), MAX_SHELLS


class _LocalModel:
    """Analytic near-field model ``f(c) * reg * local_mass(G, g, d(s))``."""

    def __init__(self, fc, reg, G, g, dist_of):
        self.fc = fc
        self.reg = reg
        self.G, self.g = G, g
        self.dist_of = dist_of
        self.usable = fc is not None and np.all(np.isfinite(fc)) and np.isfinite(reg)

    def mass(self, s):
        return local_mass(self.G, self.g, float(self.dist_of(s)))

    def __call__(self, s):
        if not self.usable:
            return None
        m = self.mass(s)
        if not np.isfinite(m):
            nz = self.fc != 0
            out = np.zeros_like(self.fc)
            out[nz] = np.inf
            return out
        return self.fc * self.reg * m

    def predict(self, s1, s2):
        if not self.usable:
            return None
        m2, m1 = self.mass(s2), self.mass(s1)
        if not (np.isfinite(m1) and np.isfinite(m2)):
            return np.full_like(self.fc, np.nan)
        return self.fc * self.reg * (m2 - m1)


def _vec(f, x):
    """Evaluate ``f`` and reshape to ``(m, len(x))``."""
    v = np.asarray(f(x), dtype=float)
    if v.ndim == 0:
        v = np.full(x.shape, float(v))
    return np.atleast_2d(v)


def _safe_fc(f, c):
    try:
        with np.errstate(all="ignore"):
            v = _vec(f, np.array([c]))[:, 0]
    except (ZeroDivisionError, ValueError, FloatingPointError, ArithmeticError):
        return None
    return v if np.all(np.isfinite(v)) else None


def _anchor(c: float):
    """``(sin, cos)`` of the angle of ``c``, exact at the endpoints."""
    if c == 1.0:
        return 0.0, 1.0
    if c == -1.0:
        return 0.0, -1.0
    return math.sqrt(1.0 - c * c), c


def _theta_maps(c: float, sign: int):
    """Coordinate maps for angles ``theta_c + sign * s`` near ``x = c``."""
    sc, cc = _anchor(c)

    def x_of(s):
        x = cc * np.cos(s) - sign * sc * np.sin(s)
        return np.clip(x, -1.0, 1.0)

    def jac(s):
        return np.abs(sc * np.cos(s) + sign * cc * np.sin(s))

    def dist(s):
        half = 0.5 * np.asarray(s)
        return np.abs(2.0 * np.sin(half) * (sc * np.cos(half) + sign * cc * np.sin(half)))

    return x_of, jac, dist


def _pieces(weight: Weight, region: Region, breakpoints: Sequence[float]):
    """Split the region into angle pieces with anchored ends.

    Yields ``("plain", th_lo, th_hi)`` or ``("graded", c, sign, length)``.
    """
    sing = set(float(p) for p in weight.points)
    for a, b in region.intervals:
        cuts = {a, b}
        cuts.update(p for p in sing if a < p < b)
        cuts.update(float(p) for p in breakpoints if a < p < b)
        cuts.update(k for k in weight.kinks() if a < k < b and k not in sing)
        cuts = sorted(cuts)
        for xl, xr in zip(cuts[:-1], cuts[1:]):
            th_lo, th_hi = math.acos(xr), math.acos(xl)
            left_sing = xr in sing   # angle th_lo corresponds to xr
            right_sing = xl in sing
            if left_sing and right_sing:
                mid = 0.5 * (th_lo + th_hi)
                yield ("graded", xr, +1, mid - th_lo)
                yield ("graded", xl, -1, th_hi - mid)
            elif left_sing:
                yield ("graded", xr, +1, th_hi - th_lo)
            elif right_sing:
                yield ("graded", xl, -1, th_hi - th_lo)
            else:
                yield ("plain", th_lo, th_hi)


def _integrate_pieces(f, weight: Weight, region: Region, tol: float,
                      breakpoints=(), max_subdivisions=MAX_SUBDIVISIONS):
    budget = _Budget(max_subdivisions)
    pieces = list(_pieces(weight, region, breakpoints))
    tol_abs = tol / max(1, len(pieces))
    total = None
    err = 0.0
    for piece in pieces:
        if piece[0] == "plain":
            _, lo, hi = piece

            def F(th):
                x = np.clip(np.cos(th), -1.0, 1.0)
                return _vec(f, x) * (weight.evaluate(x) * np.sin(th))

            val, e = _adaptive(F, lo, hi, tol_abs, budget, tol)
        else:
            _, c, sign, length = piece
            x_of, jac, dist = _theta_maps(c, sign)

            def F(s, x_of=x_of, jac=jac, dist=dist, c=c):
                x = x_of(s)
                return _vec(f, x) * (weight.evaluate(x, near=(c, dist(s))) * jac(s))

            G, g = weight.exponents_at(c)
            reg = weight.regular_at(c)
            if integrable_exponents(G, g) != Verdict.HOLDS:
                fc = _safe_fc(f, c)
                if fc is not None and np.any(fc != 0):
                    raise DivergentIntegrand(f"weight is not integrable at {c}")
            model = _LocalModel(_safe_fc(f, c), reg, G, g, dist)
            val, e, _ = _graded(F, length, model, tol_abs, budget, tol)
        total = val if total is None else total + val
        err += e
    return total, err, budget.used


def integrate(f: Callable, weight: Weight, region: Region = FULL, tol: float = DEFAULT_TOL,
              breakpoints: Sequence[float] = (), max_subdivisions: int = MAX_SUBDIVISIONS
              ) -> IntegralResult:
    """Compute ``int_region f(x) w(x) dx``.

    Parameters
    ----------
    f : callable
        Vectorised; may return shape ``(n,)`` or ``(m, n)`` for ``m``
        integrands at once (the value is then an array).
    weight : Weight
    region : Region, optional
    tol : float, optional
        Target absolute error, relaxed to relative for large values.
    breakpoints : sequence of float, optional
        Extra points where ``f`` is not smooth.

    Returns
    -------
    IntegralResult

    Raises
    ------
    DivergentIntegrand
        When the weight is not integrable at a point where ``f`` does not
        vanish, or shell sums keep growing.
    NoConvergence
        When ``max_subdivisions`` is exceeded.

    Examples
    --------
    >>> from gjortho.weights import chebyshev
    >>> round(integrate(lambda x: np.ones_like(x), chebyshev()).value, 12)
    3.14159265359
    """
    total, err, nsub = _integrate_pieces(f, weight, region, tol, breakpoints, max_subdivisions)
    val = total if total.size > 1 else float(total[0])
    return IntegralResult(val, float(err), int(nsub))


def integrate_local(f: Callable, Gamma: float, gamma: float, upper: float,
                    tol: float = DEFAULT_TOL) -> IntegralResult:
    """``int_0^upper f(t) t**Gamma log(e/t)**gamma dt`` with ``upper <= 1``.

    Uses the same graded shells with an analytic tail at ``t = 0``.
    """
    if not 0 < upper <= 1:
        raise ValueError("upper must lie in (0, 1]")
    budget = _Budget(MAX_SUBDIVISIONS)

    def F(t):
        return _vec(f, t) * local_factor(t, Gamma, gamma)

    if integrable_exponents(Gamma, gamma) != Verdict.HOLDS:
        fc = _safe_fc(f, 0.0)
        if fc is not None and np.any(fc != 0):
            raise DivergentIntegrand("local factor is not integrable at 0")
    model = _LocalModel(_safe_fc(f, 0.0), 1.0, Gamma, gamma, lambda s: s)
    val, err, nsub = _graded(F, upper, model, tol, budget, tol)
    return IntegralResult(float(val[0]) if val.size == 1 else val, float(err), budget.used)


_NORM_PROBE = np.cos((np.arange(64) + 0.5) * np.pi / 64)


def lp_norm(f: Callable, weight: Weight, p: float, region: Region = FULL,
            tol: float = DEFAULT_TOL, breakpoints: Sequence[float] = (),
            floor: float = 0.0) -> float:
    """``(int |f|**p w dx)**(1/p)`` over ``region``.

    Parameters
    ----------
    floor : float, optional
        Lower bound for the internal scale of ``f``.  Set it near the
        rounding level of ``f`` when ``f`` may be pure cancellation noise,
        so that noise is not resolved to relative accuracy.

    Examples
    --------
    >>> from gjortho.weights import legendre
    >>> round(lp_norm(lambda x: np.ones_like(x), legendre(), 2), 12)
    1.414213562373
    """
    if p <= 0:
        raise ValueError("p must be positive")

    def g(x):
        return np.abs(_vec(f, x)[0])

    # dividing f by its size on a fixed grid makes the tolerance relative and
    # keeps |f|**p in range, so lp_norm(c f) = |c| lp_norm(f) holds to rounding
    with np.errstate(all="ignore"):
        scale = max(float(np.max(g(_NORM_PROBE))), floor)
    if not (scale > 0 and math.isfinite(scale)):
        scale = 1.0
    res = integrate(lambda x: (g(x) / scale) ** p, weight, region, tol, breakpoints=breakpoints)
    return scale * float(res.value) ** (1.0 / p)


def delta_region(n: int, eps: float, weight: Weight) -> Region:
    """The set ``[-1 + eps/n**2, 1 - eps/n**2]`` minus ``eps/n``-neighbourhoods
    of the interior singular points.

    Raises
    ------
    EmptyRegion
        If nothing is left.
    """
    if n < 1 or eps <= 0:
        raise ValueError("need n >= 1 and eps > 0")
    lo, hi = -1.0 + eps / n ** 2, 1.0 - eps / n ** 2
    if lo >= hi:
        raise EmptyRegion("endpoint margins cover the interval")
    ivs = [(lo, hi)]
    for c in weight.interior:
        a, b = c - eps / n, c + eps / n
        nxt = []
        for u, v in ivs:
            if b <= u or a >= v:
                nxt.append((u, v))
                continue
            if u < a:
                nxt.append((u, a))
            if b < v:
                nxt.append((b, v))
        ivs = nxt
    if not ivs:
        raise EmptyRegion("no interior left after removing neighbourhoods")
    return Region(tuple(ivs), "delta_n")


# ---------------------------------------------------------------------------
# fixed composite rules for polynomial integrands


def _gl_panels(lo, hi, hmax):
    npan = max(1, int(math.ceil((hi - lo) / hmax)))
    edges = np.linspace(lo, hi, npan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    s = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return s, w


@functools.lru_cache(maxsize=64)
def _discretize_cached(weight: Weight, degree: int, region: Region, refine: int):
    hmax = min(0.25, 12.0 / (degree + 1)) / refine
    xs, ws = [], []
    for piece in _pieces(weight, region, ()):
        if piece[0] == "plain":
            _, lo, hi = piece
            th, wt = _gl_panels(lo, hi, hmax)
            x = np.clip(np.cos(th), -1.0, 1.0)
            xs.append(x)
            ws.append(wt * np.sin(th) * weight.evaluate(x))
            continue
        _, c, sign, length = piece
        x_of, jac, dist = _theta_maps(c, sign)
        G, g = weight.exponents_at(c)
        reg = weight.regular_at(c)
        hi = length
        acc = 0.0
        for k in range(MAX_SHELLS):
            lo = hi * SHELL_RATIO
            s, wt = _gl_panels(lo, hi, hmax)
            x = x_of(s)
            wv = wt * jac(s) * weight.evaluate(x, near=(c, dist(s)))
            xs.append(x)
            ws.append(wv)
            acc += float(np.sum(wv))
            hi = lo
            tail = reg * local_mass(G, g, float(dist(hi)))
            if not np.isfinite(tail):
                raise DivergentIntegrand(f"weight is not integrable at {c}")
            if k >= 2 and (degree + 1) * hi * tail <= 1e-17 * max(acc, 1e-300):
                break
        xs.append(np.array([c]))
        ws.append(np.array([tail]))
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def discretize(weight: Weight, degree: int, region: Region = FULL, refine: int = 1):
    """Fixed composite rule ``(nodes, weights)`` for ``w`` on ``region``.

    The rule integrates ``P * w`` to near machine precision for
    polynomials ``P`` of degree up to ``degree``; ``refine`` scales the
    panel density.  Results are cached.
    """
    return _discretize_cached(weight, int(degree), region, int(refine))
