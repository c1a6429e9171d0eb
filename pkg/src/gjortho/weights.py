"""Generalized Jacobi weights with logarithmic factors.

A weight on ``[-1, 1]`` is

    w(t) = h(t) * prod_i |t - t_i|**G_i * log(e / |t - t_i|)**g_i

where ``t_0 = -1 < t_1 < ... < t_r < t_{r+1} = 1`` and ``h`` is bounded
above and below by positive constants.  Three concrete classes share one
duck-typed surface (``points``, ``Gamma``, ``gamma``, ``evaluate``,
``exponents_at``, ``regular_at``, ``h_bounds``):

* :class:`WeightSpec` -- the plain parametrised weight.
* :class:`ProductWeight` -- a product of powers of weights and of
  ``sqrt(1 - t**2)``, evaluated exactly from its factors.
* :class:`MinMaxWeight` -- the pointwise min or max of two weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import IncompatiblePoints, SingularEvaluation

#: Exponents closer than this are treated as equal.
EXP_TOL = 1e-12
#: Crossings closer than this to a singular point or to each other are dropped.
KINK_GAP = 1e-9
#: Singular points closer than this (but not equal) are rejected.
POINT_TOL = 1e-14


class Verdict(str, enum.Enum):
    """Three-valued outcome of a symbolic test."""

    HOLDS = "holds"
    FAILS = "fails"
    BOUNDARY = "boundary"

    def __str__(self) -> str:
        return self.value


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """Conjunction of three-valued verdicts."""
    vs = list(verdicts)
    if any(v == Verdict.FAILS for v in vs):
        return Verdict.FAILS
    if all(v == Verdict.HOLDS for v in vs):
        return Verdict.HOLDS
    return Verdict.BOUNDARY


def local_factor(s, Gamma: float, gamma: float):
    """Evaluate ``s**Gamma * log(e/s)**gamma`` for ``0 <= s <= e``.

    At ``s == 0`` the limit is returned (``0``, ``1`` or ``inf``).
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    pos = s > 0
    sp = s[pos]
    val = np.ones_like(sp)
    if Gamma != 0.0:
        val = sp ** Gamma
    if gamma != 0.0:
        val = val * (1.0 - np.log(sp)) ** gamma
    out[pos] = val
    if not np.all(pos):
        out[~pos] = _limit_at_zero(Gamma, gamma)
    return out


def _limit_at_zero(Gamma: float, gamma: float) -> float:
    if Gamma > 0 or (Gamma == 0 and gamma < 0):
        return 0.0
    if Gamma == 0 and gamma == 0:
        return 1.0
    return math.inf


def _cmp_pair(a: tuple[float, float], b: tuple[float, float]) -> int:
    """Order exponent pairs by how fast the factor vanishes at the point.

    Returns ``1`` if ``a`` gives the smaller factor near the point (larger
    ``Gamma``; at equal ``Gamma`` the smaller ``gamma``, since the log factor
    grows), ``-1`` if ``b`` does and ``0`` if they coincide.
    """
    if abs(a[0] - b[0]) > EXP_TOL:
        return 1 if a[0] > b[0] else -1
    if abs(a[1] - b[1]) > EXP_TOL:
        return 1 if a[1] < b[1] else -1
    return 0


def dominated(small: tuple[float, float], big: tuple[float, float]) -> Verdict:
    """Whether ``s**G1 log(e/s)**g1 <= c s**G2 log(e/s)**g2`` near ``s = 0``."""
    return Verdict.HOLDS if _cmp_pair(small, big) >= 0 else Verdict.FAILS


@dataclass(frozen=True)
class BoundedFactor:
    """A positive bounded factor ``h`` with declared bounds.

    Parameters
    ----------
    func : callable or None
        Vectorised evaluator.  ``None`` is allowed only for a constant
        (``lower == upper``).
    lower, upper : float
        Declared bounds ``0 < lower <= h <= upper``.
    """

    func: Callable[[np.ndarray], np.ndarray] | None
    lower: float
    upper: float

    def __post_init__(self):
        if not (0 < self.lower <= self.upper < math.inf):
            raise ValueError("h bounds must satisfy 0 < min <= max < inf")
        if self.func is None and self.lower != self.upper:
            raise ValueError("a non-constant h needs an evaluator")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is None:
            return np.full_like(t, self.lower)
        return np.asarray(self.func(t), dtype=float) * np.ones_like(t)


def _as_factor(h) -> BoundedFactor:
    if isinstance(h, BoundedFactor):
        return h
    if h is None or (isinstance(h, str) and h == "one"):
        return BoundedFactor(None, 1.0, 1.0)
    c = float(h)
    return BoundedFactor(None, c, c)


class Weight:
    """Shared behaviour of all weight classes.

    Subclasses provide ``points``, ``Gamma``, ``gamma`` (numpy arrays),
    ``_evaluate(t, near)``, ``regular_at(c)`` and ``h_bounds()``.
    """

    points: np.ndarray
    Gamma: np.ndarray
    gamma: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        """Interior singular points ``t_1 .. t_r``."""
        return self.points[1:-1]

    def exponents_at(self, c: float) -> tuple[float, float]:
        """Exponent pair ``(Gamma, gamma)`` at ``c`` (zero if not a point)."""
        idx = np.flatnonzero(self.points == c)
        if idx.size == 0:
            return 0.0, 0.0
        i = int(idx[0])
        return float(self.Gamma[i]), float(self.gamma[i])

    def evaluate(self, t, near: tuple[float, np.ndarray] | None = None):
        """Evaluate the weight.

        Parameters
        ----------
        t : array_like
            Points in ``[-1, 1]``.
        near : (float, ndarray), optional
            A singular point ``c`` together with accurately computed
            distances ``|t - c|``; used instead of the rounded difference.

        Raises
        ------
        SingularEvaluation
            If ``t`` hits a point where the weight is unbounded.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any((t < -1) | (t > 1)):
            raise ValueError("weights are defined on [-1, 1] only")
        if near is not None:
            near = (float(near[0]), np.atleast_1d(np.asarray(near[1], dtype=float)))
        val = self._evaluate(t, near)
        if not np.all(np.isfinite(val)):
            raise SingularEvaluation("weight is unbounded at a requested point")
        return float(val[0]) if scalar else val

    __call__ = evaluate

    def _dist(self, t, c, near):
        if near is not None and near[0] == c:
            return near[1]
        return np.abs(t - c)

    def exponent_table(self) -> list[tuple[float, float, float]]:
        """List of ``(point, Gamma, gamma)`` triples."""
        return [(float(p), float(G), float(g)) for p, G, g in zip(self.points, self.Gamma, self.gamma)]

    def kinks(self) -> tuple[float, ...]:
        """Interior points where the weight is finite but not smooth."""
        return ()


class WeightSpec(Weight):
    """Parametrised generalized Jacobi weight with log factors.

    Parameters
    ----------
    points : sequence of float
        Singular points including the endpoints ``-1`` and ``1``.
    Gamma, gamma : sequence of float
        Power and logarithmic exponents, one per point.
    h : float, "one" or BoundedFactor
        Bounded positive factor.
    gj1, gj3 : bool
        Declared smoothness flags of ``h`` (echoed by the checks).

    Examples
    --------
    >>> w = gjlog([-1, 0, 1], [0, 1, 0], [0, 1, 0])
    >>> round(w(0.5), 5)
    0.84657
    """

    def __init__(self, points=(-1.0, 1.0), Gamma=(0.0, 0.0), gamma=(0.0, 0.0),
                 h=1.0, gj1: bool = True, gj3: bool = True):
        pts = np.asarray(points, dtype=float)
        G = np.asarray(Gamma, dtype=float)
        g = np.asarray(gamma, dtype=float)
        if not (pts.ndim == G.ndim == g.ndim == 1 and len(pts) == len(G) == len(g)):
            raise ValueError("points, Gamma and gamma must be 1-d of equal length")
        if len(pts) < 2 or pts[0] != -1.0 or pts[-1] != 1.0:
            raise ValueError("points must start at -1 and end at 1")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(g))):
            raise ValueError("exponents must be finite")
        for a in (pts, G, g):
            a.setflags(write=False)
        self.points, self.Gamma, self.gamma = pts, G, g
        self.h = _as_factor(h)
        self.gj1, self.gj3 = bool(gj1), bool(gj3)

    def _key(self):
        return (tuple(self.points), tuple(self.Gamma), tuple(self.gamma), self.h,
                self.gj1, self.gj3)

    def __hash__(self):
        return hash(self._key())

    def __eq__(self, other):
        if not isinstance(other, WeightSpec):
            return NotImplemented
        return self._key() == other._key()

    def __repr__(self):
        return (f"WeightSpec(points={self.points.tolist()}, Gamma={self.Gamma.tolist()}, "
                f"gamma={self.gamma.tolist()}, h=[{self.h.lower}, {self.h.upper}])")

    def h_bounds(self) -> tuple[float, float]:
        return self.h.lower, self.h.upper

    def _evaluate(self, t, near):
        val = self.h(t)
        for c, G, g in zip(self.points, self.Gamma, self.gamma):
            if G == 0.0 and g == 0.0:
                continue
            d = self._dist(t, c, near)
            with np.errstate(invalid="ignore"):
                val = val * local_factor(d, G, g)
        return val

    def regular_at(self, c: float) -> float:
        """Limit of ``w(t) / local factor at c`` as ``t -> c``."""
        val = float(self.h(np.array([c]))[0])
        for p, G, g in zip(self.points, self.Gamma, self.gamma):
            if p == c or (G == 0.0 and g == 0.0):
                continue
            val *= float(local_factor(np.array([abs(c - p)]), G, g)[0])
        return val

    def to_dict(self) -> dict:
        """Serialise to the plain-JSON record layout."""
        h = self.h
        if h.func is None and h.lower == 1.0:
            hrec = "one"
        else:
            hrec = {"min": h.lower, "max": h.upper}
        return {"points": self.points.tolist(), "Gamma": self.Gamma.tolist(),
                "gamma": self.gamma.tolist(), "h": hrec,
                "flags": {"gj1": self.gj1, "gj3": self.gj3}}

    @classmethod
    def from_dict(cls, rec: dict, h_func: Callable | None = None) -> "WeightSpec":
        """Inverse of :meth:`to_dict`.

        A non-constant ``h`` record needs ``h_func`` since evaluators are
        not serialisable.
        """
        hrec = rec.get("h", "one")
        if hrec == "one":
            h = BoundedFactor(None, 1.0, 1.0)
        else:
            lo, hi = float(hrec["min"]), float(hrec["max"])
            h = BoundedFactor(h_func if lo != hi else None, lo, hi)
        flags = rec.get("flags", {})
        return cls(rec["points"], rec["Gamma"], rec["gamma"], h,
                   bool(flags.get("gj1", True)), bool(flags.get("gj3", True)))


def gjlog(points, Gamma, gamma=None, h=1.0, gj1=True, gj3=True) -> WeightSpec:
    """Shorthand constructor; ``gamma`` defaults to zeros."""
    if gamma is None:
        gamma = [0.0] * len(points)
    return WeightSpec(tuple(points), tuple(Gamma), tuple(gamma), _as_factor(h), gj1, gj3)


def jacobi(a: float, b: float) -> WeightSpec:
    """Jacobi weight ``(1 - t)**a * (1 + t)**b``."""
    return gjlog([-1.0, 1.0], [b, a])


def legendre() -> WeightSpec:
    return jacobi(0.0, 0.0)


def chebyshev() -> WeightSpec:
    """Chebyshev weight of the first kind, ``(1 - t**2)**-1/2``."""
    return jacobi(-0.5, -0.5)


def _merge_points(weights: Sequence[Weight]) -> np.ndarray:
    pts = np.unique(np.concatenate([w.points for w in weights]))
    gaps = np.diff(pts)
    if np.any(gaps < POINT_TOL):
        raise IncompatiblePoints("singular points of the factors nearly coincide")
    return pts


@dataclass(frozen=True, eq=False)
class ProductWeight(Weight):
    """Exact product ``prod_j w_j**e_j * (1 - t**2)**(phi_exponent/2)``."""

    terms: tuple
    phi_exponent: float = 0.0

    def __post_init__(self):
        ws = [w for w, _ in self.terms]
        pts = _merge_points(ws)
        G = np.zeros(len(pts))
        g = np.zeros(len(pts))
        for w, e in self.terms:
            for c, Gi, gi in w.exponent_table():
                k = int(np.searchsorted(pts, c))
                G[k] += e * Gi
                g[k] += e * gi
        G[0] += self.phi_exponent / 2
        G[-1] += self.phi_exponent / 2
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "Gamma", G)
        object.__setattr__(self, "gamma", g)

    def __hash__(self):
        return hash((self.terms, self.phi_exponent))

    def h_bounds(self) -> tuple[float, float]:
        lo = hi = 1.0
        for w, e in self.terms:
            a, b = w.h_bounds()
            lo *= a ** e if e >= 0 else b ** e
            hi *= b ** e if e >= 0 else a ** e
        return lo, hi

    def _evaluate(self, t, near):
        val = np.ones_like(t)
        for w, e in self.terms:
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                val = val * w._evaluate(t, near) ** e
        if self.phi_exponent:
            e = self.phi_exponent / 2
            with np.errstate(divide="ignore"):
                val = val * self._dist(t, -1.0, near) ** e * self._dist(t, 1.0, near) ** e
        return val

    def kinks(self) -> tuple[float, ...]:
        return tuple(sorted({k for w, _ in self.terms for k in w.kinks()}))

    def regular_at(self, c: float) -> float:
        val = 1.0
        for w, e in self.terms:
            val *= w.regular_at(c) ** e
        if self.phi_exponent:
            e = self.phi_exponent / 2
            for p in (-1.0, 1.0):
                if p != c:
                    val *= abs(c - p) ** e
        return val


@dataclass(frozen=True, eq=False)
class MinMaxWeight(Weight):
    """Pointwise ``min`` or ``max`` of two weights.

    The derived exponents at each point are those of the factor that is
    smaller (``min``) or larger (``max``) as ``t`` approaches the point.
    """

    left: Weight
    right: Weight
    mode: str = "min"

    def __post_init__(self):
        if self.mode not in ("min", "max"):
            raise ValueError("mode must be 'min' or 'max'")
        pts = _merge_points([self.left, self.right])
        G = np.zeros(len(pts))
        g = np.zeros(len(pts))
        for k, c in enumerate(pts):
            a = self.left.exponents_at(c)
            b = self.right.exponents_at(c)
            pick = _cmp_pair(a, b)
            if self.mode == "max":
                pick = -pick
            G[k], g[k] = a if pick >= 0 else b
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "Gamma", G)
        object.__setattr__(self, "gamma", g)

    def __hash__(self):
        return hash((self.left, self.right, self.mode))

    def h_bounds(self) -> tuple[float, float]:
        # crude but valid: the envelope inherits the component bounds
        a, b = self.left.h_bounds(), self.right.h_bounds()
        return min(a[0], b[0]), max(a[1], b[1])

    def _evaluate(self, t, near):
        x = self.left._evaluate(t, near)
        y = self.right._evaluate(t, near)
        return np.minimum(x, y) if self.mode == "min" else np.maximum(x, y)

    def kinks(self) -> tuple[float, ...]:
        """Component kinks plus the points where the two components cross.

        Crossings are located by sign changes of ``log(left / right)`` on a
        grid of each gap between singular points, then refined by bisection.
        Tangential touches are not detected.
        """
        cached = self.__dict__.get("_kinks")
        if cached is not None:
            return cached
        out = set(self.left.kinks()) | set(self.right.kinks())
        pts = self.points
        for a, b in zip(pts[:-1], pts[1:]):
            out.update(_crossings(self.left, self.right, float(a), float(b)))
        res = []
        for k in sorted(out):
            # a cut next to a singular point or another cut only adds a sliver
            if np.min(np.abs(pts - k)) > KINK_GAP and (not res or k - res[-1] > KINK_GAP):
                res.append(k)
        res = tuple(res)
        object.__setattr__(self, "_kinks", res)
        return res

    def regular_at(self, c: float) -> float:
        a = self.left.exponents_at(c)
        b = self.right.exponents_at(c)
        pick = _cmp_pair(a, b)
        if self.mode == "max":
            pick = -pick
        ra, rb = self.left.regular_at(c), self.right.regular_at(c)
        if pick > 0:
            return ra
        if pick < 0:
            return rb
        return min(ra, rb) if self.mode == "min" else max(ra, rb)


_CROSS_GRID = 1024


def _crossings(u: Weight, v: Weight, a: float, b: float) -> list[float]:
    def d(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(all="ignore"):
            return np.log(u._evaluate(t, None)) - np.log(v._evaluate(t, None))

    t = a + (b - a) * (0.5 - 0.5 * np.cos(np.linspace(0, np.pi, _CROSS_GRID + 1)[1:-1]))
    vals = d(t)
    ok = np.isfinite(vals)
    t, vals = t[ok], vals[ok]
    s = np.sign(vals)
    out = []
    for i in np.flatnonzero(s[:-1] * s[1:] < 0):
        out.append(float(brentq(lambda x: float(d(x)[0]), t[i], t[i + 1], xtol=1e-15,
                                rtol=4 * np.finfo(float).eps)))
    out.extend(float(x) for x in t[s == 0])
    return out


def product(terms: Sequence[tuple[Weight, float]], phi_exponent: float = 0.0) -> Weight:
    """Product of powers of weights and of ``phi(t) = sqrt(1 - t**2)``.

    Returns a :class:`WeightSpec` when every factor is one, otherwise an
    exact :class:`ProductWeight`.

    Examples
    --------
    >>> product([(chebyshev(), -1.0)]).Gamma.tolist()
    [0.5, 0.5]
    """
    terms = tuple((w, float(e)) for w, e in terms)
    pw = ProductWeight(terms, float(phi_exponent))
    if not all(isinstance(w, WeightSpec) for w, _ in terms):
        return pw
    factors = [(w.h, e) for w, e in terms if not (w.h.func is None and w.h.lower == 1.0)]
    lo, hi = pw.h_bounds()
    if all(f.func is None for f, _ in factors):
        h = BoundedFactor(None, lo, lo)
    else:
        def hfun(t, factors=tuple(factors)):
            out = np.ones_like(np.asarray(t, dtype=float))
            for f, e in factors:
                out = out * f(t) ** e
            return out
        h = BoundedFactor(hfun, lo, hi)
    return WeightSpec(tuple(pw.points), tuple(pw.Gamma), tuple(pw.gamma), h,
                      all(w.gj1 for w, _ in terms), all(w.gj3 for w, _ in terms))


def envelope(a: Weight, b: Weight, mode: str = "min") -> Weight:
    """Pointwise ``min``/``max`` of two weights (idempotent on ``a == b``)."""
    if a is b or (isinstance(a, WeightSpec) and a == b):
        return a
    return MinMaxWeight(a, b, mode)


def as_spec(w: Weight) -> WeightSpec:
    """Exponent-equivalent :class:`WeightSpec` (``h`` replaced by 1)."""
    if isinstance(w, WeightSpec):
        return w
    return WeightSpec(tuple(w.points), tuple(w.Gamma), tuple(w.gamma))


def varphi(x, n: int | None = None):
    """``sqrt(1 - x**2)``, or ``sqrt(1 - x**2) + 1/n`` when ``n`` is given."""
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    if n is not None:
        if n < 1:
            raise ValueError("n must be a positive integer")
        out = out + 1.0 / n
    return float(out) if out.ndim == 0 else out


def _reg_factor(s, G, g):
    # s may slightly exceed e for n = 1; cap so the log factor stays positive
    return local_factor(np.minimum(s, 2.5), G, g)


def eval_regularized(w: Weight, n: int, t):
    """Regularised weight ``w(n, t)``.

    Each singular factor is evaluated at its distance shifted by ``1/n``:
    the factor of ``t_0`` at ``sqrt(1 - t) + 1/n``, the factor of
    ``t_{r+1}`` at ``sqrt(1 + t) + 1/n``, interior factors at
    ``|t - t_i| + 1/n``, and the product is divided by
    ``sqrt(1 - t**2) + 1/n``.  The bounded factor ``h`` is omitted.

    Examples
    --------
    >>> round(eval_regularized(legendre(), 5, 0.0), 5)
    0.83333
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any((t < -1) | (t > 1)):
        raise ValueError("t must lie in [-1, 1]")
    pts, G, g = w.points, w.Gamma, w.gamma
    inv = 1.0 / n
    val = _reg_factor(np.sqrt(1.0 - t) + inv, G[0], g[0])
    val = val * _reg_factor(np.sqrt(1.0 + t) + inv, G[-1], g[-1])
    val = val / (varphi(t) + inv)
    for c, Gi, gi in zip(pts[1:-1], G[1:-1], g[1:-1]):
        val = val * _reg_factor(np.abs(t - c) + inv, Gi, gi)
    return float(val[0]) if scalar else val


def regularized_density(w: Weight, n: int, x):
    """Density regularised at scale ``1/n`` with squared endpoint distances.

    Endpoint factors are evaluated at ``(sqrt(1 -+ x) + 1/n)**2`` and
    interior factors at ``|x - t_i| + 1/n``; ``h`` and any ``phi`` division
    are omitted.  This is the normalisation under which Christoffel
    functions satisfy ``lambda_n(x) ~ density * phi(n, x) / n``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    inv = 1.0 / n
    val = np.ones_like(x)
    for c in w.points:
        G, g = w.exponents_at(float(c))
        if c == -1.0:
            d = (np.sqrt(1.0 + x) + inv) ** 2
        elif c == 1.0:
            d = (np.sqrt(1.0 - x) + inv) ** 2
        else:
            d = np.abs(x - c) + inv
        val = val * _reg_factor(d, G, g)
    return float(val[0]) if scalar else val


@dataclass(frozen=True)
class ClassReport:
    """Class membership of a weight.

    Each entry is a :class:`Verdict`; ``gj1``/``gj3`` echo the declared
    smoothness flags.
    """

    L1: Verdict
    GJ2: Verdict
    GJ4: Verdict
    monotone_near_interior_nodes: Verdict
    monotone_phi3_at_endpoints: Verdict
    gj1: bool
    gj3: bool

    def as_dict(self) -> dict:
        return {k: (str(v) if isinstance(v, Verdict) else v) for k, v in self.__dict__.items()}


def integrable_exponents(G: float, g: float) -> Verdict:
    """Local integrability of ``s**G * log(e/s)**g`` at ``s = 0``."""
    if G > -1 + EXP_TOL:
        return Verdict.HOLDS
    if G < -1 - EXP_TOL:
        return Verdict.FAILS
    if g < -1 - EXP_TOL:
        return Verdict.HOLDS
    if g > -1 + EXP_TOL:
        return Verdict.FAILS
    # 1/(s log(e/s)) diverges only like log log: flagged as the critical case
    return Verdict.BOUNDARY


def classify(w: Weight) -> ClassReport:
    """Decide class membership from the exponents.

    Examples
    --------
    >>> classify(chebyshev()).L1
    <Verdict.HOLDS: 'holds'>
    """
    G, g = w.Gamma, w.gamma
    l1 = combine(integrable_exponents(Gi, gi) for Gi, gi in zip(G, g))
    gj = Verdict.HOLDS if np.all(G > -1 + EXP_TOL) else (
        Verdict.FAILS if np.any(G < -1 - EXP_TOL) else Verdict.BOUNDARY)

    def mono_interior(Gi, gi):
        if Gi > EXP_TOL:
            return Verdict.HOLDS
        if Gi < -EXP_TOL:
            return Verdict.FAILS
        return Verdict.HOLDS if gi <= EXP_TOL else Verdict.FAILS

    interior = combine(mono_interior(Gi, gi) for Gi, gi in zip(G[1:-1], g[1:-1]))

    def mono_end(Gi):
        # w * phi**3 near an endpoint behaves like s**(Gi + 3/2): increasing
        # away from the endpoint whenever Gi > -1 given the log factor
        if Gi > -1 + EXP_TOL:
            return Verdict.HOLDS
        if Gi < -1 - EXP_TOL:
            return Verdict.FAILS
        return Verdict.BOUNDARY

    ends = combine([mono_end(G[0]), mono_end(G[-1])])
    gj1 = getattr(w, "gj1", True)
    gj3 = getattr(w, "gj3", True)
    return ClassReport(l1, gj, gj, interior, ends, gj1, gj3)
