"""Symbolic checks of the exponent conditions behind the norm inequalities.

Every check reduces to comparisons of the exponent pairs ``(Gamma, gamma)``
of products of weights at their singular points.  Equalities are reported
as :attr:`~gjortho.weights.Verdict.BOUNDARY` instead of being guessed.

The ``probe_*`` functions are independent numerical counterparts working
on the local model ``s**G log(e/s)**g`` in the variable ``u = -log s``;
they use :func:`scipy.integrate.quad` and none of the package quadrature.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate as spi

from .errors import NonLogWeight
from .weights import (EXP_TOL, MinMaxWeight, Verdict, Weight, WeightSpec, classify, combine,
                      dominated, integrable_exponents, product)


def conjugate(p: float) -> float:
    """Conjugate exponent ``q = p / (p - 1)``."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Clause:
    """One named condition with its verdict and the deciding point."""

    label: str
    verdict: Verdict
    witness: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConditionReport:
    """Verdicts of all clauses of one hypothesis set."""

    theorem: str
    p: float
    q: float
    m: int
    clauses: tuple

    @property
    def overall(self) -> Verdict:
        return combine(c.verdict for c in self.clauses)

    def clause(self, label: str) -> Clause:
        for c in self.clauses:
            if c.label == label:
                return c
        raise KeyError(label)

    def as_dict(self) -> dict:
        return {"theorem": self.theorem, "p": self.p, "q": self.q, "m": self.m,
                "overall": str(self.overall),
                "clauses": [{"label": c.label, "verdict": str(c.verdict), "witness": c.witness}
                            for c in self.clauses]}

    def csv_rows(self) -> list[list]:
        rows = []
        for c in self.clauses:
            w = c.witness
            rows.append([self.theorem, c.label, str(c.verdict), w.get("t", ""),
                         " ".join(f"{k}={v:.12g}" for k, v in sorted(w.items())
                                  if k != "t" and isinstance(v, float))])
        return rows

    def to_csv(self) -> str:
        out = io.StringIO()
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(["theorem", "clause", "verdict", "witness_point", "witness_exponents"])
        wr.writerows(self.csv_rows())
        return out.getvalue()


def _require_log(*weights):
    for w in weights:
        if not isinstance(w, Weight):
            raise NonLogWeight(f"{w!r} is not a weight with declared exponents and bounds")


def _cmp(a: float, b: float) -> int:
    if a > b + EXP_TOL:
        return 1
    if a < b - EXP_TOL:
        return -1
    return 0


def _first_bad(items: Sequence[tuple[Verdict, dict]], label: str) -> Clause:
    verdict = combine(v for v, _ in items)
    witness = {}
    for v, w in items:
        if v == verdict and v != Verdict.HOLDS:
            witness = w
            break
    return Clause(label, verdict, witness)


def _l1_point(G: float, g: float) -> Verdict:
    """Local integrability as a clause: exponent ``-1`` is a boundary case."""
    if _cmp(G, -1.0) > 0:
        return Verdict.HOLDS
    if _cmp(G, -1.0) < 0:
        return Verdict.FAILS
    return Verdict.HOLDS if g < -1 - EXP_TOL else Verdict.BOUNDARY


def l1_clause(label: str, w: Weight) -> Clause:
    """Integrability of ``w`` decided point by point."""
    return _first_bad([(_l1_point(G, g), {"t": t, "Gamma": G, "gamma": g})
                       for t, G, g in w.exponent_table()], label)


def domination_clause(label: str, small: Weight, big: Weight) -> Clause:
    """``small <= c * big`` near every singular point."""
    pts = sorted(set(small.points.tolist()) | set(big.points.tolist()))
    items = []
    for t in pts:
        a, b = small.exponents_at(t), big.exponents_at(t)
        items.append((dominated(a, b), {"t": t, "Gamma_small": a[0], "gamma_small": a[1],
                                        "Gamma_big": b[0], "gamma_big": b[1]}))
    return _first_bad(items, label)


def gj2_clause(label: str, w: Weight) -> Clause:
    items = []
    for t, G, g in w.exponent_table():
        c = _cmp(G, -1.0)
        v = Verdict.HOLDS if c > 0 else (Verdict.FAILS if c < 0 else Verdict.BOUNDARY)
        items.append((v, {"t": t, "Gamma": G, "gamma": g}))
    return _first_bad(items, label)


def is_integrable(w: Weight) -> Verdict:
    """``L^1`` membership: ``Gamma = -1, gamma = -1`` is the boundary case.

    Examples
    --------
    >>> from gjortho.weights import legendre, jacobi
    >>> str(is_integrable(legendre())), str(is_integrable(jacobi(-1, 0)))
    ('holds', 'fails')
    """
    return combine(integrable_exponents(G, g) for _, G, g in w.exponent_table())


def two_weight_clauses(Ur: Weight, r: float, Vs: Weight, s: float, prefix: str = "") -> list[Clause]:
    """Sufficient exponent clauses for the two-weight Hilbert bound.

    ``Ur`` is ``U**r`` and ``Vs`` is ``V**(-s)`` with ``1/r + 1/s = 1``.
    At a point where ``r Gamma(U) = -1`` or ``-s Gamma(V) = -1`` with equal
    power exponents of ``U`` and ``V``, the log refinement
    ``gamma(U) - gamma(V) + 1 <= 0`` decides.
    """
    pts = sorted(set(Ur.points.tolist()) | set(Vs.points.tolist()))
    c_u, c_v, c_dom, c_lu, c_lv = [], [], [], [], []
    for t in pts:
        A, a = Ur.exponents_at(t)
        B, b = Vs.exponents_at(t)
        GU, gU = A / r, a / r
        GV, gV = -B / s, -b / s
        wit = {"t": t, "Gamma_U": GU, "gamma_U": gU, "Gamma_V": GV, "gamma_V": gV}
        ref = _cmp(gU - gV + 1.0, 0.0)
        refinement = Verdict.HOLDS if ref < 0 else (Verdict.FAILS if ref > 0 else Verdict.BOUNDARY)
        same = _cmp(GU, GV) == 0
        dom = dominated((GU, gU), (GV, gV))

        def edge(val):
            c = _cmp(val, -1.0)
            if c > 0:
                return Verdict.HOLDS
            if c < 0:
                return Verdict.FAILS
            if same:
                return refinement
            return Verdict.HOLDS if _cmp(GU, GV) > 0 else Verdict.FAILS

        c_u.append((edge(A), wit))
        c_v.append((edge(B), wit))
        c_dom.append((dom, wit))
        c_lu.append((_l1_point(A, a), wit))
        c_lv.append((_l1_point(B, b), wit))
    return [
        _first_bad(c_lu, f"{prefix}U^{r:g} in L1"),
        _first_bad(c_lv, f"{prefix}V^-{s:g} in L1"),
        _first_bad(c_u, f"{prefix}{r:g} Gamma(U) > -1"),
        _first_bad(c_v, f"{prefix}-{s:g} Gamma(V) > -1"),
        _first_bad(c_dom, f"{prefix}U <= c V"),
    ]


def nevai(alpha: Weight, beta: Weight, p: float) -> ConditionReport:
    """Integrability of ``(alpha' phi)**(-p/2) beta'``.

    Examples
    --------
    >>> from gjortho.weights import legendre
    >>> [str(nevai(legendre(), legendre(), p).overall) for p in (3.9, 4.0, 4.1)]
    ['holds', 'boundary', 'fails']
    """
    if p <= 0:
        raise ValueError("p must be positive")
    _require_log(alpha, beta)
    w = product([(alpha, -p / 2), (beta, 1.0)], phi_exponent=-p / 2)
    q = conjugate(p) if p > 1 else math.inf
    return ConditionReport("nevai", p, q, 1, (l1_clause("(a' phi)^(-p/2) b' in L1", w),))


def _admissible(alpha: Weight) -> list[Clause]:
    rep = classify(alpha)
    return [
        Clause("a' in GJ2", rep.GJ2),
        Clause("a' monotone near interior points", rep.monotone_near_interior_nodes),
        Clause("a' phi^3 monotone at endpoints", rep.monotone_phi3_at_endpoints),
        Clause("h of a' smooth (declared)", Verdict.HOLDS if rep.gj1 and rep.gj3 else Verdict.FAILS),
    ]


def build_UV(alpha: Weight, w: Weight, u: Weight, p: float, context="fourier"):
    """The pair ``(U, V)`` attached to a norm inequality.

    Parameters
    ----------
    alpha : Weight
        Density of the orthogonality measure.
    w : Weight
        Second weight: the left weight for ``"fourier"``, the target
        density ``beta'`` for the interpolation contexts.
    u : Weight
        Weight on the right-hand side.
    context : {"fourier", "mz"} or ("mz_hermite", j, m)

    Returns
    -------
    (U, V) : tuple of Weight
        For ``"fourier"``: ``U**p = w**p (a' phi)**(-p/2) a'`` and
        ``V**-q = phi**q u**-q (a' phi)**(-q/2) a'``.  For the
        interpolation contexts: ``U**q = u**(1-q) v**((j-1)q/2)
        (a' phi)**(-q/2) a'`` and ``V**-p = phi**p (a' phi)**(-jp/2) beta'``.
    """
    q = conjugate(p)
    if context == "fourier":
        U = product([(w, 1.0), (alpha, 1.0 / p - 0.5)], phi_exponent=-0.5)
        V = product([(u, 1.0), (alpha, 0.5 - 1.0 / q)], phi_exponent=-0.5)
        return U, V
    if context == "mz":
        context = ("mz_hermite", 1, 1)
    kind, j, m = context
    if kind != "mz_hermite" or not 1 <= j <= m:
        raise ValueError(f"unknown context {context!r}")
    terms = [(u, 1.0 / q - 1.0), (alpha, 1.0 / q - 0.5)]
    if j > 1:
        terms.append((hermite_v(alpha), (j - 1) / 2.0))
    U = product(terms, phi_exponent=-0.5)
    V = product([(alpha, j / 2.0), (w, -1.0 / p)], phi_exponent=j / 2.0 - 1.0)
    return U, V


def hermite_v(alpha: Weight) -> Weight:
    """``v = max{c, a' phi}`` with ``c`` the upper bound of ``h``."""
    c = alpha.h_bounds()[1]
    return MinMaxWeight(WeightSpec(h=c), product([(alpha, 1.0)], phi_exponent=1.0), "max")


def hermite_vstar(alpha: Weight) -> Weight:
    """``v* = a' phi / v``."""
    return product([(alpha, 1.0), (hermite_v(alpha), -1.0)], phi_exponent=1.0)


def sigma_density(alpha: Weight, beta: Weight, m: int = 1) -> Weight:
    """Density of the measure paired with ``u = sigma' / a'``.

    ``sigma' = max{a' v**k, phi**-1 v**k, (v*)**-k beta'}`` with
    ``k = (m - 1)/2``; for ``m = 1`` this is ``max{a', phi**-1, beta'}``.
    """
    k = (m - 1) / 2.0
    if m == 1:
        parts = [alpha, product([(WeightSpec(), 1.0)], phi_exponent=-1.0), beta]
    else:
        v = hermite_v(alpha)
        parts = [product([(alpha, 1.0), (v, k)]),
                 product([(v, k)], phi_exponent=-1.0),
                 product([(hermite_vstar(alpha), -k), (beta, 1.0)])]
    env = MinMaxWeight(parts[0], parts[1], "max")
    return MinMaxWeight(env, parts[2], "max")


def sigma_u(alpha: Weight, beta: Weight, m: int = 1) -> Weight:
    """``u = sigma' / a'``."""
    return product([(sigma_density(alpha, beta, m), 1.0), (alpha, -1.0)])


def fourier_check(alpha: Weight, w: Weight, u: Weight, p: float) -> ConditionReport:
    """Clauses for boundedness of Fourier partial sums from ``L^p(u)`` to ``L^p(w)``."""
    _require_log(alpha, w, u)
    q = conjugate(p)
    U, V = build_UV(alpha, w, u, p, "fourier")
    clauses = [
        l1_clause("w^p a' in L1", product([(w, p), (alpha, 1.0)])),
        l1_clause("u^-q a' in L1", product([(u, -q), (alpha, 1.0)])),
        l1_clause("w^p (a' phi)^(-p/2) a' in L1", product([(w, p), (alpha, 1.0 - p / 2)], -p / 2)),
        l1_clause("u^-q (a' phi)^(-q/2) a' in L1", product([(u, -q), (alpha, 1.0 - q / 2)], -q / 2)),
        domination_clause("w <= c u", w, u),
    ]
    clauses += two_weight_clauses(product([(U, p)]), p, product([(V, -q)]), q)
    clauses += _admissible(alpha)
    return ConditionReport("fourier", p, q, 1, tuple(clauses))


def hilbert_check(U: Weight, V: Weight, p: float) -> ConditionReport:
    """Clauses for ``||H(g) U||_p <= c ||g V||_p``.

    Examples
    --------
    >>> from gjortho.weights import gjlog
    >>> U = gjlog([-1, 0, 1], [0, 0.5, 0], [0, 1, 0])
    >>> str(hilbert_check(U, U, 2.0).overall)
    'fails'
    """
    _require_log(U, V)
    q = conjugate(p)
    cl = two_weight_clauses(product([(U, p)]), p, product([(V, -q)]), q)
    return ConditionReport("hilbert", p, q, 1, tuple(cl))


def mz_check(alpha: Weight, beta: Weight, u: Weight, p: float, m: int = 1) -> ConditionReport:
    """Clauses for the Marcinkiewicz-Zygmund inequality with ``m`` derivatives."""
    _require_log(alpha, beta, u)
    if m < 1:
        raise ValueError("m must be a positive integer")
    q = conjugate(p)
    clauses = []
    if m == 1:
        clauses += [
            domination_clause("u a' >= c b'", beta, product([(u, 1.0), (alpha, 1.0)])),
            l1_clause("(a' phi)^(-p/2) b' in L1", product([(alpha, -p / 2), (beta, 1.0)], -p / 2)),
            gj2_clause("u^(1-q) a' in GJ2", product([(u, 1.0 - q), (alpha, 1.0)])),
            gj2_clause("u a' in GJ2", product([(u, 1.0), (alpha, 1.0)])),
        ]
    else:
        v = hermite_v(alpha)
        vs = hermite_vstar(alpha)
        k = (m - 1) / 2.0
        clauses += [
            l1_clause("u^(1-q) v^((m-1)q/2) (a' phi)^(-q/2) a' in L1",
                      product([(u, 1.0 - q), (v, k * q), (alpha, 1.0 - q / 2)], -q / 2)),
            domination_clause("u a' >= c b' (v*)^(-(m-1)p/2)",
                              product([(beta, 1.0), (vs, -k * p)]),
                              product([(u, 1.0), (alpha, 1.0)])),
            l1_clause("(a' phi)^(-mp/2) b' in L1",
                      product([(alpha, -m * p / 2), (beta, 1.0)], -m * p / 2)),
            gj2_clause("b' in GJ2", beta),
            gj2_clause("u^(1-q) v^((m-1)q/2) a' in GJ2",
                       product([(u, 1.0 - q), (v, k * q), (alpha, 1.0)])),
            gj2_clause("u a' in GJ2", product([(u, 1.0), (alpha, 1.0)])),
        ]
    clauses.append(alpha_exponent_clause(alpha, m))
    for j in range(1, m + 1):
        U, V = build_UV(alpha, beta, u, p, ("mz_hermite", j, m))
        pre = f"j={j}: " if m > 1 else ""
        clauses += two_weight_clauses(product([(U, q)]), q, product([(V, -p)]), p, pre)
    clauses += _admissible(alpha)
    return ConditionReport("mz_hermite" if m > 1 else "mz", p, q, m, tuple(clauses))


def alpha_exponent_clause(alpha: Weight, m: int) -> Clause:
    """``Gamma(a') > -2/(m+1)`` inside and ``> -1/2 - 1/(m+1)`` at the ends."""
    items = []
    n = len(alpha.points)
    for i, (t, G, g) in enumerate(alpha.exponent_table()):
        bound = -0.5 - 1.0 / (m + 1) if i in (0, n - 1) else -2.0 / (m + 1)
        c = _cmp(G, bound)
        v = Verdict.HOLDS if c > 0 else (Verdict.FAILS if c < 0 else Verdict.BOUNDARY)
        items.append((v, {"t": t, "Gamma": G, "bound": bound}))
    return _first_bad(items, "a' exponent bound for sigma' in L1")


# ---------------------------------------------------------------------------
# numerical probes on the local model


def _log_quad(logf, lo, hi, points=()):
    """``log int_lo^hi exp(logf(u)) du`` with the maximum factored out."""
    grid = np.linspace(lo, hi, 2001)
    M = float(np.max(logf(grid)))
    val, _ = spi.quad(lambda u: math.exp(logf(np.array([u]))[0] - M), lo, hi,
                      limit=400, points=[x for x in points if lo < x < hi] or None,
                      epsabs=0.0, epsrel=1e-10)
    return M + math.log(val) if val > 0 else -math.inf


def _log_local(G, g):
    """Log of ``s**G log(e/s)**g ds`` written in ``u = -log s`` (with ``ds``)."""
    return lambda u: -(G + 1.0) * u + g * np.log1p(u)


PROBE_DEPTHS = (175.0, 350.0, 700.0)


def probe_l1(G: float, g: float) -> str:
    """Classify ``int_0^1 s**G log(e/s)**g ds`` from truncated integrals.

    Truncations at ``s = exp(-u)`` for ``u`` in ``PROBE_DEPTHS`` give
    increments ``d1, d2`` over doubling depth ranges.  Returns
    ``"converges"`` when ``d2 / d1 < 0.9``, ``"diverges"`` when it exceeds
    ``1.1`` and ``"undecided"`` otherwise.
    """
    f = _log_local(G, g)
    u0, u1, u2 = PROBE_DEPTHS
    l1 = _log_quad(f, u0, u1)
    l2 = _log_quad(f, u1, u2)
    r = l2 - l1
    if r < math.log(0.9):
        return "converges"
    if r > math.log(1.1):
        return "diverges"
    return "undecided"


def probe_domination(small: tuple[float, float], big: tuple[float, float]) -> str:
    """``"bounded"`` or ``"unbounded"`` from the ratio at growing depth."""
    dG, dg = small[0] - big[0], small[1] - big[1]
    def lr(u):
        return -dG * u + dg * math.log1p(u)
    u0, u1, u2 = PROBE_DEPTHS
    if lr(u2) - lr(u1) > math.log(1.2) and lr(u1) - lr(u0) > 0:
        return "unbounded"
    if lr(u2) - lr(u1) < math.log(1.05):
        return "bounded"
    return "undecided"


def log_two_weight_products(A, a, B, b, p, delta_u):
    """Logs of the two local products for ``U**p ~ s**A log**a`` and
    ``V**-q ~ s**B log**b`` at ``delta = exp(-delta_u)``.

    Returns ``(log P1, log P2)`` where ``P1 = int_0^1 U^p/(d+s)^p ds *
    (int_0^d V^-q ds)**(p-1)`` and ``P2 = int_0^d U^p ds *
    (int_0^1 V^-q/(s+d)^q ds)**(p-1)``.
    """
    q = conjugate(p)
    D = delta_u
    top = D + 800.0

    def shift(u, r):
        # log(1/(d + s)**r) with s = e^-u, d = e^-D
        return -r * np.logaddexp(-u, -D)

    fu = _log_local(A, a)
    fv = _log_local(B, b)
    i1 = _log_quad(lambda u: fu(u) + shift(u, p), 0.0, top, points=(D,))
    i2 = _log_quad(fv, D, top)
    i3 = _log_quad(fu, D, top)
    i4 = _log_quad(lambda u: fv(u) + shift(u, q), 0.0, top, points=(D,))
    return i1 + (p - 1) * i2, i3 + (p - 1) * i4


def probe_two_weight(A, a, B, b, p) -> str:
    """``"bounded"`` or ``"unbounded"`` from the local products at growing depth."""
    depths = (100.0, 200.0, 400.0)
    vals = [max(log_two_weight_products(A, a, B, b, p, d)) for d in depths]
    if not all(np.isfinite(vals)):
        return "unbounded"
    if vals[2] - vals[1] > math.log(1.2) and vals[1] - vals[0] > 0:
        return "unbounded"
    if vals[2] - vals[1] < math.log(1.05):
        return "bounded"
    return "undecided"
