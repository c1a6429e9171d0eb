"""Marcinkiewicz-Zygmund, quadrature-sum, Bernstein-Markov and
restricted-range inequalities evaluated as ratios, with adversarial search.

Every ratio is computed by a :class:`_Plan` that knows which point sets and
derivative orders it needs.  Public ratio functions feed it a
:class:`~gjortho.interp.PolyEvaluator`; :func:`adversarial_sup` feeds it
coefficient vectors through precomputed basis matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .conditions import mz_check, sigma_density, sigma_u
from .errors import ZeroDenominator
from .interp import PolyEvaluator
from .orthopoly import GaussRule, RecurrenceTable, cached_table, christoffel, eval_basis, gauss_rule
from .quad import FULL, delta_region, discretize
from .sampling import RatioSample, as_sampler, growth_per_doubling
from .weights import Verdict, Weight, WeightSpec, classify, eval_regularized, varphi

GROWTH_THRESHOLD = 1.1
STABILITY_FACTOR = 4.0
KINDS = ("mz", "mz_hermite", "quad_sum", "bernstein", "restricted")
CSV_HEADER = ["theorem", "n", "p", "m", "ratio", "seed", "witness_digest", "theory_verdict"]


def _quad_degree(p: float, deg: int) -> int:
    return int(math.ceil(p * max(deg, 1))) + 20


def _psum(weights, vals, p):
    return float(np.sum(weights * np.abs(vals) ** p))


@dataclass
class _Plan:
    """Point sets ``{name: (x, deriv_orders)}`` and a reducer over values."""

    kind: str
    n: int
    p: float
    m: int
    degree: int
    points: dict
    reduce: Callable = field(repr=False)
    basis_table: RecurrenceTable | None = None

    def ratio_of(self, P: PolyEvaluator) -> float:
        vals = {name: {j: P(x, j) for j in orders} for name, (x, orders) in self.points.items()}
        return self.reduce(vals)


def _ratio_or_raise(num: float, den: float, scale: float = 1.0) -> float:
    if not den > 1e-26 * max(num, scale, 1e-300) or not math.isfinite(den):
        raise ZeroDenominator("denominator vanishes for this polynomial")
    return num / den


def _mz_plan(alpha, beta, u, p, rule: GaussRule, degree: int) -> _Plan:
    xq, wq = discretize(beta, _quad_degree(p, degree))
    xk, lam = rule.nodes, rule.cotes * u.evaluate(rule.nodes)

    def reduce(v):
        num = _psum(wq, v["q"][0], p)
        den = _psum(lam, v["n"][0], p)
        return _ratio_or_raise(num, den) ** (1.0 / p)

    return _Plan("mz", rule.n, p, 1, degree, {"q": (xq, (0,)), "n": (xk, (0,))}, reduce)


def mz_ratio(P: PolyEvaluator, alpha: Weight, beta: Weight, u: Weight, p: float,
             rule: GaussRule) -> RatioSample:
    """``||P||_{dbeta,p} / (sum_k |P(x_k)|**p u(x_k) lambda_k)**(1/p)``.

    ``rule`` is the Gauss rule of ``alpha``.

    Raises
    ------
    ZeroDenominator
        If ``P`` vanishes at every node.
    """
    plan = _mz_plan(alpha, beta, u, p, rule, P.degree)
    return RatioSample(plan.ratio_of(P), {"kind": "given"}, rule.n, p, 1, "mz")


def _sigma_lambdas(alpha, beta, m, rule, sigma_table):
    if sigma_table is None:
        sigma_table = cached_table(sigma_density(alpha, beta, m), max(rule.n + 1, 64))
    return christoffel(sigma_table, rule.n, rule.nodes)


def _mz_hermite_plan(alpha, beta, p, m, rule, degree, sigma_table=None) -> _Plan:
    n = rule.n
    xq, wq = discretize(beta, _quad_degree(p, degree))
    xk = rule.nodes
    lam = _sigma_lambdas(alpha, beta, m, rule, sigma_table)
    phi = varphi(xk)

    def reduce(v):
        num = _psum(wq, v["q"][0], p)
        den = sum(n ** (-j * p) * _psum(lam, phi ** j * v["n"][j], p) for j in range(m))
        return _ratio_or_raise(num, den) ** (1.0 / p)

    return _Plan("mz_hermite", n, p, m, degree,
                 {"q": (xq, (0,)), "n": (xk, tuple(range(m)))}, reduce)


def mz_hermite_ratio(P: PolyEvaluator, alpha: Weight, beta: Weight, p: float, m: int,
                     rule: GaussRule, sigma_table: RecurrenceTable | None = None) -> RatioSample:
    """Converse inequality for Hermite data.

    The denominator is
    ``sum_{j<m} n**(-j p) sum_k |phi(x_k)**j P^(j)(x_k)|**p lambda_n(dsigma; x_k)``
    where ``x_k`` are the nodes of ``rule`` (for ``alpha``) and
    ``lambda_n(dsigma; .)`` is the Christoffel function of ``sigma_table``.
    """
    plan = _mz_hermite_plan(alpha, beta, p, m, rule, P.degree, sigma_table)
    return RatioSample(plan.ratio_of(P), {"kind": "given"}, rule.n, p, m, "mz_hermite")


def _quad_sum_plan(alpha, v, p, m, rule, degree, v_table=None) -> _Plan:
    n = rule.n
    if v_table is None:
        v_table = cached_table(v, max(n + 1, 64))
    lam_v = christoffel(v_table, n, rule.nodes)
    xq, wq = discretize(v, _quad_degree(p, degree))

    def reduce(vals):
        num = _psum(lam_v, vals["n"][0], p)
        den = _psum(wq, vals["q"][0], p)
        return _ratio_or_raise(num, den)

    return _Plan("quad_sum", n, p, m, degree, {"q": (xq, (0,)), "n": (rule.nodes, (0,))}, reduce)


def quad_sum_ratio(P: PolyEvaluator, alpha: Weight, v: Weight, p: float, m: int,
                   rule: GaussRule, v_table: RecurrenceTable | None = None) -> RatioSample:
    """``sum_k lambda_n(v; x_k) |P(x_k)|**p / int |P|**p v``.

    ``x_k`` are the nodes of ``rule`` (for ``alpha``); ``lambda_n(v; .)`` is
    the Christoffel function of the measure ``v dx``.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    plan = _quad_sum_plan(alpha, v, p, m, rule, P.degree, v_table)
    return RatioSample(plan.ratio_of(P), {"kind": "given"}, rule.n, p, m, "quad_sum")


def _bernstein_plan(alpha, w, p, j, n, degree) -> _Plan:
    xq, wq = discretize(alpha, _quad_degree(p, degree) + 20, refine=2)
    W = wq * eval_regularized(w, n, xq) * varphi(xq, n)
    phin = varphi(xq, n) ** j

    def reduce(v):
        num = _psum(W, phin * v["q"][j], p)
        den = n ** (j * p) * _psum(W, v["q"][0], p)
        return _ratio_or_raise(num, den)

    return _Plan("bernstein", n, p, 1, degree, {"q": (xq, (0, j))}, reduce)


def bernstein_ratio(P: PolyEvaluator, alpha: Weight, w: Weight, p: float, j: int,
                    n: int | None = None) -> RatioSample:
    """``int |P^(j) phi_n**j|**p w_n phi_n dalpha / (n**(j p) int |P|**p w_n phi_n dalpha)``.

    ``phi_n = sqrt(1 - x**2) + 1/n`` and ``w_n`` is the regularised weight.
    ``n`` defaults to the degree of ``P``.
    """
    if j < 1:
        raise ValueError("j must be at least 1")
    n = n if n is not None else max(P.degree, 1)
    plan = _bernstein_plan(alpha, w, p, j, n, P.degree)
    return RatioSample(plan.ratio_of(P), {"kind": "given", "j": j}, n, p, 1, "bernstein")


def _restricted_plan(beta, u, p, n, eps, degree) -> _Plan:
    region = delta_region(n, eps, beta)
    qd = _quad_degree(p, degree)
    xf, wf = discretize(beta, qd, refine=2)
    xr, wr = discretize(beta, qd, region=region, refine=2)
    Wf = wf * eval_regularized(u, n, xf)
    Wr = wr * eval_regularized(u, n, xr)

    def reduce(v):
        return _ratio_or_raise(_psum(Wf, v["f"][0], p), _psum(Wr, v["r"][0], p))

    return _Plan("restricted", n, p, 1, degree, {"f": (xf, (0,)), "r": (xr, (0,))}, reduce)


def restricted_ratio(P: PolyEvaluator, beta: Weight, u: Weight, p: float, n: int,
                     eps: float) -> RatioSample:
    """``int |P|**p u_n dbeta`` over ``[-1, 1]`` divided by the same over ``Delta_n(eps)``.

    Raises
    ------
    EmptyRegion
        If ``Delta_n(eps)`` is empty.
    """
    plan = _restricted_plan(beta, u, p, n, eps, P.degree)
    return RatioSample(plan.ratio_of(P), {"kind": "given", "eps": eps}, n, p, 1, "restricted")


# ---------------------------------------------------------------------------
# adversarial search


def _params(params: dict) -> dict:
    out = dict(params)
    out.setdefault("p", 2.0)
    out.setdefault("m", 1)
    out.setdefault("u", WeightSpec())
    out.setdefault("w", WeightSpec())
    out.setdefault("j", 1)
    out.setdefault("eps", 0.5)
    if "alpha" not in out:
        out["alpha"] = out["beta"]
    out.setdefault("beta", out["alpha"])
    out.setdefault("v", out["alpha"])
    return out


def build_plan(kind: str, params: dict) -> _Plan:
    """Ratio plan for ``kind`` with degree-maximal polynomials.

    ``params`` holds ``n`` and the weights and exponents the ratio needs
    (``alpha``, ``beta``, ``u``, ``v``, ``w``, ``p``, ``m``, ``j``, ``eps``).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown ratio kind {kind!r}; expected one of {KINDS}")
    P = _params(params)
    n, p, m = int(P["n"]), float(P["p"]), int(P["m"])
    basis_measure = P["beta"] if kind == "restricted" else P["alpha"]
    table = cached_table(basis_measure, max(m * n + 2, 64))
    rule = gauss_rule(table, n)
    if kind == "mz":
        plan = _mz_plan(P["alpha"], P["beta"], P["u"], p, rule, n - 1)
    elif kind == "mz_hermite":
        plan = _mz_hermite_plan(P["alpha"], P["beta"], p, m, rule, m * n - 1)
    elif kind == "quad_sum":
        plan = _quad_sum_plan(P["alpha"], P["v"], p, m, rule, m * n)
    elif kind == "bernstein":
        plan = _bernstein_plan(P["alpha"], P["w"], p, int(P["j"]), n, n)
    else:
        plan = _restricted_plan(P["beta"], P["u"], p, n, float(P["eps"]), n)
    plan.basis_table = table
    return plan


def theory_verdict(kind: str, params: dict) -> str:
    """Verdict of the sufficient conditions that govern ``kind``."""
    P = _params(params)
    if kind == "mz":
        return mz_check(P["alpha"], P["beta"], P["u"], P["p"], 1).overall.value
    if kind == "mz_hermite":
        m = int(P["m"])
        return mz_check(P["alpha"], P["beta"], sigma_u(P["alpha"], P["beta"], m),
                        P["p"], m).overall.value
    if kind == "quad_sum":
        rep = classify(P["v"])
        return (Verdict.HOLDS if rep.GJ2 == Verdict.HOLDS and rep.GJ4 == Verdict.HOLDS
                else Verdict.FAILS).value
    if kind == "bernstein":
        return classify(P["alpha"]).GJ4.value
    return classify(P["beta"]).GJ2.value


def _sample(t: int, rng, rule: GaussRule, Bn: np.ndarray, deg: int, p: float):
    """Coefficient vector and witness for trial ``t``."""
    n = rule.n
    if t % 2 == 0:
        d = int(rng.integers(max(0, deg // 2), deg + 1))
        c = np.zeros(deg + 1)
        c[: d + 1] = rng.standard_normal(d + 1)
        return c, {"sample": "coefficients", "degree": d}
    # node-localised polynomials of degree n - 1 through prescribed node values
    vals = np.zeros(n)
    from_top = bool(rng.integers(2))
    if t % 4 == 1:
        k = min(int(rng.geometric(0.3)) - 1, n - 1)
        vals[k if from_top else n - 1 - k] = 1.0
        wit = {"sample": "spike", "node": int(k), "from_top": from_top}
    else:
        size = int(rng.integers(1, n + 1))
        theta = float(rng.uniform(0.0, 1.0))
        idx = np.arange(size) if from_top else np.arange(n - size, n)
        vals[idx] = np.sign(rule.derivs[idx]) * rule.cotes[idx] ** (-theta / p)
        wit = {"sample": "sign-block", "size": size, "theta": theta, "from_top": from_top}
    c = np.zeros(deg + 1)
    c[:n] = Bn[:n] @ (rule.cotes * vals)
    return c, wit


def adversarial_sup(kind: str, params: dict, sampler=None, trials: int = 200) -> RatioSample:
    """Largest ratio over sampled polynomials.

    Even trials draw random orthonormal-basis coefficients (random degree
    between half and all of the admissible degree).  Odd trials build
    node-localised polynomials from their node values: single spikes near
    an endpoint, or blocks of endpoint-anchored nodes carrying
    ``sgn(p_n'(x_k)) lambda_k**(-theta/p)``.  Trials consume one generator
    in order, so the result is nondecreasing in ``trials``.

    Returns
    -------
    RatioSample
        The witness holds the coefficient vector, trial index and seed.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    sampler = as_sampler(sampler)
    rng = sampler.rng
    plan = build_plan(kind, params)
    table = plan.basis_table
    deg = plan.degree
    rule = gauss_rule(table, plan.n)
    Bn = eval_basis(table, max(deg, plan.n - 1), rule.nodes)[0]
    mats = {}
    for name, (x, orders) in plan.points.items():
        E = eval_basis(table, deg, x, nderiv=max(orders))
        mats[name] = {j: E[j] for j in orders}
    best = None
    for t in range(trials):
        c, wit = _sample(t, rng, rule, Bn, deg, plan.p)
        vals = {name: {j: c @ M for j, M in d.items()} for name, d in mats.items()}
        try:
            r = plan.reduce(vals)
        except ZeroDenominator:
            continue
        if best is None or r > best[0]:
            best = (r, dict(wit, trial=t, seed=sampler.seed, coeffs=c.tolist()))
    if best is None:
        raise ZeroDenominator("every sampled polynomial had a vanishing denominator")
    return RatioSample(best[0], best[1], plan.n, plan.p, plan.m, kind)


@dataclass(frozen=True)
class LadderResult:
    """Adversarial sups over an ``n``-doubling ladder with the trend verdict."""

    kind: str
    samples: list
    growth: float
    spread: float
    theory: str
    growth_threshold: float = GROWTH_THRESHOLD
    stability_factor: float = STABILITY_FACTOR

    @property
    def trend(self) -> str:
        if self.growth >= self.growth_threshold:
            return "growing"
        if self.spread <= self.stability_factor:
            return "bounded"
        return "inconclusive"

    def csv_rows(self) -> list[list]:
        return [[s.theorem, s.n, s.p, s.m, s.ratio, s.witness.get("seed"), s.witness_digest,
                 self.theory] for s in self.samples]


def ladder(kind: str, params: dict, ns, sampler=None, trials: int = 200) -> LadderResult:
    """Run :func:`adversarial_sup` for each ``n`` in ``ns`` with the same seed."""
    sampler = as_sampler(sampler)
    samples = [adversarial_sup(kind, dict(params, n=int(n)), sampler, trials) for n in ns]
    vals = [s.ratio for s in samples]
    growth = growth_per_doubling(ns, vals) if len(ns) > 1 else 1.0
    spread = max(vals) / min(vals) if min(vals) > 0 else math.inf
    return LadderResult(kind, samples, growth, spread, theory_verdict(kind, params))
