"""Acceptance suite: one recorded PASS/FAIL line per criterion.

Every test computes its measurements first, then hands a single boolean
with the measured values and pinned tolerances to the ``acceptance``
fixture, which prints the line and asserts it.
"""

import json
import math
import time

import numpy as np
import pytest
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import legendre as npleg
from scipy import integrate as spi

from gjortho import cli
from gjortho.conditions import (alpha_exponent_clause, conjugate, fourier_check, hilbert_check,
                                nevai, probe_l1, probe_two_weight, sigma_u)
from gjortho.fourier import operator_norm_estimate
from gjortho.hilbert import SLOPE_THRESHOLD, condition_sup, transform
from gjortho.interp import JetData, converge_sweep, expansion, hermite
from gjortho.mz import ladder, mz_ratio
from gjortho.orthopoly import cached_table, eval_basis, envelope_ratios, gauss_rule
from gjortho.sampling import Sampler
from gjortho.weights import chebyshev, gjlog, legendre

GJLOG_POINTS = (-1.0, 0.3, 1.0)
GJLOG_GAMMA = (0.25, 1.0, -0.25)
GJLOG_LOG = (1.0, -1.0, -1.0)


def gjlog_measure():
    return gjlog(GJLOG_POINTS, GJLOG_GAMMA, GJLOG_LOG)


def gjlog_density(x):
    """The same density written out directly, for independent quadrature."""
    out = 1.0
    for t, G, g in zip(GJLOG_POINTS, GJLOG_GAMMA, GJLOG_LOG):
        d = abs(x - t)
        out *= d ** G * math.log(math.e / d) ** g
    return out


# ---------------------------------------------------------------------------
# 1. quadrature


def test_criterion_1_gauss_rules(acceptance):
    t0 = time.perf_counter()
    leg, cheb = cached_table(legendre(), 128), cached_table(chebyshev(), 128)
    worst_closed = 0.0
    r2 = gauss_rule(leg, 2)
    worst_closed = max(worst_closed, np.max(np.abs(r2.nodes - np.array([1, -1]) / math.sqrt(3))),
                       np.max(np.abs(r2.cotes - 1.0)))
    for n in range(1, 65):
        r = gauss_rule(cheb, n)
        k = np.arange(1, n + 1)
        worst_closed = max(worst_closed,
                           np.max(np.abs(r.nodes - np.cos((2 * k - 1) * np.pi / (2 * n)))),
                           np.max(np.abs(r.cotes - np.pi / n)))
        x, w = npleg.leggauss(n)
        r = gauss_rule(leg, n)
        worst_closed = max(worst_closed, np.max(np.abs(r.nodes - x[::-1])),
                           np.max(np.abs(r.cotes - w[::-1])))

    rng = np.random.default_rng(11)
    worst_exact = 0.0
    for n in (1, 2, 5, 8, 16, 32, 64):
        c = rng.standard_normal(2 * n)
        r = gauss_rule(leg, n)
        exact = npleg.legval(1.0, npleg.legint(c, lbnd=-1))
        got = np.sum(r.cotes * npleg.legval(r.nodes, c))
        worst_exact = max(worst_exact, abs(got - exact) / np.sum(np.abs(c)))
        r = gauss_rule(cheb, n)
        got = np.sum(r.cotes * npcheb.chebval(r.nodes, c))
        worst_exact = max(worst_exact, abs(got - np.pi * c[0]) / (np.pi * np.sum(np.abs(c))))
    dt = time.perf_counter() - t0
    ok = worst_closed <= 1e-10 and worst_exact <= 1e-9 and dt < 10
    acceptance("1 quadrature", ok,
               f"closed-form error {worst_closed:.2e} (tol 1e-10, n<=64), exactness "
               f"{worst_exact:.2e} relative (tol 1e-9), runtime {dt:.1f}s (limit 10s)")


# ---------------------------------------------------------------------------
# 2. orthonormality


def _gram_independent(table, kmax, density, cuts):
    """Gram matrix by scipy vector quadrature on the directly written density."""
    def f(x):
        B = eval_basis(table, kmax, np.array([x]))[0][:, 0]
        # subdivision can land exactly on a singular cut point
        dens = density(x) if min(abs(x - c) for c in cuts) > 0 else 0.0
        return np.outer(B, B) * dens
    return sum(spi.quad_vec(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=4000)[0]
               for a, b in zip(cuts[:-1], cuts[1:]))


def _gram_chebyshev(table, kmax):
    """Gram matrix for ``dx / sqrt(1 - x**2)`` after ``x = cos(theta)``."""
    def f(theta):
        B = eval_basis(table, kmax, np.array([math.cos(theta)]))[0][:, 0]
        return np.outer(B, B)
    return spi.quad_vec(f, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12)[0]


def test_criterion_2_orthonormality(acceptance):
    t0 = time.perf_counter()
    grams = {
        "legendre": _gram_independent(cached_table(legendre(), 64), 12, lambda x: 1.0,
                                      (-1.0, 1.0)),
        "chebyshev": _gram_chebyshev(cached_table(chebyshev(), 64), 12),
        "gjlog": _gram_independent(cached_table(gjlog_measure(), 64), 12, gjlog_density,
                                   GJLOG_POINTS),
    }
    errs = {k: float(np.max(np.abs(G - np.eye(13)))) for k, G in grams.items()}
    dt = time.perf_counter() - t0
    ok = max(errs.values()) <= 1e-8 and dt < 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    acceptance("2 orthonormality", ok,
               f"max |<p_j,p_k> - delta_jk|, j,k<=12: {detail} (tol 1e-8), "
               f"runtime {dt:.1f}s (limit 60s)")


# ---------------------------------------------------------------------------
# 3. envelopes


ENVELOPE_NS = (8, 16, 32, 64, 128, 256)


def _probe_grid():
    near = np.geomspace(1e-6, 0.1, 50)
    return np.unique(np.concatenate([np.cos(np.linspace(0, np.pi, 1501)),
                                     np.linspace(-1, 1, 1001), 0.3 + near, 0.3 - near]))


def test_criterion_3_envelopes(acceptance):
    t0 = time.perf_counter()
    x = _probe_grid()
    bands = {}
    for name, w in (("legendre", legendre()), ("chebyshev", chebyshev()),
                    ("gjlog", gjlog_measure())):
        table = cached_table(w, 300)
        sup, lam, der = [], [], []
        for n in ENVELOPE_NS:
            r = envelope_ratios(table, n, x)
            # the bound on p_n is one-sided: compare its sup over the grid across n
            sup.append(r["pn"].max())
            lam.append(r["christoffel"])
            der.append(r["derivative"])
        lam, der = np.concatenate(lam), np.concatenate(der)
        bands[name] = (max(sup) / min(sup), lam.max() / lam.min(), der.max() / der.min())
    dt = time.perf_counter() - t0
    worst = max(max(b) for b in bands.values())
    ok = worst <= 50 and dt < 300
    detail = "; ".join(f"{k} p_n {a:.2f} lambda {b:.2f} p_n' {c:.2f}"
                       for k, (a, b, c) in bands.items())
    acceptance("3 envelopes", ok,
               f"max/min bands {detail} (limit 50), runtime {dt:.1f}s (limit 300s)")


# ---------------------------------------------------------------------------
# 4. condition engine against numerical probes


def _sym(G, g):
    return gjlog([-1, 1], [G, G], [g, g])


def _mid(G, g):
    return gjlog([-1, 0, 1], [0, G, 0], [0, g, 0])


def _combine_probes(*results):
    if "diverges" in results:
        return "diverges"
    return "converges" if all(r == "converges" for r in results) else "undecided"


def condition_matrix():
    """Rows ``(family, case, engine verdict, probe verdict)``.

    Probe exponents are derived here by hand for the local factor at the
    deciding point; the engine derives its own through weight products.
    """
    rows = []
    # integrability of (a' phi)^(-p/2) b' with a' = endpoint factor s^a log^g, b' = 1
    for a, g, p in [(0, 0, 3.9), (0, 0, 4.0), (0, 0, 4.1), (-0.5, 0, 10), (0.5, 0, 3),
                    (0, 1, 4)]:
        v = nevai(_sym(a, g), legendre(), p).overall.value
        rows.append(("nevai", (a, g, p), v, probe_l1(-(p / 2) * (a + 0.5), -(p / 2) * g)))
    # partial sums, left weight clause; a' = 1 and w = u
    for wG, wg, p in [(0, 0, 3), (0, 0, 4), (0, 0, 6), (0.25, 0, 6), (0, -0.5, 4)]:
        rep = fourier_check(legendre(), _sym(wG, wg), _sym(wG, wg), p)
        v = rep.clause("w^p (a' phi)^(-p/2) a' in L1").verdict.value
        rows.append(("fourier-left", (wG, wg, p), v, probe_l1(p * wG - p / 4, p * wg)))
    # partial sums, right weight clause
    for uG, p in [(0, 6), (0, 4 / 3), (0, 1.25), (-0.25, 1.25)]:
        q = conjugate(p)
        rep = fourier_check(legendre(), _sym(uG, 0), _sym(uG, 0), p)
        v = rep.clause("u^-q (a' phi)^(-q/2) a' in L1").verdict.value
        rows.append(("fourier-right", (uG, p), v, probe_l1(-q * uG - q / 4, 0.0)))
    # two-weight Hilbert bound at an interior point
    for GU, gU, GV, gV, p in [(0, 0, 0, 0, 2), (0.2, 0, 0.2, 0, 2), (0.5, 1, 0.5, 1, 2),
                              (0.5, 0, 0.5, 1, 2), (-0.2, 0, 0, 0, 2), (0.3, 0, 0, 0, 2),
                              (-0.6, 0, -0.6, 0, 2), (0.5, 0, 0.5, 0, 3)]:
        q = conjugate(p)
        v = hilbert_check(_mid(GU, gU), _mid(GV, gV), p).overall.value
        pr = probe_two_weight(p * GU, p * gU, -q * GV, -q * gV, p)
        pr = {"bounded": "converges", "unbounded": "diverges"}.get(pr, pr)
        rows.append(("hilbert", (GU, gU, GV, gV, p), v, pr))
    # exponent bound on a' making sigma' integrable, m derivatives
    for m, iG, eG in [(1, -0.9, 0), (1, -1, 0), (2, -0.6, 0), (2, -0.7, 0), (3, -0.45, 0),
                      (3, 0, -0.8), (3, 0, -0.7)]:
        k = (m - 1) / 2
        v = alpha_exponent_clause(gjlog([-1, 0, 1], [eG, iG, eG], [0, 0, 0]), m).verdict.value
        pr = _combine_probes(probe_l1(iG * (m + 1) / 2, 0.0),
                             probe_l1(eG + k * min(eG + 0.5, 0.0), 0.0))
        rows.append(("sigma-exponent", (m, iG, eG), v, pr))
    return rows


def test_criterion_4_condition_engine(acceptance):
    rows = condition_matrix()
    expect = {"holds": "converges", "fails": "diverges"}
    mismatches = [r for r in rows if r[2] != "boundary" and expect[r[2]] != r[3]]
    counts = {v: sum(r[2] == v for r in rows) for v in ("holds", "fails", "boundary")}
    threshold = [nevai(legendre(), legendre(), p).overall.value for p in (3.9, 4.0, 4.1)]
    ok = (len(rows) == 30 and not mismatches and all(counts.values())
          and threshold == ["holds", "boundary", "fails"])
    acceptance("4 condition engine", ok,
               f"{len(rows)} cases ({counts}), mismatches {mismatches}, "
               f"Legendre p=3.9/4.0/4.1 -> {threshold}")


# ---------------------------------------------------------------------------
# 5. Fourier partial sums


FOURIER_NS = (8, 16, 32, 64, 128)


@pytest.mark.slow
def test_criterion_5_fourier_dichotomy(acceptance):
    t0 = time.perf_counter()
    table = cached_table(legendre(), 4 * max(FOURIER_NS) + 64)
    est = {p: [operator_norm_estimate(table, n, p, sampler=Sampler(7), trials=200).ratio
               for n in FOURIER_NS] for p in (2.0, 2.5, 6.0)}
    dt = time.perf_counter() - t0
    l2 = max(abs(v - 1) for v in est[2.0])
    spread = max(est[2.5]) / min(est[2.5])
    steps = [b / a for a, b in zip(est[6.0], est[6.0][1:])]
    ok = l2 <= 1e-3 and spread <= 2 and min(steps) >= 1.1 and dt < 600
    acceptance("5 Fourier dichotomy", ok,
               f"p=2 max|est-1| {l2:.1e} (tol 1e-3); p=2.5 max/min {spread:.3f} (limit 2); "
               f"p=6 per-doubling {[round(s, 3) for s in steps]} (min 1.1); "
               f"200 trials, runtime {dt:.1f}s (limit 600s)")


# ---------------------------------------------------------------------------
# 6. Marcinkiewicz-Zygmund


MZ_NS = (8, 16, 32, 64, 128)


@pytest.mark.slow
def test_criterion_6_mz(acceptance):
    rng = np.random.default_rng(3)
    worst = 0.0
    for alpha in (legendre(), chebyshev(), gjlog_measure()):
        table = cached_table(alpha, 80)
        for i in range(100):
            n = int(rng.choice([4, 8, 16, 32, 64]))
            rule = gauss_rule(table, n)
            P = expansion(table, rng.standard_normal(n))
            r = mz_ratio(P, alpha, alpha, legendre(), 2.0, rule).ratio
            worst = max(worst, abs(r - 1))
    cheb = chebyshev()
    stable = ladder("mz", {"alpha": cheb, "beta": cheb, "u": sigma_u(cheb, cheb), "p": 3.0},
                    MZ_NS, Sampler(5), 200)
    grow = ladder("mz", {"alpha": legendre(), "p": 5.0}, MZ_NS, Sampler(5), 200)
    ok = worst <= 1e-8 and stable.spread <= 4 and grow.growth >= 1.1
    acceptance("6 MZ identity and dichotomy", ok,
               f"p=2 identity max|ratio-1| {worst:.1e} over 300 polynomials (tol 1e-8); "
               f"Chebyshev p=3 spread {stable.spread:.3f} (limit 4, theory {stable.theory}); "
               f"Legendre p=5 growth per doubling {grow.growth:.4f} (least-squares, min 1.1, "
               f"sups {[round(s.ratio, 3) for s in grow.samples]}, theory {grow.theory})")


# ---------------------------------------------------------------------------
# 7. Hilbert transform


def test_criterion_7_hilbert(acceptance):
    xs = (-0.95, -0.5, -0.1, 0.0, 0.3, 0.7, 0.99)
    e1 = max(abs(transform(np.ones_like, x).value - math.log((1 + x) / (1 - x))) for x in xs)
    e2 = max(abs(transform(lambda y: np.sqrt(1 - y * y), x).value - math.pi * x) for x in xs)
    good = condition_sup(_mid(0.2, 0), _mid(0.2, 0), 2.0)
    bad = condition_sup(_mid(0.5, 1), _mid(0.5, 1), 2.0)
    s_good, s_bad = max(good.slopes.values()), max(bad.slopes.values())
    ok = e1 <= 1e-8 and e2 <= 1e-8 and s_good <= 0.05 and s_bad >= SLOPE_THRESHOLD
    acceptance("7 Hilbert transform", ok,
               f"g=1 error {e1:.1e}, airfoil error {e2:.1e} (tol 1e-8); slopes "
               f"admissible {s_good:.4f} (max 0.05), log-violating {s_bad:.4f} (min 0.2)")


# ---------------------------------------------------------------------------
# 8. interpolation


def test_criterion_8_interpolation(acceptance):
    cheb = chebyshev()
    sweep = converge_sweep([np.abs, np.sign], cheb, cheb, 2.0, 1, 0, (16, 256),
                           breakpoints=(0.0,))
    (_, e16), (_, e256) = sweep.rows
    factor = e16 / e256

    table = cached_table(legendre(), 80)
    rng = np.random.default_rng(8)
    x = np.linspace(-1, 1, 401)
    repro, jet = 0.0, 0.0
    for n in (2, 4, 8, 16, 32):
        rule = gauss_rule(table, n)
        P = expansion(table, rng.standard_normal(2 * n))
        H = hermite(rule, table, JetData.from_functions(rule.nodes, [lambda t: P(t),
                                                                     lambda t: P(t, 1)]), 2)
        repro = max(repro, np.max(np.abs(H(x) - P(x))) / np.max(np.abs(P(x))))
        for f, df in ((np.exp, np.exp), (lambda t: np.sin(3 * t), lambda t: 3 * np.cos(3 * t))):
            H = hermite(rule, table, JetData.from_functions(rule.nodes, [f, df]), 2)
            jet = max(jet, np.max(np.abs(H(rule.nodes) - f(rule.nodes))),
                      np.max(np.abs(H(rule.nodes, 1) - df(rule.nodes))))
    ok = factor >= 4 and repro <= 1e-9 and jet <= 1e-8
    acceptance("8 interpolation", ok,
               f"|x| Chebyshev p=2 error {e16:.3e} -> {e256:.3e}, factor {factor:.1f} (min 4); "
               f"Hermite m=2 reproduction {repro:.1e} (tol 1e-9), jet match {jet:.1e} "
               f"(tol 1e-8), n<=32")


# ---------------------------------------------------------------------------
# 9. determinism


DETERMINISM_CONFIGS = {
    "ortho": {"alpha": "chebyshev", "n": [4, 8, 16]},
    "fourier": {"alpha": "legendre", "n": [8, 16], "p": [2.5, 6.0], "trials": 40},
    "mz": {"alpha": "legendre", "n": [8, 16], "p": [3.0, 5.0], "trials": 40},
    "interp": {"function": "abs", "n": [8, 16], "p": [2.0]},
    "hilbert": {"U": {"points": [-1, 0, 1], "Gamma": [0, 0.2, 0], "gamma": [0, 0, 0]},
                "V": {"points": [-1, 0, 1], "Gamma": [0, 0.2, 0], "gamma": [0, 0, 0]},
                "p": [2.0], "delta_exponents": [2, 10]},
    "check": {"theorem": "nevai", "p": [3.9, 4.0, 4.1]},
}


def _body(path):
    return path.read_bytes().split(b"\n", 1)[1]


def test_criterion_9_determinism(acceptance, tmp_path):
    same = {}
    for cmd, cfg in DETERMINISM_CONFIGS.items():
        conf = tmp_path / f"{cmd}.json"
        conf.write_text(json.dumps(dict(cfg, command=cmd)))
        bodies = []
        for i, threads in enumerate((1, 1, 3)):
            out = tmp_path / f"{cmd}-{i}.csv"
            status = cli.main(["--config", str(conf), "--out", str(out), "--seed", "123",
                               "--threads", str(threads)])
            assert status == 0
            bodies.append(_body(out))
        same[cmd] = len(set(bodies)) == 1 and len(bodies[0]) > 0
    ok = all(same.values())
    acceptance("9 determinism", ok,
               f"byte-identical CSV bodies over two runs and 1 vs 3 threads: {same}")
