"""Command-line experiment runner.

Usage::

    gjortho --config experiment.json [--out results.csv] [--seed N] [--threads N] [--tol X]

The configuration is a JSON object whose ``command`` field selects one of
``ortho``, ``fourier``, ``mz``, ``interp``, ``hilbert`` or ``check``.  The
output is CSV: one ``# generated <timestamp>`` line, a header row, then rows
``command, parameters, metric, value, theory_verdict`` where ``parameters``
is a compact JSON object with sorted keys.

Exit status is 0 on success, 2 when the configuration is invalid (no CSV is
written) and 3 on numerical failure (rows computed so far are written,
followed by a truncation marker row).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import conditions, fourier, hilbert, interp, mz
from .errors import GJOrthoError
from .orthopoly import cached_table, orthonormality_residual
from .sampling import DEFAULT_SEED, Sampler, growth_per_doubling
from .weights import Weight, WeightSpec, chebyshev, jacobi, legendre

log = logging.getLogger("gjortho")

COMMANDS = ("ortho", "fourier", "mz", "interp", "hilbert", "check")
HEADER = ["command", "parameters", "metric", "value", "theory_verdict"]
THREADS_ENV = "GJORTHO_THREADS"
TRUNCATION_MARK = "#truncated"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# ---------------------------------------------------------------------------
# configuration


def parse_weight(rec) -> Weight:
    """Weight from a record: a name, ``{"jacobi": [a, b]}`` or the serialised layout."""
    if rec is None or rec == "one":
        return WeightSpec()
    if isinstance(rec, str):
        named = {"legendre": legendre, "chebyshev": chebyshev}
        if rec not in named:
            raise ConfigError(f"unknown weight name {rec!r}")
        return named[rec]()
    if isinstance(rec, dict) and "jacobi" in rec:
        a, b = rec["jacobi"]
        return jacobi(float(a), float(b))
    if isinstance(rec, dict):
        try:
            return WeightSpec.from_dict(rec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad weight record: {exc}") from exc
    raise ConfigError(f"cannot read weight record {rec!r}")


def _weight_id(rec) -> str:
    return rec if isinstance(rec, str) else json.dumps(rec, sort_keys=True, separators=(",", ":"))


def _as_list(v, name) -> list:
    if v is None:
        raise ConfigError(f"missing {name!r}")
    return list(v) if isinstance(v, (list, tuple)) else [v]


@dataclass
class ExperimentConfig:
    command: str
    raw: dict
    ns: list = field(default_factory=list)
    ps: list = field(default_factory=list)
    m: int = 1
    k: int = 0
    eps: float = 0.5
    seed: int = DEFAULT_SEED
    trials: int = 200
    tol: float = 1e-10
    out: str | None = None

    def weight(self, key: str, default="one") -> Weight:
        return parse_weight(self.raw.get(key, default))

    def weight_id(self, key: str, default="one") -> str:
        return _weight_id(self.raw.get(key, default))


_NEEDS_N = {"ortho", "fourier", "mz", "interp"}
_NEEDS_P = {"fourier", "mz", "interp", "hilbert", "check"}


def validate(raw: dict, overrides: dict | None = None) -> ExperimentConfig:
    """Check a raw configuration and fill defaults.

    Raises
    ------
    ConfigError
        On any invalid field.
    """
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    raw = dict(raw)
    for key, val in (overrides or {}).items():
        if val is not None:
            raw[key] = val
    cmd = raw.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cmd!r}")
    cfg = ExperimentConfig(cmd, raw)
    try:
        if cmd in _NEEDS_N:
            cfg.ns = [int(n) for n in _as_list(raw.get("n"), "n")]
            if any(n < 1 for n in cfg.ns):
                raise ConfigError("n values must be positive")
            if any(b <= a for a, b in zip(cfg.ns, cfg.ns[1:])):
                raise ConfigError("n-ladder must be strictly increasing")
        if cmd in _NEEDS_P:
            cfg.ps = [float(p) for p in _as_list(raw.get("p"), "p")]
            if any(not p > 1 for p in cfg.ps):
                raise ConfigError("p must exceed 1")
        cfg.m = int(raw.get("m", 1))
        cfg.k = int(raw.get("k", 0))
        cfg.eps = float(raw.get("eps", 0.5))
        cfg.seed = int(raw.get("seed", DEFAULT_SEED))
        cfg.trials = int(raw.get("trials", 200))
        cfg.tol = float(raw.get("tol", 1e-10))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if cfg.m < 1 or not 0 <= cfg.k < cfg.m:
        raise ConfigError("need m >= 1 and 0 <= k < m")
    if cfg.trials < 1 or cfg.seed < 0 or not cfg.tol > 0:
        raise ConfigError("trials >= 1, seed >= 0 and tol > 0 are required")
    for key in ("alpha", "beta", "u", "v", "w", "U", "V"):
        if key in raw:
            parse_weight(raw[key])
    return cfg


# ---------------------------------------------------------------------------
# experiments: each returns a list of cells, each cell a zero-argument
# callable producing rows; cells run concurrently and are emitted in order.


def _params(**kw) -> str:
    return json.dumps(kw, sort_keys=True, separators=(",", ":"), default=str)


def _num(x) -> str:
    return repr(float(x))


def _ortho_cells(cfg: ExperimentConfig):
    alpha = cfg.weight("alpha", "legendre")
    aid = cfg.weight_id("alpha", "legendre")
    n_max = max(cfg.ns)
    kmax = int(cfg.raw.get("check_degree", min(12, n_max)))

    def cell():
        table = cached_table(alpha, n_max)
        verdict = conditions.is_integrable(alpha).value
        rows = [["ortho", _params(alpha=aid, k=-1), "mu0", _num(table.mu0), verdict]]
        for n in cfg.ns:
            rows.append(["ortho", _params(alpha=aid, k=n - 1), "a_k", _num(table.a[n - 1]), verdict])
            rows.append(["ortho", _params(alpha=aid, k=n), "b_k", _num(table.b[n - 1]), verdict])
        res = orthonormality_residual(table, kmax, cfg.tol)
        rows.append(["ortho", _params(alpha=aid, kmax=kmax), "orthonormality_residual",
                     _num(res), verdict])
        export = cfg.raw.get("export_table")
        if export:
            with open(export, "w", newline="") as fh:
                fh.write(table.to_csv())
        return rows

    return [cell]


def _fourier_cells(cfg: ExperimentConfig):
    alpha, u, w = cfg.weight("alpha", "legendre"), cfg.weight("u"), cfg.weight("w")
    ids = dict(alpha=cfg.weight_id("alpha", "legendre"), u=cfg.weight_id("u"),
               w=cfg.weight_id("w"))
    table = cached_table(alpha, max(4 * max(cfg.ns) + 64, 64))
    cells = []
    for p in cfg.ps:
        verdict = conditions.fourier_check(alpha, w, u, p).overall.value

        def cell(p=p, verdict=verdict):
            rows, vals = [], []
            for n in cfg.ns:
                s = fourier.operator_norm_estimate(table, n, p, u, w, Sampler(cfg.seed),
                                                   cfg.trials)
                vals.append(s.ratio)
                rows.append(["fourier", _params(**ids, n=n, p=p, seed=cfg.seed,
                                                trials=cfg.trials,
                                                trial=s.witness.get("trial"),
                                                witness=s.witness_digest),
                             "operator_norm_lower_bound", _num(s.ratio), verdict])
            if len(vals) > 1:
                rows.append(["fourier", _params(**ids, p=p, ns=cfg.ns), "growth_per_doubling",
                             _num(growth_per_doubling(cfg.ns, vals)), verdict])
            return rows

        cells.append(cell)
    return cells


def _mz_cells(cfg: ExperimentConfig):
    kind = cfg.raw.get("kind", "mz")
    if kind not in mz.KINDS:
        raise ConfigError(f"mz kind must be one of {mz.KINDS}")
    keys = ("alpha", "beta", "u", "v", "w")
    weights = {k: cfg.weight(k) for k in keys if k in cfg.raw}
    weights.setdefault("alpha", legendre())
    ids = {k: cfg.weight_id(k) for k in keys if k in cfg.raw}
    cells = []
    for p in cfg.ps:
        base = dict(weights, p=p, m=cfg.m, eps=cfg.eps, j=int(cfg.raw.get("j", 1)))

        def cell(p=p, base=base):
            lad = mz.ladder(kind, base, cfg.ns, Sampler(cfg.seed), cfg.trials)
            rows = []
            for s in lad.samples:
                rows.append(["mz", _params(**ids, kind=kind, n=s.n, p=p, m=cfg.m, seed=cfg.seed,
                                           trials=cfg.trials, trial=s.witness.get("trial"),
                                           witness=s.witness_digest),
                             "adversarial_sup", _num(s.ratio), lad.theory])
            if len(cfg.ns) > 1:
                par = _params(**ids, kind=kind, p=p, m=cfg.m, ns=cfg.ns,
                              threshold=lad.growth_threshold, stability=lad.stability_factor)
                rows.append(["mz", par, "growth_per_doubling", _num(lad.growth), lad.theory])
                rows.append(["mz", par, "spread", _num(lad.spread), lad.theory])
                rows.append(["mz", par, "trend", lad.trend, lad.theory])
            return rows

        cells.append(cell)
    return cells


def _function_jets(spec, m: int) -> tuple[list[Callable], tuple]:
    """Function and its first ``m - 1`` derivatives from a config entry."""
    if spec == "abs":
        fs = [np.abs, np.sign] + [lambda x: np.zeros_like(x)] * max(m - 2, 0)
        return fs[:m], (0.0,)
    if spec == "exp":
        return [np.exp] * m, ()
    if isinstance(spec, dict) and "poly" in spec:
        P = np.polynomial.Polynomial([float(c) for c in spec["poly"]])
        return [P.deriv(j) for j in range(m)], ()
    raise ConfigError(f"unknown function {spec!r}; use 'abs', 'exp' or {{'poly': [...]}}")


def _interp_cells(cfg: ExperimentConfig):
    fspec = cfg.raw.get("function", "abs")
    derivs, bps = _function_jets(fspec, cfg.m)
    alpha, beta = cfg.weight("alpha", "chebyshev"), cfg.weight("beta", "chebyshev")
    ids = dict(alpha=cfg.weight_id("alpha", "chebyshev"), beta=cfg.weight_id("beta", "chebyshev"),
               function=fspec)
    cells = []
    for p in cfg.ps:
        def cell(p=p):
            res = interp.converge_sweep(derivs, alpha, beta, p, cfg.m, cfg.k, cfg.ns,
                                        breakpoints=bps, tol=cfg.tol)
            return [["interp", _params(**ids, n=n, p=p, m=cfg.m, k=cfg.k), "error", _num(err),
                     res.verdict] for n, err in res.rows]

        cells.append(cell)
    return cells


def _hilbert_cells(cfg: ExperimentConfig):
    U, V = cfg.weight("U"), cfg.weight("V")
    ids = dict(U=cfg.weight_id("U"), V=cfg.weight_id("V"))
    kmin, kmax = (int(x) for x in cfg.raw.get("delta_exponents", [2, 24]))
    if not 0 < kmin < kmax:
        raise ConfigError("delta_exponents must be increasing positive integers")
    deltas = [2.0 ** -k for k in range(kmin, kmax + 1)]
    cells = []
    for p in cfg.ps:
        def cell(p=p):
            rep = hilbert.condition_sup(U, V, p, deltas)
            rows = []
            for i, delta, pu, pv, slope, verdict in rep.csv_rows():
                par = _params(**ids, p=p, i=i, point=rep.points[i], delta=delta)
                rows.append(["hilbert", par, "u_kernel_product", _num(pu), rep.symbolic])
                rows.append(["hilbert", par, "v_kernel_product", _num(pv), rep.symbolic])
            for i in range(len(rep.points)):
                par = _params(**ids, p=p, i=i, point=rep.points[i])
                rows.append(["hilbert", par, "slope", _num(rep.slopes[i]), rep.symbolic])
                rows.append(["hilbert", par, "verdict", rep.verdict_at(i), rep.symbolic])
            return rows

        cells.append(cell)
    return cells


def _check_cells(cfg: ExperimentConfig):
    theorem = cfg.raw.get("theorem", "nevai")
    cells = []
    for p in cfg.ps:
        def cell(p=p):
            if theorem == "nevai":
                rep = conditions.nevai(cfg.weight("alpha", "legendre"),
                                       cfg.weight("beta", "legendre"), p)
            elif theorem == "fourier":
                rep = conditions.fourier_check(cfg.weight("alpha", "legendre"), cfg.weight("w"),
                                               cfg.weight("u"), p)
            elif theorem == "hilbert":
                rep = conditions.hilbert_check(cfg.weight("U"), cfg.weight("V"), p)
            elif theorem == "mz":
                rep = conditions.mz_check(cfg.weight("alpha", "legendre"),
                                          cfg.weight("beta", "legendre"), cfg.weight("u"), p, cfg.m)
            else:
                raise ConfigError(f"unknown theorem {theorem!r}")
            overall = rep.overall.value
            rows = [["check", _params(theorem=rep.theorem, p=p, clause=c.label,
                                      witness=c.witness), "clause", c.verdict.value, overall]
                    for c in rep.clauses]
            rows.append(["check", _params(theorem=rep.theorem, p=p), "overall", overall, overall])
            return rows

        cells.append(cell)
    return cells


_BUILDERS = {"ortho": _ortho_cells, "fourier": _fourier_cells, "mz": _mz_cells,
             "interp": _interp_cells, "hilbert": _hilbert_cells, "check": _check_cells}


# ---------------------------------------------------------------------------
# running


@dataclass
class RunResult:
    status: int
    rows: list
    error: str | None = None


def run(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    """Execute the experiment; never raises for numerical failures."""
    cells = _BUILDERS[cfg.command](cfg)
    rows: list = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [pool.submit(c) for c in cells]
        for fut in futures:
            try:
                rows.extend(fut.result())
            except ConfigError:
                raise
            except (GJOrthoError, ArithmeticError, np.linalg.LinAlgError) as exc:
                for f in futures:
                    f.cancel()
                log.error("numerical failure: %s", exc)
                return RunResult(3, rows, f"{type(exc).__name__}: {exc}")
    return RunResult(0, rows)


def render(result: RunResult, timestamp: str | None = None) -> str:
    """CSV text: timestamp line, header, rows, and a truncation marker on failure."""
    ts = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    buf = io.StringIO()
    buf.write(f"# generated {ts}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(HEADER)
    wr.writerows(result.rows)
    if result.status == 3:
        wr.writerow([TRUNCATION_MARK, _params(error=result.error), "truncated", "", ""])
    return buf.getvalue()


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gjortho", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="overrides the command field of the config")
    ap.add_argument("--config", required=True, help="JSON experiment configuration")
    ap.add_argument("--out", help="CSV output path (default: stdout)")
    ap.add_argument("--seed", type=int, help="sampler seed (overrides config)")
    ap.add_argument("--threads", type=int, default=None,
                    help=f"worker threads (default: ${THREADS_ENV} or 1)")
    ap.add_argument("--tol", type=float, help="quadrature tolerance (overrides config)")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        cfg = validate(raw, {"command": args.command, "seed": args.seed, "tol": args.tol})
        threads = args.threads if args.threads is not None else _default_threads()
        if threads < 1:
            raise ConfigError("threads must be positive")
        result = run(cfg, threads)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    text = render(result)
    out = args.out or cfg.raw.get("out")
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if result.status == 3:
        print(f"numerical failure: {result.error}", file=sys.stderr)
    return result.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
