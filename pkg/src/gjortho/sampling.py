"""Seeded sampling and the ratio record shared by the estimators."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SEED = 20240601


class Sampler:
    """A seeded stream of random draws.

    All draws of one estimate come from a single generator consumed in
    trial order, so the first ``k`` trials are identical for any total
    trial count.
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)

    def __repr__(self) -> str:
        return f"Sampler(seed={self.seed})"


def as_sampler(sampler) -> Sampler:
    if isinstance(sampler, Sampler):
        return Sampler(sampler.seed)
    if sampler is None:
        return Sampler()
    return Sampler(int(sampler))


@dataclass(frozen=True)
class RatioSample:
    """A sampled ratio with the input that produced it."""

    ratio: float
    witness: dict = field(default_factory=dict)
    n: int = 0
    p: float = 2.0
    m: int = 1
    theorem: str = ""

    def __post_init__(self):
        if not (self.ratio >= 0 and np.isfinite(self.ratio)):
            raise ValueError(f"ratio must be finite and nonnegative, got {self.ratio}")

    @property
    def witness_digest(self) -> str:
        blob = json.dumps(self.witness, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def growth_per_doubling(ns, values) -> float:
    """``exp`` of the least-squares slope of ``log(value)`` against ``log2(n)``."""
    x = np.log2(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope = np.polyfit(x, y, 1)[0]
    return float(np.exp(slope))
