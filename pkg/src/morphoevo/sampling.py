"""Seeded random primitives: Zipfian weights, weighted sampling without
replacement, and the focus-selection distribution.

Weighted sampling without replacement is done by an exponential race
(Efraimidis-Spirakis), which is distributionally equivalent to sequential
weighted draws with removal: draw Exp(1)/w_i per item and keep the m
smallest keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


def zipf_weights(n: int, s: float) -> np.ndarray:
    """Normalized weights over ranks 1..n, rank r weighted r**(-s)."""
    if n < 1:
        raise ConfigError("zipf_weights needs n >= 1")
    if s <= 0:
        raise ConfigError("zipf exponent must be positive")
    w = np.arange(1, n + 1, dtype=float) ** (-s)
    return w / w.sum()


@dataclass
class ZipfSpec:
    """Frequency-skew switch for one axis (lexemes or cells).

    ``rank_permutation_seed`` fixes which item gets which frequency rank;
    None means identity (item 0 is the most frequent).
    """

    enabled: bool = False
    s: float = 1.0
    rank_permutation_seed: int | None = None

    def __post_init__(self):
        if self.enabled and self.s <= 0:
            raise ConfigError("zipf exponent must be positive when enabled")

    def weights(self, n: int) -> np.ndarray | None:
        """Per-item frequency weights, or None meaning uniform."""
        if not self.enabled:
            return None
        base = zipf_weights(n, self.s)
        if self.rank_permutation_seed is None:
            return base
        perm = np.random.default_rng(self.rank_permutation_seed).permutation(n)
        return base[perm]

    def to_json(self) -> dict:
        return {
            "enabled": self.enabled,
            "s": self.s,
            "rank_permutation_seed": self.rank_permutation_seed,
        }


@dataclass
class SamplePlan:
    """Everything about how one step gathers its evidence.

    In rhizomorphome orientation ``num_pivots`` counts pivot cells and
    ``evidence_fraction`` is the sampled fraction of non-focal lexemes. In
    metamorphome orientation the axes swap: ``num_pivots`` counts pivot
    lexemes and ``evidence_fraction`` is the sampled fraction of non-focal
    cells.
    """

    evidence_fraction: float = 1.0
    num_pivots: int = 1
    lexeme_zipf: ZipfSpec = field(default_factory=ZipfSpec)
    cell_zipf: ZipfSpec = field(default_factory=ZipfSpec)
    # default shares one evidence sample across pivots; independent
    # per-pivot samples make repulsion too weak to hold classes apart
    per_pivot_resample: bool = False

    def __post_init__(self):
        if not 0 < self.evidence_fraction <= 1:
            raise ConfigError("evidence_fraction must lie in (0, 1]")
        if self.num_pivots < 1:
            raise ConfigError("need at least one pivot")


def sample_without_replacement(weights, m: int, rng) -> np.ndarray:
    """m distinct indices, drawn sequentially with removal, weight-biased.

    Uniform sampling is expressed by equal weights. Returned in draw order.
    """
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    if m > n:
        raise ConfigError(f"cannot draw {m} items from {n} without replacement")
    if np.any(w <= 0):
        raise ConfigError("all weights must be positive")
    keys = rng.standard_exponential(n) / w
    if m == n:
        return np.argsort(keys)
    part = np.argpartition(keys, m)[:m]
    return part[np.argsort(keys[part])]


def choose_focus(weights, rng) -> int:
    """One index, drawn with probability proportional to the reciprocal of
    its frequency weight (rarer items are likelier foci). With equal weights
    this is a uniform draw."""
    w = np.asarray(weights, dtype=float)
    if w.shape[0] < 1:
        raise ConfigError("empty weight sequence")
    inv = 1.0 / w
    cdf = np.cumsum(inv)
    return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
