"""Per-network statistics and score-distribution analytics.

All functions are pure and operate on one architecture's (samples x episodes)
score matrix or on the vector of per-network mean scores derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .envs import get_spec

__all__ = [
    "NoFiniteWaitingTimeError",
    "Histogram",
    "SampleStats",
    "ArchitectureReport",
    "mean_scores",
    "variance_scores",
    "rank_order",
    "rank_by_mean",
    "sample_stats",
    "histogram",
    "percentile",
    "top_fraction_count",
    "top_fraction_episodes",
    "solve_probability",
    "success_probability",
    "expected_waiting_time",
    "analyze_slice",
    "analyze",
]

DEFAULT_BINS = 40
DEFAULT_TOP_FRACTION = 0.001


class NoFiniteWaitingTimeError(ValueError):
    """Solve probability is zero, so the geometric waiting time is unbounded."""


def _matrix(S) -> np.ndarray:
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.size == 0:
        raise ValueError(f"expected a nonempty (samples, episodes) matrix, got shape {S.shape}")
    return S


def _vector(x, what="means") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError(f"{what} must be nonempty")
    return x


def mean_scores(S) -> np.ndarray:
    return _matrix(S).mean(axis=1)


def variance_scores(S) -> np.ndarray:
    """Squared deviations from the row mean, summed and divided by ``E + 1``."""
    S = _matrix(S)
    dev = S - S.mean(axis=1, keepdims=True)
    return (dev * dev).sum(axis=1) / (S.shape[1] + 1)


def rank_order(means) -> np.ndarray:
    """Sample indices sorted by ascending mean; ties keep input order."""
    return np.argsort(np.asarray(means, dtype=np.float64), kind="stable")


def rank_by_mean(means) -> np.ndarray:
    """``ranks[n]`` is the position of sample ``n`` in the stable ascending sort."""
    order = rank_order(means)
    ranks = np.empty_like(order)
    ranks[order] = np.arange(order.size)
    return ranks


@dataclass(frozen=True)
class SampleStats:
    mean: np.ndarray
    variance: np.ndarray
    rank: np.ndarray

    @property
    def order(self) -> np.ndarray:
        order = np.empty_like(self.rank)
        order[self.rank] = np.arange(self.rank.size)
        return order


def sample_stats(S) -> SampleStats:
    means = mean_scores(S)
    return SampleStats(means, variance_scores(S), rank_by_mean(means))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def bins(self) -> int:
        return self.counts.size


def histogram(means, bins: int = DEFAULT_BINS) -> Histogram:
    """Equal-width bins over [min, max]; half-open except the closed last bin."""
    x = _vector(means)
    if int(bins) != bins or bins < 1:
        raise ValueError(f"bins must be a positive integer, got {bins!r}")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, int(bins) + 1)
    idx = np.searchsorted(edges, x, side="right") - 1
    idx = np.clip(idx, 0, int(bins) - 1)
    counts = np.bincount(idx, minlength=int(bins)).astype(np.int64)
    return Histogram(edges, counts)


def _exact(value: float) -> Fraction:
    # decimal reading of the float, so 99.9 means 999/10 and not its binary neighbour
    return Fraction(repr(float(value)))


def percentile(means, q: float) -> float:
    """Nearest-rank percentile: the ceil(q/100 * n)-th smallest value."""
    x = np.sort(_vector(means))
    if not 0 < q <= 100:
        raise ValueError(f"q must lie in (0, 100], got {q}")
    k = math.ceil(_exact(q) * x.size / 100)
    return float(x[max(k, 1) - 1])


def top_fraction_count(total: int, fraction: float) -> int:
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    return max(1, math.floor(_exact(fraction) * total))


def top_fraction_episodes(S, fraction: float = DEFAULT_TOP_FRACTION) -> np.ndarray:
    """The highest-scoring episodes as an (k, 2) array of (n, e), best first.

    Ties at the cutoff go to the lexicographically smaller (n, e).
    """
    S = _matrix(S)
    k = top_fraction_count(S.size, fraction)
    flat = S.ravel()
    order = np.argsort(-flat, kind="stable")[:k]
    return np.stack(np.unravel_index(order, S.shape), axis=1)


def solve_probability(means, threshold: float) -> float:
    x = _vector(means)
    return float(np.count_nonzero(x >= threshold)) / x.size


def success_probability(p: float, n: int) -> float:
    """Chance that at least one of ``n`` independent guesses scores at least the threshold."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return 1.0 - (1.0 - p) ** n


def expected_waiting_time(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0:
        raise NoFiniteWaitingTimeError("solve probability is 0: no finite expected waiting time")
    return 1.0 / p


@dataclass(frozen=True)
class ArchitectureReport:
    label: str
    stats: SampleStats
    best_mean: float
    percentile_999: float
    threshold: float
    solve_fraction: float
    histogram: Histogram
    top_episodes: np.ndarray
    runtime_seconds: float = None

    @property
    def variance_vs_mean(self) -> np.ndarray:
        return np.stack([self.stats.mean, self.stats.variance], axis=1)

    @property
    def expected_waiting_time(self):
        """1/p, or None when no sample reached the threshold."""
        if self.solve_fraction == 0:
            return None
        return expected_waiting_time(self.solve_fraction)


def analyze_slice(S, threshold: float, *, label: str = "", bins: int = DEFAULT_BINS,
                  top_fraction: float = DEFAULT_TOP_FRACTION, runtime_seconds=None) -> ArchitectureReport:
    st = sample_stats(S)
    return ArchitectureReport(
        label=label,
        stats=st,
        best_mean=float(st.mean.max()),
        percentile_999=percentile(st.mean, 99.9),
        threshold=float(threshold),
        solve_fraction=solve_probability(st.mean, threshold),
        histogram=histogram(st.mean, bins),
        top_episodes=top_fraction_episodes(S, top_fraction),
        runtime_seconds=runtime_seconds,
    )


def analyze(tensor, *, threshold: float = None, bins: int = DEFAULT_BINS,
            top_fraction: float = DEFAULT_TOP_FRACTION) -> list:
    """One report per architecture; ``threshold`` defaults to the env's solved score."""
    if len(tensor.architectures) == 0:
        raise ValueError("tensor has no architectures")
    if threshold is None:
        threshold = get_spec(tensor.env_name).solved_score
    runtimes = tensor.runtimes or [None] * len(tensor.architectures)
    return [
        analyze_slice(tensor.scores[a], threshold, label=arch.label, bins=bins,
                      top_fraction=top_fraction, runtime_seconds=runtimes[a])
        for a, arch in enumerate(tensor.architectures)
    ]
