"""The architecture x sample x episode evaluation grid.

Seeds are derived per cell (see ``seeding``), so the score tensor depends on
the configuration alone: worker count and scheduling never change a byte.
Parallelism is per sample; one worker runs all episodes of a sample.
"""

from __future__ import annotations

import logging
import math
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence, Union

import numpy as np

from . import __version__, backend
from .envs import get_spec, make
from .policy import ArchSpec, Architecture, DimensionMismatchError, parse_arch, sample_weights
from .seeding import MASK64, episode_seed, weight_seed

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10_000
DEFAULT_EPISODES = 20
DEFAULT_ARCHS = ("0", "4", "4,4")

ArchLike = Union[str, ArchSpec, Architecture]


def _as_arch_spec(arch: ArchLike) -> ArchSpec:
    if isinstance(arch, Architecture):
        return arch.spec
    if isinstance(arch, ArchSpec):
        return arch
    return parse_arch(arch)


@dataclass(frozen=True)
class RunConfig:
    env_name: str
    architectures: tuple = DEFAULT_ARCHS
    n_samples: int = DEFAULT_SAMPLES
    n_episodes: int = DEFAULT_EPISODES
    master_seed: int = 0
    worker_count: Union[int, str] = 1
    backend: str = "auto"

    def __post_init__(self):
        spec = get_spec(self.env_name)
        archs = tuple(_as_arch_spec(a).bind(spec) for a in self.architectures)
        if not archs:
            raise ValueError("at least one architecture is required")
        object.__setattr__(self, "architectures", archs)
        if self.n_samples < 1 or self.n_episodes < 1:
            raise ValueError("n_samples and n_episodes must be >= 1")
        if self.worker_count != "auto" and (not isinstance(self.worker_count, int) or self.worker_count < 1):
            raise ValueError(f"worker_count must be a positive integer or 'auto', got {self.worker_count!r}")
        if self.backend not in backend.BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        object.__setattr__(self, "master_seed", int(self.master_seed) & MASK64)

    @property
    def workers(self) -> int:
        if self.worker_count == "auto":
            return os.cpu_count() or 1
        return self.worker_count


@dataclass
class ScoreTensor:
    """Scores ``S[a, n, e]`` plus the run metadata needed to reproduce them."""

    env_name: str
    architectures: list
    scores: np.ndarray
    master_seed: int
    runtimes: list = None
    created: str = None
    tool_version: str = __version__
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 3:
            raise ValueError(f"score tensor must be 3-D, got shape {self.scores.shape}")
        if self.scores.shape[0] != len(self.architectures):
            raise ValueError("first tensor dimension must equal the number of architectures")

    @property
    def shape(self) -> tuple:
        return self.scores.shape

    @property
    def n_samples(self) -> int:
        return self.scores.shape[1]

    @property
    def n_episodes(self) -> int:
        return self.scores.shape[2]

    def arch_slice(self, a: int) -> np.ndarray:
        return self.scores[a]

    def validate(self) -> None:
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("score tensor contains non-finite values")
        lo, hi = get_spec(self.env_name).score_bounds
        if self.scores.size and (self.scores.min() < lo or self.scores.max() > hi):
            raise ValueError(f"scores outside [{lo}, {hi}] for {self.env_name}")

    def __eq__(self, other):
        if not isinstance(other, ScoreTensor):
            return NotImplemented
        return (
            self.env_name == other.env_name
            and [a.describe() for a in self.architectures] == [a.describe() for a in other.architectures]
            and self.master_seed == other.master_seed
            and self.runtimes == other.runtimes
            and self.created == other.created
            and self.tool_version == other.tool_version
            and self.extra == other.extra
            and self.scores.shape == other.scores.shape
            and self.scores.tobytes() == other.scores.tobytes()
        )


def run_episode(env_name: str, arch: Architecture, w, seed: int, backend_name: str = "auto") -> float:
    """Reset with ``seed``, roll out the policy until done, return the score."""
    env = make(env_name)
    w = np.asarray(w, dtype=np.float64)
    if arch.input_dim != env.spec.obs_dim or arch.output != env.spec.action_space:
        raise DimensionMismatchError(f"architecture {arch.label} does not fit {env_name}")
    if w.shape != (arch.param_count,):
        raise DimensionMismatchError(f"weight vector has shape {w.shape}, expected ({arch.param_count},)")
    block = backend.run_block(env, arch, w.reshape(1, -1), [[seed]], backend_name)
    return float(block[0, 0])


def score_samples(
    env_name: str,
    arch: Architecture,
    master_seed: int,
    a: int,
    samples: Sequence[int],
    n_episodes: int,
    backend_name: str = "auto",
) -> np.ndarray:
    """Scores for the given sample indices of architecture ``a`` (rows in input order)."""
    samples = list(samples)
    env = make(env_name)
    weights = np.empty((len(samples), arch.param_count), dtype=np.float64)
    for row, n in enumerate(samples):
        weights[row] = sample_weights(arch, weight_seed(master_seed, a, n))
    seeds = [[episode_seed(master_seed, a, n, e) for e in range(n_episodes)] for n in samples]
    return backend.run_block(env, arch, weights, seeds, backend_name)


def _score_range(args):
    env_name, arch, master_seed, a, start, stop, n_episodes, backend_name = args
    return start, score_samples(env_name, arch, master_seed, a, range(start, stop), n_episodes, backend_name)


def _chunks(n_samples: int, workers: int) -> list:
    # several chunks per worker to even out episode-length variance
    size = max(1, min(256, math.ceil(n_samples / (workers * 8))))
    return [(s, min(s + size, n_samples)) for s in range(0, n_samples, size)]


def evaluate(config: RunConfig, record_time: bool = True) -> ScoreTensor:
    archs = config.architectures
    shape = (len(archs), config.n_samples, config.n_episodes)
    scores = np.empty(shape, dtype=np.float64)
    runtimes = []
    workers = min(config.workers, config.n_samples)
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, mp_context=multiprocessing.get_context("fork"))
    try:
        for a, arch in enumerate(archs):
            t0 = time.perf_counter()
            tasks = [
                (config.env_name, arch, config.master_seed, a, start, stop, config.n_episodes, config.backend)
                for start, stop in _chunks(config.n_samples, workers)
            ]
            results = map(_score_range, tasks) if pool is None else pool.map(_score_range, tasks)
            for start, block in results:
                scores[a, start : start + block.shape[0]] = block
            elapsed = time.perf_counter() - t0
            runtimes.append(elapsed)
            log.info("%s arch %s: %d x %d episodes in %.2fs", config.env_name, arch.label, *shape[1:], elapsed)
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    tensor = ScoreTensor(
        env_name=config.env_name,
        architectures=list(archs),
        scores=scores,
        master_seed=config.master_seed,
        runtimes=runtimes if record_time else None,
        created=datetime.now(timezone.utc).isoformat(timespec="seconds") if record_time else None,
    )
    tensor.validate()
    return tensor
