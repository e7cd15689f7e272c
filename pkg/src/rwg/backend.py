"""Episode-block runners: compiled kernel when available, pure Python otherwise.

Both runners take a block of weight vectors and per-episode seeds and return
the (samples, episodes) score block.  For the built-in environments they
produce bit-identical results.
"""

from __future__ import annotations

import math

import numpy as np

from .envs import Box, ClassicEnv
from .policy import Architecture, argmax_first, forward_raw, scale_to_box

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

HAVE_COMPILED = _kernels is not None
BACKENDS = ("auto", "compiled", "python")


class NumericalError(ArithmeticError):
    """An episode produced a non-finite state."""


def resolve(backend: str, env) -> str:
    """Pick the concrete backend for ``env`` ('compiled' or 'python')."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    compilable = HAVE_COMPILED and isinstance(env, ClassicEnv) and env.kernel_id is not None
    if backend == "compiled":
        if not compilable:
            why = "extension not built" if not HAVE_COMPILED else f"no kernel for {env.spec.name}"
            raise RuntimeError(f"compiled backend unavailable: {why}")
        return "compiled"
    if backend == "python":
        return "python"
    return "compiled" if compilable else "python"


def _policy_action(arch, box, w, obs):
    out = forward_raw(arch.layer_sizes, arch.use_bias, w, obs)
    if box is None:
        return argmax_first(out)
    return tuple(min(max(v, lo), hi) for v, lo, hi in zip(scale_to_box(out, box), box.low, box.high))


def _check_finite(env, obs, n, e, step):
    if not all(math.isfinite(v) for v in obs):
        raise NumericalError(f"{env.spec.name}: non-finite state in sample {n}, episode {e}, step {step}")


def _episode_fast(env, arch, box, w, seed, n, e):
    obs = env.reset_to(env.initial_state(seed))
    total = 0.0
    done = False
    while not done:
        obs, reward, done = env.advance(_policy_action(arch, box, w, obs))
        total += reward
        _check_finite(env, obs, n, e, env.step_count)
    return total


def _episode_generic(env, arch, box, w, seed, n, e):
    obs = np.asarray(env.reset(seed), dtype=np.float64).tolist()
    total = 0.0
    steps = 0
    done = False
    while not done:
        action = _policy_action(arch, box, w, obs)
        result = env.step(action if box is None else np.array(action))
        obs = np.asarray(result.observation, dtype=np.float64).tolist()
        total += result.reward
        done = result.done
        steps += 1
        _check_finite(env, obs, n, e, steps)
    return total


def run_block_python(env, arch: Architecture, weights: np.ndarray, seeds) -> np.ndarray:
    """Score ``weights`` (N, d) over per-episode ``seeds`` (N rows of E ints)."""
    n_samples, n_episodes = len(seeds), len(seeds[0])
    out = np.empty((n_samples, n_episodes), dtype=np.float64)
    box = arch.output if isinstance(arch.output, Box) else None
    episode = _episode_fast if isinstance(env, ClassicEnv) else _episode_generic
    for n in range(n_samples):
        w = weights[n].tolist()
        for e in range(n_episodes):
            out[n, e] = episode(env, arch, box, w, int(seeds[n][e]), n, e)
    return out


def initial_states(env, seeds) -> np.ndarray:
    return np.array([[env.initial_state(int(s)) for s in row] for row in seeds], dtype=np.float64)


def run_block_compiled(env, arch: Architecture, weights: np.ndarray, seeds) -> np.ndarray:
    if isinstance(arch.output, Box):
        low, high = arch.output.low[0], arch.output.high[0]
    else:
        low, high = 0.0, 0.0
    try:
        return _kernels.run_block(
            env.kernel_id,
            arch.layer_sizes,
            arch.use_bias,
            np.ascontiguousarray(weights, dtype=np.float64),
            initial_states(env, seeds),
            low,
            high,
            env.spec.max_steps,
        )
    except _kernels.KernelNumericalError as exc:
        raise NumericalError(f"{env.spec.name}: {exc}") from None


def run_block(env, arch, weights, seeds, backend: str = "auto") -> np.ndarray:
    if resolve(backend, env) == "compiled":
        return run_block_compiled(env, arch, weights, seeds)
    return run_block_python(env, arch, weights, seeds)
