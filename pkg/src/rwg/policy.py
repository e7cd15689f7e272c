"""Feedforward tanh policies with randomly guessed weights.

Weight layout (fixed, so a vector is portable between runs and files):
layers in order; within a layer the weight block is destination-major,
source-minor (``W[j, i]`` at ``j * n_in + i``); when biases are enabled the
layer's ``n_out`` biases follow its weight block.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .envs import Box, Discrete, EnvSpec
from .seeding import make_rng

__all__ = [
    "ArchSpec",
    "Architecture",
    "DimensionMismatchError",
    "parse_arch",
    "param_count",
    "sample_weights",
    "forward",
    "forward_raw",
]


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class ArchSpec:
    """Environment-independent architecture: hidden sizes plus bias flag."""

    hidden: tuple = ()
    use_bias: bool = False

    def __post_init__(self):
        hidden = tuple(int(h) for h in self.hidden)
        if any(h < 1 for h in hidden):
            raise ValueError(f"hidden layer sizes must be positive, got {hidden}")
        object.__setattr__(self, "hidden", hidden)

    @property
    def label(self) -> str:
        base = "x".join(str(h) for h in self.hidden) if self.hidden else "0"
        return base + (":bias" if self.use_bias else "")

    def bind(self, spec: EnvSpec) -> "Architecture":
        return Architecture(spec.obs_dim, self.hidden, spec.action_space, self.use_bias)


_ARCH_RE = re.compile(r"^\s*(0|[1-9]\d*(?:\s*[x,]\s*[1-9]\d*)*)\s*(:bias)?\s*$")


def parse_arch(text: str) -> ArchSpec:
    """Parse ``"0"``, ``"4"``, ``"4,4"`` (or ``"4x4"``), optionally suffixed ``":bias"``."""
    m = _ARCH_RE.match(text)
    if not m:
        raise ValueError(f"bad architecture spec {text!r}; expected e.g. '0', '4', '4,4', '4x4:bias'")
    body, bias = m.group(1), m.group(2)
    hidden = () if body == "0" else tuple(int(p) for p in re.split(r"\s*[x,]\s*", body))
    return ArchSpec(hidden, bias is not None)


@dataclass(frozen=True)
class Architecture:
    input_dim: int
    hidden: tuple
    output: object  # Discrete | Box
    use_bias: bool = False
    layer_sizes: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hidden = tuple(int(h) for h in self.hidden)
        object.__setattr__(self, "hidden", hidden)
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if any(h < 1 for h in hidden):
            raise ValueError(f"hidden layer sizes must be positive, got {hidden}")
        if not isinstance(self.output, (Discrete, Box)):
            raise TypeError("output must be a Discrete or Box space")
        object.__setattr__(self, "layer_sizes", (self.input_dim, *hidden, self.output.dim))

    @property
    def discrete(self) -> bool:
        return isinstance(self.output, Discrete)

    @property
    def spec(self) -> ArchSpec:
        return ArchSpec(self.hidden, self.use_bias)

    @property
    def label(self) -> str:
        return self.spec.label

    @property
    def param_count(self) -> int:
        return param_count(self)

    def describe(self) -> dict:
        return {
            "label": self.label,
            "input_dim": self.input_dim,
            "hidden": list(self.hidden),
            "output": space_to_dict(self.output),
            "use_bias": self.use_bias,
            "param_count": self.param_count,
        }


def space_to_dict(space) -> dict:
    if isinstance(space, Discrete):
        return {"kind": "discrete", "n": space.n}
    return {"kind": "continuous", "low": list(space.low), "high": list(space.high)}


def space_from_dict(d: dict):
    if d["kind"] == "discrete":
        return Discrete(int(d["n"]))
    if d["kind"] == "continuous":
        return Box(tuple(d["low"]), tuple(d["high"]))
    raise ValueError(f"unknown action space kind {d['kind']!r}")


def arch_from_dict(d: dict) -> Architecture:
    return Architecture(int(d["input_dim"]), tuple(d["hidden"]), space_from_dict(d["output"]), bool(d["use_bias"]))


def param_count(arch: Architecture) -> int:
    sizes = arch.layer_sizes
    extra = 1 if arch.use_bias else 0
    return sum((n_in + extra) * n_out for n_in, n_out in zip(sizes[:-1], sizes[1:]))


def sample_weights(arch: Architecture, seed: int) -> np.ndarray:
    """Draw ``param_count(arch)`` i.i.d. standard normal weights from ``seed``."""
    return make_rng(seed).standard_normal(param_count(arch))


def forward_raw(layer_sizes, use_bias, w, obs) -> list:
    """Output-layer activations (post-tanh) as a list of floats.

    Plain loops on purpose: the accumulation order matches the compiled
    kernel exactly.
    """
    x = [float(v) for v in obs]
    off = 0
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        y = []
        for j in range(n_out):
            acc = 0.0
            base = off + j * n_in
            for i in range(n_in):
                acc += w[base + i] * x[i]
            y.append(acc)
        off += n_in * n_out
        if use_bias:
            for j in range(n_out):
                y[j] = y[j] + w[off + j]
            off += n_out
        x = [math.tanh(v) for v in y]
    return x


def argmax_first(values) -> int:
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def scale_to_box(outputs, box: Box) -> tuple:
    return tuple(lo + (o + 1.0) / 2.0 * (hi - lo) for o, lo, hi in zip(outputs, box.low, box.high))


def forward(arch: Architecture, w, obs):
    """Map an observation to an action: an ``int`` index or a float array within bounds."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (param_count(arch),):
        raise DimensionMismatchError(f"weight vector has shape {w.shape}, architecture needs ({param_count(arch)},)")
    obs = np.asarray(obs, dtype=np.float64).ravel()
    if obs.shape[0] != arch.input_dim:
        raise DimensionMismatchError(f"observation has length {obs.shape[0]}, architecture expects {arch.input_dim}")
    out = forward_raw(arch.layer_sizes, arch.use_bias, w.tolist(), obs.tolist())
    if arch.discrete:
        return argmax_first(out)
    return np.array(scale_to_box(out, arch.output), dtype=np.float64)
