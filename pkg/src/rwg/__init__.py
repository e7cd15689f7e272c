"""Random weight guessing (RWG) profiler for classic control benchmarks."""

__version__ = "0.1.0"

from .backend import HAVE_COMPILED, NumericalError
from .envs import Box, Discrete, EnvSpec, get_spec, make, register, registered
from .harness import RunConfig, ScoreTensor, evaluate, run_episode
from .policy import ArchSpec, Architecture, forward, param_count, parse_arch, sample_weights

__all__ = [
    "HAVE_COMPILED",
    "NumericalError",
    "Box",
    "Discrete",
    "EnvSpec",
    "get_spec",
    "make",
    "register",
    "registered",
    "RunConfig",
    "ScoreTensor",
    "evaluate",
    "run_episode",
    "ArchSpec",
    "Architecture",
    "forward",
    "param_count",
    "parse_arch",
    "sample_weights",
]
