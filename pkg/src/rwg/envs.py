"""Classic control environments with a uniform reset/step contract.

The dynamics follow the classic-control reference semantics.  Every
environment draws its initial state from a private generator seeded by the
caller and never touches global randomness.

The arithmetic here is written as plain float operations on ``math``
functions, in the same order as the compiled kernel in ``_kernels.pyx``; the
two must agree bit-for-bit, so keep them in sync when editing either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .seeding import make_rng

__all__ = [
    "Discrete",
    "Box",
    "EnvSpec",
    "StepResult",
    "ClassicEnv",
    "CartPole",
    "Acrobot",
    "Pendulum",
    "MountainCar",
    "MountainCarContinuous",
    "EnvError",
    "UnknownEnvironmentError",
    "EpisodeDoneError",
    "InvalidActionError",
    "register",
    "registered",
    "get_spec",
    "make",
    "episode_score",
]


class EnvError(Exception):
    pass


class UnknownEnvironmentError(EnvError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EpisodeDoneError(EnvError):
    pass


class InvalidActionError(EnvError, ValueError):
    pass


@dataclass(frozen=True)
class Discrete:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"Discrete space needs n >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return self.n

    def describe(self) -> str:
        return f"Discrete({self.n})"


@dataclass(frozen=True)
class Box:
    low: tuple
    high: tuple

    def __post_init__(self):
        low = tuple(float(v) for v in self.low)
        high = tuple(float(v) for v in self.high)
        if len(low) != len(high) or not low:
            raise ValueError("Box bounds must be nonempty and of equal length")
        for lo, hi in zip(low, high):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"Box bounds need finite low < high, got [{lo}, {hi}]")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def dim(self) -> int:
        return len(self.low)

    def describe(self) -> str:
        bounds = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.low, self.high))
        return f"Continuous({bounds})"


ActionSpace = Union[Discrete, Box]


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int
    action_space: ActionSpace
    max_steps: int
    solved_score: float
    score_bounds: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        if self.obs_dim < 1:
            raise ValueError("obs_dim must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    @property
    def discrete(self) -> bool:
        return isinstance(self.action_space, Discrete)


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool


def episode_score(rewards: Sequence[float]) -> float:
    """Undiscounted, left-to-right sum of episode rewards."""
    if len(rewards) == 0:
        raise ValueError("episode_score needs at least one reward")
    total = 0.0
    for r in rewards:
        total += r
    return total


class ClassicEnv:
    """Base class: owns the physical state, step counter and done flag.

    Subclasses provide ``spec``, ``initial_state``, ``_observe`` and
    ``_transition``.  ``kernel_id`` names the matching compiled kernel, or
    is None for environments only the Python path can run.
    """

    spec: EnvSpec
    kernel_id = None

    def __init__(self):
        self.state = None
        self.step_count = 0
        self.terminated = False

    @classmethod
    def initial_state(cls, seed: int) -> list:
        raise NotImplementedError

    def _observe(self, s) -> tuple:
        raise NotImplementedError

    def _transition(self, s, action):
        """Return (new_state, reward, terminal) for an already-validated action."""
        raise NotImplementedError

    def reset(self, seed: int) -> np.ndarray:
        return np.array(self.reset_to(self.initial_state(seed)), dtype=np.float64)

    def reset_to(self, state) -> tuple:
        self.state = [float(v) for v in state]
        self.step_count = 0
        self.terminated = False
        return self._observe(self.state)

    def decode_action(self, action):
        space = self.spec.action_space
        if isinstance(space, Discrete):
            try:
                index = int(action)
            except (TypeError, ValueError):
                raise InvalidActionError(f"{self.spec.name}: expected an action index, got {action!r}") from None
            if index != action or not 0 <= index < space.n:
                raise InvalidActionError(f"{self.spec.name}: action {action!r} outside Discrete({space.n})")
            return index
        values = np.atleast_1d(np.asarray(action, dtype=np.float64))
        if values.shape != (space.dim,):
            raise InvalidActionError(f"{self.spec.name}: expected {space.dim} action components, got {values.shape}")
        return tuple(min(max(float(v), lo), hi) for v, lo, hi in zip(values, space.low, space.high))

    def advance(self, action) -> tuple:
        """Fast step on a decoded action; returns (obs tuple, reward, done)."""
        if self.state is None:
            raise EnvError(f"{self.spec.name}: reset() must be called before step()")
        if self.terminated:
            raise EpisodeDoneError(f"{self.spec.name}: step() called after the episode ended")
        self.state, reward, terminal = self._transition(self.state, action)
        self.step_count += 1
        done = terminal or self.step_count >= self.spec.max_steps
        self.terminated = done
        return self._observe(self.state), reward, done

    def step(self, action) -> StepResult:
        if self.terminated:
            raise EpisodeDoneError(f"{self.spec.name}: step() called after the episode ended")
        obs, reward, done = self.advance(self.decode_action(action))
        return StepResult(np.array(obs, dtype=np.float64), reward, done)


class CartPole(ClassicEnv):
    spec = EnvSpec("CartPole-v0", 4, Discrete(2), 200, 195.0, (1.0, 200.0))
    kernel_id = 0

    GRAVITY = 9.8
    TOTAL_MASS = 1.1
    POLEMASS_LENGTH = 0.05
    POLE_MASS = 0.1
    HALF_LENGTH = 0.5
    FORCE = 10.0
    TAU = 0.02
    THETA_LIMIT = 12 * 2 * math.pi / 360
    X_LIMIT = 2.4

    @classmethod
    def initial_state(cls, seed):
        return make_rng(seed).uniform(-0.05, 0.05, size=4).tolist()

    def _observe(self, s):
        return tuple(s)

    def _transition(self, s, action):
        x, x_dot, theta, theta_dot = s
        force = self.FORCE if action == 1 else -self.FORCE
        costheta = math.cos(theta)
        sintheta = math.sin(theta)
        temp = (force + self.POLEMASS_LENGTH * theta_dot * theta_dot * sintheta) / self.TOTAL_MASS
        thetaacc = (self.GRAVITY * sintheta - costheta * temp) / (
            self.HALF_LENGTH * (4.0 / 3.0 - self.POLE_MASS * costheta * costheta / self.TOTAL_MASS)
        )
        xacc = temp - self.POLEMASS_LENGTH * thetaacc * costheta / self.TOTAL_MASS
        x = x + self.TAU * x_dot
        x_dot = x_dot + self.TAU * xacc
        theta = theta + self.TAU * theta_dot
        theta_dot = theta_dot + self.TAU * thetaacc
        terminal = x < -self.X_LIMIT or x > self.X_LIMIT or theta < -self.THETA_LIMIT or theta > self.THETA_LIMIT
        return [x, x_dot, theta, theta_dot], 1.0, terminal


def _wrap(x, lo, hi):
    diff = hi - lo
    if not math.isfinite(x):
        return x
    while x > hi:
        x = x - diff
    while x < lo:
        x = x + diff
    return x


def _clip(x, lo, hi):
    return lo if x < lo else (hi if x > hi else x)


class Acrobot(ClassicEnv):
    spec = EnvSpec("Acrobot-v1", 6, Discrete(3), 500, -60.0, (-500.0, 0.0))
    kernel_id = 1

    DT = 0.2
    MAX_VEL_1 = 4 * math.pi
    MAX_VEL_2 = 9 * math.pi
    TORQUES = (-1.0, 0.0, 1.0)

    @classmethod
    def initial_state(cls, seed):
        return make_rng(seed).uniform(-0.1, 0.1, size=4).tolist()

    def _observe(self, s):
        return (math.cos(s[0]), math.sin(s[0]), math.cos(s[1]), math.sin(s[1]), s[2], s[3])

    @staticmethod
    def derivs(s, torque):
        # m1 = m2 = 1, l1 = 1, lc1 = lc2 = 0.5, I1 = I2 = 1, g = 9.8
        theta1, theta2, dtheta1, dtheta2 = s
        cos2 = math.cos(theta2)
        sin2 = math.sin(theta2)
        d1 = 1.0 * 0.25 + 1.0 * (1.0 + 0.25 + 2.0 * 1.0 * 0.5 * cos2) + 1.0 + 1.0
        d2 = 1.0 * (0.25 + 1.0 * 0.5 * cos2) + 1.0
        phi2 = 1.0 * 0.5 * 9.8 * math.cos(theta1 + theta2 - math.pi / 2.0)
        phi1 = (
            -1.0 * 1.0 * 0.5 * dtheta2 * dtheta2 * sin2
            - 2.0 * 1.0 * 1.0 * 0.5 * dtheta2 * dtheta1 * sin2
            + (1.0 * 0.5 + 1.0 * 1.0) * 9.8 * math.cos(theta1 - math.pi / 2.0)
            + phi2
        )
        ddtheta2 = (torque + d2 / d1 * phi1 - 1.0 * 1.0 * 0.5 * dtheta1 * dtheta1 * sin2 - phi2) / (
            1.0 * 0.25 + 1.0 - d2 * d2 / d1
        )
        ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
        return (dtheta1, dtheta2, ddtheta1, ddtheta2)

    @classmethod
    def rk4(cls, s, torque, dt):
        h = dt / 2.0
        k1 = cls.derivs(s, torque)
        k2 = cls.derivs([s[i] + h * k1[i] for i in range(4)], torque)
        k3 = cls.derivs([s[i] + h * k2[i] for i in range(4)], torque)
        k4 = cls.derivs([s[i] + dt * k3[i] for i in range(4)], torque)
        return [s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(4)]

    def _transition(self, s, action):
        ns = self.rk4(s, self.TORQUES[action], self.DT)
        ns[0] = _wrap(ns[0], -math.pi, math.pi)
        ns[1] = _wrap(ns[1], -math.pi, math.pi)
        ns[2] = _clip(ns[2], -self.MAX_VEL_1, self.MAX_VEL_1)
        ns[3] = _clip(ns[3], -self.MAX_VEL_2, self.MAX_VEL_2)
        terminal = -math.cos(ns[0]) - math.cos(ns[1] + ns[0]) > 1.0
        return ns, (0.0 if terminal else -1.0), terminal


def _angle_normalize(x):
    """Wrap an angle into (-pi, pi]."""
    two_pi = 2.0 * math.pi
    w = math.fmod(x + math.pi, two_pi)
    if w < 0.0:
        w = w + two_pi
    w = w - math.pi
    if w == -math.pi:
        w = math.pi
    return w


class Pendulum(ClassicEnv):
    # worst step cost: pi^2 + 0.1 * 8^2 + 0.001 * 2^2
    spec = EnvSpec("Pendulum-v0", 3, Box((-2.0,), (2.0,)), 200, -140.0, (-200 * (math.pi**2 + 6.404), 0.0))
    kernel_id = 2

    DT = 0.05
    MAX_SPEED = 8.0
    MAX_TORQUE = 2.0

    @classmethod
    def initial_state(cls, seed):
        return make_rng(seed).uniform([-math.pi, -1.0], [math.pi, 1.0]).tolist()

    def _observe(self, s):
        return (math.cos(s[0]), math.sin(s[0]), s[1])

    def _transition(self, s, action):
        th, thdot = s
        u = _clip(action[0], -self.MAX_TORQUE, self.MAX_TORQUE)
        wrapped = _angle_normalize(th)
        cost = wrapped * wrapped + 0.1 * thdot * thdot + 0.001 * u * u
        # g = 10, m = 1, l = 1: 3g/(2l) = 15, 3/(m l^2) = 3
        thdot = thdot + (15.0 * math.sin(th) + 3.0 * u) * self.DT
        thdot = _clip(thdot, -self.MAX_SPEED, self.MAX_SPEED)
        th = th + thdot * self.DT
        return [th, thdot], -cost, False


class MountainCar(ClassicEnv):
    spec = EnvSpec("MountainCar-v0", 2, Discrete(3), 200, -110.0, (-200.0, -1.0))
    kernel_id = 3

    MIN_POS = -1.2
    MAX_POS = 0.6
    MAX_SPEED = 0.07
    GOAL = 0.5

    @classmethod
    def initial_state(cls, seed):
        return [float(make_rng(seed).uniform(-0.6, -0.4)), 0.0]

    def _observe(self, s):
        return (s[0], s[1])

    def _transition(self, s, action):
        pos, vel = s
        vel = vel + (action - 1) * 0.001 + math.cos(3.0 * pos) * (-0.0025)
        vel = _clip(vel, -self.MAX_SPEED, self.MAX_SPEED)
        pos = pos + vel
        pos = _clip(pos, self.MIN_POS, self.MAX_POS)
        if pos == self.MIN_POS and vel < 0.0:
            vel = 0.0
        terminal = pos >= self.GOAL
        return [pos, vel], -1.0, terminal


class MountainCarContinuous(ClassicEnv):
    spec = EnvSpec("MountainCarContinuous-v0", 2, Box((-1.0,), (1.0,)), 999, 90.0, (-100.0, 100.0))
    kernel_id = 4

    MIN_POS = -1.2
    MAX_POS = 0.6
    MAX_SPEED = 0.07
    GOAL = 0.45
    POWER = 0.0015

    @classmethod
    def initial_state(cls, seed):
        return [float(make_rng(seed).uniform(-0.6, -0.4)), 0.0]

    def _observe(self, s):
        return (s[0], s[1])

    def _transition(self, s, action):
        pos, vel = s
        force = _clip(action[0], -1.0, 1.0)
        vel = vel + force * self.POWER - 0.0025 * math.cos(3.0 * pos)
        vel = _clip(vel, -self.MAX_SPEED, self.MAX_SPEED)
        pos = pos + vel
        pos = _clip(pos, self.MIN_POS, self.MAX_POS)
        if pos == self.MIN_POS and vel < 0.0:
            vel = 0.0
        terminal = pos >= self.GOAL
        reward = (100.0 if terminal else 0.0) - force * force * 0.1
        return [pos, vel], reward, terminal


_REGISTRY: dict[str, Callable[[], ClassicEnv]] = {}


def register(name: str, factory: Callable[[], ClassicEnv], *, overwrite: bool = False) -> None:
    """Register an environment factory under ``name``.

    The factory must return a fresh object with a ``spec`` attribute and
    ``reset(seed)`` / ``step(action)`` methods.
    """
    if name in _REGISTRY and not overwrite:
        raise ValueError(f"environment {name!r} is already registered")
    _REGISTRY[name] = factory


def registered() -> list[str]:
    return list(_REGISTRY)


def make(name: str) -> ClassicEnv:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        known = ", ".join(_REGISTRY)
        raise UnknownEnvironmentError(f"unknown environment {name!r} (known: {known})") from None
    return factory()


def get_spec(name: str) -> EnvSpec:
    return make(name).spec


for _cls in (CartPole, Acrobot, Pendulum, MountainCar, MountainCarContinuous):
    register(_cls.spec.name, _cls)
