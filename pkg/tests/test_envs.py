import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rwg import envs
from rwg.envs import (Box, Discrete, EpisodeDoneError, InvalidActionError, UnknownEnvironmentError,
                      episode_score, get_spec, make, register, registered)

from _tables import ENVS, PHYSICS


def _one_step(name, row):
    env = make(name)
    env.reset_to(row["state"])
    action = row["action"]
    action = action if env.spec.discrete else [action]
    res = env.step(action)
    return env, res


@pytest.mark.parametrize("name", ENVS)
def test_physics_oracles(name):
    rows = PHYSICS[name]
    assert len(rows) >= 3
    for row in rows:
        env, res = _one_step(name, row)
        expected = [float(v) for v in row["next_state"]]
        assert env.state == pytest.approx(expected, abs=1e-9, rel=0), row
        assert res.reward == pytest.approx(float(row["reward"]), abs=1e-9)
        assert res.done == row["terminal"]


def test_cartpole_hand_example():
    env = make("CartPole-v0")
    env.reset_to([0.0, 0.0, 0.0, 0.0])
    res = env.step(1)
    assert env.state == pytest.approx([0.0, 0.1951220, 0.0, -0.2926829], abs=1e-6)
    assert res.reward == 1.0 and not res.done


def test_mountaincar_hand_example():
    env = make("MountainCar-v0")
    env.reset_to([-0.5, 0.0])
    res = env.step(2)
    assert env.state[1] == pytest.approx(0.001 - 0.0025 * math.cos(1.5), abs=1e-12)
    assert env.state[0] == pytest.approx(-0.4991768, abs=1e-7)
    assert res.reward == -1.0


@pytest.mark.parametrize("name,obs,space,solved", [
    ("CartPole-v0", 4, Discrete(2), 195),
    ("Acrobot-v1", 6, Discrete(3), -60),
    ("Pendulum-v0", 3, Box((-2.0,), (2.0,)), -140),
    ("MountainCar-v0", 2, Discrete(3), -110),
    ("MountainCarContinuous-v0", 2, Box((-1.0,), (1.0,)), 90),
])
def test_env_properties(name, obs, space, solved):
    spec = get_spec(name)
    assert (spec.obs_dim, spec.action_space, spec.solved_score) == (obs, space, solved)
    assert make(name).reset(0).shape == (obs,)


def test_unknown_environment():
    with pytest.raises(UnknownEnvironmentError, match="NoSuchEnv"):
        make("NoSuchEnv")
    with pytest.raises(KeyError):
        get_spec("NoSuchEnv")


@pytest.mark.parametrize("name", ENVS)
def test_reset_is_deterministic(name):
    a, b = make(name).reset(12345), make(name).reset(12345)
    assert a.tobytes() == b.tobytes()
    assert make(name).reset(12346).tobytes() != a.tobytes()


@given(st.integers(0, 2**64 - 1))
@settings(max_examples=50, deadline=None)
def test_initial_distributions(seed):
    cp = make("CartPole-v0").reset(seed)
    assert np.all(np.abs(cp) <= 0.05)
    th = make("Pendulum-v0").reset(seed)
    assert th[0] ** 2 + th[1] ** 2 == pytest.approx(1.0, abs=1e-12)
    assert abs(th[2]) <= 1.0
    ac = make("Acrobot-v1")
    ac.reset(seed)
    assert all(abs(v) <= 0.1 for v in ac.state)
    for name in ("MountainCar-v0", "MountainCarContinuous-v0"):
        pos, vel = make(name).reset(seed)
        assert -0.6 <= pos <= -0.4 and vel == 0.0


@pytest.mark.parametrize("name", ENVS)
def test_step_limit_and_step_after_done(name):
    env = make(name)
    spec = env.spec
    env.reset(3)
    act = 1 if spec.discrete else [0.0]
    steps, done = 0, False
    while not done:
        res = env.step(act)
        steps, done = steps + 1, res.done
    assert steps <= spec.max_steps
    assert env.step_count == steps
    with pytest.raises(EpisodeDoneError):
        env.step(act)


@pytest.mark.parametrize("name,steps", [("Pendulum-v0", 200), ("MountainCar-v0", 200), ("Acrobot-v1", 500)])
def test_done_exactly_at_limit(name, steps):
    env = make(name)
    env.reset(0)
    if name == "Acrobot-v1":
        env.reset_to([0.0, 0.0, 0.0, 0.0])  # zero torque from rest never swings up
    act = [0.0] if name == "Pendulum-v0" else 1
    for k in range(steps):
        res = env.step(act)
        assert res.done == (k == steps - 1)


def test_mcc_limit_999():
    env = make("MountainCarContinuous-v0")
    env.reset(0)
    n = 0
    while not env.step([0.0]).done:
        n += 1
    assert n + 1 == 999


def test_invalid_actions():
    env = make("CartPole-v0")
    env.reset(0)
    for bad in (2, -1, 0.5, "x"):
        with pytest.raises(InvalidActionError):
            env.step(bad)
    env = make("MountainCarContinuous-v0")
    env.reset(0)
    with pytest.raises(InvalidActionError):
        env.step([0.0, 1.0])


def test_continuous_actions_are_clamped():
    a, b = make("Pendulum-v0"), make("Pendulum-v0")
    a.reset_to([0.3, 0.1])
    b.reset_to([0.3, 0.1])
    ra, rb = a.step([50.0]), b.step([2.0])
    assert a.state == b.state and ra.reward == rb.reward


def test_step_before_reset():
    with pytest.raises(envs.EnvError):
        make("CartPole-v0").step(0)


@pytest.mark.parametrize("action", [0, 1, 2])
def test_mountaincar_constant_action_times_out(action):
    env = make("MountainCar-v0")
    for seed in range(200):
        env.reset(seed)
        rewards, done = [], False
        while not done:
            res = env.step(action)
            rewards.append(res.reward)
            done = res.done
        assert episode_score(rewards) == -200.0


@given(st.integers(0, 2**32), st.lists(st.integers(0, 2), min_size=1, max_size=300))
@settings(max_examples=60, deadline=None)
def test_discrete_state_clamps(seed, actions):
    mc, ac = make("MountainCar-v0"), make("Acrobot-v1")
    mc.reset(seed)
    ac.reset(seed)
    for a in actions:
        if not mc.terminated:
            mc.step(a)
            assert -1.2 <= mc.state[0] <= 0.6 and abs(mc.state[1]) <= 0.07
        if not ac.terminated:
            ac.step(a)
            assert abs(ac.state[2]) <= 4 * math.pi and abs(ac.state[3]) <= 9 * math.pi
            assert -math.pi <= ac.state[0] <= math.pi and -math.pi <= ac.state[1] <= math.pi


@given(st.integers(0, 2**32), st.lists(st.floats(-10, 10), min_size=1, max_size=200))
@settings(max_examples=60, deadline=None)
def test_continuous_state_clamps_and_rewards(seed, actions):
    pe, mcc = make("Pendulum-v0"), make("MountainCarContinuous-v0")
    pe.reset(seed)
    mcc.reset(seed)
    for u in actions:
        r = pe.step([u]).reward
        assert abs(pe.state[1]) <= 8.0 and r <= 0.0 and math.isfinite(r)
        if not mcc.terminated:
            r = mcc.step([u]).reward
            assert r <= 100.0 and abs(mcc.state[1]) <= 0.07


def test_episode_score():
    assert episode_score([1.0] * 200) == 200.0
    assert episode_score([-1.0] * 200) == -200.0
    assert episode_score([0.5, -0.5]) == 0.0
    with pytest.raises(ValueError):
        episode_score([])


def test_register_extension():
    class Chain(envs.ClassicEnv):
        spec = envs.EnvSpec("Chain-test", 1, Discrete(2), 5, 5.0)

        @classmethod
        def initial_state(cls, seed):
            return [0.0]

        def _observe(self, s):
            return (s[0],)

        def _transition(self, s, action):
            return [s[0] + action], float(action), False

    register("Chain-test", Chain, overwrite=True)
    try:
        assert "Chain-test" in registered()
        env = make("Chain-test")
        env.reset(0)
        assert env.step(1).reward == 1.0
        with pytest.raises(ValueError):
            register("Chain-test", Chain)
    finally:
        envs._REGISTRY.pop("Chain-test")
