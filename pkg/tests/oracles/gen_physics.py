"""Regenerate ``physics.json``: single-step transitions at 40 significant digits.

Written directly from the stated equations with named physical constants and
mpmath arithmetic; it shares no code with ``rwg``.  Run from this directory:

    python3 gen_physics.py > physics.json
"""

import json

import mpmath as mp

mp.mp.dps = 40
PI = mp.pi


def cartpole(s, a):
    g, mc, mp_, hl, fmag, tau = 9.8, 1.0, 0.1, 0.5, 10.0, 0.02
    g, mc, mp_, hl, fmag, tau = map(mp.mpf, map(str, (g, mc, mp_, hl, fmag, tau)))
    x, xd, th, thd = map(mp.mpf, s)
    total = mc + mp_
    pml = mp_ * hl
    f = fmag if a == 1 else -fmag
    temp = (f + pml * thd**2 * mp.sin(th)) / total
    thacc = (g * mp.sin(th) - mp.cos(th) * temp) / (hl * (mp.mpf(4) / 3 - mp_ * mp.cos(th) ** 2 / total))
    xacc = temp - pml * thacc * mp.cos(th) / total
    ns = [x + tau * xd, xd + tau * xacc, th + tau * thd, thd + tau * thacc]
    done = abs(ns[0]) > mp.mpf("2.4") or abs(ns[2]) > 12 * 2 * PI / 360
    return ns, 1, done


def acrobot_derivs(y, u):
    m1 = m2 = l1 = mp.mpf(1)
    lc1 = lc2 = mp.mpf("0.5")
    i1 = i2 = mp.mpf(1)
    g = mp.mpf("9.8")
    t1, t2, d1_, d2_ = y
    d1 = m1 * lc1**2 + m2 * (l1**2 + lc2**2 + 2 * l1 * lc2 * mp.cos(t2)) + i1 + i2
    d2 = m2 * (lc2**2 + l1 * lc2 * mp.cos(t2)) + i2
    phi2 = m2 * lc2 * g * mp.cos(t1 + t2 - PI / 2)
    phi1 = (-m2 * l1 * lc2 * d2_**2 * mp.sin(t2) - 2 * m2 * l1 * lc2 * d2_ * d1_ * mp.sin(t2)
            + (m1 * lc1 + m2 * l1) * g * mp.cos(t1 - PI / 2) + phi2)
    dd2 = (u + d2 / d1 * phi1 - m2 * l1 * lc2 * d1_**2 * mp.sin(t2) - phi2) / (m2 * lc2**2 + i2 - d2**2 / d1)
    dd1 = -(d2 * dd2 + phi1) / d1
    return [d1_, d2_, dd1, dd2]


def wrap(x, lo, hi):
    while x > hi:
        x -= hi - lo
    while x < lo:
        x += hi - lo
    return x


def acrobot(s, a):
    dt = mp.mpf("0.2")
    u = mp.mpf(a - 1)
    y = [mp.mpf(v) for v in s]
    k1 = acrobot_derivs(y, u)
    k2 = acrobot_derivs([y[i] + dt / 2 * k1[i] for i in range(4)], u)
    k3 = acrobot_derivs([y[i] + dt / 2 * k2[i] for i in range(4)], u)
    k4 = acrobot_derivs([y[i] + dt * k3[i] for i in range(4)], u)
    ns = [y[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(4)]
    ns[0], ns[1] = wrap(ns[0], -PI, PI), wrap(ns[1], -PI, PI)
    ns[2] = min(max(ns[2], -4 * PI), 4 * PI)
    ns[3] = min(max(ns[3], -9 * PI), 9 * PI)
    done = -mp.cos(ns[0]) - mp.cos(ns[1] + ns[0]) > 1
    return ns, (0 if done else -1), done


def pendulum(s, a):
    g, m, l, dt = mp.mpf(10), mp.mpf(1), mp.mpf(1), mp.mpf("0.05")
    th, thd = map(mp.mpf, s)
    u = min(max(mp.mpf(a), -2), 2)
    w = th - 2 * PI * mp.ceil((th - PI) / (2 * PI))  # into (-pi, pi]
    cost = w**2 + mp.mpf("0.1") * thd**2 + mp.mpf("0.001") * u**2
    nthd = thd + (3 * g / (2 * l) * mp.sin(th) + 3 / (m * l**2) * u) * dt
    nthd = min(max(nthd, -8), 8)
    return [th + nthd * dt, nthd], -cost, False


def mountaincar(s, a, continuous=False):
    pos, vel = map(mp.mpf, s)
    if continuous:
        f = min(max(mp.mpf(a), -1), 1)
        vel = vel + f * mp.mpf("0.0015") - mp.mpf("0.0025") * mp.cos(3 * pos)
        goal = mp.mpf("0.45")
    else:
        vel = vel + (a - 1) * mp.mpf("0.001") - mp.mpf("0.0025") * mp.cos(3 * pos)
        goal = mp.mpf("0.5")
    vel = min(max(vel, mp.mpf("-0.07")), mp.mpf("0.07"))
    pos = min(max(pos + vel, mp.mpf("-1.2")), mp.mpf("0.6"))
    if pos == mp.mpf("-1.2") and vel < 0:
        vel = mp.mpf(0)
    done = pos >= goal
    reward = -1 if not continuous else (100 if done else 0) - mp.mpf("0.1") * f**2
    return [pos, vel], reward, done


CASES = {
    "CartPole-v0": (cartpole, [
        (["0", "0", "0", "0"], 1),
        (["0", "0", "0", "0"], 0),
        (["0.01", "-0.02", "0.03", "0.04"], 1),
        (["2.39", "1.0", "0.2", "0.5"], 1),  # crosses both limits
    ]),
    "Acrobot-v1": (acrobot, [
        (["0", "0", "0", "0"], 1),
        (["0.05", "-0.03", "0.02", "-0.01"], 0),
        (["3.0", "0.5", "12.0", "-20.0"], 2),  # wraps and clips
        (["2.5", "0.3", "0", "0"], 1),
    ]),
    "Pendulum-v0": (pendulum, [
        (["0", "0"], "0"),
        (["1", "0.5"], "1.5"),
        (["-3", "7.9"], "-2.5"),  # torque clamp and speed clamp
        (["7", "-1"], "2"),  # cost wrapping
    ]),
    "MountainCar-v0": (mountaincar, [
        (["-0.5", "0"], 2),
        (["-0.5", "0"], 0),
        (["-1.19", "-0.02"], 1),  # left wall
        (["0.49", "0.03"], 2),  # goal
    ]),
    "MountainCarContinuous-v0": (lambda s, a: mountaincar(s, a, True), [
        (["-0.5", "0"], "1"),
        (["-0.3", "0.01"], "-3"),  # action clamp
        (["0.44", "0.02"], "0.5"),  # goal
        (["-1.19", "-0.05"], "0"),
    ]),
}


def main():
    out = {}
    for name, (fn, cases) in CASES.items():
        rows = []
        for state, action in cases:
            ns, reward, done = fn(state, mp.mpf(action) if isinstance(action, str) else action)
            rows.append({
                "state": [float(v) for v in state],
                "action": float(action) if isinstance(action, str) else action,
                "next_state": [mp.nstr(v, 30) for v in ns],
                "reward": mp.nstr(mp.mpf(reward), 30),
                "terminal": bool(done),
            })
        out[name] = rows
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
