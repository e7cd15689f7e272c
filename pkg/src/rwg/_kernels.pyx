# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled episode kernels for the built-in environments.

Each kernel runs whole episodes (observe -> forward -> step) in C. The
expression order mirrors ``envs.py`` / ``policy.py`` so both backends give
bit-identical scores; edit them together.
"""

from libc.math cimport sin, cos, tanh, fmod, isfinite, M_PI
from libc.stdlib cimport malloc, free

import numpy as np


cdef enum:
    MAX_WIDTH = 256


cdef enum:
    ENV_CARTPOLE = 0
    ENV_ACROBOT = 1
    ENV_PENDULUM = 2
    ENV_MOUNTAINCAR = 3
    ENV_MOUNTAINCAR_CONT = 4

STATE_DIMS = {0: 4, 1: 4, 2: 2, 3: 2, 4: 2}

cdef int OK = 0
cdef int NONFINITE = 1


cdef inline double clip(double x, double lo, double hi) noexcept nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef inline double wrap(double x, double lo, double hi) noexcept nogil:
    cdef double diff = hi - lo
    if not isfinite(x):
        return x
    while x > hi:
        x = x - diff
    while x < lo:
        x = x + diff
    return x


cdef inline double angle_normalize(double x) noexcept nogil:
    cdef double two_pi = 2.0 * M_PI
    cdef double w = fmod(x + M_PI, two_pi)
    if w < 0.0:
        w = w + two_pi
    w = w - M_PI
    if w == -M_PI:
        w = M_PI
    return w


cdef struct Net:
    int n_layers
    int *sizes
    int use_bias


cdef void net_forward(Net *net, const double *w, double *buf_a, double *buf_b) noexcept nogil:
    # input in buf_a; final activations land in buf_a
    cdef int layer, i, j, n_in, n_out, base
    cdef Py_ssize_t off = 0
    cdef double acc
    cdef double *x = buf_a
    cdef double *y = buf_b
    cdef double *tmp
    for layer in range(net.n_layers - 1):
        n_in = net.sizes[layer]
        n_out = net.sizes[layer + 1]
        for j in range(n_out):
            acc = 0.0
            base = off + j * n_in
            for i in range(n_in):
                acc += w[base + i] * x[i]
            y[j] = acc
        off += n_in * n_out
        if net.use_bias:
            for j in range(n_out):
                y[j] = y[j] + w[off + j]
            off += n_out
        for j in range(n_out):
            y[j] = tanh(y[j])
        tmp = x
        x = y
        y = tmp
    if x != buf_a:
        for j in range(net.sizes[net.n_layers - 1]):
            buf_a[j] = x[j]


cdef inline int argmax_first(const double *v, int n) noexcept nogil:
    cdef int best = 0
    cdef int i
    for i in range(1, n):
        if v[i] > v[best]:
            best = i
    return best


cdef inline double scaled(double o, double lo, double hi) noexcept nogil:
    return clip(lo + (o + 1.0) / 2.0 * (hi - lo), lo, hi)


cdef int cartpole_episode(Net *net, const double *w, const double *init, int max_steps,
                          double *buf_a, double *buf_b, double *score) noexcept nogil:
    cdef double x = init[0], x_dot = init[1], theta = init[2], theta_dot = init[3]
    cdef double force, costheta, sintheta, temp, thetaacc, xacc
    cdef double total = 0.0
    cdef double theta_limit = 12 * 2 * M_PI / 360
    cdef int step, action
    cdef bint terminal
    for step in range(max_steps):
        buf_a[0] = x
        buf_a[1] = x_dot
        buf_a[2] = theta
        buf_a[3] = theta_dot
        net_forward(net, w, buf_a, buf_b)
        action = argmax_first(buf_a, 2)
        force = 10.0 if action == 1 else -10.0
        costheta = cos(theta)
        sintheta = sin(theta)
        temp = (force + 0.05 * theta_dot * theta_dot * sintheta) / 1.1
        thetaacc = (9.8 * sintheta - costheta * temp) / (0.5 * (4.0 / 3.0 - 0.1 * costheta * costheta / 1.1))
        xacc = temp - 0.05 * thetaacc * costheta / 1.1
        x = x + 0.02 * x_dot
        x_dot = x_dot + 0.02 * xacc
        theta = theta + 0.02 * theta_dot
        theta_dot = theta_dot + 0.02 * thetaacc
        total += 1.0
        if not (isfinite(x) and isfinite(x_dot) and isfinite(theta) and isfinite(theta_dot)):
            return NONFINITE
        terminal = x < -2.4 or x > 2.4 or theta < -theta_limit or theta > theta_limit
        if terminal:
            break
    score[0] = total
    return OK


cdef void acrobot_derivs(const double *s, double torque, double *out) noexcept nogil:
    cdef double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3]
    cdef double cos2 = cos(theta2)
    cdef double sin2 = sin(theta2)
    cdef double d1, d2, phi1, phi2, ddtheta1, ddtheta2
    d1 = 1.0 * 0.25 + 1.0 * (1.0 + 0.25 + 2.0 * 1.0 * 0.5 * cos2) + 1.0 + 1.0
    d2 = 1.0 * (0.25 + 1.0 * 0.5 * cos2) + 1.0
    phi2 = 1.0 * 0.5 * 9.8 * cos(theta1 + theta2 - M_PI / 2.0)
    phi1 = (-1.0 * 1.0 * 0.5 * dtheta2 * dtheta2 * sin2
            - 2.0 * 1.0 * 1.0 * 0.5 * dtheta2 * dtheta1 * sin2
            + (1.0 * 0.5 + 1.0 * 1.0) * 9.8 * cos(theta1 - M_PI / 2.0)
            + phi2)
    ddtheta2 = (torque + d2 / d1 * phi1 - 1.0 * 1.0 * 0.5 * dtheta1 * dtheta1 * sin2 - phi2) / (
        1.0 * 0.25 + 1.0 - d2 * d2 / d1)
    ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
    out[0] = dtheta1
    out[1] = dtheta2
    out[2] = ddtheta1
    out[3] = ddtheta2


cdef void acrobot_rk4(double *s, double torque, double dt) noexcept nogil:
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double y[4]
    cdef double h = dt / 2.0
    cdef int i
    acrobot_derivs(s, torque, k1)
    for i in range(4):
        y[i] = s[i] + h * k1[i]
    acrobot_derivs(y, torque, k2)
    for i in range(4):
        y[i] = s[i] + h * k2[i]
    acrobot_derivs(y, torque, k3)
    for i in range(4):
        y[i] = s[i] + dt * k3[i]
    acrobot_derivs(y, torque, k4)
    for i in range(4):
        s[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


cdef int acrobot_episode(Net *net, const double *w, const double *init, int max_steps,
                         double *buf_a, double *buf_b, double *score) noexcept nogil:
    cdef double s[4]
    cdef double total = 0.0
    cdef double torque
    cdef int step, i, action
    cdef bint terminal
    for i in range(4):
        s[i] = init[i]
    for step in range(max_steps):
        buf_a[0] = cos(s[0])
        buf_a[1] = sin(s[0])
        buf_a[2] = cos(s[1])
        buf_a[3] = sin(s[1])
        buf_a[4] = s[2]
        buf_a[5] = s[3]
        net_forward(net, w, buf_a, buf_b)
        action = argmax_first(buf_a, 3)
        torque = <double>(action - 1)
        acrobot_rk4(s, torque, 0.2)
        s[0] = wrap(s[0], -M_PI, M_PI)
        s[1] = wrap(s[1], -M_PI, M_PI)
        s[2] = clip(s[2], -(4 * M_PI), 4 * M_PI)
        s[3] = clip(s[3], -(9 * M_PI), 9 * M_PI)
        if not (isfinite(s[0]) and isfinite(s[1]) and isfinite(s[2]) and isfinite(s[3])):
            return NONFINITE
        terminal = -cos(s[0]) - cos(s[1] + s[0]) > 1.0
        total += 0.0 if terminal else -1.0
        if terminal:
            break
    score[0] = total
    return OK


cdef int pendulum_episode(Net *net, const double *w, const double *init, int max_steps,
                          double lo, double hi, double *buf_a, double *buf_b, double *score) noexcept nogil:
    cdef double th = init[0], thdot = init[1]
    cdef double u, wrapped, cost
    cdef double total = 0.0
    cdef int step
    for step in range(max_steps):
        buf_a[0] = cos(th)
        buf_a[1] = sin(th)
        buf_a[2] = thdot
        net_forward(net, w, buf_a, buf_b)
        u = clip(scaled(buf_a[0], lo, hi), -2.0, 2.0)
        wrapped = angle_normalize(th)
        cost = wrapped * wrapped + 0.1 * thdot * thdot + 0.001 * u * u
        thdot = thdot + (15.0 * sin(th) + 3.0 * u) * 0.05
        thdot = clip(thdot, -8.0, 8.0)
        th = th + thdot * 0.05
        total += -cost
        if not (isfinite(th) and isfinite(thdot)):
            return NONFINITE
    score[0] = total
    return OK


cdef int mountaincar_episode(Net *net, const double *w, const double *init, int max_steps,
                             double *buf_a, double *buf_b, double *score) noexcept nogil:
    cdef double pos = init[0], vel = init[1]
    cdef double total = 0.0
    cdef int step, action
    for step in range(max_steps):
        buf_a[0] = pos
        buf_a[1] = vel
        net_forward(net, w, buf_a, buf_b)
        action = argmax_first(buf_a, 3)
        vel = vel + <double>(action - 1) * 0.001 + cos(3.0 * pos) * (-0.0025)
        vel = clip(vel, -0.07, 0.07)
        pos = pos + vel
        pos = clip(pos, -1.2, 0.6)
        if pos == -1.2 and vel < 0.0:
            vel = 0.0
        total += -1.0
        if not (isfinite(pos) and isfinite(vel)):
            return NONFINITE
        if pos >= 0.5:
            break
    score[0] = total
    return OK


cdef int mountaincar_cont_episode(Net *net, const double *w, const double *init, int max_steps,
                                  double lo, double hi, double *buf_a, double *buf_b, double *score) noexcept nogil:
    cdef double pos = init[0], vel = init[1]
    cdef double force, reward
    cdef double total = 0.0
    cdef int step
    cdef bint terminal
    for step in range(max_steps):
        buf_a[0] = pos
        buf_a[1] = vel
        net_forward(net, w, buf_a, buf_b)
        force = clip(scaled(buf_a[0], lo, hi), -1.0, 1.0)
        vel = vel + force * 0.0015 - 0.0025 * cos(3.0 * pos)
        vel = clip(vel, -0.07, 0.07)
        pos = pos + vel
        pos = clip(pos, -1.2, 0.6)
        if pos == -1.2 and vel < 0.0:
            vel = 0.0
        terminal = pos >= 0.45
        reward = (100.0 if terminal else 0.0) - force * force * 0.1
        total += reward
        if not (isfinite(pos) and isfinite(vel)):
            return NONFINITE
        if terminal:
            break
    score[0] = total
    return OK


class KernelNumericalError(ArithmeticError):
    pass


def run_block(int env_id, layer_sizes, bint use_bias, double[:, ::1] weights,
              double[:, :, ::1] init_states, double low, double high, int max_steps):
    """Score ``N`` networks over ``E`` episodes each.

    weights: (N, d) flat weight vectors; init_states: (N, E, state_dim)
    initial physical states. Returns an (N, E) float64 array.
    """
    cdef Py_ssize_t n_samples = weights.shape[0]
    cdef Py_ssize_t n_episodes = init_states.shape[1]
    cdef Py_ssize_t n, e
    cdef int status = OK
    cdef Net net
    cdef int k
    cdef double buf_a[MAX_WIDTH]
    cdef double buf_b[MAX_WIDTH]
    cdef double score = 0.0
    if env_id not in STATE_DIMS:
        raise ValueError(f"unknown kernel id {env_id}")
    if init_states.shape[0] != n_samples or init_states.shape[2] != STATE_DIMS[env_id]:
        raise ValueError("init_states shape does not match weights / environment")
    sizes = [int(v) for v in layer_sizes]
    if max(sizes) > MAX_WIDTH:
        raise ValueError(f"layer width above {MAX_WIDTH} not supported by the compiled kernel")
    expected = sum((a + (1 if use_bias else 0)) * b for a, b in zip(sizes[:-1], sizes[1:]))
    if weights.shape[1] != expected:
        raise ValueError(f"weights have {weights.shape[1]} columns, architecture needs {expected}")

    out = np.empty((n_samples, n_episodes), dtype=np.float64)
    cdef double[:, ::1] out_v = out
    net.n_layers = len(sizes)
    net.use_bias = 1 if use_bias else 0
    net.sizes = <int *> malloc(net.n_layers * sizeof(int))
    if net.sizes == NULL:
        raise MemoryError()
    for k in range(net.n_layers):
        net.sizes[k] = sizes[k]
    try:
        with nogil:
            for n in range(n_samples):
                for e in range(n_episodes):
                    if env_id == ENV_CARTPOLE:
                        status = cartpole_episode(&net, &weights[n, 0], &init_states[n, e, 0], max_steps, buf_a, buf_b, &score)
                    elif env_id == ENV_ACROBOT:
                        status = acrobot_episode(&net, &weights[n, 0], &init_states[n, e, 0], max_steps, buf_a, buf_b, &score)
                    elif env_id == ENV_PENDULUM:
                        status = pendulum_episode(&net, &weights[n, 0], &init_states[n, e, 0], max_steps, low, high, buf_a, buf_b, &score)
                    elif env_id == ENV_MOUNTAINCAR:
                        status = mountaincar_episode(&net, &weights[n, 0], &init_states[n, e, 0], max_steps, buf_a, buf_b, &score)
                    else:
                        status = mountaincar_cont_episode(&net, &weights[n, 0], &init_states[n, e, 0], max_steps, low, high, buf_a, buf_b, &score)
                    if status != OK:
                        break
                    out_v[n, e] = score
                if status != OK:
                    break
    finally:
        free(net.sizes)
    if status != OK:
        raise KernelNumericalError(f"non-finite state in sample {n}, episode {e}")
    return out
