"""Hot numeric kernels for field evolution, in two interchangeable flavors.

The numba backend compiles the per-trial update loop (sigmoid gate, dense
lateral convolution, Euler step) and runs batch trials in parallel with
``prange``. The pure-numpy backend implements the identical arithmetic with
vectorized operations and is used automatically when numba is unavailable, or
on request via the ``VOTFIELD_BACKEND`` environment variable ("numba" or
"numpy").

Within a backend, results are bit-reproducible: every trial consumes only its
own pre-drawn noise matrix, trials never interact, and the batch path runs the
same step arithmetic as the single-trajectory path.
"""

import math
import os

import numpy as np

from .errors import ConfigError

ENV_BACKEND = "VOTFIELD_BACKEND"

try:
    if "NUMBA_DISABLE_JIT" in os.environ:
        raise ImportError("numba disabled via NUMBA_DISABLE_JIT")
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False
    prange = range

    def njit(*args, **kwargs):
        # identity decorator so the module still imports without numba
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def available_backends():
    """Names of the backends usable in this process."""
    return ("numba", "numpy") if NUMBA_AVAILABLE else ("numpy",)


def active_backend():
    """Resolve the backend name, honoring the VOTFIELD_BACKEND override."""
    name = os.environ.get(ENV_BACKEND, "").strip().lower()
    if not name:
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if name not in ("numba", "numpy"):
        raise ConfigError(f"{ENV_BACKEND} must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise ConfigError(f"{ENV_BACKEND}=numba requested but numba is not importable")
    return name


def _c(a):
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _gate_nb(z):
    # numerically stable logistic; saturates to 0/1 for extreme z
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    t = math.exp(z)
    return t / (1.0 + t)


@njit(cache=True)
def _step_nb(u, un, g, drive, w, tau, h, beta, dt, q, noise_t):
    """One Euler step u -> un. Returns True iff every new entry is finite."""
    n = u.shape[0]
    for i in range(n):
        g[i] = _gate_nb(beta * u[i])
    ok = True
    r = dt / tau
    for i in range(n):
        acc = 0.0
        base = i + n - 1
        for j in range(n):
            acc += w[base - j] * g[j]
        un[i] = u[i] + r * (-u[i] + h + drive[i] + acc + q * noise_t[i])
        if not np.isfinite(un[i]):
            ok = False
    return ok


@njit(cache=True)
def _lateral_nb(g, w):
    n = g.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        base = i + n - 1
        for j in range(n):
            acc += w[base - j] * g[j]
        out[i] = acc
    return out


@njit(cache=True)
def _evolve_states_nb(states, drive, w, tau, h, beta, dt, q, noise):
    n_steps = noise.shape[0]
    g = np.empty(states.shape[1])
    for t in range(n_steps):
        if not _step_nb(states[t], states[t + 1], g, drive, w, tau, h, beta, dt, q, noise[t]):
            return t + 1
    return -1


@njit(cache=True)
def _evolve_summary_nb(u0, drive, w, tau, h, beta, dt, q, noise, final, max_u, n_above):
    """Memory-lean evolution: per-step max/count plus first crossing.

    Returns (diverged_step, first_cross_step, first_cross_pos), each -1 when
    not applicable. ``final`` receives the last field.
    """
    n = u0.shape[0]
    n_steps = noise.shape[0]
    u = u0.copy()
    un = np.empty(n)
    g = np.empty(n)
    first_step = -1
    first_pos = -1

    m = u[0]
    cnt = 0
    for i in range(n):
        if u[i] > m:
            m = u[i]
        if u[i] > 0.0:
            cnt += 1
            if first_pos < 0:
                first_step = 0
                first_pos = i
    max_u[0] = m
    n_above[0] = cnt

    for t in range(n_steps):
        if not _step_nb(u, un, g, drive, w, tau, h, beta, dt, q, noise[t]):
            for i in range(n):
                final[i] = un[i]
            return t + 1, first_step, first_pos
        tmp = u
        u = un
        un = tmp
        m = u[0]
        cnt = 0
        for i in range(n):
            if u[i] > m:
                m = u[i]
            if u[i] > 0.0:
                cnt += 1
        max_u[t + 1] = m
        n_above[t + 1] = cnt
        if first_step < 0 and cnt > 0:
            for i in range(n):
                if u[i] > 0.0:
                    first_step = t + 1
                    first_pos = i
                    break
    for i in range(n):
        final[i] = u[i]
    return -1, first_step, first_pos


@njit(cache=True, parallel=True)
def _evolve_batch_nb(u0, drive, w, tau, h, beta, dt, q, noise3, finals, first_steps, first_poss, diverged):
    n_trials = noise3.shape[0]
    n_steps = noise3.shape[1]
    for k in prange(n_trials):
        max_u = np.empty(n_steps + 1)
        n_above = np.empty(n_steps + 1, np.int64)
        d, fs, fp = _evolve_summary_nb(
            u0, drive, w, tau, h, beta, dt, q, noise3[k], finals[k], max_u, n_above
        )
        diverged[k] = d
        first_steps[k] = fs
        first_poss[k] = fp


# ---------------------------------------------------------------- numpy path


def gate(z):
    """Numerically stable logistic of an array, saturating at 0/1."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _lateral_np(g, w):
    n = g.shape[0]
    return np.convolve(g, w)[n - 1:2 * n - 1]


def _step_np(u, drive, w, tau, h, beta, dt, q, noise_t):
    lat = _lateral_np(gate(beta * u), w)
    un = u + (dt / tau) * (-u + h + drive + lat + q * noise_t)
    return un, bool(np.isfinite(un).all())


def _evolve_states_np(states, drive, w, tau, h, beta, dt, q, noise):
    for t in range(noise.shape[0]):
        states[t + 1], ok = _step_np(states[t], drive, w, tau, h, beta, dt, q, noise[t])
        if not ok:
            return t + 1
    return -1


def _evolve_summary_np(u0, drive, w, tau, h, beta, dt, q, noise, final, max_u, n_above):
    u = u0.copy()
    first_step = -1
    first_pos = -1
    max_u[0] = u.max()
    cnt = int(np.count_nonzero(u > 0.0))
    n_above[0] = cnt
    if cnt:
        first_step = 0
        first_pos = int(np.argmax(u > 0.0))
    for t in range(noise.shape[0]):
        u, ok = _step_np(u, drive, w, tau, h, beta, dt, q, noise[t])
        if not ok:
            final[:] = u
            return t + 1, first_step, first_pos
        max_u[t + 1] = u.max()
        cnt = int(np.count_nonzero(u > 0.0))
        n_above[t + 1] = cnt
        if first_step < 0 and cnt:
            first_step = t + 1
            first_pos = int(np.argmax(u > 0.0))
    final[:] = u
    return -1, first_step, first_pos


# --------------------------------------------------------------- dispatchers


def _resolve(backend):
    return backend if backend is not None else active_backend()


def lateral(g, weights, backend=None):
    """Dense lateral interaction: out[i] = sum_j weights[i - j + n - 1] * g[j]."""
    g = _c(g)
    w = _c(weights)
    if _resolve(backend) == "numba":
        return _lateral_nb(g, w)
    return _lateral_np(g, w)


def step(u, drive, weights, tau, h, beta, dt, q, noise_t, backend=None):
    """One Euler step. Returns (u_next, all_finite)."""
    u = _c(u)
    drive = _c(drive)
    w = _c(weights)
    noise_t = _c(noise_t)
    if _resolve(backend) == "numba":
        un = np.empty_like(u)
        g = np.empty_like(u)
        ok = _step_nb(u, un, g, drive, w, tau, h, beta, dt, q, noise_t)
        return un, bool(ok)
    return _step_np(u, drive, w, tau, h, beta, dt, q, noise_t)


def evolve_states(u0, drive, weights, tau, h, beta, dt, q, noise, backend=None):
    """Full-trajectory evolution. Returns (states, diverged_step)."""
    u0 = _c(u0)
    noise = _c(noise)
    states = np.empty((noise.shape[0] + 1, u0.shape[0]))
    states[0] = u0
    args = (states, _c(drive), _c(weights), tau, h, beta, dt, q, noise)
    if _resolve(backend) == "numba":
        diverged = _evolve_states_nb(*args)
    else:
        diverged = _evolve_states_np(*args)
    return states, int(diverged)


def evolve_summary(u0, drive, weights, tau, h, beta, dt, q, noise, backend=None):
    """Memory-lean evolution.

    Returns (final, max_u, n_above, first_step, first_pos, diverged_step);
    the step/pos values are -1 when the field never crossed threshold.
    """
    u0 = _c(u0)
    noise = _c(noise)
    final = np.empty_like(u0)
    max_u = np.empty(noise.shape[0] + 1)
    n_above = np.empty(noise.shape[0] + 1, np.int64)
    args = (u0, _c(drive), _c(weights), tau, h, beta, dt, q, noise, final, max_u, n_above)
    if _resolve(backend) == "numba":
        d, fs, fp = _evolve_summary_nb(*args)
    else:
        d, fs, fp = _evolve_summary_np(*args)
    return final, max_u, n_above, int(fs), int(fp), int(d)


def evolve_batch(u0, drive, weights, tau, h, beta, dt, q, noise3, backend=None):
    """Independent trials sharing (u0, drive); one noise matrix per trial.

    Returns (finals, first_steps, first_poss, diverged), arrays indexed by
    trial. Trial results do not depend on worker count or batch size.
    """
    u0 = _c(u0)
    noise3 = np.ascontiguousarray(np.asarray(noise3, dtype=np.float64))
    n_trials = noise3.shape[0]
    finals = np.empty((n_trials, u0.shape[0]))
    first_steps = np.empty(n_trials, np.int64)
    first_poss = np.empty(n_trials, np.int64)
    diverged = np.empty(n_trials, np.int64)
    if _resolve(backend) == "numba":
        _evolve_batch_nb(u0, _c(drive), _c(weights), tau, h, beta, dt, q,
                         noise3, finals, first_steps, first_poss, diverged)
    else:
        drive = _c(drive)
        w = _c(weights)
        max_u = np.empty(noise3.shape[1] + 1)
        n_above = np.empty(noise3.shape[1] + 1, np.int64)
        for k in range(n_trials):
            d, fs, fp = _evolve_summary_np(u0, drive, w, tau, h, beta, dt, q,
                                           noise3[k], finals[k], max_u, n_above)
            diverged[k] = d
            first_steps[k] = fs
            first_poss[k] = fp
    return finals, first_steps, first_poss, diverged
