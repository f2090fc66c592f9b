"""Core 1-D activation field: parameters, interaction kernel, Euler integrator.

The field u(x, t) lives on an integer grid x = 0 .. field_size-1 (1 grid unit
= 1 ms of VOT) and evolves by

    u_next = u + (dt/tau) * (-u + h + s(x) + sum_x' k(x - x') g(u(x')) + q * xi)

where g is a steep logistic gate, k is a difference-of-Gaussians kernel with a
global inhibitory offset, s is the static external drive, and xi is unit
Gaussian noise drawn fresh per neuron per step. The lateral sum is a plain
linear convolution with zero contribution from outside the grid (VOT space is
not periodic). The noise term sits inside the bracket, so the per-step noise
increment is (dt/tau)*q*xi — not sqrt(dt)-scaled; see the `dt` field note.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter1d

from . import backends
from .errors import ConfigError, IntegrationDivergedError

logger = logging.getLogger(__name__)

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _is_number(val):
    return not isinstance(val, bool) and isinstance(
        val, (int, float, np.integer, np.floating))


@dataclass(frozen=True)
class FieldParams:
    """Field constants plus discretization choices.

    `dt` is exposed for completeness but note the caveat in the module
    docstring: the effective noise increment scales with dt/tau rather than
    sqrt(dt), so changing dt changes the noise process, not just the
    resolution.
    """

    tau: float = 20.0          # time constant, in steps
    h: float = -5.0            # resting activation level
    beta: float = 4.0          # sigmoid gate steepness
    c_exc: float = 15.0        # excitatory kernel magnitude
    c_inh: float = 5.0         # surround-inhibition magnitude
    c_glob: float = 0.9        # global inhibition per active neuron
    sigma_exc: float = 5.0     # excitatory kernel width (ms)
    sigma_inh: float = 12.5    # inhibitory kernel width (ms)
    q: float = 1.0             # noise weight
    field_size: int = 200      # number of neurons (grid 0..199 ms)
    dt: float = 1.0            # integration step
    n_steps: int = 120         # steps per trial
    u_init: float | None = None        # initial activation; None = resting h
    noise_smooth_sigma: float = 0.0    # Gaussian smoothing of each noise vector; 0 = i.i.d.

    def __post_init__(self):
        ints = {"field_size": self.field_size, "n_steps": self.n_steps}
        for key, val in ints.items():
            if not _is_number(val) or not float(val).is_integer():
                raise ConfigError(f"{key} must be an integer, got {val!r}")
            object.__setattr__(self, key, int(val))
        floats = ("tau", "h", "beta", "c_exc", "c_inh", "c_glob", "sigma_exc",
                  "sigma_inh", "q", "dt", "noise_smooth_sigma")
        for key in floats:
            val = getattr(self, key)
            if not _is_number(val) or not np.isfinite(val):
                raise ConfigError(f"{key} must be a finite number, got {val!r}")
            object.__setattr__(self, key, float(val))
        if self.u_init is not None:
            if not _is_number(self.u_init) or not np.isfinite(self.u_init):
                raise ConfigError(f"u_init must be a finite number or null, got {self.u_init!r}")
            object.__setattr__(self, "u_init", float(self.u_init))
        for key in ("tau", "dt", "beta", "sigma_exc", "sigma_inh"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be > 0, got {getattr(self, key)}")
        for key in ("c_exc", "c_inh", "c_glob", "q", "noise_smooth_sigma"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be >= 0, got {getattr(self, key)}")
        if self.field_size < 2:
            raise ConfigError(f"field_size must be >= 2, got {self.field_size}")
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if not (self.sigma_exc < self.sigma_inh and self.c_exc > self.c_inh > self.c_glob):
            logger.warning(
                "kernel outside the selective regime (expected sigma_exc < sigma_inh "
                "and c_exc > c_inh > c_glob): sigma_exc=%g sigma_inh=%g c_exc=%g "
                "c_inh=%g c_glob=%g — running anyway",
                self.sigma_exc, self.sigma_inh, self.c_exc, self.c_inh, self.c_glob,
            )


@dataclass(eq=False)
class FieldState:
    """Activation vector at one time step."""

    u: np.ndarray
    step: int = 0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.float64)
        self.step = int(self.step)
        if self.step < 0:
            raise ConfigError(f"step must be >= 0, got {self.step}")


@dataclass(eq=False)
class KernelTable:
    """Precomputed k(d) for every displacement d = -(n-1) .. n-1."""

    weights: np.ndarray

    @property
    def field_size(self):
        return (self.weights.shape[0] + 1) // 2


def initial_state(params):
    """Resting-state field: u(x, 0) = u_init (default: the resting level h)."""
    level = params.h if params.u_init is None else params.u_init
    return FieldState(np.full(params.field_size, level, dtype=np.float64), step=0)


def sigmoid_gate(u_val, beta):
    """Logistic gate g(u) = 1 / (1 + exp(-beta*u)), overflow-safe.

    Accepts a scalar or an array; returns the same shape.
    """
    if not beta > 0:
        raise ConfigError(f"beta must be > 0, got {beta}")
    z = np.asarray(u_val, dtype=np.float64) * beta
    if z.ndim == 0:
        return float(backends.gate(z.reshape(1))[0])
    return backends.gate(z)


def kernel_value(d, params):
    """Interaction weight at displacement d: local excitation minus surround
    and global inhibition."""
    d = np.asarray(d, dtype=np.float64)
    exc = params.c_exc / (_SQRT_2PI * params.sigma_exc) * np.exp(
        -(d * d) / (2.0 * params.sigma_exc ** 2))
    inh = params.c_inh / (_SQRT_2PI * params.sigma_inh) * np.exp(
        -(d * d) / (2.0 * params.sigma_inh ** 2))
    out = exc - inh - params.c_glob
    return float(out) if out.ndim == 0 else out


def build_kernel(params):
    """Tabulate the kernel over every integer displacement on the grid.

    Weights are computed from |d|, so the table is symmetric exactly.
    """
    n = params.field_size
    disp = np.abs(np.arange(-(n - 1), n, dtype=np.float64))
    return KernelTable(weights=kernel_value(disp, params))


def lateral_input(state, kernel, beta):
    """Lateral interaction vector: convolution of the gated field with the
    kernel table, zero outside the grid."""
    n = state.u.shape[0]
    if kernel.weights.shape[0] != 2 * n - 1:
        raise ConfigError(
            f"kernel table of length {kernel.weights.shape[0]} does not match "
            f"field_size {n} (expected {2 * n - 1})")
    g = sigmoid_gate(state.u, beta)
    return backends.lateral(g, kernel.weights)


def _check_vector(name, vec, n):
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (n,):
        raise ConfigError(f"{name} must be a vector of length {n}, got shape {vec.shape}")
    return vec


def field_step(state, inputs, kernel, params, noise):
    """Advance the field by one Euler step.

    `inputs` is the precomputed external drive (sum of all input profiles);
    `noise` is one standard-normal draw per neuron.
    """
    n = params.field_size
    if state.u.shape[0] != n:
        raise ConfigError(f"state has {state.u.shape[0]} neurons, params expect {n}")
    if kernel.weights.shape[0] != 2 * n - 1:
        raise ConfigError(
            f"kernel table of length {kernel.weights.shape[0]} does not match "
            f"field_size {n} (expected {2 * n - 1})")
    inputs = _check_vector("inputs", inputs, n)
    noise = _check_vector("noise", noise, n)
    un, ok = backends.step(state.u, inputs, kernel.weights, params.tau, params.h,
                           params.beta, params.dt, params.q, noise)
    if not ok:
        raise IntegrationDivergedError(step=state.step + 1)
    return FieldState(un, step=state.step + 1)


def draw_noise(params, rng, n_steps=None):
    """Pre-draw the (n_steps, field_size) noise matrix for one trial.

    Row t is the noise injected on the step from state t to t+1. With
    `noise_smooth_sigma` > 0 each row is smoothed along the field axis with a
    zero-boundary Gaussian (this lowers the effective per-neuron variance).
    `rng=None` gives a zero matrix (useful with q=0).
    """
    steps = params.n_steps if n_steps is None else int(n_steps)
    shape = (steps, params.field_size)
    if rng is None:
        return np.zeros(shape)
    noise = rng.standard_normal(shape)
    if params.noise_smooth_sigma > 0:
        noise = gaussian_filter1d(noise, params.noise_smooth_sigma, axis=1,
                                  mode="constant", cval=0.0)
    return noise


@dataclass(eq=False)
class Trajectory:
    """A completed run: per-step states (unless memory-lean) plus summaries.

    Indexing gives FieldStates: traj[0] is the initial state, traj[-1] the
    final one. `first_cross_step`/`first_cross_pos` give the first step and
    lowest neuron index at which activation exceeded 0, or None if it never
    did.
    """

    states: np.ndarray | None
    final: FieldState
    max_u: np.ndarray
    n_above: np.ndarray
    first_cross_step: int | None
    first_cross_pos: int | None

    def __len__(self):
        return self.max_u.shape[0]

    @property
    def n_steps(self):
        return len(self) - 1

    def __getitem__(self, t):
        if self.states is None:
            raise ValueError("trajectory was run with keep_states=False; "
                             "per-step states were not recorded")
        t = range(len(self))[t]
        return FieldState(self.states[t], step=t)


def evolve(initial, inputs, params, rng, *, keep_states=True, kernel=None):
    """Run the integrator for params.n_steps steps from `initial`.

    `rng` is a seeded numpy Generator supplying the noise stream (or None for
    a zero noise matrix). With keep_states=False only the final state and
    per-step summaries (max activation, above-threshold count) are kept.
    """
    if initial is None:
        initial = initial_state(params)
    if initial.step != 0:
        raise ConfigError(f"initial state must have step == 0, got {initial.step}")
    n = params.field_size
    if initial.u.shape[0] != n:
        raise ConfigError(f"initial state has {initial.u.shape[0]} neurons, params expect {n}")
    inputs = _check_vector("inputs", inputs, n)
    if kernel is None:
        kernel = build_kernel(params)
    noise = draw_noise(params, rng)
    common = (initial.u, inputs, kernel.weights, params.tau, params.h,
              params.beta, params.dt, params.q, noise)
    if keep_states:
        states, diverged = backends.evolve_states(*common)
        if diverged >= 0:
            raise IntegrationDivergedError(step=diverged)
        max_u = states.max(axis=1)
        n_above = np.count_nonzero(states > 0.0, axis=1).astype(np.int64)
        crossed = n_above > 0
        if crossed.any():
            t0 = int(np.argmax(crossed))
            first_step, first_pos = t0, int(np.argmax(states[t0] > 0.0))
        else:
            first_step = first_pos = None
        return Trajectory(states=states, final=FieldState(states[-1], step=params.n_steps),
                          max_u=max_u, n_above=n_above,
                          first_cross_step=first_step, first_cross_pos=first_pos)
    final_u, max_u, n_above, fs, fp, diverged = backends.evolve_summary(*common)
    if diverged >= 0:
        raise IntegrationDivergedError(step=diverged)
    return Trajectory(states=None, final=FieldState(final_u, step=params.n_steps),
                      max_u=max_u, n_above=n_above,
                      first_cross_step=(fs if fs >= 0 else None),
                      first_cross_pos=(fp if fp >= 0 else None))
