"""Gaussian dynamical maps: the damping channel and the QBM channel.

Both maps act on a Gaussian state through two scalars: a decay exponent and
an isotropic noise weight,

    mean(t) = m(t) * mean(0),   cov(t) = c(t) * cov(0) + n(t) * I.

Damping (rate gamma(t), exponent x(t) = 2 alpha int gamma):
    exact        m = e^{-x/2},  c = e^{-x},  n = (1 - e^{-x})/2
    first order  m = 1 - x/2,   c = 1 - x,   n = x/2

Quantum Brownian motion (damping gamma, diffusion Delta; x as above and
y(t) = 2 alpha int Delta):
    exact        m = e^{-x/2},  c = e^{-x},  n = e^{-x} alpha int_0^t e^{x} Delta ds
    first order  m = 1 - x/2,   c = 1 - x,   n = y/2
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .spectral import ChannelCoefficients
from .states import GaussianState, StatePairParams

__all__ = [
    "ApproximationWarning",
    "PhysicalityWarning",
    "DampingRateSpec",
    "DampingChannel",
    "QbmChannel",
    "Trajectory",
    "damping_rate",
    "damping_x",
    "evolve_damping",
    "evolve_qbm",
    "trajectory",
    "write_trajectory_csv",
]

_SWITCH = 2.5 * math.pi  # switch time of the built-in decaying-sine rate
_RATE_A = 0.1  # its envelope decay constant
FIRST_ORDER_X_LIMIT = 0.3


class ApproximationWarning(UserWarning):
    """First-order evolution used outside its validity domain."""


class PhysicalityWarning(UserWarning):
    """An evolved covariance dipped below the Heisenberg bound."""


@dataclass(frozen=True, eq=False)
class DampingRateSpec:
    """Time-dependent rate gamma(t) for the damping channel.

    Kinds:
      - ``decaying_sine``: (1/2) e^{-t/10} sin t for t < 5 pi / 2, then the
        constant (1/2) e^{-pi/4}; a rate with exactly one negativity
        interval, [pi, 2 pi].
      - ``constant``: gamma(t) = gamma0.
      - ``table``: linear interpolation of user samples.
    """

    kind: str = "decaying_sine"
    gamma0: float = 0.5
    table_times: np.ndarray | None = None
    table_values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("decaying_sine", "constant", "table"):
            raise ValueError(f"unknown rate kind {self.kind!r}")
        if self.kind == "table":
            ts = np.asarray(self.table_times, float)
            vs = np.asarray(self.table_values, float)
            if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
                raise ValueError("rate table needs matching 1-d times/values")
            if ts[0] != 0.0 or np.any(np.diff(ts) <= 0.0):
                raise ValueError("rate table times must increase from 0")
            object.__setattr__(self, "table_times", ts)
            object.__setattr__(self, "table_values", vs)
            # cumulative int_0^t 2 gamma, Simpson on the sample grid
            cum = np.concatenate([[0.0], cumulative_simpson(2.0 * vs, x=ts)])
            object.__setattr__(self, "_table_cum", CubicSpline(ts, cum))

    @classmethod
    def decaying_sine(cls) -> "DampingRateSpec":
        return cls(kind="decaying_sine")

    @classmethod
    def constant(cls, gamma0: float) -> "DampingRateSpec":
        return cls(kind="constant", gamma0=float(gamma0))

    @classmethod
    def from_table(cls, times, values) -> "DampingRateSpec":
        return cls(kind="table", table_times=times, table_values=values)

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0):
            raise ValueError("rate is defined for t >= 0")
        if self.kind == "constant":
            out = np.full_like(t, self.gamma0)
        elif self.kind == "decaying_sine":
            out = np.where(
                t < _SWITCH,
                0.5 * np.exp(-_RATE_A * t) * np.sin(t),
                0.5 * math.exp(-math.pi / 4.0),
            )
        else:
            out = np.interp(t, self.table_times, self.table_values)
        return float(out) if out.ndim == 0 else out

    def x_per_alpha(self, t):
        """int_0^t 2 gamma(s) ds, analytic where the rate allows it."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0):
            raise ValueError("t must be >= 0")
        if self.kind == "constant":
            out = 2.0 * self.gamma0 * t
        elif self.kind == "decaying_sine":
            a = _RATE_A
            tb = np.minimum(t, _SWITCH)
            ramp = (1.0 - np.exp(-a * tb) * (a * np.sin(tb) + np.cos(tb))) / (1.0 + a * a)
            x_switch = (1.0 - math.exp(-a * _SWITCH) * a) / (1.0 + a * a)
            out = np.where(
                t <= _SWITCH,
                ramp,
                x_switch + math.exp(-math.pi / 4.0) * (t - _SWITCH),
            )
        else:
            if np.any(t > self.table_times[-1]):
                raise ValueError("t beyond the rate table")
            out = self._table_cum(t)
        return float(out) if out.ndim == 0 else out

    def negativity_intervals(self, t_max: float) -> list[tuple[float, float]]:
        """Maximal intervals in [0, t_max] where gamma(t) < 0."""
        t_max = float(t_max)
        if self.kind == "constant":
            return [(0.0, t_max)] if self.gamma0 < 0.0 else []
        if self.kind == "decaying_sine":
            if t_max <= math.pi:
                return []
            return [(math.pi, min(2.0 * math.pi, t_max))]
        ts = np.linspace(0.0, min(t_max, self.table_times[-1]), 4001)
        vals = self.rate(ts)
        return _sign_intervals(ts, vals, lambda t: self.rate(float(t)))


def _sign_intervals(ts, vals, fn) -> list[tuple[float, float]]:
    """Maximal intervals where fn < 0, with brentq-refined endpoints."""
    neg = vals < 0.0
    roots = []
    for i in range(len(ts) - 1):
        if neg[i] != neg[i + 1]:
            lo, hi = ts[i], ts[i + 1]
            if fn(lo) == 0.0:
                roots.append(float(lo))
            elif fn(hi) == 0.0:
                roots.append(float(hi))
            else:
                roots.append(float(brentq(fn, lo, hi, xtol=1e-12)))
    edges = [float(ts[0])] + roots + [float(ts[-1])]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 1e-12:
            continue
        if fn(0.5 * (lo + hi)) < 0.0:
            out.append((lo, hi))
    return out


def damping_rate(t, spec: DampingRateSpec):
    """Rate gamma(t) of the damping channel."""
    return spec.rate(t)


def damping_x(t, alpha: float, spec: DampingRateSpec):
    """Decay exponent x(t) = alpha int_0^t 2 gamma(s) ds."""
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    return alpha * spec.x_per_alpha(t)


def _finish_state(mean, cov, mode: str, x_abs: float) -> GaussianState:
    if mode == "exact":
        return GaussianState(mean=mean, cov=cov)
    if x_abs > FIRST_ORDER_X_LIMIT:
        warnings.warn(
            f"first-order evolution with |x| = {x_abs:.3g} > {FIRST_ORDER_X_LIMIT}",
            ApproximationWarning, stacklevel=3,
        )
    state = GaussianState(mean=mean, cov=cov, validate=False)
    if not state.is_physical:
        warnings.warn(
            "first-order evolution produced an unphysical covariance "
            f"(det = {state.det_cov:.12g})",
            ApproximationWarning, stacklevel=3,
        )
    return state


def _check_mode(mode: str):
    if mode not in ("exact", "first_order"):
        raise ValueError(f"mode must be 'exact' or 'first_order', got {mode!r}")


def evolve_damping(state: GaussianState, t: float, alpha: float,
                   spec: DampingRateSpec, mode: str = "exact") -> GaussianState:
    """Evolve a state under the damping channel to time t."""
    _check_mode(mode)
    x = float(damping_x(t, alpha, spec))
    eye = np.eye(2)
    if mode == "exact":
        u = math.exp(-x)
        return _finish_state(math.sqrt(u) * state.mean,
                             u * state.cov + 0.5 * (1.0 - u) * eye, mode, abs(x))
    return _finish_state((1.0 - 0.5 * x) * state.mean,
                         (1.0 - x) * state.cov + 0.5 * x * eye, mode, abs(x))


class QbmPropagator:
    """Spline view of a coefficient table, with the exact noise integral.

    Carries x(t), y(t) and z(t) = alpha int_0^t e^{x} Delta ds (Simpson on
    the table grid), so states can be evolved at arbitrary t within the
    table range.
    """

    def __init__(self, coeffs: ChannelCoefficients):
        ts = coeffs.times
        self.t_end = float(ts[-1])
        self.alpha = coeffs.alpha
        self.x = CubicSpline(ts, coeffs.x)
        self.y = CubicSpline(ts, coeffs.y)
        self.gamma = CubicSpline(ts, coeffs.gamma)
        self.delta = CubicSpline(ts, coeffs.delta)
        z = np.concatenate([
            [0.0],
            cumulative_simpson(coeffs.alpha * np.exp(coeffs.x) * coeffs.delta, x=ts),
        ])
        self.z = CubicSpline(ts, z)

    def check_t(self, t):
        t = np.asarray(t, float)
        if np.any(t < 0.0) or np.any(t > self.t_end * (1.0 + 1e-12)):
            raise ValueError(f"t outside the coefficient grid [0, {self.t_end:g}]")

    def delta_negativity_intervals(self) -> list[tuple[float, float]]:
        ts = self.delta.x
        return _sign_intervals(ts, self.delta(ts), self.delta)


@lru_cache(maxsize=64)
def _propagator(coeffs: ChannelCoefficients) -> QbmPropagator:
    return QbmPropagator(coeffs)


def evolve_qbm(state: GaussianState, t: float, coeffs: ChannelCoefficients,
               mode: str = "exact") -> GaussianState:
    """Evolve a state under the QBM channel to time t (t within the table)."""
    _check_mode(mode)
    prop = _propagator(coeffs)
    prop.check_t(t)
    x = float(prop.x(t))
    eye = np.eye(2)
    if mode == "exact":
        u = math.exp(-x)
        noise = u * float(prop.z(t))
        return _finish_state(math.sqrt(u) * state.mean,
                             u * state.cov + noise * eye, mode, abs(x))
    y = float(prop.y(t))
    return _finish_state((1.0 - 0.5 * x) * state.mean,
                         (1.0 - x) * state.cov + 0.5 * y * eye, mode, abs(x))


@dataclass(frozen=True, eq=False)
class DampingChannel:
    """Damping channel with coupling alpha and a rate specification."""

    alpha: float
    rate: DampingRateSpec = field(default_factory=DampingRateSpec.decaying_sine)
    mode: str = "exact"
    t_max: float = 8.0 * math.pi

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError("alpha must be positive")
        _check_mode(self.mode)

    tag = "damping"

    def maps(self, ts):
        """(mean factor, cov factor, noise weight) arrays on the grid ts."""
        x = self.alpha * self.rate.x_per_alpha(ts)
        if self.mode == "exact":
            u = np.exp(-x)
            return np.sqrt(u), u, 0.5 * (1.0 - u)
        return 1.0 - 0.5 * x, 1.0 - x, 0.5 * x

    def evolve(self, state: GaussianState, t: float) -> GaussianState:
        return evolve_damping(state, t, self.alpha, self.rate, self.mode)

    def exponent_backflows(self) -> list[tuple[float, float, float]]:
        """(t_plus, t_minus, x(t_plus) - x(t_minus)) per negativity interval."""
        out = []
        for lo, hi in self.rate.negativity_intervals(self.t_max):
            xs = damping_x(np.array([lo, hi]), self.alpha, self.rate)
            out.append((lo, hi, float(xs[0] - xs[1])))
        return out


@dataclass(frozen=True, eq=False)
class QbmChannel:
    """QBM channel backed by a tabulated coefficient set."""

    coeffs: ChannelCoefficients
    mode: str = "exact"

    def __post_init__(self):
        _check_mode(self.mode)

    tag = "qbm"

    @property
    def alpha(self) -> float:
        return self.coeffs.alpha

    @property
    def t_max(self) -> float:
        return self.coeffs.t_end

    @property
    def propagator(self) -> QbmPropagator:
        return _propagator(self.coeffs)

    def maps(self, ts):
        prop = self.propagator
        prop.check_t(ts)
        x = prop.x(ts)
        if self.mode == "exact":
            u = np.exp(-x)
            return np.sqrt(u), u, u * prop.z(ts)
        return 1.0 - 0.5 * x, 1.0 - x, 0.5 * prop.y(ts)

    def evolve(self, state: GaussianState, t: float) -> GaussianState:
        return evolve_qbm(state, t, self.coeffs, self.mode)

    def exponent_backflows(self) -> list[tuple[float, float, float]]:
        """(t_plus, t_minus, y(t_plus) - y(t_minus)) per Delta < 0 interval."""
        prop = self.propagator
        out = []
        for lo, hi in prop.delta_negativity_intervals():
            out.append((lo, hi, float(prop.y(lo) - prop.y(hi))))
        return out


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A state evolved over a time grid under one channel."""

    times: np.ndarray
    states: tuple
    channel: str
    params: StatePairParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, float))
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != self.times.size:
            raise ValueError("one state per grid time required")


def evolve_arrays(channel, mean0: np.ndarray, cov0: np.ndarray, ts):
    """Vectorized evolution of one initial state over a grid."""
    mf, cf, nf = channel.maps(np.asarray(ts, float))
    means = mf[..., None] * mean0
    covs = cf[..., None, None] * cov0 + nf[..., None, None] * np.eye(2)
    return means, covs


def trajectory(pair: StatePairParams, channel, times) -> tuple[Trajectory, Trajectory]:
    """Evolve both states of a pair over the grid.

    Damping-exact trajectories are validated state by state (the map
    preserves the Heisenberg bound).  The exact QBM solution can dip
    slightly below the bound at finite coupling because its stationary
    noise floor follows the diffusion integral alone; such dips and any
    first-order truncation artifacts are reported as a PhysicalityWarning
    instead of an error.
    """
    ts = np.asarray(times, dtype=float)
    if ts.ndim != 1 or ts.size < 1 or np.any(ts < 0.0):
        raise ValueError("times must be a 1-d grid of non-negative instants")
    validate = channel.mode == "exact" and channel.tag == "damping"
    out = []
    worst = float("inf")
    for st in pair.states():
        means, covs = evolve_arrays(channel, st.mean, st.cov, ts)
        states = tuple(
            GaussianState(mean=m, cov=c, validate=validate)
            for m, c in zip(means, covs)
        )
        dets = covs[:, 0, 0] * covs[:, 1, 1] - covs[:, 0, 1] * covs[:, 1, 0]
        worst = min(worst, float(dets.min()))
        out.append(Trajectory(times=ts, states=states, channel=channel.tag,
                              params=pair))
    if not validate and worst < 0.25 - 1e-9:
        warnings.warn(
            f"trajectory dips below the Heisenberg bound (min det = {worst:.6g})",
            PhysicalityWarning, stacklevel=2,
        )
    return out[0], out[1]


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV export: t, mean_q, mean_p, cov_qq, cov_qp, cov_pp."""
    with open(path, "w", newline="") as fh:
        fh.write("t,mean_q,mean_p,cov_qq,cov_qp,cov_pp\r\n")
        for t, st in zip(traj.times, traj.states):
            row = (t, st.mean[0], st.mean[1], st.cov[0, 0], st.cov[0, 1], st.cov[1, 1])
            fh.write(",".join(f"{v:.12g}" for v in row) + "\r\n")
