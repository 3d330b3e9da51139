"""Damping and diffusion coefficients of the weak-coupling Ohmic bath.

The bath has spectral density J(w) = w exp(-w/w_c) (Ohmic, exponential
cutoff).  The time-dependent master-equation coefficients are

    gamma(t) = int_0^t ds int_0^inf dw J(w) sin(w0 s) sin(w s)
    Delta(t) = int_0^t ds int_0^inf dw J(w) (N(w) + 1/2) cos(w0 s) cos(w s)

with N(w) the thermal occupation.  The frequency integrals of the
temperature-independent parts are closed forms; the thermal part is a
cosine-weighted quadrature.  Delta splits as Delta_0 + Delta_T (zero-point
plus thermal photons).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, quad

__all__ = [
    "EnvironmentSpec",
    "ChannelCoefficients",
    "QuadratureError",
    "spectral_density",
    "gamma_coefficient",
    "delta_coefficient",
    "delta_zero_temperature",
    "delta_thermal",
    "build_coefficients",
    "coefficients_from_functions",
    "divisibility_check",
    "settle_horizon",
    "write_coefficients_csv",
]

_REL_TOL = 1e-8


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature cannot reach the target accuracy."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (error estimate {estimate:.3e})")
        self.estimate = estimate


@dataclass(frozen=True)
class EnvironmentSpec:
    """Ohmic environment: system frequency, cutoff and temperature (k_B T)."""

    omega0: float
    omega_c: float
    temperature: float = 0.0

    def __post_init__(self):
        for name in ("omega0", "omega_c", "temperature"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.omega0 <= 0.0 or self.omega_c <= 0.0:
            raise ValueError("omega0 and omega_c must be strictly positive")
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True, eq=False)
class ChannelCoefficients:
    """Sampled gamma(t), Delta(t) and their cumulative exponents x(t), y(t).

    x(t) = 2 alpha int_0^t gamma, y(t) = 2 alpha int_0^t Delta, both zero at
    t = 0.  ``kernel_abserr`` carries the worst thermal-kernel quadrature
    error estimate for run summaries.
    """

    times: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    x: np.ndarray
    y: np.ndarray
    alpha: float
    kernel_abserr: float = field(default=0.0, compare=False)
    env: "EnvironmentSpec | None" = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("times", "gamma", "delta", "x", "y"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), float))
        n = self.times.size
        if any(getattr(self, name).size != n for name in ("gamma", "delta", "x", "y")):
            raise ValueError("coefficient arrays must share one grid")
        if n < 2 or self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing from 0")
        if abs(self.x[0]) > 0.0 or abs(self.y[0]) > 0.0:
            raise ValueError("x(0) and y(0) must vanish")
        if not float(self.alpha) > 0.0:
            raise ValueError("alpha must be positive")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


def spectral_density(omega, env: EnvironmentSpec):
    """Ohmic spectral density J(w) = w exp(-w/w_c); domain w >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("spectral density is defined for omega >= 0")
    out = w * np.exp(-w / env.omega_c)
    return float(out) if np.isscalar(omega) else out


def _sin_kernel(s, a):
    """int_0^inf w e^{-a w} sin(w s) dw = 2 a s / (a^2 + s^2)^2."""
    s = np.asarray(s, float)
    return 2.0 * a * s / (a * a + s * s) ** 2


def _cos_kernel(s, a):
    """int_0^inf w e^{-a w} cos(w s) dw = (a^2 - s^2) / (a^2 + s^2)^2."""
    s = np.asarray(s, float)
    return (a * a - s * s) / (a * a + s * s) ** 2


def _thermal_occupancy_weight(omega, env: EnvironmentSpec):
    """J(w) N(w) with the w -> 0 limit J N -> T handled explicitly."""
    t = env.temperature
    w = np.asarray(omega, dtype=float)
    with np.errstate(over="ignore"):
        ratio = np.where(w > 0.0, w / np.expm1(np.maximum(w, 1e-300) / t), t)
    return ratio * np.exp(-w / env.omega_c)


def _omega_cut(env: EnvironmentSpec) -> float:
    scale = max(env.omega_c, env.temperature)
    return scale * math.log(1e12) + 10.0 * scale


def thermal_cos_kernel(s: float, env: EnvironmentSpec) -> tuple[float, float]:
    """int_0^inf J(w) N(w) cos(w s) dw and its quadrature error estimate."""
    if env.temperature == 0.0:
        return 0.0, 0.0
    val, err = quad(
        _thermal_occupancy_weight, 0.0, _omega_cut(env), args=(env,),
        weight="cos", wvar=float(s), limit=400, epsabs=1e-13, epsrel=1e-11,
    )
    return val, err


def _check_quad(value: float, estimate: float, what: str) -> float:
    # relative criterion with an absolute floor for near-zero values
    if estimate > max(_REL_TOL * abs(value), 1e-9):
        raise QuadratureError(f"{what} quadrature did not converge", estimate)
    return value


def gamma_coefficient(t: float, env: EnvironmentSpec) -> float:
    """Damping coefficient gamma(t); temperature independent."""
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0
    a = 1.0 / env.omega_c
    val, err = quad(_sin_kernel, 0.0, t, args=(a,), weight="sin",
                    wvar=env.omega0, limit=400, epsabs=1e-13, epsrel=1e-11)
    return _check_quad(val, err, "gamma(t)")


def delta_zero_temperature(t: float, env: EnvironmentSpec) -> float:
    """Zero-point diffusion Delta_0(t) (half-weighted cosine transform)."""
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0
    a = 1.0 / env.omega_c
    val, err = quad(lambda s: 0.5 * _cos_kernel(s, a), 0.0, t, weight="cos",
                    wvar=env.omega0, limit=400, epsabs=1e-13, epsrel=1e-11)
    return _check_quad(val, err, "Delta_0(t)")


def delta_thermal(t: float, env: EnvironmentSpec) -> float:
    """Thermal diffusion Delta_T(t); identically zero at T = 0."""
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0 or env.temperature == 0.0:
        return 0.0
    inner_err = 0.0

    def kernel(s):
        nonlocal inner_err
        v, e = thermal_cos_kernel(s, env)
        inner_err = max(inner_err, e)
        return v

    val, err = quad(kernel, 0.0, t, weight="cos", wvar=env.omega0,
                    limit=400, epsabs=1e-12, epsrel=1e-10)
    return _check_quad(val, err + inner_err * t, "Delta_T(t)")


def delta_coefficient(t: float, env: EnvironmentSpec) -> float:
    """Diffusion coefficient Delta(t) = Delta_0(t) + Delta_T(t)."""
    return delta_zero_temperature(t, env) + delta_thermal(t, env)


def _cumulative(values: np.ndarray, ts: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    out[0] = 0.0
    out[1:] = cumulative_simpson(values, x=ts)
    return out


def build_coefficients(env: EnvironmentSpec, alpha: float, t_end: float,
                       n_steps: int) -> ChannelCoefficients:
    """Tabulate gamma, Delta, x, y on a uniform grid of n_steps intervals.

    The time integrals are composite Simpson over the sampled integrands,
    so the cumulative columns are O(h^4) accurate in the grid spacing.
    """
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    ts = np.linspace(0.0, float(t_end), int(n_steps) + 1)
    a = 1.0 / env.omega_c
    gam_rate = _sin_kernel(ts, a) * np.sin(env.omega0 * ts)
    dlt_rate = 0.5 * _cos_kernel(ts, a) * np.cos(env.omega0 * ts)
    kernel_abserr = 0.0
    if env.temperature > 0.0:
        thermal = np.empty_like(ts)
        for i, s in enumerate(ts):
            thermal[i], err = thermal_cos_kernel(s, env)
            kernel_abserr = max(kernel_abserr, err)
        dlt_rate = dlt_rate + thermal * np.cos(env.omega0 * ts)
    gamma = _cumulative(gam_rate, ts)
    delta = _cumulative(dlt_rate, ts)
    x = _cumulative(2.0 * alpha * gamma, ts)
    y = _cumulative(2.0 * alpha * delta, ts)
    return ChannelCoefficients(times=ts, gamma=gamma, delta=delta, x=x, y=y,
                               alpha=alpha, kernel_abserr=kernel_abserr, env=env)


def coefficients_from_functions(gamma_fn, delta_fn, alpha: float, t_end: float,
                                n_steps: int) -> ChannelCoefficients:
    """Tabulate user-supplied gamma(t), Delta(t) callables (test hook)."""
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    ts = np.linspace(0.0, float(t_end), int(n_steps) + 1)
    gamma = np.asarray([float(gamma_fn(t)) for t in ts])
    delta = np.asarray([float(delta_fn(t)) for t in ts])
    x = _cumulative(2.0 * alpha * gamma, ts)
    y = _cumulative(2.0 * alpha * delta, ts)
    return ChannelCoefficients(times=ts, gamma=gamma, delta=delta, x=x, y=y,
                               alpha=alpha)


def divisibility_check(coeffs: ChannelCoefficients) -> list[tuple[float, float]]:
    """Grid-resolved intervals where Delta(t) < |gamma(t)|.

    Empty means the map is divisible at the grid resolution.
    """
    bad = coeffs.delta < np.abs(coeffs.gamma)
    ts = coeffs.times
    intervals = []
    start = None
    for i, flag in enumerate(bad):
        if flag and start is None:
            start = ts[i]
        elif not flag and start is not None:
            intervals.append((float(start), float(ts[i])))
            start = None
    if start is not None:
        intervals.append((float(start), float(ts[-1])))
    return intervals


def settle_horizon(env: EnvironmentSpec, rel_tol: float = 1e-3,
                   t_start: float = 20.0, t_cap: float = 640.0,
                   n_probe: int = 400) -> float:
    """Smallest probed horizon where gamma and Delta have settled.

    Settled means both coefficients stay within rel_tol of their final value
    (relative to the maximum amplitude) over the last 10% of the window.
    Doubles the window until the criterion holds or t_cap is reached.
    """
    t_end = float(t_start)
    while True:
        table = build_coefficients(env, alpha=1.0, t_end=t_end, n_steps=n_probe)
        tail = table.times >= 0.9 * t_end
        ok = True
        for arr in (table.gamma, table.delta):
            amp = float(np.max(np.abs(arr)))
            if amp > 0.0 and float(np.max(np.abs(arr[tail] - arr[-1]))) > rel_tol * amp:
                ok = False
                break
        if ok or t_end >= t_cap:
            return t_end
        t_end *= 2.0


def write_coefficients_csv(coeffs: ChannelCoefficients, path) -> None:
    """Write the coefficient table as CSV with 12 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("t,gamma,delta,x,y\r\n")
        for row in zip(coeffs.times, coeffs.gamma, coeffs.delta, coeffs.x, coeffs.y):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\r\n")
