"""Command-line interface.

Subcommands: ``fidelity`` (two-state fidelity and Bures distance),
``coeffs`` (Ohmic coefficient tables), ``evolve`` (single-state trajectory
CSV), ``measure`` (backflow measure records) and ``reproduce`` (canned
experiment sweeps).  All physical inputs are dimensionless with
hbar = k_B = 1: frequencies and temperatures are in inverse time units.

Exit codes: 0 success, 2 argument error, 3 unsupported method/shape for
the requested closed form, 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .channels import (
    DampingChannel,
    DampingRateSpec,
    QbmChannel,
    trajectory,
    write_trajectory_csv,
)
from .measure import (
    MeasureResult,
    UnsupportedShapeError,
    closed_form_coherent_damping,
    closed_form_coherent_qbm,
    coherent_pair,
    first_order_coherent,
    first_order_coherent_thermal,
    first_order_squeezed_damping_max,
    first_order_squeezed_qbm_max,
    maximize_measure,
    measure_record,
    squeezed_pair,
)
from .experiments import fig_defaults, parse_config, run_experiment
from .spectral import EnvironmentSpec, build_coefficients, write_coefficients_csv
from .states import bures_distance, fidelity, make_gaussian

_UNITS = "dimensionless, hbar = k_B = 1; frequencies in inverse time units"


def _state_flags(parser: argparse.ArgumentParser, suffix: str):
    g = parser.add_argument_group(f"state {suffix}")
    g.add_argument(f"--n{suffix}", type=float, required=True,
                   help=f"mean thermal quanta of state {suffix} (>= 0)")
    g.add_argument(f"--r{suffix}", type=float, required=True,
                   help=f"squeezing magnitude of state {suffix} (>= 0)")
    g.add_argument(f"--phi{suffix}", type=float, required=True,
                   help=f"squeezing angle of state {suffix} (radians)")
    g.add_argument(f"--beta-mag{suffix}", type=float, required=True,
                   help=f"displacement magnitude |beta| of state {suffix}")
    g.add_argument(f"--beta-arg{suffix}", type=float, required=True,
                   help=f"displacement angle of state {suffix} (radians)")


def _state_from_flags(args, suffix: str):
    n = getattr(args, f"n{suffix}")
    r = getattr(args, f"r{suffix}")
    phi = getattr(args, f"phi{suffix}")
    mag = getattr(args, f"beta_mag{suffix}")
    arg = getattr(args, f"beta_arg{suffix}")
    if n < 0.0:
        raise ValueError(f"--n{suffix} must be >= 0")
    if r < 0.0:
        raise ValueError(f"--r{suffix} must be >= 0")
    if mag < 0.0:
        raise ValueError(f"--beta-mag{suffix} must be >= 0")
    return make_gaussian(n=n, r=r, phi=phi, beta=mag * np.exp(1j * arg))


def _env_from_args(args) -> EnvironmentSpec:
    if args.omega0 <= 0.0:
        raise ValueError("--omega0 must be > 0")
    if args.omega_c <= 0.0:
        raise ValueError("--omega-c must be > 0")
    if args.T < 0.0:
        raise ValueError("--T must be >= 0")
    return EnvironmentSpec(omega0=args.omega0, omega_c=args.omega_c,
                           temperature=args.T)


def _rate_from_args(args) -> DampingRateSpec:
    if args.rate == "constant":
        return DampingRateSpec.constant(args.gamma0)
    return DampingRateSpec.decaying_sine()


def _out_stream(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _cmd_fidelity(args) -> int:
    a = _state_from_flags(args, "1")
    b = _state_from_flags(args, "2")
    print(f"fidelity {fidelity(a, b):.12g}")
    print(f"bures_distance {bures_distance(a, b):.12g}")
    return 0


def _cmd_coeffs(args) -> int:
    env = _env_from_args(args)
    if args.alpha <= 0.0:
        raise ValueError("--alpha must be > 0")
    table = build_coefficients(env, alpha=args.alpha, t_end=args.t_end,
                               n_steps=args.n_steps)
    write_coefficients_csv(table, args.out)
    print(f"wrote {args.out} ({args.n_steps + 1} rows, "
          f"kernel error estimate {table.kernel_abserr:.3g})")
    return 0


def _cmd_evolve(args) -> int:
    state = _state_from_flags(args, "")
    if args.alpha <= 0.0:
        raise ValueError("--alpha must be > 0")
    times = np.linspace(0.0, args.t_end, args.points)
    pair_like = dict(n1=args.n, r1=args.r, phi1=args.phi,
                     beta1_mag=args.beta_mag, theta1=args.beta_arg)
    from .states import StatePairParams
    pair = StatePairParams(**pair_like)
    mode = args.mode.replace("-", "_")
    if args.channel == "damping":
        channel = DampingChannel(alpha=args.alpha, rate=_rate_from_args(args),
                                 mode=mode, t_max=args.t_end)
    else:
        env = _env_from_args(args)
        coeffs = build_coefficients(env, alpha=args.alpha, t_end=args.t_end,
                                    n_steps=args.n_steps)
        channel = QbmChannel(coeffs, mode=mode)
    traj, _ = trajectory(pair, channel, times)
    write_trajectory_csv(traj, args.out)
    print(f"wrote {args.out} ({args.points} rows)")
    return 0


def _measure_channel(args):
    if args.channel == "damping":
        return DampingChannel(alpha=args.alpha, rate=_rate_from_args(args),
                              t_max=args.t_end)
    env = _env_from_args(args)
    coeffs = build_coefficients(env, alpha=args.alpha, t_end=args.t_end,
                                n_steps=args.n_steps)
    return QbmChannel(coeffs)


def _first_order_result(args, channel) -> MeasureResult:
    family = args.family.replace("-", "_")
    if family == "coherent":
        value, argmax = first_order_coherent(channel), coherent_pair(1.0)
    elif family == "coherent_thermal":
        value = first_order_coherent_thermal(args.n_thermal, channel)
        argmax = coherent_pair(1.0)
    elif family == "squeezed":
        if channel.tag == "damping":
            value, r_star = first_order_squeezed_damping_max(channel, args.phi,
                                                             r_max=args.r_max)
        else:
            value, r_star = first_order_squeezed_qbm_max(channel.coeffs,
                                                         args.phi,
                                                         r_max=args.r_max)
        argmax = squeezed_pair(r_star, r_star, args.phi)
    else:
        raise UnsupportedShapeError(
            "first-order method supports coherent, squeezed and "
            "coherent-thermal families"
        )
    env = getattr(getattr(channel, "coeffs", None), "env", None)
    return MeasureResult(
        value=value, argmax=argmax, intervals=(), method="first_order",
        family=family, channel=channel.tag, alpha=args.alpha,
        temperature=None if env is None else env.temperature,
        omega0=None if env is None else env.omega0,
        omega_c=None if env is None else env.omega_c,
    )


def _closed_result(args, channel) -> MeasureResult:
    if args.family != "coherent":
        raise UnsupportedShapeError(
            "the closed form is defined for the coherent family; "
            "use --method numeric for other families"
        )
    if channel.tag == "damping":
        return closed_form_coherent_damping(args.alpha, channel.rate,
                                            t_max=args.t_end)
    backflows = [iv for iv in channel.exponent_backflows() if iv[2] > 0.0]
    if not backflows:
        raise UnsupportedShapeError(
            "diffusion coefficient has no negativity interval; the closed "
            "form does not apply (the measure is zero; use --method numeric)"
        )
    # evaluate on the dominant interval (largest exponent backflow)
    tp, tm, _ = max(backflows, key=lambda iv: iv[2])
    return closed_form_coherent_qbm(channel.coeffs, (tp, tm))


def _cmd_measure(args) -> int:
    if args.alpha <= 0.0:
        raise ValueError("--alpha must be > 0")
    family = args.family.replace("-", "_")
    channel = _measure_channel(args)
    if args.method == "numeric":
        result = maximize_measure(family, channel, phi=args.phi)
    elif args.method == "closed":
        result = _closed_result(args, channel)
    else:
        result = _first_order_result(args, channel)
    header, row = measure_record(result)
    stream, opened = _out_stream(args.out)
    try:
        print(header, file=stream)
        print(row, file=stream)
    finally:
        if opened:
            stream.close()
    return 0


def _cmd_reproduce(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if cfg.experiment != f"fig{args.figure}":
            raise ValueError(
                f"config is for {cfg.experiment!r} but --figure {args.figure} "
                "was requested"
            )
    else:
        cfg = fig_defaults(args.figure)
    paths = run_experiment(cfg, args.out)
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussnm",
        description="Fidelity-backflow non-Markovianity of single-mode "
                    f"Gaussian channels ({_UNITS}).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fid = sub.add_parser("fidelity",
                           help="fidelity and Bures distance of two states")
    _state_flags(p_fid, "1")
    _state_flags(p_fid, "2")
    p_fid.set_defaults(fn=_cmd_fidelity)

    p_coef = sub.add_parser("coeffs", help="tabulate Ohmic bath coefficients")
    p_coef.add_argument("--omega0", type=float, required=True,
                        help="system frequency (inverse time units)")
    p_coef.add_argument("--omega-c", type=float, required=True,
                        help="cutoff frequency (inverse time units)")
    p_coef.add_argument("--T", type=float, default=0.0,
                        help="temperature k_B T (inverse time units)")
    p_coef.add_argument("--alpha", type=float, required=True,
                        help="coupling constant (dimensionless)")
    p_coef.add_argument("--t-end", type=float, default=40.0,
                        help="final time of the table")
    p_coef.add_argument("--n-steps", type=int, default=2000,
                        help="number of uniform grid intervals")
    p_coef.add_argument("--out", required=True, help="output CSV path")
    p_coef.set_defaults(fn=_cmd_coeffs)

    p_ev = sub.add_parser("evolve", help="evolve one state, CSV trajectory")
    _state_flags(p_ev, "")
    p_ev.add_argument("--channel", choices=("damping", "qbm"), required=True)
    p_ev.add_argument("--mode", choices=("exact", "first-order"),
                      default="exact")
    p_ev.add_argument("--alpha", type=float, required=True,
                      help="coupling constant")
    p_ev.add_argument("--rate", choices=("decaying-sine", "constant"),
                      default="decaying-sine",
                      help="damping rate shape (damping channel)")
    p_ev.add_argument("--gamma0", type=float, default=0.5,
                      help="constant rate value (rate=constant)")
    p_ev.add_argument("--omega0", type=float, default=1.0,
                      help="system frequency (qbm)")
    p_ev.add_argument("--omega-c", type=float, default=0.2,
                      help="cutoff frequency (qbm)")
    p_ev.add_argument("--T", type=float, default=0.0,
                      help="temperature k_B T (qbm)")
    p_ev.add_argument("--t-end", type=float, default=25.0)
    p_ev.add_argument("--points", type=int, default=501,
                      help="trajectory grid points")
    p_ev.add_argument("--n-steps", type=int, default=2000,
                      help="coefficient grid intervals (qbm)")
    p_ev.add_argument("--out", required=True, help="output CSV path")
    p_ev.set_defaults(fn=_cmd_evolve)

    p_me = sub.add_parser("measure", help="backflow non-Markovianity measure")
    p_me.add_argument("--channel", choices=("damping", "qbm"), required=True)
    p_me.add_argument("--family",
                      choices=("coherent", "squeezed", "coherent-thermal",
                               "general-pure"), default="coherent")
    p_me.add_argument("--method", choices=("numeric", "closed", "first-order"),
                      default="numeric")
    p_me.add_argument("--alpha", type=float, required=True,
                      help="coupling constant")
    p_me.add_argument("--rate", choices=("decaying-sine", "constant"),
                      default="decaying-sine",
                      help="damping rate shape (damping channel)")
    p_me.add_argument("--gamma0", type=float, default=0.5,
                      help="constant rate value (rate=constant)")
    p_me.add_argument("--omega0", type=float, default=1.0,
                      help="system frequency (qbm)")
    p_me.add_argument("--omega-c", type=float, default=0.2,
                      help="cutoff frequency (qbm)")
    p_me.add_argument("--T", type=float, default=0.2,
                      help="temperature k_B T (qbm)")
    p_me.add_argument("--phi", type=float, default=0.1,
                      help="relative squeezing angle (squeezed family)")
    p_me.add_argument("--n-thermal", type=float, default=0.0,
                      help="thermal occupation (coherent-thermal family)")
    p_me.add_argument("--r-max", type=float, default=5.0,
                      help="squeezing bound of the search box")
    p_me.add_argument("--t-end", type=float, default=8.0 * math.pi,
                      help="scan horizon / coefficient table end")
    p_me.add_argument("--n-steps", type=int, default=2000,
                      help="coefficient grid intervals (qbm)")
    p_me.add_argument("--out", default=None,
                      help="record destination (default stdout)")
    p_me.set_defaults(fn=_cmd_measure)

    p_rep = sub.add_parser("reproduce", help="run a canned experiment sweep")
    p_rep.add_argument("--figure", type=int, choices=(1, 2, 3, 4, 5),
                       required=True)
    p_rep.add_argument("--config", default=None,
                       help="config file overriding the defaults (schema=1)")
    p_rep.add_argument("--out", default="out", help="output directory")
    p_rep.set_defaults(fn=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnsupportedShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, IOError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
