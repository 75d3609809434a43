"""Command-line front end.

Settings resolve as: command defaults < preset < ``--config`` JSON file <
explicit flags.  Every CSV echoes the resolved settings as ``#`` lines.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from .dephasing import COLLAPSE_THRESHOLD, decoherence_factor
from .dissipative import DissipativeParams, dissipative_trajectory, read_ensemble
from .errors import CritprobeError
from .geometry import geometric_phase
from .spectrum import ChainParams, build_mode_table
from .sweep import (
    Grid,
    SweepConfig,
    header_lines,
    max_slope,
    run_sweep,
    scaling_table,
    sweep_columns,
    sweep_values,
    write_csv,
)
from .trajectory import DEFAULT_CAP, QubitDensity, unwrap_azimuth

EXIT_OK, EXIT_CONFIG, EXIT_STRICT, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("critprobe")

DEFAULTS = {
    "N": 400, "lambda": 0.0, "gamma": 1.0, "g": 0.1, "mu": 0.0,
    "theta_q": math.pi / 4, "T": None, "steps": 16, "max_steps": DEFAULT_CAP,
    "grid": None, "gamma_list": None, "out": None, "jobs": 1, "strict": False,
    "model": "dephasing", "delta": 1.0, "gz": 0.1, "gy": 0.0, "excited_weight": 0.5,
    "vacuum_phase": False, "timing": False, "verify": "off",
    "N_list": "128,256,512,1024", "ensemble": None,
    "level": "fast", "tol_scale": 1.0, "seed": 2024,
}

COMMAND_DEFAULTS = {
    "scaling": {"lambda": 1.0, "gamma_list": "0.2,0.4,0.8"},
}

# N = 1244, four anisotropies, 300 fields across both critical points
PRESETS = {
    "wide-sweep": {
        "N": 1244, "g": 0.1, "gamma_list": "0.2,0.5,0.8,1", "grid": "lambda:-4:4:300",
        "T": 10.0, "theta_q": math.pi / 4, "max_steps": 4096,
    },
}


class ConfigError(CritprobeError):
    pass


def _floats(text):
    if text is None or isinstance(text, (list, tuple)):
        return None if text is None else tuple(float(x) for x in text)
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _add_chain_flags(p):
    p.add_argument("--N", type=int)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--theta-q", dest="theta_q", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--steps", type=int, help="initial time steps (>= 16)")
    p.add_argument("--max-steps", dest="max_steps", type=int, help="time grid cap")
    p.add_argument("--vacuum-phase", dest="vacuum_phase", action="store_const", const=True,
                   help="include the ground-energy phase in F(t)")


def _add_common(p):
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--config", help="JSON file of settings; flags override it")
    p.add_argument("--strict", action="store_const", const=True,
                   help="exit 3 if any time grid hits its cap")
    p.add_argument("--jobs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="critprobe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-sweep", help="geometric phase over a parameter grid")
    _add_chain_flags(p)
    _add_common(p)
    p.add_argument("--grid", help="var:min:max:count, var in lambda,gamma,g,N,T")
    p.add_argument("--gamma-list", dest="gamma_list")
    p.add_argument("--model", choices=("dephasing", "dissipative"))
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--delta", type=float)
    p.add_argument("--gz", type=float)
    p.add_argument("--gy", type=float)
    p.add_argument("--excited-weight", dest="excited_weight", type=float)
    p.add_argument("--timing", action="store_const", const=True,
                   help="add a wall_time_ms column (output no longer byte-stable)")
    p.add_argument("--verify", choices=("off", "fast", "full"),
                   help="run the oracle suite before sweeping")

    p = sub.add_parser("echo-trace", help="F(t) on a uniform time grid")
    _add_chain_flags(p)
    _add_common(p)

    p = sub.add_parser("scaling", help="angle-derivative sums S_N versus N and gamma")
    _add_common(p)
    p.add_argument("--N-list", dest="N_list")
    p.add_argument("--gamma-list", dest="gamma_list")
    p.add_argument("--lambda", dest="lambda", type=float)

    p = sub.add_parser("dissipative", help="qubit trajectory for a chain-eigenstate ensemble")
    _add_common(p)
    p.add_argument("--ensemble", help="file of 'E_n p_n' lines")
    p.add_argument("--delta", type=float)
    p.add_argument("--gz", type=float)
    p.add_argument("--gy", type=float)
    p.add_argument("--theta-q", dest="theta_q", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--max-steps", dest="max_steps", type=int)

    p = sub.add_parser("verify", help="oracle agreement and invariant suite")
    p.add_argument("--level", choices=("fast", "full"))
    p.add_argument("--tol-scale", dest="tol_scale", type=float,
                   help="multiply every tolerance (negative controls use tiny values)")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    settings.update(COMMAND_DEFAULTS.get(args.command, {}))
    preset = getattr(args, "preset", None)
    if preset:
        settings.update(PRESETS[preset])
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            settings[key] = value
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            settings[key] = value
    return settings


def _chain(s) -> ChainParams:
    return ChainParams(int(s["N"]), float(s["lambda"]), float(s["gamma"]), float(s["g"]), float(s["mu"]))


def _require_T(s) -> float:
    if s["T"] is None:
        raise ConfigError("--T is required")
    return float(s["T"])


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)


def cmd_phase_sweep(s) -> int:
    if s["grid"] is None:
        raise ConfigError("--grid is required")
    if s["verify"] != "off":
        code = cmd_verify({**s, "level": s["verify"]}, stream=sys.stderr)
        if code:
            return code
    config = SweepConfig(
        T=_require_T(s),
        grid=Grid.parse(s["grid"]),
        model=s["model"],
        chain=_chain(s),
        theta_q=float(s["theta_q"]),
        gamma_list=_floats(s["gamma_list"]),
        steps=int(s["steps"]),
        cap=int(s["max_steps"]),
        jobs=int(s["jobs"]),
        strict=bool(s["strict"]),
        vacuum_phase=bool(s["vacuum_phase"]),
        dissipative=DissipativeParams(float(s["delta"]), float(s["gz"]), float(s["gy"])),
        excited_weight=float(s["excited_weight"]),
        output_path=s["out"],
        verify_level=s["verify"],
        timing=bool(s["timing"]),
    )
    rows = run_sweep(config)
    text = write_csv(
        config.output_path,
        header_lines("phase-sweep", config.resolved()),
        sweep_columns(config),
        [sweep_values(config, r) for r in rows],
    )
    _emit(text, config.output_path)
    for gamma, (where, slope) in max_slope(rows).items():
        print(
            f"summary: gamma={gamma:g} max |dPhi_g/d{config.grid.var}| = {slope:.6g} "
            f"at {config.grid.var} = {where:.6g}",
            file=sys.stderr if config.output_path is None else sys.stdout,
        )
    flagged = sum(r.cap_reached for r in rows)
    if flagged:
        log.warning("%d of %d points hit the time-grid cap", flagged, len(rows))
    return EXIT_STRICT if config.strict and flagged else EXIT_OK


def cmd_echo_trace(s) -> int:
    chain = _chain(s)
    T = _require_T(s)
    steps = int(s["steps"])
    table = build_mode_table(chain)
    times = np.linspace(0.0, T, steps + 1)
    f = decoherence_factor(table, times, vacuum_phase=bool(s["vacuum_phase"]), allow_degenerate=True)
    c, sn = math.cos(float(s["theta_q"])), math.sin(float(s["theta_q"]))
    rho12 = c * sn * np.exp(-1j * chain.mu * times) * f
    reliable = (np.abs(f) >= COLLAPSE_THRESHOLD) & (abs(c * sn) > 0)
    phi = unwrap_azimuth(rho12, reliable)
    settings = {
        "N": chain.N, "lambda": chain.lam, "gamma": chain.gamma, "g": chain.g, "mu": chain.mu,
        "theta_q": float(s["theta_q"]), "T": T, "steps": steps,
        "vacuum_phase": bool(s["vacuum_phase"]), "degenerate": table.any_degenerate,
    }
    rows = zip(times, f.real, f.imag, np.abs(f), phi)
    text = write_csv(s["out"], header_lines("echo-trace", settings),
                     ["t", "re_F", "im_F", "abs_F", "phi_unwrapped"], rows)
    _emit(text, s["out"])
    return EXIT_OK


def cmd_scaling(s) -> int:
    N_list = [int(x) for x in _floats(s["N_list"])]
    gamma_list = _floats(s["gamma_list"])
    lam = float(s["lambda"])
    rows, slopes_N, slopes_gamma = scaling_table(N_list, gamma_list, lam)
    settings = {"lambda": lam, "N_list": ",".join(map(str, N_list)),
                "gamma_list": ",".join(map(repr, gamma_list))}
    for gamma, slope in slopes_N.items():
        settings[f"slope_N[gamma={gamma!r}]"] = slope
    for N, slope in slopes_gamma.items():
        settings[f"slope_gamma[N={N}]"] = slope
    text = write_csv(s["out"], header_lines("scaling", settings),
                     ["N", "gamma", "S_lambda", "S_gamma"], rows)
    _emit(text, s["out"])
    stream = sys.stderr if s["out"] is None else sys.stdout
    for gamma, slope in slopes_N.items():
        print(f"summary: gamma={gamma:g} log-log slope of S_lambda in N = {slope:.4f}", file=stream)
    for N, slope in slopes_gamma.items():
        print(f"summary: N={N} log-log slope of S_lambda in gamma = {slope:.4f}", file=stream)
    return EXIT_OK


def cmd_dissipative(s) -> int:
    if s["ensemble"] is None:
        raise ConfigError("--ensemble is required")
    ens = read_ensemble(s["ensemble"])
    p = DissipativeParams(float(s["delta"]), float(s["gz"]), float(s["gy"]))
    T = _require_T(s)
    rho0 = QubitDensity.pure(float(s["theta_q"]))
    traj = dissipative_trajectory(ens, rho0, p, T, int(s["steps"]), cap=int(s["max_steps"]))
    res = geometric_phase(traj)
    settings = {
        "ensemble": s["ensemble"], "levels": len(ens.energies), "delta": p.delta, "gz": p.g_z,
        "gy": p.g_y, "theta_q": float(s["theta_q"]), "T": T, "steps": int(s["steps"]),
        "max_steps": int(s["max_steps"]), "phi_g": res.phi_g, "integral_term": res.integral_term,
        "overlap_arg": res.overlap_arg, "collapse_flag": res.collapse_flag,
        "cap_reached": res.cap_reached, "steps_used": res.steps_used,
    }
    trace = traj.rho11 + traj.rho22
    rows = zip(traj.times, traj.rho11, traj.rho22, traj.rho12.real, traj.rho12.imag,
               trace, traj.purity, traj.azimuth_unwrapped)
    text = write_csv(s["out"], header_lines("dissipative", settings),
                     ["t", "rho11", "rho22", "re_rho12", "im_rho12", "trace", "purity",
                      "phi_unwrapped"], rows)
    _emit(text, s["out"])
    print(f"summary: phi_g = {res.phi_g:.12g}", file=sys.stderr if s["out"] is None else sys.stdout)
    return EXIT_STRICT if s["strict"] and res.cap_reached else EXIT_OK


def cmd_verify(s, stream=None) -> int:
    from .verify import run_checks

    stream = stream or sys.stdout
    results = run_checks(s["level"], float(s["tol_scale"]), int(s["seed"]))
    for r in results:
        print(r.line(), file=stream)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=stream)
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "phase-sweep": cmd_phase_sweep,
    "echo-trace": cmd_echo_trace,
    "scaling": cmd_scaling,
    "dissipative": cmd_dissipative,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = resolve(args)
        return COMMANDS[args.command](settings)
    except (CritprobeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
