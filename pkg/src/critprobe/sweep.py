"""Parameter sweeps and deterministic CSV output."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import __version__
from .dephasing import build_trajectory
from .dissipative import DissipativeParams, dissipative_trajectory, ensemble_from_chain
from .errors import InvalidParams
from .geometry import geometric_phase
from .spectrum import ChainParams, scaling_sum
from .trajectory import DEFAULT_CAP, QubitDensity, _wrap

CSV_MAGIC = "# critprobe v1"
SWEEP_VARS = ("lambda", "gamma", "g", "N", "T")
_PARAM_FIELD = {"lambda": "lam", "gamma": "gamma", "g": "g", "N": "N"}


@dataclass(frozen=True)
class Grid:
    var: str
    lo: float
    hi: float
    count: int

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParams(f"grid must be var:min:max:count, got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise InvalidParams(f"bad grid {text!r}: {exc}") from None

    def __post_init__(self):
        if self.var not in SWEEP_VARS:
            raise InvalidParams(f"grid variable must be one of {SWEEP_VARS}, got {self.var!r}")
        if self.count < 2:
            raise InvalidParams("grid count must be >= 2")
        if not self.lo < self.hi:
            raise InvalidParams("grid min must be < max")

    def values(self) -> list[float]:
        step = (self.hi - self.lo) / (self.count - 1)
        # 12 significant digits so overlapping sub-ranges hit identical floats
        vals = [float(f"{self.lo + i * step:.12g}") for i in range(self.count)]
        if self.var == "N":
            vals = [float(2 * round(v / 2)) for v in vals]
            if len(set(vals)) != len(vals) or min(vals) < 4:
                raise InvalidParams("N grid must give distinct even values >= 4")
        return vals

    def __str__(self):
        return f"{self.var}:{self.lo!r}:{self.hi!r}:{self.count}"


@dataclass(frozen=True)
class SweepConfig:
    T: float
    grid: Grid
    model: str = "dephasing"
    chain: ChainParams = field(default_factory=lambda: ChainParams(400, 0.0, 1.0, 0.1))
    theta_q: float = math.pi / 4
    gamma_list: tuple[float, ...] | None = None
    steps: int = 16
    cap: int = DEFAULT_CAP
    jobs: int = 1
    strict: bool = False
    vacuum_phase: bool = False
    dissipative: DissipativeParams = field(default_factory=lambda: DissipativeParams(1.0, 0.1, 0.0))
    excited_weight: float = 0.5
    output_path: str | None = None
    verify_level: str = "off"
    timing: bool = False

    def __post_init__(self):
        if self.model not in ("dephasing", "dissipative"):
            raise InvalidParams(f"model must be dephasing or dissipative, got {self.model!r}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise InvalidParams(f"T must be positive, got {self.T}")
        if self.steps < 16:
            raise InvalidParams("steps must be >= 16")
        if self.cap < self.steps:
            raise InvalidParams("max-steps must be >= steps")
        if self.jobs < 1:
            raise InvalidParams("jobs must be >= 1")
        if self.verify_level not in ("off", "fast", "full"):
            raise InvalidParams("verify level must be off, fast or full")
        if not 0.0 <= self.excited_weight < 1.0:
            raise InvalidParams("excited weight must lie in [0, 1)")
        if self.gamma_list is not None and self.grid.var == "gamma":
            raise InvalidParams("cannot combine a gamma grid with --gamma-list")

    def resolved(self) -> dict:
        """Flat, ordered view of every setting, as echoed into CSV headers."""
        out = {
            "model": self.model,
            "N": self.chain.N,
            "lambda": self.chain.lam,
            "gamma": self.chain.gamma,
            "g": self.chain.g,
            "mu": self.chain.mu,
            "theta_q": self.theta_q,
            "T": self.T,
            "grid": str(self.grid),
            "gamma_list": "" if self.gamma_list is None else ",".join(map(repr, self.gamma_list)),
            "steps": self.steps,
            "max_steps": self.cap,
            "strict": self.strict,
            "vacuum_phase": self.vacuum_phase,
        }
        if self.model == "dissipative":
            out.update(
                delta=self.dissipative.delta,
                gz=self.dissipative.g_z,
                gy=self.dissipative.g_y,
                excited_weight=self.excited_weight,
            )
        return out


@dataclass(frozen=True)
class SweepRow:
    value: float
    gamma: float
    phi_g: float
    integral_term: float
    overlap_arg: float
    collapse_flag: bool
    cap_reached: bool
    degenerate: bool
    min_echo: float
    steps_used: int
    wall_time_ms: float = 0.0


def _point_settings(config: SweepConfig, value: float, gamma: float | None):
    chain, T = config.chain, config.T
    if config.grid.var == "T":
        T = value
    else:
        field_name = _PARAM_FIELD[config.grid.var]
        chain = chain.replace(**{field_name: int(value) if field_name == "N" else value})
    if gamma is not None:
        chain = chain.replace(gamma=gamma)
    return chain, T


def evaluate_point(config: SweepConfig, value: float, gamma: float | None = None) -> SweepRow:
    start = time.perf_counter()
    chain, T = _point_settings(config, value, gamma)
    if config.model == "dephasing":
        traj = build_trajectory(
            chain, config.theta_q, T, config.steps, cap=config.cap,
            vacuum_phase=config.vacuum_phase, allow_degenerate=True,
        )
        degenerate = bool(traj.meta["degenerate"])
    else:
        w = config.excited_weight
        ens = ensemble_from_chain(chain, [(), (1, -1)], [1.0 - w, w])
        traj = dissipative_trajectory(
            ens, QubitDensity.pure(config.theta_q), config.dissipative, T,
            config.steps, cap=config.cap,
        )
        degenerate = False
    res = geometric_phase(traj)
    return SweepRow(
        value=value,
        gamma=chain.gamma,
        phi_g=res.phi_g,
        integral_term=res.integral_term,
        overlap_arg=res.overlap_arg,
        collapse_flag=res.collapse_flag,
        cap_reached=res.cap_reached,
        degenerate=degenerate,
        min_echo=float(np.min(traj.echo_modulus)),
        steps_used=res.steps_used,
        wall_time_ms=1e3 * (time.perf_counter() - start),
    )


def _evaluate_task(args):
    return evaluate_point(*args)


def sweep_tasks(config: SweepConfig):
    gammas = config.gamma_list if config.gamma_list is not None else (None,)
    return [(config, v, g) for g in gammas for v in config.grid.values()]


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate every grid point; row order never depends on ``jobs``."""
    tasks = sweep_tasks(config)
    if config.jobs == 1 or len(tasks) == 1:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * config.jobs))))


def max_slope(rows: Iterable[SweepRow]) -> dict[float, tuple[float, float]]:
    """Per gamma: ``(location, |dPhi/dx|)`` of the steepest grid interval.

    Phase differences are taken mod 2 pi; the location is the interval
    midpoint.
    """
    by_gamma: dict[float, list[SweepRow]] = {}
    for row in rows:
        by_gamma.setdefault(row.gamma, []).append(row)
    out = {}
    for gamma, series in by_gamma.items():
        best = (math.nan, -1.0)
        for r0, r1 in zip(series, series[1:]):
            if math.isnan(r0.phi_g) or math.isnan(r1.phi_g):
                continue
            slope = abs(_wrap(r1.phi_g - r0.phi_g)) / (r1.value - r0.value)
            if slope > best[1]:
                best = (0.5 * (r0.value + r1.value), slope)
        out[gamma] = best
    return out


def fmt(x) -> str:
    """Fixed 17-significant-digit formatting for byte-stable CSVs."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16e}"


def header_lines(command: str, settings: dict) -> list[str]:
    lines = [CSV_MAGIC, f"# version={__version__}", f"# command={command}"]
    for key, value in settings.items():
        if isinstance(value, float):
            value = fmt(value)
        lines.append(f"# {key}={value}")
    return lines


def write_csv(path, header: list[str], columns: list[str], rows: Iterable[Iterable]) -> str:
    body = header + [",".join(columns)] + [",".join(fmt(x) for x in row) for row in rows]
    text = "\n".join(body) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def sweep_columns(config: SweepConfig) -> list[str]:
    cols = [config.grid.var, "gamma", "phi_g", "integral_term", "overlap_arg",
            "collapse_flag", "cap_reached", "degenerate", "min_echo", "steps_used"]
    if config.timing:
        cols.append("wall_time_ms")
    return cols


def sweep_values(config: SweepConfig, row: SweepRow) -> list:
    value = int(row.value) if config.grid.var == "N" else row.value
    vals = [value, row.gamma, row.phi_g, row.integral_term, row.overlap_arg,
            row.collapse_flag, row.cap_reached, row.degenerate, row.min_echo, row.steps_used]
    if config.timing:
        vals.append(row.wall_time_ms)
    return vals


def scaling_table(N_list, gamma_list, lam: float):
    """Rows ``(N, gamma, S_lambda, S_gamma)`` and log-log fitted slopes."""
    rows = []
    for gamma in gamma_list:
        for N in N_list:
            p = ChainParams(int(N), lam, gamma)
            rows.append((int(N), float(gamma), scaling_sum(p, "lambda"), scaling_sum(p, "gamma")))
    slopes_N, slopes_gamma = {}, {}
    if len(N_list) >= 2:
        for gamma in gamma_list:
            s = [r[2] for r in rows if r[1] == gamma]
            slopes_N[float(gamma)] = loglog_slope(N_list, s)
    if len(gamma_list) >= 2:
        for N in N_list:
            s = [r[2] for r in rows if r[0] == N]
            slopes_gamma[int(N)] = loglog_slope(gamma_list, s)
    return rows, slopes_N, slopes_gamma


def loglog_slope(x, y) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
