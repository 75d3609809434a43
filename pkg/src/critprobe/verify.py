"""Oracle agreement and invariant checks behind ``critprobe verify``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .dephasing import build_trajectory, decoherence_factor, same_branch_factor
from .dissipative import (
    DissipativeParams,
    SpectrumEnsemble,
    dissipative_trajectory,
    level_hamiltonian,
    qubit_propagator,
)
from .geometry import berry_phase_reference, gauge_check, geometric_phase, precession_trajectory
from .spectrum import ChainParams, build_mode_table
from .trajectory import QubitDensity


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(self.error < self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: max error {self.error:.3e} (tol {self.tol:.1e}, {self.seconds:.2f} s)"


def _random_chain(rng, N_choices):
    return ChainParams(
        int(rng.choice(N_choices)), rng.uniform(-4, 4), rng.uniform(0, 1), rng.uniform(0, 0.3)
    )


def check_pair_oracle(rng, draws, N_choices=(64, 200, 400)):
    err = 0.0
    for _ in range(draws):
        p = _random_chain(rng, N_choices)
        t = rng.uniform(0, 20)
        closed = decoherence_factor(build_mode_table(p), t)
        err = max(err, abs(closed - oracle.pair_evolution_factor(p, t)))
    return err


def check_fock_oracle(rng, draws):
    err = 0.0
    for _ in range(draws):
        p = _random_chain(rng, (8, 10, 12))
        t = rng.uniform(0, 20)
        err = max(err, abs(oracle.pair_evolution_factor(p, t) - oracle.fock_evolution_factor(p, t)))
    return err


def check_identities(rng, draws):
    err = 0.0
    for _ in range(draws):
        p = _random_chain(rng, (16, 64, 200))
        table = build_mode_table(p)
        t = rng.uniform(0, 20, size=8)
        err = max(err, abs(decoherence_factor(table, 0.0) - 1))
        err = max(err, float(np.max(np.abs(same_branch_factor(table, t) - 1))))
        free = build_mode_table(p.replace(g=0.0))
        err = max(err, float(np.max(np.abs(decoherence_factor(free, t) - 1))))
    return err


def check_echo_bound(rng, draws):
    excess = 0.0
    for _ in range(draws):
        p = _random_chain(rng, (64, 200))
        f = decoherence_factor(build_mode_table(p), rng.uniform(0, 20))
        excess = max(excess, abs(f) - 1.0)
    return max(excess, 0.0)


def _random_dissipative(rng):
    return DissipativeParams(rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-1, 1))


def check_propagator(rng, draws):
    err = 0.0
    for _ in range(draws):
        p = _random_dissipative(rng)
        E, t = rng.uniform(-3, 3), rng.uniform(0, 10)
        ref = oracle.expm_2x2(level_hamiltonian(E, p), t)
        err = max(err, float(np.max(np.abs(qubit_propagator(E, p, t) - ref))))
    return err


def check_berry(_rng, _draws):
    err = 0.0
    for alpha0 in (math.pi / 6, math.pi / 3, math.pi / 2):
        traj = precession_trajectory(alpha0, 1.0, 2 * math.pi, 4096)
        diff = geometric_phase(traj).phi_g - berry_phase_reference(alpha0)
        err = max(err, abs(math.remainder(diff, 2 * math.pi)))
    return err


def check_gauge(_rng, _draws):
    chis = (lambda t: 2.3 * t, lambda t: np.sin(5 * t), lambda t: 0.4 * t**2 - t)
    trajs = [
        build_trajectory(ChainParams(200, 0.93, 1.0, 0.1), math.pi / 5, 10.0),
        precession_trajectory(math.pi / 3, 1.0, 2 * math.pi, 2048),
        dissipative_trajectory(
            SpectrumEnsemble([-1.0, 0.4, 1.3], [0.5, 0.3, 0.2]),
            QubitDensity.pure(0.4), DissipativeParams(0.7, 0.3, 0.2), 6.0,
        ),
    ]
    return max(gauge_check(tr, chi) for tr in trajs for chi in chis)


FAST = [
    ("pair oracle vs closed form (50 draws)", check_pair_oracle, 50, 1e-9),
    ("dephasing identities", check_identities, 20, 1e-12),
    ("echo modulus bound", check_echo_bound, 50, 1e-12),
    ("dissipative propagator vs expm", check_propagator, 200, 1e-10),
    ("Berry phase reduction", check_berry, 0, 1e-3),
]
FULL = [
    ("pair oracle vs closed form (100 draws)", check_pair_oracle, 100, 1e-9),
    ("Fock oracle vs pair product (N <= 12)", check_fock_oracle, 20, 1e-10),
    ("dephasing identities", check_identities, 100, 1e-12),
    ("echo modulus bound", check_echo_bound, 300, 1e-12),
    ("dissipative propagator vs expm", check_propagator, 1000, 1e-10),
    ("Berry phase reduction", check_berry, 0, 1e-3),
    ("gauge invariance", check_gauge, 0, 1e-8),
]


def run_checks(level: str = "fast", tol_scale: float = 1.0, seed: int = 2024) -> list[CheckResult]:
    suite = {"fast": FAST, "full": FULL}[level]
    rng = np.random.default_rng(seed)
    results = []
    for name, fn, draws, tol in suite:
        start = time.perf_counter()
        err = fn(rng, draws)
        results.append(CheckResult(name, float(err), tol * tol_scale, time.perf_counter() - start))
    return results
