"""Qubit coupled through an operator that commutes with the chain Hamiltonian.

With ``H = Delta X + (g_z Z + g_y Y) (x) H_m`` every chain eigenstate
``|E_n>`` is conserved and the qubit sees

    H_n = E_n I + Delta X + g E_n (cos 2m Z + sin 2m Y),   cos 2m = g_z / g

so that ``rho(t) = sum_n p_n U_n rho(0) U_n^+`` with ``U_n = exp(-i H_n t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InvalidParams
from .geometry import phase_estimate
from .spectrum import ChainParams, excitation_energy
from .trajectory import DEFAULT_CAP, QubitDensity, Samples, Trajectory, adaptive_samples

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

PLUS_X = QubitDensity(0.5, 0.5, 0.5 + 0j)


@dataclass(frozen=True)
class DissipativeParams:
    delta: float
    g_z: float = 0.0
    g_y: float = 0.0

    def __post_init__(self):
        for name in ("delta", "g_z", "g_y"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def g(self) -> float:
        return math.hypot(self.g_z, self.g_y)

    @property
    def gamma_mix(self) -> float:
        return 0.5 * math.atan2(self.g_y, self.g_z)


@dataclass(frozen=True, eq=False)
class SpectrumEnsemble:
    energies: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.energies, dtype=float))
        p = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if e.shape != p.shape or e.ndim != 1 or e.size == 0:
            raise InvalidParams("energies and weights must be equal-length 1-d arrays")
        if np.any(p < 0):
            raise InvalidParams("weights must be non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvalidParams(f"weights sum to {p.sum()!r}, expected 1")
        if e.size > 1 and np.min(np.diff(np.sort(e))) <= 1e-12:
            raise InvalidParams("energies must be nondegenerate")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "weights", p)

    @classmethod
    def normalized(cls, energies, weights) -> "SpectrumEnsemble":
        p = np.asarray(weights, dtype=float)
        return cls(energies, p / p.sum())

    @property
    def levels(self) -> list[tuple[float, float]]:
        return list(zip(self.energies.tolist(), self.weights.tolist()))


def qubit_propagator(E_n: float, p: DissipativeParams, t: float) -> np.ndarray:
    """exp(-i H_n t) from the level's Rabi frequency and tilt angle."""
    omega = math.sqrt((p.g * E_n) ** 2 + p.delta**2)
    phase = complex(np.exp(-1j * E_n * t))
    if omega == 0.0:
        return phase * np.eye(2, dtype=complex)
    cos_th, sin_th = p.delta / omega, p.g * E_n / omega
    two_m = 2.0 * p.gamma_mix
    axis = cos_th * _SX + sin_th * (math.cos(two_m) * _SZ + math.sin(two_m) * _SY)
    return phase * (math.cos(omega * t) * np.eye(2) - 1j * math.sin(omega * t) * axis)


def level_hamiltonian(E_n: float, p: DissipativeParams) -> np.ndarray:
    return E_n * np.eye(2) + p.delta * _SX + E_n * (p.g_z * _SZ + p.g_y * _SY)


def _as_matrix(rho0) -> np.ndarray:
    if isinstance(rho0, QubitDensity):
        return rho0.matrix()
    return np.asarray(rho0, dtype=complex)


def _mixed(ens: SpectrumEnsemble, rho0, p: DissipativeParams, times):
    return kernels.mixed_evolution(
        ens.energies, ens.weights, p.delta, p.g_z, p.g_y, _as_matrix(rho0),
        np.ascontiguousarray(times, dtype=float),
    )


def evolve_mixed(ens: SpectrumEnsemble, rho0, p: DissipativeParams, t: float) -> QubitDensity:
    r11, r22, r12 = _mixed(ens, rho0, p, np.array([float(t)]))
    return QubitDensity(float(r11[0]), float(r22[0]), complex(r12[0]))


def _sampler(ens, rho0, p):
    def sample(times):
        r11, r22, r12 = _mixed(ens, rho0, p, times)
        coh = np.abs(r12)
        purity = r11**2 + r22**2 + 2 * coh**2
        return Samples(r11, r22, r12, 2 * purity - 1, coh > 1e-12)

    return sample


def dissipative_trajectory(
    ens: SpectrumEnsemble,
    rho0=PLUS_X,
    p: DissipativeParams = DissipativeParams(1.0),
    T: float = 10.0,
    steps: int = 16,
    *,
    cap: int = DEFAULT_CAP,
) -> Trajectory:
    """Adaptive trajectory of the mixed qubit state.

    ``echo_modulus`` carries the purity proxy ``2 Tr(rho^2) - 1``.
    ``collapse_flag`` marks samples where the state is (numerically)
    maximally mixed and its eigenbasis is undefined.
    """
    omega_max = float(np.max(np.sqrt((p.g * ens.energies) ** 2 + p.delta**2)))
    min_steps = int(math.ceil(8.0 * omega_max * T / math.pi))
    times, data, phi, cap_reached = adaptive_samples(
        _sampler(ens, rho0, p),
        T,
        initial_steps=steps,
        min_steps=min_steps,
        cap=cap,
        estimate=phase_estimate("all"),
    )
    radius = np.hypot(np.abs(data.rho12), 0.5 * (data.rho11 - data.rho22))
    return Trajectory(
        params=p,
        theta_q=None,
        times=times,
        rho11=data.rho11,
        rho22=data.rho22,
        rho12=data.rho12,
        echo_modulus=data.echo,
        azimuth_unwrapped=phi,
        collapse_flag=bool(np.any(radius < 1e-6)),
        cap_reached=cap_reached,
        kind="dissipative",
        meta={"ensemble": ens.levels},
    )


def ensemble_from_chain(params: ChainParams, excitations, weights) -> SpectrumEnsemble:
    """Ensemble of chain eigenstates ``sum_k omega_k (n_k - 1/2)``.

    ``excitations`` is a list of occupied-mode sets (``()`` is the ground
    state); ``weights`` are renormalised to sum to one.
    """
    energies = [excitation_energy(params, occ) for occ in excitations]
    return SpectrumEnsemble.normalized(energies, weights)


def read_ensemble(path) -> SpectrumEnsemble:
    """Parse ``E_n p_n`` lines; ``#`` starts a comment."""
    energies, weights = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise InvalidParams(f"{path}:{lineno}: expected 'E_n p_n', got {line!r}")
        energies.append(float(fields[0]))
        weights.append(float(fields[1]))
    if not energies:
        raise InvalidParams(f"{path}: no levels")
    total = sum(weights)
    if abs(total - 1.0) > 1e-9:
        raise InvalidParams(f"{path}: weights sum to {total}, expected 1")
    return SpectrumEnsemble.normalized(energies, weights)


def write_ensemble(path, ens: SpectrumEnsemble) -> None:
    lines = ["# E_n p_n"] + [f"{e:.17g} {w:.17g}" for e, w in ens.levels]
    Path(path).write_text("\n".join(lines) + "\n")
