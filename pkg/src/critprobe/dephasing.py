"""Qubit dephasing by the XY chain.

The qubit couples through ``4 g s^z sum_l s^z_l``, which commutes with the
qubit Hamiltonian: populations stay fixed and the coherence picks up the
decoherence factor

    F(t) = <G| exp(i H_down t) exp(-i H_up t) |G>

where ``|G>`` is the chain ground state at field ``lam`` and ``H_up``,
``H_down`` are the chain Hamiltonians at ``lam + g`` and ``lam - g``.  Each
momentum pair contributes

    1 - (1 - e^{-i w_up t}) sin^2((th - th_up)/2)
      - (1 - e^{+i w_dn t}) sin^2((th - th_dn)/2)
      + (1 - e^{-i w_up t})(1 - e^{+i w_dn t})
        sin((th - th_up)/2) sin((th - th_dn)/2) cos((th_up - th_dn)/2)

Branch energies are measured from each branch's own ground energy.  The
c-number ground-energy difference only shifts the qubit splitting; pass
``vacuum_phase=True`` to include it as ``prod exp(i (w_up - w_dn) t / 2)``.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .geometry import GeomPhaseResult, geometric_phase, phase_estimate
from .spectrum import ChainParams, ModeTable, build_mode_table
from .trajectory import (
    DEFAULT_CAP,
    QubitDensity,
    Samples,
    Trajectory,
    adaptive_samples,
)

#: echo modulus below which the coherence azimuth is considered lost
COLLAPSE_THRESHOLD = 1e-6

__all__ = [
    "QubitDensity",
    "Trajectory",
    "decoherence_factor",
    "evolve",
    "build_trajectory",
    "dephasing_phase",
]


def _coefficients(table: ModeTable, allow_degenerate: bool):
    if not allow_degenerate:
        table.require_gapped()
    th0, thu, thd = table.theta
    su = np.sin(0.5 * (th0 - thu))
    sd = np.sin(0.5 * (th0 - thd))
    cross = su * sd * np.cos(0.5 * (thu - thd))
    return (
        np.ascontiguousarray(su * su),
        np.ascontiguousarray(sd * sd),
        np.ascontiguousarray(cross),
        np.ascontiguousarray(table.omega[1]),
        np.ascontiguousarray(table.omega[2]),
    )


def decoherence_factor(
    table: ModeTable, t, *, vacuum_phase: bool = False, allow_degenerate: bool = False
):
    """F(t) for a scalar or array of times.

    Raises DegenerateMode if the table has a gapless mode, unless
    ``allow_degenerate`` is set, in which case such modes use theta = 0.
    """
    scalar = np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    su2, sd2, cross, wu, wd = _coefficients(table, allow_degenerate)
    out = kernels.echo_factor(su2, sd2, cross, wu, wd, times)
    if vacuum_phase:
        out = out * np.exp(0.5j * float(np.sum(wu - wd)) * times)
    return complex(out[0]) if scalar else out


def same_branch_factor(table: ModeTable, t, branch: str = "up"):
    """Pair product with both branches set to the same field; identically 1."""
    row = {"up": 1, "down": 2, "zero": 0}[branch]
    th0, th = table.theta[0], table.theta[row]
    s = np.sin(0.5 * (th0 - th))
    w = np.ascontiguousarray(table.omega[row])
    times = np.atleast_1d(np.asarray(t, dtype=float))
    return kernels.echo_factor(
        np.ascontiguousarray(s * s), np.ascontiguousarray(s * s),
        np.ascontiguousarray(s * s), w, w, times,
    )


def _pure_amplitudes(theta_q: float):
    c, s = math.cos(theta_q), math.sin(theta_q)
    return c * c, s * s, c * s


def evolve(table: ModeTable, theta_q: float, t: float, **kw) -> QubitDensity:
    rho11, rho22, cs = _pure_amplitudes(theta_q)
    if t < 0:
        raise ValueError("t must be non-negative")
    f = decoherence_factor(table, t, **kw)
    mu = table.params.mu
    return QubitDensity(rho11, rho22, cs * complex(np.exp(-1j * mu * t)) * f)


def _sampler(table: ModeTable, theta_q: float, **kw):
    rho11, rho22, cs = _pure_amplitudes(theta_q)
    mu = table.params.mu
    has_coherence = abs(cs) > 0.0

    def sample(times):
        f = decoherence_factor(table, times, **kw)
        echo = np.abs(f)
        return Samples(
            rho11=np.full(times.shape, rho11),
            rho22=np.full(times.shape, rho22),
            rho12=cs * np.exp(-1j * mu * times) * f,
            echo=echo,
            reliable=(echo >= COLLAPSE_THRESHOLD) & has_coherence,
        )

    return sample


def _min_steps(table: ModeTable, T: float) -> int:
    # eight samples per period of the fastest phase in F(t) e^{-i mu t}
    fastest = float(table.omega[1].max() + table.omega[2].max()) + abs(table.params.mu)
    return int(math.ceil(4.0 * fastest * T / math.pi))


def build_trajectory(
    params: ChainParams | ModeTable,
    theta_q: float,
    T: float,
    initial_steps: int = 16,
    *,
    cap: int = DEFAULT_CAP,
    vacuum_phase: bool = False,
    allow_degenerate: bool = False,
) -> Trajectory:
    """Sample the qubit state on an adaptively bisected grid over [0, T].

    Refinement stops when successive azimuth samples differ by less than
    0.3 rad and the + branch phase agrees between two bisection levels.
    ``cap_reached`` is set if ``cap`` steps were not enough.
    """
    table = params if isinstance(params, ModeTable) else build_mode_table(params)
    kw = dict(vacuum_phase=vacuum_phase, allow_degenerate=allow_degenerate)
    times, data, phi, cap_reached = adaptive_samples(
        _sampler(table, theta_q, **kw),
        T,
        initial_steps=initial_steps,
        min_steps=_min_steps(table, T),
        cap=cap,
        estimate=phase_estimate("plus"),
    )
    return Trajectory(
        params=table.params,
        theta_q=theta_q,
        times=times,
        rho11=data.rho11,
        rho22=data.rho22,
        rho12=data.rho12,
        echo_modulus=data.echo,
        azimuth_unwrapped=phi,
        collapse_flag=bool(np.any(data.echo < COLLAPSE_THRESHOLD)),
        cap_reached=cap_reached,
        kind="dephasing",
        meta={"degenerate": table.any_degenerate},
    )


def dephasing_phase(params: ChainParams, theta_q: float, T: float, **kw) -> GeomPhaseResult:
    return geometric_phase(build_trajectory(params, theta_q, T, **kw))
