"""Geometric phase of a non-unitarily evolving qubit.

For a density-matrix path rho(t) with eigenvalues eps_k(t) and eigenvectors
|psi_k(t)>, the phase is

    Phi_g = arg sum_k sqrt(eps_k(0) eps_k(T)) <psi_k(0)|psi_k(T)>
                      exp(-int_0^T <psi_k|d/dt psi_k> dt)

Eigenvectors are written in the frame

    |+> = cos(alpha/2) e^{-i phi} |up> + sin(alpha/2) |down>
    |-> = -sin(alpha/2) e^{-i phi} |up> + cos(alpha/2) |down>

with ``phi = arg(rho12)``.  For the + branch the transport factor is then
``exp(i int cos^2(alpha/2) dphi)``.  With this orientation the phase of a
closed pure-state loop equals the phase of its Bargmann invariant
``<psi_0|psi_1><psi_1|psi_2>...<psi_n|psi_0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import AzimuthUndefined
from .trajectory import QubitDensity, Trajectory, _wrap, unwrap_azimuth

DEGENERACY_TOL = 1e-14
#: branches whose initial weight is below this are dropped from the sum
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class EigenFrame:
    eps_plus: float
    eps_minus: float
    alpha: float
    phi: float


@dataclass(frozen=True)
class GeomPhaseResult:
    phi_g: float
    integral_term: float
    overlap_arg: float
    eps_product_root: float
    collapse_flag: bool
    steps_used: int
    cap_reached: bool = False


def eigenframe(rho: QubitDensity, previous: EigenFrame | None = None) -> EigenFrame:
    half_diff = 0.5 * (rho.rho11 - rho.rho22)
    coh = abs(rho.rho12)
    radius = math.hypot(coh, half_diff)
    if radius < DEGENERACY_TOL:
        raise AzimuthUndefined("maximally mixed state has no preferred eigenbasis")
    # closed form 1/2 +- 1/2 sqrt(1 - 4 rho11 rho22 + 4 |rho12|^2); radius is the
    # same root written without cancellation
    alpha = math.atan2(coh, half_diff)
    if coh < DEGENERACY_TOL:
        phi = previous.phi if previous is not None else 0.0
    else:
        phi = math.atan2(rho.rho12.imag, rho.rho12.real)
        if previous is not None:
            phi = previous.phi + _wrap(phi - previous.phi)
    return EigenFrame(0.5 + radius, 0.5 - radius, alpha, phi)


def eigenvectors(alpha, phi):
    """Frame vectors ``(plus, minus)``, each of shape ``(..., 2)``."""
    alpha = np.asarray(alpha, dtype=float)
    c, s = np.cos(alpha / 2), np.sin(alpha / 2)
    e = np.exp(-1j * np.asarray(phi, dtype=float))
    plus = np.stack([c * e, s + 0j], axis=-1)
    minus = np.stack([-s * e, c + 0j], axis=-1)
    return plus, minus


class Branch(NamedTuple):
    """One eigen-branch along a sampled path.

    ``amp2`` holds squared component moduli, ``phase`` the continuous
    component phases, both of shape ``(n_times, 2)``.
    """

    eps: np.ndarray
    amp2: np.ndarray
    phase: np.ndarray


def frame_branches(rho11, rho22, rho12, phi):
    """Plus and minus branches of a trajectory in the standard frame."""
    half_diff = 0.5 * (np.asarray(rho11) - np.asarray(rho22))
    coh = np.abs(rho12)
    radius = np.hypot(coh, half_diff)
    alpha = np.arctan2(coh, half_diff)
    c2 = np.cos(alpha / 2) ** 2
    s2 = np.sin(alpha / 2) ** 2
    zero = np.zeros_like(phi)
    plus = Branch(0.5 + radius, np.stack([c2, s2], -1), np.stack([-phi, zero], -1))
    minus = Branch(
        0.5 - radius, np.stack([s2, c2], -1), np.stack([math.pi - phi, zero], -1)
    )
    return plus, minus


def branch_from_vectors(eps, vectors) -> Branch:
    """Build a Branch from complex eigenvectors of shape ``(n, 2)``."""
    vectors = np.asarray(vectors)
    return Branch(
        np.asarray(eps, dtype=float),
        np.abs(vectors) ** 2,
        np.unwrap(np.angle(vectors), axis=0),
    )


def branch_terms(branch: Branch):
    """Return ``(weight, overlap, transport)`` for one branch.

    ``transport`` is ``-Im int <psi|d psi>``, so the branch contributes
    ``weight * overlap * exp(1j * transport)``.
    """
    amp2, phase = branch.amp2, branch.phase
    weight = math.sqrt(max(branch.eps[0], 0.0) * max(branch.eps[-1], 0.0))
    overlap = np.sum(
        np.sqrt(amp2[0] * amp2[-1]) * np.exp(1j * (phase[-1] - phase[0]))
    )
    mean_amp2 = 0.5 * (amp2[1:] + amp2[:-1])
    transport = -float(np.sum(mean_amp2 * np.diff(phase, axis=0)))
    return weight, complex(overlap), transport


def kinematic_phase(branches) -> tuple[float, float, float, float]:
    """Combine branches into ``(phi_g, integral_term, overlap_arg, weight)``.

    The last three refer to the dominant branch (largest initial weight).
    """
    total = 0j
    lead = None
    for branch in branches:
        if branch.eps[0] < WEIGHT_TOL:
            continue
        weight, overlap, transport = branch_terms(branch)
        total += weight * overlap * np.exp(1j * transport)
        if lead is None or branch.eps[0] > lead[0]:
            lead = (branch.eps[0], weight, overlap, transport)
    if lead is None:
        raise AzimuthUndefined("no branch with nonzero initial weight")
    _, weight, overlap, transport = lead
    phi_g = _wrap(math.atan2(total.imag, total.real))
    return phi_g, transport, math.atan2(overlap.imag, overlap.real), weight


def _select(branches, which):
    plus, minus = branches
    if which == "plus":
        return [plus]
    if which == "all":
        return [plus, minus]
    raise ValueError(f"which must be 'plus' or 'all', got {which!r}")


def _default_branches(traj: Trajectory) -> str:
    return "plus" if traj.kind == "dephasing" else "all"


def geometric_phase(traj: Trajectory, which: str | None = None) -> GeomPhaseResult:
    """Geometric phase of a sampled trajectory, reduced to (-pi, pi].

    Dephasing trajectories start pure, so by default only the + branch is
    used; other trajectories sum both branches, dropping zero-weight ones.
    """
    if len(traj.times) < 2:
        raise ValueError("trajectory needs at least two samples")
    which = which or _default_branches(traj)
    branches = frame_branches(traj.rho11, traj.rho22, traj.rho12, traj.azimuth_unwrapped)
    phi_g, integral, overlap_arg, weight = kinematic_phase(_select(branches, which))
    return GeomPhaseResult(
        phi_g=phi_g,
        integral_term=integral,
        overlap_arg=overlap_arg,
        eps_product_root=weight,
        collapse_flag=bool(traj.collapse_flag),
        steps_used=traj.steps_used,
        cap_reached=bool(traj.cap_reached),
    )


def phase_estimate(which: str = "plus"):
    """Phase estimator in the form the adaptive grid expects."""

    def estimate(times, data, phi):
        branches = frame_branches(data.rho11, data.rho22, data.rho12, phi)
        return kinematic_phase(_select(branches, which))[0]

    return estimate


def gauge_check(
    traj: Trajectory, chi: Callable[[np.ndarray], np.ndarray], which: str | None = None
) -> float:
    """|Phi_g' - Phi_g| after multiplying every eigenvector by exp(i chi(t)).

    The regauged vectors are handled as plain complex arrays, with phases
    recovered by unwrapping, so the check exercises the generic path.
    """
    which = which or _default_branches(traj)
    reference = geometric_phase(traj, which).phi_g
    half_diff = 0.5 * (traj.rho11 - traj.rho22)
    alpha = np.arctan2(np.abs(traj.rho12), half_diff)
    radius = np.hypot(np.abs(traj.rho12), half_diff)
    plus, minus = eigenvectors(alpha, traj.azimuth_unwrapped)
    factor = np.exp(1j * np.asarray(chi(traj.times), dtype=float))[:, None]
    branches = (
        branch_from_vectors(0.5 + radius, plus * factor),
        branch_from_vectors(0.5 - radius, minus * factor),
    )
    regauged = kinematic_phase(_select(branches, which))[0]
    return abs(_wrap(regauged - reference))


def bargmann_phase(states) -> float:
    """Phase of <psi_0|psi_1>...<psi_{n-1}|psi_n><psi_n|psi_0> for pure states.

    ``states`` has shape ``(n + 1, 2)``.  Independent reference for the
    pure-state limit of :func:`geometric_phase`.
    """
    states = np.asarray(states, dtype=complex)
    links = np.einsum("ij,ij->i", states[:-1].conj(), states[1:])
    closing = np.vdot(states[-1], states[0])
    return _wrap(float(np.sum(np.angle(links)) + np.angle(closing)))


def precession_trajectory(alpha0: float, omega: float, T: float, steps: int) -> Trajectory:
    """Pure state cos(alpha0/2)|up> + e^{-i omega t} sin(alpha0/2)|down>."""
    t = np.linspace(0.0, T, steps + 1)
    c, s = math.cos(alpha0 / 2), math.sin(alpha0 / 2)
    rho12 = c * s * np.exp(1j * omega * t)
    rho11 = np.full_like(t, c * c)
    rho22 = np.full_like(t, s * s)
    reliable = np.full(t.shape, c * s > DEGENERACY_TOL)
    return Trajectory(
        params=None,
        theta_q=alpha0 / 2,
        times=t,
        rho11=rho11,
        rho22=rho22,
        rho12=rho12,
        echo_modulus=np.ones_like(t),
        azimuth_unwrapped=unwrap_azimuth(rho12, reliable),
        kind="pure",
    )


def berry_phase_reference(alpha0: float) -> float:
    """Analytic value -pi (1 - cos alpha0) for one full precession turn, in (-pi, pi]."""
    return _wrap(-math.pi * (1.0 - math.cos(alpha0)))
