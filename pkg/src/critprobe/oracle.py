"""Brute-force references for the closed-form results.

Nothing here reuses the trig algebra of :mod:`critprobe.dephasing`; the
pair and Fock-space routines build Hamiltonian matrices and evolve states
numerically.

Pair blocks act on the even-parity pair space {|vac>, d_k^+ d_-k^+ |vac>}:

    h = 1/2 [[-eps, -gs], [-gs, eps]] + omega/2 * I,     gs = gamma sin a

Its ground state is (cos(theta/2), sin(theta/2)) with energy 0, so branch
energies are referenced to each branch's own ground energy.  The pair gap is
omega, which fixes the time unit.  ``vacuum_phase=True`` drops the
``omega/2`` shift.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.linalg

from .errors import DegenerateMode, DimensionTooLarge, NotHermitian
from .spectrum import ChainParams, GAPLESS_TOL, dispersion

FOCK_MAX_N = 12


def expm_2x2(H, t: float) -> np.ndarray:
    """exp(-i H t) for a 2x2 Hermitian H via its exact eigendecomposition."""
    H = np.asarray(H, dtype=complex)
    if H.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {H.shape}")
    if np.max(np.abs(H - H.conj().T)) > 1e-12:
        raise NotHermitian("matrix is not Hermitian to 1e-12")
    mean = 0.5 * (H[0, 0].real + H[1, 1].real)
    hz = 0.5 * (H[0, 0].real - H[1, 1].real)
    hx, hy = H[1, 0].real, H[1, 0].imag
    r = float(np.sqrt(hx * hx + hy * hy + hz * hz))
    # H = mean I + r n.sigma with eigenvalues mean +- r
    if r == 0.0:
        return np.exp(-1j * mean * t) * np.eye(2, dtype=complex)
    n_sigma = np.array([[hz, hx - 1j * hy], [hx + 1j * hy, -hz]]) / r
    return np.exp(-1j * mean * t) * (
        np.cos(r * t) * np.eye(2) - 1j * np.sin(r * t) * n_sigma
    )


def pair_block(a: float, lambda_eff: float, gamma: float, *, unpaired=False,
               vacuum_phase=False) -> np.ndarray:
    eps, _ = dispersion(a, lambda_eff, gamma)
    gs = 0.0 if unpaired else gamma * np.sin(a)
    omega = float(np.hypot(eps, gs))
    h = 0.5 * np.array([[-eps, -gs], [-gs, eps]], dtype=complex)
    if not vacuum_phase:
        h = h + 0.5 * omega * np.eye(2)
    return h


def _mode_grid(N: int):
    k = list(range(1, N // 2)) + [0, -N // 2]
    a = [2.0 * np.pi * kk / N for kk in k]
    unpaired = [False] * (N // 2 - 1) + [True, True]
    return a, unpaired


def _ground_state(h) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    if w[1] - w[0] <= GAPLESS_TOL:
        raise DegenerateMode("pair block ground state is degenerate")
    return v[:, 0]


def pair_factor(a, params: ChainParams, t: float, *, unpaired=False, vacuum_phase=False):
    """<g0| exp(i h_down t) exp(-i h_up t) |g0> for one momentum pair."""
    kw = dict(unpaired=unpaired, vacuum_phase=vacuum_phase)
    h0 = pair_block(a, params.lam, params.gamma, **kw)
    hu = pair_block(a, params.lam + params.g, params.gamma, **kw)
    hd = pair_block(a, params.lam - params.g, params.gamma, **kw)
    g0 = _ground_state(h0)
    up = expm_2x2(hu, t) @ g0
    down = expm_2x2(hd, t) @ g0
    return complex(np.vdot(down, up))


def pair_evolution_factor(params: ChainParams, t: float, *, vacuum_phase=False) -> complex:
    """Decoherence factor from numerically evolved pair states."""
    a_list, unpaired = _mode_grid(params.N)
    out = 1.0 + 0j
    for a, single in zip(a_list, unpaired):
        out *= pair_factor(a, params, t, unpaired=single, vacuum_phase=vacuum_phase)
    return out


def _many_body_hamiltonian(blocks) -> np.ndarray:
    dim = 2 ** len(blocks)
    H = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(2)
    for i, h in enumerate(blocks):
        factors = [eye] * len(blocks)
        factors[i] = h
        H += reduce(np.kron, factors)
    return H


def fock_evolution_factor(params: ChainParams, t: float, *, vacuum_phase=False) -> complex:
    """Decoherence factor from the dense tensor product of all mode spaces.

    The ground state and both propagators are computed on the full
    ``2**(N/2 + 1)``-dimensional space without using the pair factorization.
    """
    if params.N > FOCK_MAX_N:
        raise DimensionTooLarge(f"N={params.N} exceeds {FOCK_MAX_N}")
    a_list, unpaired = _mode_grid(params.N)

    def hamiltonian(lam):
        return _many_body_hamiltonian([
            pair_block(a, lam, params.gamma, unpaired=s, vacuum_phase=vacuum_phase)
            for a, s in zip(a_list, unpaired)
        ])

    H0 = hamiltonian(params.lam)
    Hu = hamiltonian(params.lam + params.g)
    Hd = hamiltonian(params.lam - params.g)
    w, v = scipy.linalg.eigh(H0)
    if w[1] - w[0] <= 1e-12:
        raise DegenerateMode("many-body ground state is degenerate")
    g0 = v[:, 0]
    up = scipy.linalg.expm(-1j * Hu * t) @ g0
    down = scipy.linalg.expm(-1j * Hd * t) @ g0
    return complex(np.vdot(down, up))
