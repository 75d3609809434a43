"""Free-fermion spectrum of the periodic XY chain.

The chain Hamiltonian

    H(lam) = -sum_l [(1+gamma)/2 X_l X_{l+1} + (1-gamma)/2 Y_l Y_{l+1} + lam Z_l]

decouples into momentum pairs (k, -k) with a = 2 pi k / N.  Each pair is
characterised by

    eps   = cos a - lam
    omega = sqrt(eps**2 + gamma**2 sin(a)**2)
    theta = atan2(gamma sin a, eps)

The qubit shifts the field to lam + g (qubit up) or lam - g (qubit down), so
every quantity is tabulated for the three effective fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMode, InvalidParams

GAPLESS_TOL = 1e-14


@dataclass(frozen=True)
class ChainParams:
    N: int
    lam: float
    gamma: float
    g: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N:
            raise InvalidParams(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.N < 4 or self.N % 2:
            raise InvalidParams(f"N must be even and >= 4, got {self.N}")
        for name in ("lam", "gamma", "g", "mu"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.g < 0:
            raise InvalidParams(f"g must be >= 0, got {self.g}")

    def replace(self, **changes) -> "ChainParams":
        fields = dict(N=self.N, lam=self.lam, gamma=self.gamma, g=self.g, mu=self.mu)
        fields.update(changes)
        return ChainParams(**fields)


@dataclass(frozen=True)
class ModeRecord:
    k: int
    a: float
    omega_0: float
    omega_up: float
    omega_down: float
    theta_0: float
    theta_up: float
    theta_down: float
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class ModeTable:
    """Column-oriented mode data for one ChainParams.

    Rows ``0 .. N/2-2`` are the paired modes ``k = 1 .. N/2-1``; the last two
    rows are the unpaired modes ``k = 0`` and ``k = -N/2``.
    """

    params: ChainParams
    k: np.ndarray
    a: np.ndarray
    omega: np.ndarray  # shape (3, n_modes): fields lam, lam+g, lam-g
    theta: np.ndarray  # shape (3, n_modes)
    degenerate: np.ndarray  # bool, shape (n_modes,)

    @property
    def n_paired(self) -> int:
        return self.params.N // 2 - 1

    @property
    def paired(self) -> list[ModeRecord]:
        return [self.record(i) for i in range(self.n_paired)]

    @property
    def unpaired(self) -> list[ModeRecord]:
        return [self.record(i) for i in range(self.n_paired, len(self.k))]

    @property
    def any_degenerate(self) -> bool:
        return bool(self.degenerate.any())

    def record(self, i: int) -> ModeRecord:
        return ModeRecord(
            k=int(self.k[i]),
            a=float(self.a[i]),
            omega_0=float(self.omega[0, i]),
            omega_up=float(self.omega[1, i]),
            omega_down=float(self.omega[2, i]),
            theta_0=float(self.theta[0, i]),
            theta_up=float(self.theta[1, i]),
            theta_down=float(self.theta[2, i]),
            degenerate=bool(self.degenerate[i]),
        )

    def require_gapped(self):
        if self.any_degenerate:
            bad = self.k[self.degenerate].tolist()
            raise DegenerateMode(f"gapless modes k={bad} for {self.params}")


def dispersion(a, lambda_eff, gamma):
    """Return ``(epsilon, omega)`` for momentum ``a`` at field ``lambda_eff``.

    Works elementwise on arrays.
    """
    eps = np.cos(a) - lambda_eff
    omega = np.hypot(eps, gamma * np.sin(a))
    if np.ndim(omega) == 0:
        return float(eps), float(omega)
    return eps, omega


def bogoliubov_angle(a, lambda_eff, gamma, *, with_flag=False):
    """Mixing angle ``theta = atan2(gamma sin a, cos a - lambda_eff)``.

    Gapless modes get ``theta = 0``; pass ``with_flag=True`` to also receive
    the boolean degeneracy mask.
    """
    eps, omega = dispersion(a, lambda_eff, gamma)
    theta = np.arctan2(gamma * np.sin(a), eps)
    flag = np.asarray(omega) <= GAPLESS_TOL
    theta = np.where(flag, 0.0, theta)
    if np.ndim(theta) == 0:
        theta, flag = float(theta), bool(flag)
    return (theta, flag) if with_flag else theta


def _angles(cos_a, sin_term, lam):
    eps = cos_a - lam
    omega = np.hypot(eps, sin_term)
    flag = omega <= GAPLESS_TOL
    theta = np.where(flag, 0.0, np.arctan2(sin_term, eps))
    return omega, theta, flag


def build_mode_table(params: ChainParams) -> ModeTable:
    N = params.N
    k_paired = np.arange(1, N // 2)
    k = np.concatenate([k_paired, [0, -N // 2]])
    a = 2.0 * np.pi * k / N
    cos_a = np.cos(a)
    # unpaired modes sit at sin a = 0 exactly; np.sin(-pi) is -1.2e-16 and
    # would push theta to -pi
    sin_term = params.gamma * np.sin(a)
    sin_term[-2:] = 0.0
    cos_a[-2:] = (1.0, -1.0)

    omegas, thetas, flags = [], [], []
    for lam in (params.lam, params.lam + params.g, params.lam - params.g):
        omega, theta, flag = _angles(cos_a, sin_term, lam)
        omegas.append(omega)
        thetas.append(theta)
        flags.append(flag)
    return ModeTable(
        params=params,
        k=k,
        a=a,
        omega=np.array(omegas),
        theta=np.array(thetas),
        degenerate=np.logical_or.reduce(flags),
    )


def _check_gapped(omega):
    if np.any(np.asarray(omega) <= GAPLESS_TOL):
        raise DegenerateMode("derivative of theta undefined at a gapless mode")


def dtheta_dlambda(a, lam, gamma):
    """Analytic d(theta)/d(lambda) = gamma sin a / omega**2."""
    _, omega = dispersion(a, lam, gamma)
    _check_gapped(omega)
    return gamma * np.sin(a) / omega**2


def dtheta_dgamma(a, lam, gamma):
    """Analytic d(theta)/d(gamma) = sin a (cos a - lam) / omega**2."""
    eps, omega = dispersion(a, lam, gamma)
    _check_gapped(omega)
    return np.sin(a) * eps / omega**2


def scaling_sum(params: ChainParams, which: str = "lambda") -> float:
    """Sum of squared angle derivatives over ``k = 1 .. N/2``.

    ``which`` selects the derivative: ``"lambda"`` or ``"gamma"``.
    """
    N = params.N
    a = 2.0 * np.pi * np.arange(1, N // 2 + 1) / N
    if which == "lambda":
        d = dtheta_dlambda(a, params.lam, params.gamma)
    elif which == "gamma":
        d = dtheta_dgamma(a, params.lam, params.gamma)
    else:
        raise ValueError(f"which must be 'lambda' or 'gamma', got {which!r}")
    return float(np.sum(d * d))


def ground_energy(params: ChainParams, lambda_eff: float | None = None) -> float:
    """Ground energy -sum_k omega_k / 2 over the full momentum grid."""
    lam = params.lam if lambda_eff is None else lambda_eff
    a = 2.0 * np.pi * np.arange(-params.N // 2, params.N // 2) / params.N
    _, omega = dispersion(a, lam, params.gamma)
    return float(-0.5 * omega.sum())


def excitation_energy(params: ChainParams, occupied, lambda_eff: float | None = None) -> float:
    """Energy sum_k omega_k (n_k - 1/2) with ``n_k = 1`` for ``k in occupied``.

    ``occupied`` holds integer mode indices in ``-N/2 .. N/2-1``.
    """
    N = params.N
    lam = params.lam if lambda_eff is None else lambda_eff
    occ = set(int(k) for k in occupied)
    for kk in occ:
        if not -N // 2 <= kk < N // 2:
            raise InvalidParams(f"mode index {kk} outside -N/2 .. N/2-1")
    a = 2.0 * np.pi * np.array(sorted(occ), dtype=float) / N
    _, omega = dispersion(a, lam, params.gamma)
    return ground_energy(params, lam) + float(np.sum(omega))
