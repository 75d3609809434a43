"""Qubit states, sampled trajectories and the adaptive time grid."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

log = logging.getLogger(__name__)

#: refine until consecutive unwrapped azimuth samples differ by less than this
AZIMUTH_STEP = 0.3
DEFAULT_CAP = 2**20
#: two successive bisection levels must agree on the phase to this tolerance
CONVERGENCE_TOL = 1e-9


@dataclass(frozen=True)
class QubitDensity:
    rho11: float
    rho22: float
    rho12: complex

    @classmethod
    def pure(cls, theta_q: float) -> "QubitDensity":
        c, s = math.cos(theta_q), math.sin(theta_q)
        return cls(c * c, s * s, complex(c * s))

    @classmethod
    def from_matrix(cls, m) -> "QubitDensity":
        m = np.asarray(m, dtype=complex)
        return cls(float(m[0, 0].real), float(m[1, 1].real), complex(m[0, 1]))

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho11, self.rho12], [np.conj(self.rho12), self.rho22]], dtype=complex
        )

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22

    @property
    def det(self) -> float:
        return self.rho11 * self.rho22 - abs(self.rho12) ** 2

    @property
    def purity(self) -> float:
        return self.rho11**2 + self.rho22**2 + 2 * abs(self.rho12) ** 2

    def is_valid(self, tol: float = 1e-12) -> bool:
        return (
            abs(self.trace - 1.0) <= tol
            and -tol <= self.rho11 <= 1 + tol
            and -tol <= self.rho22 <= 1 + tol
            and self.det >= -tol
        )


class Samples(NamedTuple):
    """Raw output of a trajectory sampler at a set of times."""

    rho11: np.ndarray
    rho22: np.ndarray
    rho12: np.ndarray
    echo: np.ndarray  # |F| for dephasing, 2 Tr(rho^2) - 1 for dissipative
    reliable: np.ndarray  # where arg(rho12) is meaningful


@dataclass
class Trajectory:
    params: object
    theta_q: float | None
    times: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho12: np.ndarray
    echo_modulus: np.ndarray
    azimuth_unwrapped: np.ndarray
    collapse_flag: bool = False
    cap_reached: bool = False
    kind: str = "dephasing"
    meta: dict = field(default_factory=dict)

    @property
    def steps_used(self) -> int:
        return len(self.times) - 1

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def states(self) -> list[QubitDensity]:
        return [
            QubitDensity(float(a), float(b), complex(c))
            for a, b, c in zip(self.rho11, self.rho22, self.rho12)
        ]

    @property
    def purity(self) -> np.ndarray:
        return self.rho11**2 + self.rho22**2 + 2 * np.abs(self.rho12) ** 2


def unwrap_azimuth(rho12, reliable) -> np.ndarray:
    """Continuous ``arg(rho12)``; unreliable samples hold the last reliable value."""
    raw = np.angle(rho12)
    reliable = np.asarray(reliable, dtype=bool)
    if not reliable.any():
        return np.zeros_like(raw)
    idx = np.where(reliable, np.arange(raw.size), -1)
    np.maximum.accumulate(idx, out=idx)
    first = int(np.argmax(reliable))
    filled = np.where(idx >= 0, raw[np.maximum(idx, 0)], raw[first])
    return np.unwrap(filled)


def max_azimuth_step(phi, reliable) -> float:
    both = reliable[1:] & reliable[:-1]
    if not both.any():
        return 0.0
    return float(np.max(np.abs(np.diff(phi))[both]))


def _interleave(a, b):
    # a holds n + 1 grid values, b the n midpoints
    out = np.empty(a.shape[0] + b.shape[0], dtype=np.result_type(a, b))
    out[0::2] = a
    out[1::2] = b
    return out


def adaptive_samples(
    sample: Callable[[np.ndarray], Samples],
    T: float,
    *,
    initial_steps: int = 16,
    min_steps: int = 0,
    cap: int = DEFAULT_CAP,
    estimate: Callable[[np.ndarray, Samples, np.ndarray], float] | None = None,
    tol: float = CONVERGENCE_TOL,
):
    """Bisect a uniform grid on [0, T] until the azimuth is resolved.

    Stops once every reliable azimuth step is below ``AZIMUTH_STEP`` and, if
    ``estimate`` is given, two successive levels agree to ``tol``.  Returns
    ``(times, samples, azimuth, cap_reached)``.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if initial_steps < 16:
        raise ValueError(f"initial_steps must be >= 16, got {initial_steps}")
    n = min(max(initial_steps, min_steps), cap)
    times = np.linspace(0.0, T, n + 1)
    data = sample(times)
    previous = None
    cap_reached = False
    while True:
        phi = unwrap_azimuth(data.rho12, data.reliable)
        resolved = max_azimuth_step(phi, data.reliable) < AZIMUTH_STEP
        current = estimate(times, data, phi) if estimate is not None else None
        if resolved and (estimate is None or (
            previous is not None and abs(_wrap(current - previous)) < tol
        )):
            break
        if 2 * n > cap:
            cap_reached = True
            log.warning("time grid cap of %d steps reached", cap)
            break
        mid = 0.5 * (times[:-1] + times[1:])
        new = sample(mid)
        times = _interleave(times, mid)
        data = Samples(*(_interleave(old, fresh) for old, fresh in zip(data, new)))
        previous = current
        n *= 2
    return times, data, phi, cap_reached


def _wrap(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y
