"""Pure-numpy implementations of the hot loops.

Signatures match ``_kernels.pyx`` exactly; ``critprobe.kernels`` picks one.
"""
import numpy as np

_CHUNK = 256


def echo_factor(su2, sd2, cross, wu, wd, times):
    """Product over modes of the pair echo bracket, one value per time.

    bracket = 1 - (1 - e^{-i wu t}) su2 - (1 - e^{+i wd t}) sd2
                + (1 - e^{-i wu t})(1 - e^{+i wd t}) cross
    """
    times = np.ascontiguousarray(times, dtype=float)
    out = np.empty(times.shape[0], dtype=complex)
    for start in range(0, times.shape[0], _CHUNK):
        t = times[start:start + _CHUNK, None]
        eu = 1.0 - np.exp(-1j * wu * t)
        ed = 1.0 - np.exp(1j * wd * t)
        bracket = 1.0 - eu * su2 - ed * sd2 + eu * ed * cross
        out[start:start + _CHUNK] = np.prod(bracket, axis=1)
    return out


def mixed_evolution(energies, weights, delta, gz, gy, rho0, times):
    """Weighted sum of U_n rho0 U_n^dagger over levels, for every time.

    U_n = exp(-i t [delta X + E_n (gy Y + gz Z)]), global phase e^{-i E_n t}
    dropped since it cancels in the conjugation.
    Returns ``(rho11, rho22, rho12)`` arrays.
    """
    energies = np.asarray(energies, dtype=float)
    weights = np.asarray(weights, dtype=float)
    rho0 = np.asarray(rho0, dtype=complex)
    times = np.asarray(times, dtype=float)
    nx = np.full_like(energies, delta)
    ny = gy * energies
    nz = gz * energies
    omega = np.sqrt(nx**2 + ny**2 + nz**2)
    safe = np.where(omega > 0, omega, 1.0)
    nx, ny, nz = nx / safe, ny / safe, nz / safe

    phase = omega[None, :] * times[:, None]
    c = np.cos(phase)
    s = np.sin(phase)
    # U = [[c - i s nz, -i s (nx - i ny)], [-i s (nx + i ny), c + i s nz]]
    u00 = c - 1j * s * nz
    u01 = -1j * s * (nx - 1j * ny)
    u10 = -1j * s * (nx + 1j * ny)
    u11 = c + 1j * s * nz

    a, b, d = rho0[0, 0], rho0[0, 1], rho0[1, 1]
    bc = np.conj(b)
    # (U rho0)_{ij}
    m00 = u00 * a + u01 * bc
    m01 = u00 * b + u01 * d
    m10 = u10 * a + u11 * bc
    m11 = u10 * b + u11 * d
    r11 = (m00 * np.conj(u00) + m01 * np.conj(u01)).real
    r22 = (m10 * np.conj(u10) + m11 * np.conj(u11)).real
    r12 = m00 * np.conj(u10) + m01 * np.conj(u11)
    return r11 @ weights, r22 @ weights, r12 @ weights
