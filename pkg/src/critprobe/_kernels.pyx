# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_fallback``.

The mode loop runs in a fixed order so results are bit-reproducible.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


def echo_factor(double[::1] su2, double[::1] sd2, double[::1] cross,
                double[::1] wu, double[::1] wd, times):
    cdef double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t nt = t.shape[0], nm = su2.shape[0], i, m
    out = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef double complex acc, eu, ed, br
    cdef double tt, pu, pd
    with nogil:
        for i in range(nt):
            tt = t[i]
            acc = 1.0
            for m in range(nm):
                pu = wu[m] * tt
                pd = wd[m] * tt
                eu = (1.0 - cos(pu)) + 1j * sin(pu)
                ed = (1.0 - cos(pd)) - 1j * sin(pd)
                br = 1.0 - eu * su2[m] - ed * sd2[m] + eu * ed * cross[m]
                acc = acc * br
            res[i] = acc
    return out


def mixed_evolution(energies, weights, double delta, double gz, double gy,
                    rho0, times):
    cdef double[::1] e = np.ascontiguousarray(energies, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    r0 = np.asarray(rho0, dtype=np.complex128)
    cdef double complex a = r0[0, 0], b = r0[0, 1], d = r0[1, 1]
    cdef double complex bc = b.conjugate()
    cdef Py_ssize_t nt = t.shape[0], nl = e.shape[0], i, n
    o11 = np.zeros(nt)
    o22 = np.zeros(nt)
    o12 = np.zeros(nt, dtype=np.complex128)
    cdef double[::1] r11 = o11, r22 = o22
    cdef double complex[::1] r12 = o12
    cdef double nx, ny, nz, om, c, s
    cdef double complex u00, u01, u10, u11, m00, m01, m10, m11
    with nogil:
        for i in range(nt):
            for n in range(nl):
                nx = delta
                ny = gy * e[n]
                nz = gz * e[n]
                om = sqrt(nx * nx + ny * ny + nz * nz)
                if om > 0:
                    nx = nx / om
                    ny = ny / om
                    nz = nz / om
                c = cos(om * t[i])
                s = sin(om * t[i])
                u00 = c - 1j * s * nz
                u01 = -1j * s * (nx - 1j * ny)
                u10 = -1j * s * (nx + 1j * ny)
                u11 = c + 1j * s * nz
                m00 = u00 * a + u01 * bc
                m01 = u00 * b + u01 * d
                m10 = u10 * a + u11 * bc
                m11 = u10 * b + u11 * d
                r11[i] += w[n] * (m00 * u00.conjugate() + m01 * u01.conjugate()).real
                r22[i] += w[n] * (m10 * u10.conjugate() + m11 * u11.conjugate()).real
                r12[i] += w[n] * (m00 * u10.conjugate() + m01 * u11.conjugate())
    return o11, o22, o12
