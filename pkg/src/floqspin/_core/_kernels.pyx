# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel.

Sequential left-to-right evaluation of the fourth-order commutator-free
exponential integrator; the numpy twin lives in ``fallback.py``.  Both
produce the same grid of one-sided propagators up to rounding.
"""

from libc.math cimport cos, sin, sqrt, isfinite, M_PI

import numpy as np
cimport numpy as cnp

cnp.import_array()

from ..errors import IntegrationError

cdef double C1 = 0.5 - sqrt(3.0) / 6.0
cdef double C2 = 0.5 + sqrt(3.0) / 6.0
cdef double X1 = (3.0 - 2.0 * sqrt(3.0)) / 12.0
cdef double X2 = (3.0 + 2.0 * sqrt(3.0)) / 12.0


def propagate_grid(double h_x, double h_z0, double h_z1, double omega,
                   int n_steps):
    """Propagators U(t_j, 0) for j = 0..n_steps; shape (n_steps+1, 2, 2)."""
    cdef int n = n_steps
    cdef double tau = 2.0 * M_PI / omega
    cdef double dt = tau / n
    cdef double vx = 0.25 * h_x * dt

    out_arr = np.empty((n + 1, 2, 2), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    out[0, 0, 0] = 1.0
    out[0, 0, 1] = 0.0
    out[0, 1, 0] = 0.0
    out[0, 1, 1] = 1.0

    cdef double complex u00 = 1.0, u01 = 0.0, u10 = 0.0, u11 = 1.0
    cdef double complex e00r, e01r, e11r, e00l, e01l, e11l
    cdef double complex s00, s01, s10, s11
    cdef double complex n00, n01, n10, n11, tot
    cdef double b1, b2, vzr, vzl, r, c, s
    cdef int j, bad

    for j in range(n):
        b1 = 0.5 * (h_z0 + h_z1 * cos(omega * ((j + C1) * dt)))
        b2 = 0.5 * (h_z0 + h_z1 * cos(omega * ((j + C2) * dt)))

        vzr = dt * (X2 * b1 + X1 * b2)
        r = sqrt(vx * vx + vzr * vzr)
        c = cos(r)
        s = sin(r) / r if r > 0.0 else 1.0
        e00r = c - 1j * s * vzr
        e01r = -1j * s * vx
        e11r = c + 1j * s * vzr

        vzl = dt * (X1 * b1 + X2 * b2)
        r = sqrt(vx * vx + vzl * vzl)
        c = cos(r)
        s = sin(r) / r if r > 0.0 else 1.0
        e00l = c - 1j * s * vzl
        e01l = -1j * s * vx
        e11l = c + 1j * s * vzl

        # step = left @ right (factors are symmetric: e10 == e01)
        s00 = e00l * e00r + e01l * e01r
        s01 = e00l * e01r + e01l * e11r
        s10 = e01l * e00r + e11l * e01r
        s11 = e01l * e01r + e11l * e11r

        n00 = s00 * u00 + s01 * u10
        n01 = s00 * u01 + s01 * u11
        n10 = s10 * u00 + s11 * u10
        n11 = s10 * u01 + s11 * u11

        tot = n00 + n01 + n10 + n11
        bad = not (isfinite(tot.real) and isfinite(tot.imag))
        if bad:
            raise IntegrationError(
                f"non-finite propagator at step {j + 1}", step=j + 1)

        u00, u01, u10, u11 = n00, n01, n10, n11
        out[j + 1, 0, 0] = u00
        out[j + 1, 0, 1] = u01
        out[j + 1, 1, 0] = u10
        out[j + 1, 1, 1] = u11

    return out_arr
