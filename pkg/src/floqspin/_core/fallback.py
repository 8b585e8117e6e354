"""Pure-numpy propagation kernel.

Same contract as the compiled kernel in ``_kernels.pyx``: fixed-step
fourth-order commutator-free exponential integrator for

    H(t) = (h_x/2) sigma_x + ((h_z0 + h_z1*cos(omega*t))/2) sigma_z,

returning all intermediate one-sided propagators U(t_j, 0), j = 0..n on the
uniform grid t_j = j*tau/n.  Every per-step factor is an exact 2x2 unitary
(closed-form exponential of a traceless Hermitian matrix), so unitarity is
structural rather than corrected.

The sequential product U(t_{j+1},0) = S_j U(t_j,0) is evaluated here with a
logarithmic prefix scan (Hillis-Steele doubling) over batched 2x2 products;
the grouping differs from the compiled kernel's left-to-right loop only at
the level of floating-point rounding.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import IntegrationError

# 4th-order commutator-free coefficients: Gauss-Legendre nodes c1 < c2 on
# [0,1] and exponent weights x1, x2 (x1 + x2 = 1/2).
_C1 = 0.5 - math.sqrt(3.0) / 6.0
_C2 = 0.5 + math.sqrt(3.0) / 6.0
_X1 = (3.0 - 2.0 * math.sqrt(3.0)) / 12.0
_X2 = (3.0 + 2.0 * math.sqrt(3.0)) / 12.0


def _exp_xz(vx, vz):
    """exp(-i (vx*sigma_x + vz*sigma_z)) for arrays vx, vz -> (..., 2, 2)."""
    r = np.hypot(vx, vz)
    c = np.cos(r)
    safe = np.where(r > 0.0, r, 1.0)
    s = np.where(r > 0.0, np.sin(safe) / safe, 1.0)
    out = np.empty(np.broadcast(vx, vz).shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c - 1j * s * vz
    out[..., 0, 1] = -1j * s * vx
    out[..., 1, 0] = -1j * s * vx
    out[..., 1, 1] = c + 1j * s * vz
    return out


def _bmm(a, b):
    """Batched 2x2 matrix product a @ b without BLAS call overhead."""
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 0, 0] * b[..., 0, 0] + a[..., 0, 1] * b[..., 1, 0]
    out[..., 0, 1] = a[..., 0, 0] * b[..., 0, 1] + a[..., 0, 1] * b[..., 1, 1]
    out[..., 1, 0] = a[..., 1, 0] * b[..., 0, 0] + a[..., 1, 1] * b[..., 1, 0]
    out[..., 1, 1] = a[..., 1, 0] * b[..., 0, 1] + a[..., 1, 1] * b[..., 1, 1]
    return out


def propagate_grid(h_x: float, h_z0: float, h_z1: float, omega: float,
                   n_steps: int) -> np.ndarray:
    """Propagators U(t_j, 0) for j = 0..n_steps; shape (n_steps+1, 2, 2)."""
    n = int(n_steps)
    tau = 2.0 * math.pi / omega
    dt = tau / n

    j = np.arange(n, dtype=np.float64)
    b1 = 0.5 * (h_z0 + h_z1 * np.cos(omega * ((j + _C1) * dt)))
    b2 = 0.5 * (h_z0 + h_z1 * np.cos(omega * ((j + _C2) * dt)))
    vx = np.full(n, 0.25 * h_x * dt)

    # right factor weights the early node, left factor the late node
    right = _exp_xz(vx, dt * (_X2 * b1 + _X1 * b2))
    left = _exp_xz(vx, dt * (_X1 * b1 + _X2 * b2))
    steps = _bmm(left, right)

    bad = ~np.isfinite(steps.view(np.float64)).reshape(n, -1).all(axis=1)
    if bad.any():
        idx = int(np.argmax(bad))
        raise IntegrationError(
            f"non-finite step matrix at step {idx}", step=idx)

    # inclusive prefix scan: P[i] = steps[i] @ ... @ steps[0]
    prefix = steps.copy()
    d = 1
    while d < n:
        prefix[d:] = _bmm(prefix[d:], prefix[:-d])
        d *= 2

    out = np.empty((n + 1, 2, 2), dtype=np.complex128)
    out[0] = np.eye(2)
    out[1:] = prefix
    if not np.isfinite(out.view(np.float64)).all():
        raise IntegrationError(f"non-finite propagator at step {n}", step=n)
    return out
