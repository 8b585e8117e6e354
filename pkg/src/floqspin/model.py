"""Model definition: parameters, Pauli algebra and the driven Hamiltonian.

Units: hbar = k_B = 1. All quantities carrying an energy dimension (fields,
frequencies, temperature) are measured in the same unit; by convention the
tunneling amplitude h_x sets that unit and defaults to 1.

The isolated system is

    H(t) = (h_x / 2) sigma_x + (h_z(t) / 2) sigma_z,
    h_z(t) = h_z0 + h_z1 * cos(omega * t),

and the environment couples through sigma_theta = sin(theta) sigma_x
+ cos(theta) sigma_z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


sigma_x = _readonly(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
sigma_y = _readonly(np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex))
sigma_z = _readonly(np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex))
identity = _readonly(np.eye(2, dtype=complex))

# sigma_x eigenvectors |-1>_x, |+1>_x (eigenvalues -1, +1)
sigma_x_minus = _readonly(np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0))
sigma_x_plus = _readonly(np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0))


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Driven two-level system parameters.

    omega: drive angular frequency (> 0); theta: bath coupling angle in
    radians, conventionally in [0, pi] but any value is accepted since
    sigma_theta is defined for all angles; h_x: tunneling amplitude (>= 0,
    the global energy unit); h_z0: static bias; h_z1: drive amplitude.
    """

    omega: float
    theta: float
    h_x: float = 1.0
    h_z0: float = 0.0
    h_z1: float = 0.0

    def __post_init__(self):
        for name in ("omega", "theta", "h_x", "h_z0", "h_z1"):
            _require_finite(name, getattr(self, name))
        if self.omega <= 0:
            raise ConfigError(f"omega must be > 0, got {self.omega}")
        if self.h_x < 0:
            raise ConfigError(f"h_x must be >= 0, got {self.h_x}")

    @property
    def tau(self) -> float:
        """Drive period 2*pi/omega (always derived, never stored)."""
        return 2.0 * math.pi / self.omega

    @property
    def drive_ratio(self) -> float:
        """Dimensionless drive strength h_z1 / omega (Bessel argument)."""
        return self.h_z1 / self.omega

    def replace(self, **changes) -> "SystemParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class BathParams:
    """Ohmic bath with algebraic cutoff: Gamma(w) = gamma*w/(w^2 + omega_c^2)."""

    gamma: float
    omega_c: float
    temperature: float

    def __post_init__(self):
        for name in ("gamma", "omega_c", "temperature"):
            _require_finite(name, getattr(self, name))
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")

    def replace(self, **changes) -> "BathParams":
        from dataclasses import replace

        return replace(self, **changes)


def bias_field(params: SystemParams, t: float) -> float:
    """Instantaneous longitudinal field h_z(t) = h_z0 + h_z1*cos(omega*t)."""
    return params.h_z0 + params.h_z1 * math.cos(params.omega * t)


def hamiltonian_at(params: SystemParams, t: float) -> np.ndarray:
    """Instantaneous Hamiltonian H(t) as a dense 2x2 complex array.

    Exactly Hermitian by construction (real entries on the diagonal, real
    symmetric off-diagonal). Periodic in t with period tau up to floating
    point in the phase omega*t; for bit-exact periodicity on a uniform grid
    use hamiltonian_at_index.
    """
    hz = 0.5 * bias_field(params, t)
    hx = 0.5 * params.h_x
    return np.array([[hz, hx], [hx, -hz]], dtype=complex)


def hamiltonian_at_index(params: SystemParams, j: int, n_steps: int) -> np.ndarray:
    """Hamiltonian at grid time t_j = j*tau/n_steps, exactly tau-periodic in j.

    The drive phase is computed as 2*pi*(j mod n_steps)/n_steps, so
    H(j) == H(j + n_steps) bit for bit.
    """
    if n_steps <= 0:
        raise ConfigError(f"n_steps must be positive, got {n_steps}")
    phase = 2.0 * math.pi * ((j % n_steps) / n_steps)
    hz = 0.5 * (params.h_z0 + params.h_z1 * math.cos(phase))
    hx = 0.5 * params.h_x
    return np.array([[hz, hx], [hx, -hz]], dtype=complex)


def coupling_operator(theta: float) -> np.ndarray:
    """Bath coupling operator sigma_theta = sin(theta)*sigma_x + cos(theta)*sigma_z.

    Hermitian with eigenvalues exactly {+1, -1}: trace 0, determinant -1.
    """
    s, c = math.sin(theta), math.cos(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)
