"""Bath coupling: spectral density, Bose factors, transition coefficients, rates.

The coupling density is Ohmic with an algebraic cutoff,

    Gamma(w) = gamma * w / (w^2 + omega_c^2),

extended to negative frequencies as an odd function.  Transition
coefficients between Floquet states are the discrete Fourier components of
the coupling-operator matrix elements on the shared time grid,

    a^(n)_{lam<-mu} = (1/N) sum_j <phi_lam(t_j)|sigma_theta|phi_mu(t_j)>
                      * exp(-i n omega t_j),

and the secular transition rates read

    A^(n)_{lam<-mu} = Gamma(D) [n_B(D) + 1] |a^(n)_{lam<-mu}|^2,
    D = eps_mu - eps_lam - n*omega.

Per channel the rates obey detailed balance,
A^(n)_{lam<-mu} = A^(-n)_{mu<-lam} exp(D/T), which coexists with a
non-Gibbs stationary state because |a^(n)_{lam<-mu}| != |a^(n)_{mu<-lam}|
in general.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, SingularityError
from .floquet import FloquetSolution
from .model import BathParams, coupling_operator

DEFAULT_N_MAX = 3


def spectral_density(omega, bath: BathParams):
    """Coupling density Gamma(w); odd in w, vanishes at w = 0."""
    w = np.asarray(omega, dtype=float)
    out = bath.gamma * w / (w * w + bath.omega_c ** 2)
    return out if out.ndim else float(out)


def bose_occupation(omega, temperature: float):
    """Bose distribution n_B(w) = 1/(exp(w/T) - 1).

    For w < 0 this is the analytic continuation (a value below -1), such
    that Gamma(w)[n_B(w)+1] = Gamma(-w) n_B(-w) holds identically.  w = 0
    is a pole and raises; the finite w -> 0 limit of the full rate
    prefactor is taken in rate_prefactor, not here.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w == 0.0):
        raise SingularityError("bose_occupation is singular at omega = 0")
    with np.errstate(over="ignore"):  # exp overflow cleanly yields 0
        out = 1.0 / np.expm1(w / temperature)
    return out if out.ndim else float(out)


def rate_prefactor(omega, bath: BathParams):
    """Gamma(w)[n_B(w) + 1] with the analytic w -> 0 limit gamma*T/omega_c^2.

    Uses n_B(w) + 1 = -1/expm1(-w/T), which is free of the catastrophic
    cancellation that 1/expm1(w/T) + 1 suffers for w << -T and keeps the
    detailed-balance identity exact to rounding across the whole frequency
    axis.
    """
    w = np.asarray(omega, dtype=float)
    small = np.abs(w) <= 1e-12 * bath.temperature
    safe = np.where(small, 1.0, w)
    occ = -1.0 / np.expm1(-safe / bath.temperature)
    out = np.where(small,
                   bath.gamma * bath.temperature / bath.omega_c ** 2,
                   spectral_density(safe, bath) * occ) + 0.0
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TransitionTable:
    """Fourier coefficients and rates for Brillouin shifts n in [-n_max, n_max].

    Arrays are indexed [n + n_max, lam, mu] and describe the mu -> lam
    channel.  ``rates`` and ``totals`` are filled by :func:`rates`;
    ``fourier_coefficients`` leaves them None.
    """

    n_max: int
    omega: float
    quasienergies: np.ndarray   # (2,)
    coefficients: np.ndarray    # (2*n_max+1, 2, 2) complex
    energy_gaps: np.ndarray     # (2*n_max+1, 2, 2) float
    rates: np.ndarray | None = None
    totals: np.ndarray | None = None  # (2, 2), W[lam, mu] = sum_n rates
    bath: BathParams | None = None

    @property
    def rates_filled(self) -> bool:
        return self.rates is not None

    def _index(self, n: int) -> int:
        if abs(n) > self.n_max:
            raise ConfigError(
                f"Brillouin shift n={n} outside window +-{self.n_max}")
        return n + self.n_max

    def a(self, n: int, lam: int, mu: int) -> complex:
        """Coefficient a^(n)_{lam<-mu}."""
        return complex(self.coefficients[self._index(n), lam, mu])

    def gap_energy(self, n: int, lam: int, mu: int) -> float:
        """Channel energy D^(n)_{lam,mu} = eps_mu - eps_lam - n*omega."""
        return float(self.energy_gaps[self._index(n), lam, mu])

    def rate(self, n: int, lam: int, mu: int) -> float:
        """Rate A^(n)_{lam<-mu}; requires rates to be filled."""
        if self.rates is None:
            raise ConfigError("rates not computed yet; call rates() first")
        return float(self.rates[self._index(n), lam, mu])

    def total(self, lam: int, mu: int) -> float:
        """Total rate W_{lam<-mu} = sum_n A^(n)_{lam<-mu}."""
        if self.totals is None:
            raise ConfigError("rates not computed yet; call rates() first")
        return float(self.totals[lam, mu])


def matrix_element_series(solution: FloquetSolution, theta: float) -> np.ndarray:
    """<phi_lam(t_j)|sigma_theta|phi_mu(t_j)> for j = 0..N-1; shape (N, 2, 2).

    Equal to <phi_lam(0)|sigma_theta(t_j)|phi_mu(0)> since a common unitary
    propagates the Floquet states.
    """
    n = solution.n_steps
    modes = solution.modes[:, :n]
    sig = coupling_operator(theta)
    return np.einsum("ljc,cd,mjd->jlm", modes.conj(), sig, modes)


def fourier_coefficients(solution: FloquetSolution, theta: float,
                         n_max: int = DEFAULT_N_MAX) -> TransitionTable:
    """Discrete Fourier transform of the coupling matrix elements.

    The DFT shares the propagation grid, so Parseval holds to rounding:
    the summed |a^(n)|^2 over the full window equals the time average of
    the squared matrix element.
    """
    n_steps = solution.n_steps
    if n_max < 0:
        raise ConfigError(f"n_max must be >= 0, got {n_max}")
    if n_max > n_steps // 4:
        raise ConfigError(
            f"n_max={n_max} exceeds the anti-aliasing margin "
            f"n_steps/4 = {n_steps // 4}")

    series = matrix_element_series(solution, theta)
    spectrum = np.fft.fft(series, axis=0) / n_steps

    ns = np.arange(-n_max, n_max + 1)
    coeffs = spectrum[ns % n_steps]

    eps = solution.quasienergies
    gaps = (eps[None, None, :] - eps[None, :, None]
            - ns[:, None, None] * solution.params.omega)
    coeffs.setflags(write=False)
    gaps.setflags(write=False)
    return TransitionTable(n_max=n_max, omega=solution.params.omega,
                           quasienergies=eps, coefficients=coeffs,
                           energy_gaps=gaps)


def rates(table: TransitionTable, bath: BathParams,
          solution: FloquetSolution) -> TransitionTable:
    """Complete the table with secular rates and channel totals."""
    if not np.array_equal(table.quasienergies, solution.quasienergies):
        raise ConfigError("table and solution quasienergies disagree")
    prefac = rate_prefactor(table.energy_gaps, bath)
    rate_arr = prefac * np.abs(table.coefficients) ** 2
    totals = rate_arr.sum(axis=0)
    rate_arr.setflags(write=False)
    totals.setflags(write=False)
    return replace(table, rates=rate_arr, totals=totals, bath=bath)
