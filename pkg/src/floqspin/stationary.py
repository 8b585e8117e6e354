"""Stationary state of the rate equations and phonon-sideband intensities.

For the two-state chain

    dp_0/dt = -W_{1<-0} p_0 + W_{0<-1} p_1,
    dp_1/dt = +W_{1<-0} p_0 - W_{0<-1} p_1,

the unique fixed point is p_0 = W_{0<-1} / (W_{0<-1} + W_{1<-0}).  The
periodic stationary density matrix is diagonal in the Floquet basis,
rho_s(t) = sum_lam p_lam |phi_lam(t)><phi_lam(t)|.

Emitted phonons appear at the drive frequency and its two sidebands
(unshifted / blue / red, split by the quasienergy gap Delta):

    I_b = (omega + Delta) A^(-1)_{0<-1} p_1,
    I_r = (omega - Delta) A^(-1)_{1<-0} p_0.

I_0 = omega * (A^(-1)_{0<-0} p_0 + A^(-1)_{1<-1} p_1) is the natural
diagonal-channel analogue for the unshifted line; it is an extension beyond
the sideband pair and is labeled as such in all outputs.  Intensities are
energy fluxes in units of gamma * h_x^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bath import TransitionTable
from .errors import ConfigError, NoRelaxationError
from .floquet import FloquetSolution


@dataclass(frozen=True)
class StationaryState:
    """Stationary Floquet-state populations and periodic density matrix."""

    populations: np.ndarray          # (2,), sums to 1 by construction
    totals: np.ndarray               # (2, 2) provenance W_{lam<-mu}
    gamma_used: float
    density: np.ndarray | None = None  # (n_steps+1, 2, 2) once reconstructed

    @property
    def p0(self) -> float:
        return float(self.populations[0])

    @property
    def p1(self) -> float:
        return float(self.populations[1])


@dataclass(frozen=True)
class EmissionReport:
    """Sideband intensities, quasienergy splitting and red/blue ratio."""

    intensity_blue: float
    intensity_red: float
    intensity_unshifted: float
    splitting: float
    ratio: float            # nan when undefined (I_b = 0)
    ratio_defined: bool


def solve_stationary(table: TransitionTable) -> StationaryState:
    """Fixed point of the rate equations (populations only).

    Raises when the population-changing rates vanish (exactly, or down at
    the rounding floor relative to the largest table entry), which happens
    only for pathological couplings such as a commuting system-bath pair.
    """
    if not table.rates_filled:
        raise ConfigError("rates must be computed before the stationary solve")
    w01 = table.total(0, 1)
    w10 = table.total(1, 0)
    if w01 + w10 <= 1e-15 * float(table.totals.max()):
        raise NoRelaxationError(
            "all relaxation rates vanish; stationary state undefined")
    p0 = w01 / (w01 + w10)
    populations = np.array([p0, 1.0 - p0])
    populations.setflags(write=False)
    gamma = table.bath.gamma if table.bath is not None else math.nan
    return StationaryState(populations=populations, totals=table.totals,
                           gamma_used=gamma)


def density_matrix(state: StationaryState,
                   solution: FloquetSolution) -> StationaryState:
    """Reconstruct rho_s(t_j) on the shared grid from the populations."""
    rho = np.einsum("l,ljc,ljd->jcd", state.populations,
                    solution.modes, solution.modes.conj())
    rho.setflags(write=False)
    return replace(state, density=rho)


def emission(state: StationaryState, table: TransitionTable,
             solution: FloquetSolution) -> EmissionReport:
    """Blue / red / unshifted phonon intensities of the emission triplet."""
    if table.n_max < 1:
        raise ConfigError("emission needs the n = -1 channel (n_max >= 1)")
    omega = table.omega
    delta = solution.gap
    p0, p1 = state.p0, state.p1
    i_blue = (omega + delta) * table.rate(-1, 0, 1) * p1
    i_red = (omega - delta) * table.rate(-1, 1, 0) * p0
    i_unshifted = omega * (table.rate(-1, 0, 0) * p0
                           + table.rate(-1, 1, 1) * p1)
    defined = i_blue != 0.0
    ratio = i_red / i_blue if defined else math.nan
    return EmissionReport(intensity_blue=i_blue, intensity_red=i_red,
                          intensity_unshifted=i_unshifted, splitting=delta,
                          ratio=ratio, ratio_defined=defined)


def relaxation(p0_initial: float, t, table: TransitionTable):
    """Transient p_0(t): exponential approach to the stationary value.

    p_0(t) = p_inf + (p_0(0) - p_inf) exp(-(W_{0<-1} + W_{1<-0}) t).
    """
    stationary = solve_stationary(table)
    rate = table.total(0, 1) + table.total(1, 0)
    t = np.asarray(t, dtype=float)
    out = stationary.p0 + (p0_initial - stationary.p0) * np.exp(-rate * t)
    return out if out.ndim else float(out)
