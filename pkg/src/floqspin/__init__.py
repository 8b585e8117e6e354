"""floqspin: dissipative Floquet dynamics of a driven two-level system.

Computes quasienergies and Floquet modes of a cosine-driven spin, secular
rate-equation transition rates for weak coupling to an Ohmic bath,
stationary populations, phonon-sideband emission intensities, and the
closed-form high-frequency cross-checks, including the discontinuities at
coherent destruction of tunneling.
"""

from ._core import BACKEND
from .analytics import (EffectiveHamiltonian, HfCoefficients,
                        RatioJumpPrediction, analytic_transition_elements,
                        bessel_j, bessel_root, effective_hamiltonian,
                        nearest_cdt_root, ratio_jump_prediction,
                        s_coefficients, sideband_weights)
from .bath import (TransitionTable, bose_occupation, fourier_coefficients,
                   matrix_element_series, rate_prefactor, rates,
                   spectral_density)
from .errors import (ConfigError, DomainError, FloqspinError,
                     IntegrationError, InvariantError, NoRelaxationError,
                     SingularityError)
from .floquet import (FloquetSolution, PropagatorGrid, continue_labels,
                      diagonalize_monodromy, floquet_solution, fold_to_zone,
                      propagate_period)
from .model import (BathParams, SystemParams, coupling_operator,
                    hamiltonian_at, hamiltonian_at_index, identity, sigma_x,
                    sigma_y, sigma_z)
from .stationary import (EmissionReport, StationaryState, density_matrix,
                         emission, relaxation, solve_stationary)
from .sweep import (AxisSpec, JumpRecord, PointResult, SweepResult,
                    SweepSpec, detect_jumps, run_point, run_sweep, write_csv,
                    write_metadata)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "SystemParams", "BathParams", "sigma_x", "sigma_y", "sigma_z",
    "identity", "hamiltonian_at", "hamiltonian_at_index", "coupling_operator",
    "PropagatorGrid", "FloquetSolution", "propagate_period",
    "diagonalize_monodromy", "continue_labels", "floquet_solution",
    "fold_to_zone",
    "TransitionTable", "spectral_density", "bose_occupation",
    "rate_prefactor", "matrix_element_series", "fourier_coefficients",
    "rates",
    "StationaryState", "EmissionReport", "solve_stationary",
    "density_matrix", "emission", "relaxation",
    "HfCoefficients", "EffectiveHamiltonian", "RatioJumpPrediction",
    "bessel_j", "bessel_root", "sideband_weights", "s_coefficients",
    "analytic_transition_elements", "effective_hamiltonian",
    "nearest_cdt_root", "ratio_jump_prediction",
    "AxisSpec", "SweepSpec", "PointResult", "SweepResult", "JumpRecord",
    "run_point", "run_sweep", "detect_jumps", "write_csv", "write_metadata",
    "FloqspinError", "ConfigError", "IntegrationError", "InvariantError",
    "DomainError", "SingularityError", "NoRelaxationError",
]
