"""High-frequency (rotating-frame Magnus) analytics.

Provides the Bessel machinery, the effective-Hamiltonian quasienergy
prediction, the closed-form transition coefficients between the
sigma_x-basis Floquet states, and the predicted discontinuity of the
red/blue intensity ratio at coherent destruction of tunneling (CDT).

Notation: z = h_z1/omega is the reduced drive amplitude, g_x = sin(theta),
g_z = cos(theta), and

    l_m = (h_x / (m * omega)) * J_m(z),   m >= 1,   l_0 = 0

are the sideband weights of the first-order mode propagator in the rotating
frame.  The transition element between sigma_x-basis states u_lam, u_mu is

    a^(n)_{lam<-mu} = S_x^(n) <sigma_x> + i S_y^(n) <sigma_y>
                      + S_z^(n) <sigma_z>,

with real coefficients S evaluated here.  Only combinations allowed by the
generalized parity symmetry of the zero-bias Hamiltonian are kept (the
exact Fourier coefficients obey those selection rules identically); the
surviving terms were validated channel by channel against the numerical
Fourier coefficients deep in the high-frequency regime.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .floquet import fold_to_zone
from .model import SystemParams, sigma_x_minus, sigma_x_plus

_BESSEL_MAX_ORDER = 200
_BESSEL_MAX_ARG = 1e3
_L_SERIES_TOL = 1e-14


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x), integer order.

    Small arguments use the ascending power series; larger ones use Miller's
    downward recurrence with even-order normalization, extending the start
    order until two runs agree.  Absolute error below 1e-12 for |n| <= 200,
    |x| <= 1e3.
    """
    n = int(n)
    if abs(n) > _BESSEL_MAX_ORDER:
        raise DomainError(f"order |n| <= {_BESSEL_MAX_ORDER} required, got {n}")
    if not (abs(x) <= _BESSEL_MAX_ARG):
        raise DomainError(f"argument |x| <= {_BESSEL_MAX_ARG:g} required, got {x}")

    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x < 0:
        x = -x
        if n % 2:
            sign = -sign
    if x == 0.0:
        return sign if n == 0 else 0.0
    if x <= 8.0:
        return sign * _bessel_series(n, x)
    return sign * _bessel_miller(n, x)


def _bessel_series(n: int, x: float) -> float:
    # J_n(x) = sum_k (-1)^k (x/2)^(n+2k) / (k! (n+k)!)
    if 0.5 * x == 0.0:  # subnormal underflow
        return 1.0 if n == 0 else 0.0
    log_t0 = n * math.log(0.5 * x) - math.lgamma(n + 1.0)
    if log_t0 < -745.0:  # underflows; |J_n| < 1e-323
        return 0.0
    term = math.exp(log_t0)
    total = term
    q = 0.25 * x * x
    for k in range(1, 400):
        term *= -q / (k * (n + k))
        total += term
        if abs(term) <= 1e-18 * max(1.0, abs(total)):
            break
    return total


def _bessel_miller(n: int, x: float) -> float:
    def run(start: int) -> float:
        jp, j = 0.0, 1e-300
        result = 0.0
        norm = 0.0
        for k in range(start, 0, -1):
            jm = (2.0 * k / x) * j - jp
            jp, j = j, jm
            if k - 1 == n:
                result = j
            if (k - 1) % 2 == 0:
                norm += 2.0 * j
            if abs(j) > 1e250:
                j *= 1e-250
                jp *= 1e-250
                result *= 1e-250
                norm *= 1e-250
        norm -= j  # the k=0 term enters once, not twice
        return result / norm

    start = max(n, int(x)) + 20
    if start % 2:
        start += 1
    prev = run(start)
    for _ in range(12):
        start += 20
        cur = run(start)
        if abs(cur - prev) <= 1e-15 * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def bessel_root(k: int) -> float:
    """k-th positive root of J_0 (k >= 1), via McMahon seed plus Newton."""
    if k < 1:
        raise DomainError(f"root index must be >= 1, got {k}")
    beta = (k - 0.25) * math.pi
    z = beta + 1.0 / (8.0 * beta)
    for _ in range(60):
        j0 = bessel_j(0, z)
        j1 = bessel_j(1, z)
        step = j0 / j1  # J_0' = -J_1
        z += step
        if abs(step) < 1e-14:
            break
    return z


def sideband_weights(params: SystemParams, m_max: int | None = None) -> np.ndarray:
    """Weights l_m = (h_x/(m*omega)) J_m(z) for m = 1..m_max.

    When m_max is None the series is truncated at the first order beyond the
    classically allowed region m > z with |l_m| < 1e-14; the weights decay
    superexponentially there.
    """
    z = params.drive_ratio
    scale = params.h_x / params.omega
    out = []
    cap = m_max if m_max is not None else min(_BESSEL_MAX_ORDER, int(abs(z)) + 60)
    for m in range(1, cap + 1):
        lm = (scale / m) * bessel_j(m, z)
        out.append(lm)
        if m_max is None and m > abs(z) + 2 and abs(lm) < _L_SERIES_TOL:
            break
    return np.array(out)


@dataclass(frozen=True)
class HfCoefficients:
    """Coefficients of one Fourier harmonic of the coupling operator."""

    n: int
    s_x: float
    s_y: float
    s_z: float
    l: np.ndarray      # sideband weights l_1..l_mmax
    alpha_x: float
    g_x: float
    g_z: float

    @property
    def m_max(self) -> int:
        return len(self.l)


def _alpha_x(l: np.ndarray, z: float, n: int) -> float:
    """alpha_x^(n) = sum_m l_m [ J_{-n+m}(z) - (-1)^m J_{-n-m}(z) ]."""
    total = 0.0
    for m, lm in enumerate(l, start=1):
        if lm == 0.0:
            continue
        term = bessel_j(-n + m, z) - (-1.0) ** m * bessel_j(-n - m, z)
        total += lm * term
    return total


def s_coefficients(params: SystemParams, n: int) -> HfCoefficients:
    """First-order harmonic coefficients S_x, S_y, S_z for shift n.

    Parity of the zero-bias Hamiltonian restricts which Pauli component
    carries even and odd harmonics: sigma_x contributes J_n(z) to S_x (n
    even) or S_y (n odd); sigma_z contributes the static S_z (n = 0), the
    single sideband weight -l_|n| to S_x (n odd) and -sign(n) l_|n| to S_y
    (n even), and the sigma_x channel acquires the first-order sideband sum
    alpha_x in S_z (n odd).
    """
    if params.omega < 5.0 * params.h_x:
        warnings.warn(
            "high-frequency expansion used at omega < 5*h_x; "
            "accuracy degrades as O(h_x/omega)", stacklevel=2)
    z = params.drive_ratio
    g_x = math.sin(params.theta)
    g_z = math.cos(params.theta)
    l = sideband_weights(params)
    l_abs_n = l[abs(n) - 1] if 1 <= abs(n) <= len(l) else 0.0
    alpha = _alpha_x(l, z, n)
    even = (n % 2 == 0)

    if even:
        s_x = g_x * bessel_j(n, z)
        s_y = -g_z * float(np.sign(n)) * l_abs_n
        s_z = g_z if n == 0 else 0.0
    else:
        s_x = -g_z * l_abs_n
        s_y = g_x * bessel_j(n, z)
        s_z = g_x * alpha

    return HfCoefficients(n=n, s_x=s_x, s_y=s_y, s_z=s_z, l=l,
                          alpha_x=alpha, g_x=g_x, g_z=g_z)


def _basis_states(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """sigma_x-basis Floquet states ordered by the sign[J_0] convention."""
    s = bessel_j(0, params.drive_ratio)
    if s >= 0.0:
        return sigma_x_minus, sigma_x_plus
    return sigma_x_plus, sigma_x_minus


def analytic_transition_elements(params: SystemParams, n: int) -> np.ndarray:
    """Closed-form a^(n)_{lam<-mu} in the labeled sigma_x eigenbasis.

    Matrix elements of the Pauli operators between sigma_x eigenstates are
    <sigma_x> = +-1 on the diagonal, <sigma_y> = -+i off the diagonal and
    <sigma_z> = 1 off the diagonal; the state order follows the sign[J_0]
    labeling so the table compares index to index with the continued
    numerical labels.
    """
    from .model import sigma_x, sigma_y, sigma_z

    coeff = s_coefficients(params, n)
    u0, u1 = _basis_states(params)
    basis = np.stack([u0, u1])
    mx = basis.conj() @ sigma_x @ basis.T
    my = basis.conj() @ sigma_y @ basis.T
    mz = basis.conj() @ sigma_z @ basis.T
    return coeff.s_x * mx + 1j * coeff.s_y * my + coeff.s_z * mz


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Leading-order effective Hamiltonian (h_eff_x sigma_x + h_eff_z sigma_z)/1."""

    coeff_x: float
    coeff_z: float
    quasienergies: np.ndarray  # (2,) folded prediction, ascending

    @property
    def gap(self) -> float:
        return float(self.quasienergies[1] - self.quasienergies[0])


def effective_hamiltonian(params: SystemParams) -> EffectiveHamiltonian:
    """Stroboscopic effective Hamiltonian to first order in 1/omega.

    coeff_x = (h_x/2) J_0(z).  The first-order sigma_z piece is
    h_x J_0(z) sum_k l_{2k-1}: it is proportional to J_0 and therefore
    vanishes at the CDT points, preserving the exact parity-protected
    quasienergy crossings at the roots of J_0.
    """
    z = params.drive_ratio
    coeff_x = 0.5 * params.h_x * bessel_j(0, z)
    l = sideband_weights(params)
    odd_sum = float(l[::2].sum())
    coeff_z = 0.5 * params.h_z0 + params.h_x * bessel_j(0, z) * odd_sum
    magnitude = math.hypot(coeff_x, coeff_z)
    eps = np.array([fold_to_zone(-magnitude, params.omega),
                    fold_to_zone(+magnitude, params.omega)])
    eps.sort()
    eps.setflags(write=False)
    return EffectiveHamiltonian(coeff_x=coeff_x, coeff_z=coeff_z,
                                quasienergies=eps)


@dataclass(frozen=True)
class RatioJumpPrediction:
    """One-sided red/blue intensity ratios at a CDT point."""

    ratio_left: float
    ratio_right: float
    jump_magnitude: float
    root_index: int
    root_value: float  # z_k


def nearest_cdt_root(z: float, k_max: int = 30) -> tuple[int, float]:
    """Index and value of the root of J_0 closest to z."""
    best_k, best_z = 1, bessel_root(1)
    for k in range(2, k_max + 1):
        zk = bessel_root(k)
        if abs(zk - z) < abs(best_z - z):
            best_k, best_z = k, zk
        if zk > z + math.pi:
            break
    return best_k, best_z


def ratio_jump_prediction(params: SystemParams) -> RatioJumpPrediction:
    """Predicted discontinuity of I_red/I_blue at the nearest CDT point.

    With near-equal populations at the crossing, the one-sided ratios are

        ratio = [(J_-1(z_k) -+ alpha_x^(-1)(z_k)) /
                 (J_-1(z_k) +- alpha_x^(-1)(z_k))]^2,

    upper signs on the low-amplitude side (alpha_x carries one factor of
    h_x/omega through the sideband weights).  The jump magnitude scales as
    1/omega.
    """
    z = params.drive_ratio
    k, z_k = nearest_cdt_root(z)
    if abs(z - z_k) > 0.1:
        raise DomainError(
            f"h_z1/omega = {z:.4f} is not within 0.1 of a CDT point; "
            f"nearest is z_{k} = {z_k:.6f}")
    at_root = params.replace(h_z1=z_k * params.omega)
    coeff = s_coefficients(at_root, -1)
    j_minus1 = bessel_j(-1, z_k)
    x = coeff.alpha_x
    left = ((j_minus1 - x) / (j_minus1 + x)) ** 2
    right = ((j_minus1 + x) / (j_minus1 - x)) ** 2
    return RatioJumpPrediction(ratio_left=left, ratio_right=right,
                               jump_magnitude=abs(left - right),
                               root_index=k, root_value=z_k)
