"""Floquet engine: one-period propagator, quasienergies, modes, labeling.

The one-period propagator (monodromy operator) U(tau, 0) is integrated on a
uniform grid shared with the Fourier analysis in :mod:`floqspin.bath`.  Its
eigenpairs give the quasienergies eps_lambda, folded into the first
Brillouin zone (-omega/2, omega/2], and the stroboscopic Floquet states,
from which the periodic modes |phi_lambda(t_j)> are reconstructed as

    |phi_lambda(t_j)> = exp(+i eps_lambda t_j) U(t_j, 0) |phi_lambda(0)>.

Labels are assigned in ascending quasienergy order.  Within a near-exact
degeneracy (coherent destruction of tunneling) the eigenbasis is chosen to
diagonalize sigma_x, matching the limit of vanishing static bias from
either side of the crossing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._core import get_kernel
from .errors import ConfigError, InvariantError
from .model import SystemParams, sigma_x_minus, sigma_x_plus

DEFAULT_N_STEPS = 2048

#: relative (to omega) quasienergy distance below which the monodromy is
#: treated as degenerate and the sigma_x eigenbasis convention applies
DEGENERACY_RTOL = 1e-9

#: wider window used by label continuation around a detected crossing
CONTINUATION_WINDOW_RTOL = 1e-6

UNITARITY_TOL = 1e-10


def fold_to_zone(value: float, omega: float) -> float:
    """Fold an energy into the first Brillouin zone (-omega/2, omega/2]."""
    folded = math.remainder(value, omega)
    if folded <= -0.5 * omega:
        folded += omega
    return folded


@dataclass(frozen=True)
class PropagatorGrid:
    """U(t_j, 0) on the uniform one-period grid t_j = j*tau/n_steps."""

    params: SystemParams
    times: np.ndarray        # (n_steps+1,)
    propagators: np.ndarray  # (n_steps+1, 2, 2) complex

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def monodromy(self) -> np.ndarray:
        return self.propagators[-1]

    def unitarity_defect(self) -> float:
        """max_j || U(t_j,0)^dag U(t_j,0) - 1 ||_max."""
        u = self.propagators
        gram = np.einsum("jba,jbc->jac", u.conj(), u)
        gram[:, 0, 0] -= 1.0
        gram[:, 1, 1] -= 1.0
        return float(np.abs(gram).max())


@dataclass(frozen=True)
class FloquetSolution:
    """Quasienergies and periodic Floquet modes on the shared time grid."""

    params: SystemParams
    times: np.ndarray          # (n_steps+1,)
    quasienergies: np.ndarray  # (2,) ascending, first Brillouin zone
    modes: np.ndarray          # (2, n_steps+1, 2) complex, modes[lam, j]
    degenerate: bool
    swapped_from_previous: bool | None = None

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def gap(self) -> float:
        """Quasienergy splitting eps_1 - eps_0."""
        return float(self.quasienergies[1] - self.quasienergies[0])

    def initial_mode(self, lam: int) -> np.ndarray:
        """Stroboscopic Floquet state |phi_lam(0)>."""
        return self.modes[lam, 0]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def propagate_period(params: SystemParams, n_steps: int = DEFAULT_N_STEPS,
                     backend: str | None = None) -> PropagatorGrid:
    """Integrate U(t_j, 0) over one drive period.

    n_steps must be even and at least 64; the grid is shared with the
    discrete Fourier transform of the mode matrix elements, so aliasing
    margins are set here once.
    """
    if n_steps < 64 or n_steps % 2:
        raise ConfigError(
            f"n_steps must be even and >= 64, got {n_steps}")
    kernel = get_kernel(backend)
    props = kernel(params.h_x, params.h_z0, params.h_z1, params.omega,
                   n_steps)
    times = np.arange(n_steps + 1) * (params.tau / n_steps)
    return PropagatorGrid(params=params, times=_freeze(times),
                          propagators=_freeze(props))


def _eig2_unitary(u: np.ndarray) -> tuple[complex, complex, np.ndarray, np.ndarray]:
    """Eigenpairs of a 2x2 (numerically) unitary matrix.

    Returns (lam_a, lam_b, v_a, v_b) with exactly orthonormal vectors: the
    better-conditioned eigenvector is computed from the rank-1 structure of
    (u - lam), the other is its orthogonal complement, which for a normal
    matrix is exact.
    """
    tr = u[0, 0] + u[1, 1]
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    disc = np.sqrt(tr * tr - 4.0 * det)
    if abs(tr - disc) > abs(tr + disc):
        disc = -disc
    lam_a = 0.5 * (tr + disc)
    lam_b = det / lam_a if lam_a != 0 else 0.5 * (tr - disc)

    def candidate(lam):
        row1 = np.array([u[0, 1], lam - u[0, 0]], dtype=complex)
        row2 = np.array([lam - u[1, 1], u[1, 0]], dtype=complex)
        n1, n2 = np.linalg.norm(row1), np.linalg.norm(row2)
        return (row1, n1) if n1 >= n2 else (row2, n2)

    va, na = candidate(lam_a)
    vb, nb = candidate(lam_b)
    if na == 0.0 and nb == 0.0:
        # u is a multiple of the identity: any orthonormal basis works
        return lam_a, lam_b, np.array([1.0, 0.0], dtype=complex), \
            np.array([0.0, 1.0], dtype=complex)
    if na >= nb:
        va = va / na
        vb = np.array([-va[1].conjugate(), va[0].conjugate()])
    else:
        vb = vb / nb
        va = np.array([-vb[1].conjugate(), vb[0].conjugate()])
    return lam_a, lam_b, va, vb


def _degenerate_sign(params: SystemParams) -> float:
    from .analytics import bessel_j

    s = bessel_j(0, params.drive_ratio)
    return math.copysign(1.0, s) if s != 0.0 else 1.0


def _fix_gauge(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the dominant sigma_x-basis overlap is real positive.

    Eigenvectors are defined up to a phase; fixing it against the sigma_x
    eigenbasis makes mode phases deterministic and lets transition
    coefficients compare elementwise with the closed-form tables.
    """
    o_minus = sigma_x_minus.conj() @ v
    o_plus = sigma_x_plus.conj() @ v
    ref = o_minus if abs(o_minus) >= abs(o_plus) else o_plus
    if ref == 0:
        return v
    return v * (ref.conjugate() / abs(ref))


def _is_degenerate(eps: np.ndarray, omega: float, rtol: float) -> bool:
    gap = float(abs(eps[1] - eps[0]))
    return min(gap, omega - gap) < rtol * omega


def diagonalize_monodromy(grid: PropagatorGrid,
                          omega: float | None = None) -> FloquetSolution:
    """Quasienergies and Floquet modes from the one-period propagator.

    Eigenvalues exp(-i eps tau) of U(tau,0) are mapped to quasienergies
    folded into (-omega/2, omega/2] and sorted ascending.  When the pair is
    degenerate within 1e-9*omega the eigenbasis within the degenerate
    subspace is chosen to diagonalize sigma_x, with |phi_0(0)> set to the
    sigma_x eigenstate that continues the ascending order from the side of
    the crossing selected by the sign of J_0(h_z1/omega).
    """
    params = grid.params
    if omega is None:
        omega = params.omega
    defect = grid.unitarity_defect()
    if defect > UNITARITY_TOL:
        raise InvariantError(
            f"propagator grid is not unitary: defect {defect:.3e} "
            f"exceeds {UNITARITY_TOL:.1e}")

    tau = 2.0 * math.pi / omega
    lam_a, lam_b, va, vb = _eig2_unitary(grid.monodromy)
    eps = np.array([fold_to_zone(-np.angle(lam_a) / tau, omega),
                    fold_to_zone(-np.angle(lam_b) / tau, omega)])
    vecs = [va, vb]
    order = np.argsort(eps, kind="stable")
    eps = eps[order]
    vecs = [vecs[order[0]], vecs[order[1]]]

    degenerate = _is_degenerate(eps, omega, DEGENERACY_RTOL)
    if degenerate:
        s = _degenerate_sign(params)
        vecs = [sigma_x_minus if s > 0 else sigma_x_plus,
                sigma_x_plus if s > 0 else sigma_x_minus]
    else:
        vecs = [_fix_gauge(vecs[0]), _fix_gauge(vecs[1])]

    u = grid.propagators
    modes = np.empty((2, len(grid.times), 2), dtype=complex)
    for lam in range(2):
        phase = np.exp(1j * eps[lam] * grid.times)
        modes[lam] = phase[:, None] * np.einsum("jab,b->ja", u, vecs[lam])

    return FloquetSolution(params=params, times=grid.times,
                           quasienergies=_freeze(eps), modes=_freeze(modes),
                           degenerate=degenerate)


def floquet_solution(params: SystemParams, n_steps: int = DEFAULT_N_STEPS,
                     backend: str | None = None) -> FloquetSolution:
    """Propagate one period and diagonalize the monodromy in one call."""
    return diagonalize_monodromy(propagate_period(params, n_steps, backend))


def _apply_permutation(solution: FloquetSolution, perm: tuple[int, int],
                       swapped: bool) -> FloquetSolution:
    eps = _freeze(solution.quasienergies[list(perm)].copy())
    modes = _freeze(solution.modes[list(perm)].copy())
    return replace(solution, quasienergies=eps, modes=modes,
                   swapped_from_previous=swapped)


def continue_labels(previous: FloquetSolution,
                    current: FloquetSolution) -> FloquetSolution:
    """Propagate state labels from a neighbouring parameter point.

    Permutes the labels of ``current`` to maximize the summed stroboscopic
    overlaps with ``previous``, then re-imposes ascending quasienergy order
    except inside a degeneracy window around a crossing, where the sigma_x
    convention of the vanishing-bias limit decides.  The returned solution
    records whether the state carrying label 0 switched branch.
    """
    if previous.n_steps != current.n_steps or \
            previous.params.omega != current.params.omega:
        raise ConfigError("label continuation requires identical grids")

    prev0, prev1 = previous.initial_mode(0), previous.initial_mode(1)
    cur0, cur1 = current.initial_mode(0), current.initial_mode(1)
    keep = abs(prev0 @ cur0.conj()) ** 2 + abs(prev1 @ cur1.conj()) ** 2
    cross = abs(prev0 @ cur1.conj()) ** 2 + abs(prev1 @ cur0.conj()) ** 2
    perm = (1, 0) if cross > keep else (0, 1)

    in_window = _is_degenerate(current.quasienergies, current.params.omega,
                               CONTINUATION_WINDOW_RTOL)
    if in_window:
        s = _degenerate_sign(current.params)
        target0 = sigma_x_minus if s > 0 else sigma_x_plus
        target1 = sigma_x_plus if s > 0 else sigma_x_minus
        keep_x = abs(target0 @ cur0.conj()) ** 2 + abs(target1 @ cur1.conj()) ** 2
        cross_x = abs(target0 @ cur1.conj()) ** 2 + abs(target1 @ cur0.conj()) ** 2
        perm = (1, 0) if cross_x > keep_x else (0, 1)
    else:
        # ascending order wins outside the window
        eps = current.quasienergies[list(perm)]
        if eps[0] > eps[1]:
            perm = (perm[1], perm[0])

    new_mode0 = (cur0, cur1)[perm[0]]
    swapped = bool(abs(prev1 @ new_mode0.conj()) ** 2
                   > abs(prev0 @ new_mode0.conj()) ** 2)
    return _apply_permutation(current, perm, swapped)
