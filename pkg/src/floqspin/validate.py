"""Built-in verification suite.

Ten end-to-end checks of the physics pipeline against closed-form oracles
and structural targets, each self-contained and runnable on a desktop in
seconds to a couple of minutes.  ``run_criteria`` prints one pass/fail line
per check; the ``floqspin validate`` subcommand and the acceptance test
module both call into this module so the checked tolerances live in exactly
one place.

Two sub-checks are known to be unattainable at the stated drive frequency
and are reported honestly as failures rather than silently loosened:

* check 5 requires the stationary-population discontinuity at the first
  CDT point to exceed 0.1 at omega = 40 h_x.  The converged value is
  2*alpha_x/|J_1(z_1)| ~ 0.04 (verified against an independent
  integrator); a 0.1 step would require omega <~ 16 h_x.
* check 8 requires the analytic/numeric coefficient deviation to shrink by
  a factor of only 1.5-3 from omega = 40 to 80.  The closed-form tables
  are complete to first order in 1/omega, so the residual is second order
  and the measured factor is 4.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import analytics
from .bath import fourier_coefficients, rates
from .errors import FloqspinError
from .floquet import floquet_solution
from .model import BathParams, SystemParams
from .stationary import density_matrix, emission, solve_stationary
from .sweep import AxisSpec, SweepSpec, detect_jumps, run_sweep, write_csv

FIG1_BATH = BathParams(gamma=0.01, omega_c=10.0, temperature=3.0)


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def _pipeline(system: SystemParams, bath: BathParams = FIG1_BATH,
              n_steps: int = 2048, n_max: int = 3):
    solution = floquet_solution(system, n_steps)
    table = rates(fourier_coefficients(solution, system.theta, n_max),
                  bath, solution)
    state = solve_stationary(table)
    return solution, table, state


def check_static_gibbs() -> tuple[bool, str]:
    """1: undriven limit thermalizes to the Gibbs ratio exp(-h_x/T)."""
    system = SystemParams(omega=40.0, theta=math.pi / 4, h_x=1.0)
    _, _, state = _pipeline(system)
    target = math.exp(-1.0 / 3.0)
    dev = abs(state.p1 / state.p0 - target)
    return dev <= 1e-3, f"|p1/p0 - exp(-1/3)| = {dev:.3e} (tol 1e-3)"


def check_quasienergy_law() -> tuple[bool, str]:
    """2: eps = -+(h_x/2) J0(h_z1/omega) and gap minima at the J0 roots."""
    omega = 40.0
    hz1_grid = np.linspace(0.0, 6.0 * omega, 300)
    worst = 0.0
    for hz1 in hz1_grid:
        system = SystemParams(omega=omega, theta=0.0, h_x=1.0, h_z1=hz1)
        eps = floquet_solution(system, 2048).quasienergies
        pred = 0.5 * abs(analytics.bessel_j(0, hz1 / omega))
        worst = max(worst, abs(eps[0] + pred), abs(eps[1] - pred))
    ok_law = worst <= 0.01

    def gap_at(hz1: float) -> float:
        return floquet_solution(
            SystemParams(omega=omega, theta=0.0, h_x=1.0, h_z1=hz1),
            2048).gap

    ok_roots = True
    locs = []
    for k in (1, 2, 3):
        target = analytics.bessel_root(k) * omega
        lo, hi = target - 2.0, target + 2.0
        for _ in range(40):  # ternary search on the V-shaped gap
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if gap_at(m1) < gap_at(m2):
                hi = m2
            else:
                lo = m1
        found = 0.5 * (lo + hi)
        locs.append(abs(found - target) / target)
        ok_roots = ok_roots and locs[-1] <= 0.002
    detail = (f"max |eps -+ J0/2| = {worst:.2e} (tol 0.01); "
              f"root offsets {['%.2e' % d for d in locs]} (tol 2e-3)")
    return ok_law and ok_roots, detail


def check_detailed_balance() -> tuple[bool, str]:
    """3: per-channel detailed balance at 50 random parameter points."""
    rng = np.random.default_rng(20240811)
    worst = 0.0
    for _ in range(50):
        system = SystemParams(
            omega=float(rng.uniform(8.0, 60.0)),
            theta=float(rng.uniform(0.2, 2.9)),
            h_x=1.0,
            h_z0=float(rng.uniform(0.05, 0.5)),
            h_z1=float(rng.uniform(0.0, 3.0)) * 40.0)
        bath = BathParams(gamma=float(rng.uniform(0.001, 0.1)),
                          omega_c=float(rng.uniform(2.0, 20.0)),
                          temperature=float(rng.uniform(0.5, 5.0)))
        _, table, _ = _pipeline(system, bath)
        for n in range(-table.n_max, table.n_max + 1):
            for lam in range(2):
                for mu in range(2):
                    d = table.gap_energy(n, lam, mu)
                    half = d / (2.0 * bath.temperature)
                    lhs = table.rate(n, lam, mu) * math.exp(-half)
                    rhs = table.rate(-n, mu, lam) * math.exp(half)
                    big = max(lhs, rhs)
                    if big > 0.0:
                        worst = max(worst, abs(lhs - rhs) / big)
    return worst <= 1e-8, f"worst relative violation {worst:.3e} (tol 1e-8)"


def check_parity_selection() -> tuple[bool, str]:
    """4: a^(0)_{1<-0} vanishes at theta = pi/2, zero bias."""
    omega = 40.0
    worst = 0.0
    for z in np.linspace(0.0, 6.0, 61):
        system = SystemParams(omega=omega, theta=math.pi / 2, h_x=1.0,
                              h_z1=z * omega)
        solution = floquet_solution(system, 2048)
        table = fourier_coefficients(solution, system.theta, 3)
        worst = max(worst, abs(table.a(0, 1, 0)))
    return worst < 1e-8, f"max |a^(0)_(1<-0)| = {worst:.2e} (tol 1e-8)"


def check_probability_jump() -> tuple[bool, str]:
    """5: inversion window, p0 discontinuity, swap identity, rho continuity."""
    omega = 40.0
    for z in np.linspace(0.3, 2.1, 10):
        system = SystemParams(omega=omega, theta=math.pi / 2, h_x=1.0,
                              h_z1=z * omega)
        _, _, state = _pipeline(system)
        if not state.p1 > state.p0:
            return False, f"no inversion at h_z1/omega = {z:.2f}"

    z1 = analytics.bessel_root(1)
    sides = {}
    for sign in (-1, +1):
        system = SystemParams(omega=omega, theta=math.pi / 2, h_x=1.0,
                              h_z1=z1 * omega + sign * 0.01 * omega)
        solution, table, state = _pipeline(system)
        state = density_matrix(state, solution)
        sides[sign] = state
    jump = abs(sides[+1].p0 - sides[-1].p0)
    swap = abs(sides[+1].p0 - sides[-1].p1)
    rho_step = float(np.linalg.norm(sides[+1].density[0]
                                    - sides[-1].density[0]))
    ok_jump = jump > 0.1
    ok_swap = swap <= 0.02
    ok_rho = rho_step <= 0.02
    note = "" if ok_jump else ("; converged physics gives ~0.04 at "
                               "omega=40 h_x, see module docstring")
    detail = (f"inversion ok; |dp0| = {jump:.4f} (required > 0.1{note}); "
              f"swap residual {swap:.1e} (tol 0.02); "
              f"|drho| = {rho_step:.1e} (tol 0.02)")
    return ok_jump and ok_swap and ok_rho, detail


def _ratio_jump_magnitude(omega: float) -> tuple[float, float]:
    z1 = analytics.bessel_root(1)
    zs = np.linspace(z1 - 0.15, z1 + 0.15, 61)
    ratios = []
    for z in zs:
        system = SystemParams(omega=omega, theta=math.pi / 4, h_x=1.0,
                              h_z1=z * omega)
        solution, table, state = _pipeline(system)
        ratios.append(emission(state, table, solution).ratio)
    found = detect_jumps(zs * omega, np.array(ratios), 0.02, omega=omega)
    if not found:
        return 0.0, math.inf
    best = max(found, key=lambda j: j.magnitude)
    return best.magnitude, abs(best.location - z1 * omega)


def check_ratio_jump() -> tuple[bool, str]:
    """6: red/blue ratio discontinuity ~10% at omega=40, halving at 80."""
    mag40, offset40 = _ratio_jump_magnitude(40.0)
    mag80, _ = _ratio_jump_magnitude(80.0)
    step = 0.3 / 60 * 40.0
    ok40 = abs(mag40 - 0.10) <= 0.05 and offset40 <= 2 * step
    ok_scaling = abs(mag80 - 0.5 * mag40) <= 0.15 * 0.5 * mag40
    detail = (f"jump(40) = {mag40:.4f} (target 0.10 +- 0.05, "
              f"offset {offset40:.2f}); jump(80) = {mag80:.4f} "
              f"vs half {0.5 * mag40:.4f} (tol 15%)")
    return ok40 and ok_scaling, detail


def check_floquet_gibbs() -> tuple[bool, str]:
    """7: theta=0 stays Floquet-Gibbs and the sidebands are dark."""
    omega = 40.0
    worst_gibbs = 0.0
    worst_intensity = 0.0
    for z in np.linspace(0.0, 6.0, 61):
        system = SystemParams(omega=omega, theta=0.0, h_x=1.0,
                              h_z1=z * omega)
        solution, table, state = _pipeline(system)
        gibbs = math.exp(solution.gap / FIG1_BATH.temperature)
        worst_gibbs = max(worst_gibbs, abs(state.p0 / state.p1 - gibbs))
        report = emission(state, table, solution)
        worst_intensity = max(worst_intensity, report.intensity_blue,
                              report.intensity_red)
    bound = 1e-6 * FIG1_BATH.gamma * omega
    ok = worst_gibbs <= 0.02 and worst_intensity < bound
    return ok, (f"max |p0/p1 - exp(gap/T)| = {worst_gibbs:.2e} (tol 0.02); "
                f"max sideband intensity {worst_intensity:.1e} "
                f"(tol {bound:.1e})")


def _coefficient_deviation(omega: float) -> float:
    worst = 0.0
    for z in np.linspace(0.0, 6.0, 121):
        base = SystemParams(omega=omega, theta=0.0, h_x=1.0, h_z1=z * omega)
        solution = floquet_solution(base, 2048)
        for theta in (0.0, math.pi / 4, math.pi / 2):
            table = fourier_coefficients(solution, theta, 3)
            system = base.replace(theta=theta)
            for n in (0, -1):
                numeric = table.coefficients[table.n_max + n]
                ana = analytics.analytic_transition_elements(system, n)
                worst = max(worst, float(np.abs(numeric - ana).max()))
    return worst


def check_analytic_agreement() -> tuple[bool, str]:
    """8: closed-form tables match the Fourier coefficients elementwise."""
    dev40 = _coefficient_deviation(40.0)
    dev80 = _coefficient_deviation(80.0)
    factor = dev40 / dev80 if dev80 > 0 else math.inf
    ok40 = dev40 <= 5e-3
    ok_factor = 1.5 <= factor <= 3.0
    note = "" if ok_factor else ("; first-order-complete tables give the "
                                 "pure second-order factor 4, see module "
                                 "docstring")
    detail = (f"max dev {dev40:.2e} at omega=40 (tol 5e-3), "
              f"{dev80:.2e} at omega=80; improvement factor {factor:.2f} "
              f"(required within [1.5, 3]{note})")
    return ok40 and ok_factor, detail


def check_property_suite() -> tuple[bool, str]:
    """9: unitarity, orthonormality, periodicity, Parseval, gamma, grid."""
    from .bath import matrix_element_series
    from .floquet import propagate_period, diagonalize_monodromy

    rng = np.random.default_rng(7)
    checks = []
    for _ in range(6):
        system = SystemParams(omega=float(rng.uniform(10.0, 100.0)),
                              theta=float(rng.uniform(0.0, math.pi)),
                              h_x=1.0,
                              h_z0=float(rng.uniform(0.0, 0.3)),
                              h_z1=float(rng.uniform(0.0, 250.0)))
        grid = propagate_period(system, 2048)
        checks.append(("unitarity", grid.unitarity_defect(), 1e-10))
        solution = diagonalize_monodromy(grid)
        modes = solution.modes
        norms = np.abs(np.einsum("ljc,ljc->lj", modes.conj(), modes) - 1.0)
        ortho = np.abs(np.einsum("jc,jc->j", modes[0].conj(), modes[1]))
        checks.append(("orthonormality",
                       float(max(norms.max(), ortho.max())), 1e-8))
        checks.append(("periodicity",
                       float(np.abs(modes[:, -1] - modes[:, 0]).max()), 1e-8))
        series = matrix_element_series(solution, system.theta)
        spectrum = np.fft.fft(series, axis=0) / solution.n_steps
        parseval = np.abs((np.abs(spectrum) ** 2).sum(axis=0)
                          - (np.abs(series) ** 2).mean(axis=0)).max()
        checks.append(("parseval", float(parseval), 1e-10))
        table = fourier_coefficients(solution, system.theta, 3)
        p_a = solve_stationary(rates(table, FIG1_BATH, solution)).populations
        scaled = FIG1_BATH.replace(gamma=FIG1_BATH.gamma * 7.5)
        p_b = solve_stationary(rates(table, scaled, solution)).populations
        checks.append(("gamma-invariance",
                       float(np.abs(p_a - p_b).max()), 1e-12))
        eps_2n = floquet_solution(system, 4096).quasienergies
        checks.append(("grid-doubling",
                       float(np.abs(solution.quasienergies - eps_2n).max()),
                       1e-8))
    bad = [(name, value, tol) for name, value, tol in checks if value > tol]
    worst = {}
    for name, value, tol in checks:
        worst[name] = max(worst.get(name, 0.0), value)
    detail = "; ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return not bad, detail


def check_figure_artifacts(outdir: str | None = None) -> tuple[bool, str]:
    """10: 200x200 maps of p0 and I_b - I_r with the CDT ridge structure."""
    t0 = time.time()
    outdir = outdir or tempfile.mkdtemp(prefix="floqspin-maps-")
    omega = 40.0
    spec = SweepSpec(
        system=SystemParams(omega=omega, theta=math.pi / 2, h_x=1.0),
        bath=FIG1_BATH,
        axis1=AxisSpec("h_z1", 0.0, 6.0 * omega, 200),
        axis2=AxisSpec("theta", 0.0, math.pi / 2, 200),
        n_steps=2048, n_max=3)
    result = run_sweep(spec)
    path = os.path.join(outdir, "map_p0_emission.csv")
    write_csv(result, path)

    n1 = spec.axis1.points
    hz1 = spec.axis1.values()
    thetas = spec.axis2.values()
    # the (h_z1=0, theta=pi/2) corner is the no-relaxation pathology
    p0 = np.array([r.p0 if r is not None else math.nan
                   for r in result.records]).reshape(len(thetas), n1)
    diff = np.array([r.i_blue - r.i_red if r is not None else math.nan
                     for r in result.records]).reshape(len(thetas), n1)

    # inversion region: p0 < 0.5 near theta = pi/2 at small drive
    top = p0[-1]  # theta = pi/2 row
    window = (hz1 >= 0.3 * omega) & (hz1 <= 2.1 * omega)
    ok_inversion = bool((top[window] < 0.5).all())

    # jump ridges of p0 at the first two CDT points (theta = pi/2 row)
    found = detect_jumps(hz1[1:], top[1:], 0.02, omega=omega)
    ridge_ok = []
    step = hz1[1] - hz1[0]
    for k in (1, 2):
        target = analytics.bessel_root(k) * omega
        near = [j for j in found if abs(j.location - target) <= 1.5 * step]
        ridge_ok.append(bool(near))
    ok_ridges = all(ridge_ok)

    # I_b - I_r discontinuity strongest around theta ~ 0.3 pi
    z1 = analytics.bessel_root(1) * omega
    i_left = np.argmin(np.abs(hz1 - (z1 - step)))
    i_right = np.argmin(np.abs(hz1 - (z1 + step)))
    strength = np.abs(diff[:, i_right] - diff[:, i_left])
    theta_star = thetas[int(np.argmax(strength))]
    ok_theta = 0.2 * math.pi <= theta_star <= 0.4 * math.pi

    elapsed = time.time() - t0
    ok = ok_inversion and ok_ridges and ok_theta and elapsed < 600.0
    detail = (f"inversion {'ok' if ok_inversion else 'MISSING'}; "
              f"ridges at z1/z2 {ridge_ok}; strongest emission jump at "
              f"theta = {theta_star / math.pi:.3f} pi (target ~0.3 pi); "
              f"{elapsed:.0f}s; CSV: {path}")
    return ok, detail


CRITERIA = (
    (1, "static Gibbs ratio", check_static_gibbs),
    (2, "quasienergy law and CDT locations", check_quasienergy_law),
    (3, "per-channel detailed balance", check_detailed_balance),
    (4, "generalized parity selection", check_parity_selection),
    (5, "probability inversion and jump at CDT", check_probability_jump),
    (6, "intensity-ratio jump and 1/omega scaling", check_ratio_jump),
    (7, "Floquet-Gibbs limit at theta=0", check_floquet_gibbs),
    (8, "analytic/numeric coefficient agreement", check_analytic_agreement),
    (9, "property suite", check_property_suite),
    (10, "figure-map artifacts", check_figure_artifacts),
)


def run_criteria(indices=None, verbose: bool = False) -> list[CriterionResult]:
    results = []
    for index, name, func in CRITERIA:
        if indices is not None and index not in indices:
            continue
        start = time.time()
        try:
            passed, detail = func()
        except FloqspinError as exc:
            passed, detail = False, f"error: {exc}"
        elapsed = time.time() - start
        results.append(CriterionResult(index, name, passed, detail, elapsed))
        if verbose:
            status = "PASS" if passed else "FAIL"
            print(f"{status}  {index:2d}  {name}  [{elapsed:.1f}s]  {detail}")
    return results
