"""The verification suite behind `quadosc verify` and the acceptance tests.

Every check compares a closed-form result against an independent
numerical path (or an exact identity) at a pinned tolerance.  Checks are
pure functions of the RunConfig; randomized sweeps derive their streams
from (config.seed, check index) so reports are reproducible and
independent of execution order.
"""

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, eigenstates, kernel, moments
from .config import RunConfig, require_underdamped
from .models import ModelKind, builtin_model, operator_form

QUAD_MODELS = (ModelKind.MODEL1, ModelKind.MODEL2, ModelKind.SHIFTED, ModelKind.MODEL3)


@dataclass
class CheckResult:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool
    runtime_ms: float = 0.0
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def overall(self):
        return all(c.passed for c in self.checks)

    def sorted_checks(self):
        return sorted(self.checks, key=lambda c: c.name)

    def to_json(self):
        """Deterministic serialization: stable-ordered by name, no timings
        (wall-clock would break byte-identical reports)."""
        payload = {
            "overall": self.overall,
            "checks": [
                {
                    "name": c.name,
                    "measured": c.measured,
                    "expected": c.expected,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                    "detail": c.detail,
                }
                for c in self.sorted_checks()
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _result(name, measured, tolerance, expected=0.0):
    measured = float(measured)
    return CheckResult(name, measured, float(expected), float(tolerance),
                       bool(measured <= tolerance))


def _rng(config, index):
    return np.random.default_rng([config.seed, index])


# --- criterion 1: generic pipeline vs closed-form kernels -----------------

def check_kernel_oracle(config):
    results = []
    steps = 2048
    for im, kind in enumerate(QUAD_MODELS):
        rng = _rng(config, 10 + im)
        d_coeff = 0.0
        d_pref = 0.0
        for _ in range(50):
            omega0 = rng.uniform(0.5, 2.0)
            lam = rng.uniform(0.0, 0.9 * omega0)
            om = math.sqrt(omega0 * omega0 - lam * lam)
            t = rng.uniform(0.01, 0.9) * math.pi / om
            coeffs = builtin_model(kind, omega0, lam)
            mu = kernel.solve_mu_numeric(coeffs, t, steps)
            num = kernel.kernel_params_numeric(coeffs, mu, t)
            ref = kernel.kernel_closed_form(coeffs, t)
            d_coeff = max(
                d_coeff,
                abs(num.alpha - ref.alpha),
                abs(num.beta - ref.beta),
                abs(num.gamma - ref.gamma),
            )
            d_pref = max(
                d_pref, abs(num.prefactor - ref.prefactor) / abs(ref.prefactor)
            )
        results.append(_result(f"c01_kernel_oracle_coeffs_{kind.value}", d_coeff, 1e-7))
        results.append(_result(f"c01_kernel_oracle_prefactor_{kind.value}", d_pref, 1e-6))
    return results


# --- criterion 2: norm laws ----------------------------------------------

def check_norm_laws(config):
    omega0, lam = config.omega0, config.lam
    t = 1.0
    chi = dynamics.initial_gaussian(0.0, 0.0, 1.0, config.grid)
    n0 = dynamics.squared_norm(chi)
    out = []
    for kind, rate, name, tol in (
        (ModelKind.MODEL1, lam, "c02_norm_growth_model1", 1e-3),
        (ModelKind.MODEL2, -lam, "c02_norm_decay_model2", 1e-3),
        (ModelKind.SHIFTED, 0.0, "c02_norm_conserved_shifted", 1e-6),
    ):
        coeffs = builtin_model(kind, omega0, lam)
        w = dynamics.evolve(coeffs, chi, t)
        ratio = dynamics.squared_norm(w) / n0
        expected = math.exp(rate * t)
        out.append(_result(name, abs(ratio - expected) / expected, tol, expected))
    return out


# --- criterion 3: moment dynamics ----------------------------------------

def check_moment_dynamics(config):
    omega0, lam = config.omega0, config.lam
    om = math.sqrt(omega0 * omega0 - lam * lam)
    out = []

    opc1 = operator_form(builtin_model(ModelKind.MODEL1, omega0, lam))
    s0 = moments.MomentState(0.5, 0.5, 0.0, 0.0, 0.0, 1.0)
    steps = 3000
    traj = moments.integrate_moments(opc1, s0, 3.0, steps)
    worst = 0.0
    for k in range(0, steps + 1, steps // 20):
        rk = traj[k]
        cf = moments.closed_form_model1(omega0, lam, s0, rk.t)
        worst = max(worst, float(np.max(np.abs(rk.as_vector() - cf.as_vector()))))
    out.append(_result("c03_closed_vs_rk4", worst, 1e-8))

    eig = moments.eigen_structure_model1(omega0, lam)
    target = -8j * omega0 ** 2 * om ** 3
    out.append(_result("c03_determinant", abs(eig.det - target) / abs(target), 1e-12))

    for kind, rate, name in (
        (ModelKind.MODEL1, lam, "c03_energy_law_model1"),
        (ModelKind.MODEL2, -lam, "c03_energy_law_model2"),
    ):
        opc = operator_form(builtin_model(kind, omega0, lam))
        traj = moments.integrate_moments(opc, s0, 3.0, 3000)
        e0 = moments.mechanical_energy(traj[0], omega0, lam)
        worst = 0.0
        for s in traj[:: len(traj) // 30]:
            expected = e0 * math.exp(rate * s.t)
            worst = max(worst, abs(moments.mechanical_energy(s, omega0, lam)
                                   - expected) / abs(expected))
        out.append(_result(name, worst, 1e-8))
    return out


# --- criterion 4: wave moments vs ODE moments -----------------------------

def check_wave_vs_ode(config):
    omega0, lam = config.omega0, config.lam
    sample_times = (0.25, 0.5, 1.0)
    chi = dynamics.initial_gaussian(1.0, 0.5, 1.0, config.grid)
    s0 = moments.moments_from_wave(chi)
    out = []
    for kind in (ModelKind.MODEL1, ModelKind.MODEL2):
        coeffs = builtin_model(kind, omega0, lam)
        opc = operator_form(coeffs)
        steps = 2000
        traj = moments.integrate_moments(opc, s0, 1.0, steps)
        worst = 0.0
        for t in sample_times:
            w = dynamics.evolve(coeffs, chi, t)
            mw = moments.moments_from_wave(w)
            mo = traj[int(round(t * steps))]
            worst = max(worst, float(np.max(np.abs(mw.as_vector() - mo.as_vector()))))
        out.append(_result(f"c04_wave_vs_ode_{kind.value}", worst, 2e-3))
    return out


# --- criterion 5: Ehrenfest dynamics --------------------------------------

def check_ehrenfest(config):
    omega0, lam = config.omega0, config.lam
    x0, p0 = 1.0, 0.0
    dt = 0.1
    ts = np.arange(1, 14) * dt  # 0.1 .. 1.3
    chi = dynamics.initial_gaussian(x0, p0, 1.0, config.grid)
    out = []
    for kind in (ModelKind.MODEL1, ModelKind.MODEL2, ModelKind.SHIFTED):
        coeffs = builtin_model(kind, omega0, lam)
        xs = np.array([
            moments.moments_from_wave(dynamics.evolve(coeffs, chi, t)).x1
            for t in ts
        ])
        # 5-point, 4th-order stencils on the sampled trajectory.
        d1 = np.array([
            (xs[i - 2] - 8 * xs[i - 1] + 8 * xs[i + 1] - xs[i + 2]) / (12 * dt)
            for i in range(2, ts.size - 2)
        ])
        d2 = np.array([
            (-xs[i - 2] + 16 * xs[i - 1] - 30 * xs[i] + 16 * xs[i + 1] - xs[i + 2])
            / (12 * dt * dt)
            for i in range(2, ts.size - 2)
        ])
        mid = xs[2:-2]
        if kind is ModelKind.MODEL1:
            resid = d2 - 2.0 * lam * d1 + omega0 ** 2 * mid
        elif kind is ModelKind.MODEL2:
            resid = d2 + 2.0 * lam * d1 + omega0 ** 2 * mid
        else:
            resid = d2 + (omega0 ** 2 - lam ** 2) * mid
        out.append(_result(f"c05_ode_residual_{kind.value}",
                           float(np.max(np.abs(resid))), 1e-3))
        analytic = moments.ehrenfest_closed_form(coeffs, x0, p0, ts)
        out.append(_result(f"c05_vs_analytic_{kind.value}",
                           float(np.max(np.abs(xs - analytic))), 2e-3))
    return out


# --- criterion 6: spectrum and factorization -------------------------------

def check_spectrum_factorization(config):
    omega0, lam = config.omega0, config.lam
    out = []
    table = eigenstates.eigen_table(omega0, lam, 8, config.grid)
    out.append(_result("c06_rayleigh_spectrum",
                       max(row[3] for row in table), 1e-6))

    ops = eigenstates.ladder_operators(omega0, lam)
    worst = 0.0
    for x0, p0, s in ((0.0, 0.0, 1.0), (1.0, 2.0, 0.7), (-1.5, -1.0, 1.3)):
        w = dynamics.initial_gaussian(x0, p0, s, config.grid)
        lhs = eigenstates.ladder_apply(ops, True, eigenstates.ladder_apply(ops, False, w))
        rhs = eigenstates.ladder_apply(ops, False, eigenstates.ladder_apply(ops, True, w))
        comm = lhs.values - rhs.values - w.values
        worst = max(worst, float(np.max(np.abs(comm)))
                    / float(np.max(np.abs(w.values))))
    out.append(_result("c06_commutator", worst, 1e-5))

    x_min, x_max, n = config.grid
    x = np.linspace(x_min, x_max, n)
    ground = eigenstates.ShiftedEigenstate(0, omega0, lam)
    w0 = dynamics.WaveGrid(x_min, x_max, n, eigenstates.eigenstate_value(ground, x), 0.0)
    lowered = eigenstates.ladder_apply(ops, True, w0)
    out.append(_result(
        "c06_annihilates_ground",
        float(np.max(np.abs(lowered.values))) / float(np.max(np.abs(w0.values))),
        1e-6,
    ))
    return out


# --- criterion 7: Poisson-kernel resummation ------------------------------

def check_mehler(config):
    omega0, lam = config.omega0, config.lam
    out = []
    partial = eigenstates.mehler_partial_sum(1.0, -1.0, 0.9, 200)
    closed = eigenstates.mehler_closed_form(1.0, -1.0, 0.9)
    out.append(_result("c07_partial_sum_n200", abs(partial - closed), 1e-8))

    t = 1.0
    coeffs = builtin_model(ModelKind.SHIFTED, omega0, lam)
    kp = kernel.kernel_closed_form(coeffs, t)
    points = ((0.0, 0.0), (1.0, 2.0), (-1.5, 0.7), (0.5, -0.5))
    n_terms = 12000
    eps = 1e-3

    def abel_error(e):
        worst = 0.0
        for x, y in points:
            approx = eigenstates.expansion_kernel(x, y, t, n_terms, e,
                                                  omega0=omega0, lam=lam)
            worst = max(worst, abs(approx - kernel.green_function(kp, x, y)))
        return worst

    err_eps = abel_error(eps)
    out.append(_result("c07_abel_kernel", err_eps, 5e-3))

    worst_rich = 0.0
    for x, y in points:
        k1 = eigenstates.expansion_kernel(x, y, t, n_terms, eps,
                                          omega0=omega0, lam=lam)
        k2 = eigenstates.expansion_kernel(x, y, t, n_terms, 2.0 * eps,
                                          omega0=omega0, lam=lam)
        rich = 2.0 * k1 - k2
        worst_rich = max(worst_rich, abs(rich - kernel.green_function(kp, x, y)))
    # Pass when extrapolation in eps improves on the raw eps value.
    out.append(CheckResult("c07_richardson_improvement", worst_rich, 0.0,
                           err_eps, worst_rich < err_eps))
    return out


# --- criterion 8: gauge pipeline ------------------------------------------

def check_gauge_pipeline(config):
    omega0, lam = config.omega0, config.lam
    coeffs = builtin_model(ModelKind.MODEL1, omega0, lam)
    target = builtin_model(ModelKind.HARMONIC, omega0, lam)
    g5 = dynamics.gauge_time_decay(lam)
    g10 = dynamics.gauge_quadratic_phase(lam, omega0)
    chi = dynamics.initial_gaussian(0.0, 0.0, 1.0, config.grid)
    t, delta = 1.0, 1e-4
    snaps = []
    for ti in (t - delta, t, t + delta):
        w = dynamics.evolve(coeffs, chi, ti)
        snaps.append(dynamics.gauge_apply(g10, dynamics.gauge_apply(g5, w)))
    resid = dynamics.pde_residual(target, snaps)
    return [_result("c08_gauge_pipeline", resid, 1e-4)]


# --- criterion 9: momentum-representation duality --------------------------

def check_fourier_duality(config):
    chi = dynamics.initial_gaussian(0.0, 0.0, 1.0, config.grid)
    resid = dynamics.fourier_duality_check(config.omega0, config.lam, 1.0, chi)
    return [_result("c09_fourier_duality", resid, 1e-5)]


# --- criterion 10: structural identities -----------------------------------

def check_structural(config):
    out = []
    rng = _rng(config, 100)
    worst = 0.0
    for _ in range(1000):
        omega0 = rng.uniform(0.5, 2.0)
        lam = rng.uniform(0.0, 0.999) * omega0
        t = rng.uniform(0.0, 10.0)
        worst = max(worst, kernel.frequency_identity_residual(omega0, lam, t))
    out.append(_result("c10_frequency_identity", worst, 1e-12))

    coeffs = builtin_model(ModelKind.MODEL1, config.omega0, config.lam)
    chi = dynamics.initial_gaussian(0.0, 0.0, 1.0, config.grid)
    out.append(_result("c10_composition",
                       dynamics.composition_check(coeffs, 0.4, 0.4, chi), 1e-5))

    kp = kernel.kernel_closed_form(coeffs, 1e-3)
    wave = dynamics.propagate_gaussian_analytic(kp, 0.0, 0.0, 1.0).to_grid(config.grid)
    out.append(_result(
        "c10_delta_limit",
        float(np.max(np.abs(wave.values - chi.values))), 1e-3))
    return out


CHECKS = (
    check_kernel_oracle,
    check_norm_laws,
    check_moment_dynamics,
    check_wave_vs_ode,
    check_ehrenfest,
    check_spectrum_factorization,
    check_mehler,
    check_gauge_pipeline,
    check_fourier_duality,
    check_structural,
)


def run_all(config=None, checks=None):
    """Run the verification suite; crashes in individual checks are
    caught and reported as failures, never aborting the suite."""
    config = config or RunConfig()
    require_underdamped(config)
    report = VerificationReport()
    for fn in checks if checks is not None else CHECKS:
        start = time.perf_counter()
        try:
            results = fn(config)
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            results = [CheckResult(fn.__name__, math.nan, 0.0, 0.0, False,
                                   detail=f"{type(exc).__name__}: {exc}")]
        elapsed = (time.perf_counter() - start) * 1000.0 / max(len(results), 1)
        for r in results:
            r.runtime_ms = elapsed
        report.checks.extend(results)
    return report


def run_all_subset(config, names):
    """Run only the named check groups (function names from CHECKS)."""
    table = {fn.__name__: fn for fn in CHECKS}
    return run_all(config, checks=[table[name] for name in names])
