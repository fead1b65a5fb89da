import math

import numpy as np
import pytest

from quadosc.dynamics import (
    WaveGrid,
    composition_check,
    evolve,
    fourier_duality_check,
    fourier_transform,
    gauge_apply,
    gauge_quadratic_phase,
    gauge_time_decay,
    initial_gaussian,
    pde_residual,
    propagate,
    propagate_gaussian_analytic,
    squared_norm,
)
from quadosc.errors import ModelError, TruncationError
from quadosc.kernel import kernel_closed_form
from quadosc.models import builtin_model
from quadosc.moments import ehrenfest_closed_form, moments_from_wave

GRID = (-20.0, 20.0, 2048)
FINE = (-20.0, 20.0, 4096)


@pytest.fixture(scope="module")
def model1():
    return builtin_model("model1", 1.0, 0.6)


@pytest.fixture(scope="module")
def ground(request):
    return initial_gaussian(0.0, 0.0, 1.0, GRID)


def test_wavegrid_validation():
    with pytest.raises(ValueError):
        WaveGrid(-1.0, 1.0, 300, np.zeros(300, complex), 0.0)  # not a power of 2
    with pytest.raises(ValueError):
        WaveGrid(-1.0, 1.0, 128, np.zeros(128, complex), 0.0)  # too small
    with pytest.raises(ValueError):
        WaveGrid(1.0, -1.0, 256, np.zeros(256, complex), 0.0)


def test_initial_gaussian_normalized(ground):
    assert abs(squared_norm(ground) - 1.0) < 1e-10
    # The s=0.5 packet needs ~8k points for the derivative stencil to
    # deliver <p> at 1e-8.
    m = moments_from_wave(initial_gaussian(1.0, 2.0, 0.5, (-20.0, 20.0, 8192)))
    assert m.x1 == pytest.approx(1.0, abs=1e-8)
    assert m.p1 == pytest.approx(2.0, abs=1e-8)


def test_initial_gaussian_truncation_guard():
    with pytest.raises(TruncationError):
        initial_gaussian(0.0, 0.0, 8.0, GRID)  # too wide for the box
    with pytest.raises(ValueError):
        initial_gaussian(0.0, 0.0, 1e-3, GRID)  # unresolvably narrow


def test_norm_laws(model1):
    chi = initial_gaussian(0.0, 0.0, 1.0, FINE)
    for kind, rate, tol in (("model1", 0.6, 1e-3), ("model2", -0.6, 1e-3),
                            ("shifted", 0.0, 1e-6)):
        c = builtin_model(kind, 1.0, 0.6)
        ratio = squared_norm(evolve(c, chi, 1.0)) / squared_norm(chi)
        assert abs(ratio - math.exp(rate)) / math.exp(rate) < tol


@pytest.mark.parametrize("kind,rate", [
    ("model1", 0.6), ("model2", -0.6), ("shifted", 0.0),
    ("harmonic", 0.0), ("model3", 0.0),
])
def test_norm_rate_matches_damping(kind, rate):
    # d/dt log ||psi||^2 estimated from two nearby times.
    coeffs = builtin_model(kind, 1.0, 0.6)
    chi = initial_gaussian(0.0, 0.0, 1.0, FINE)
    t, dt = 0.8, 0.05
    n1 = squared_norm(evolve(coeffs, chi, t))
    n2 = squared_norm(evolve(coeffs, chi, t + dt))
    slope = (math.log(n2) - math.log(n1)) / dt
    assert slope == pytest.approx(rate, abs=1e-3 * max(abs(rate), 1.0))


def test_propagate_requires_initial_time(model1, ground):
    kp = kernel_closed_form(model1, 0.5)
    shifted = ground.with_values(ground.values, 0.3)
    with pytest.raises(ValueError):
        propagate(kp, shifted)


def test_propagate_linearity(model1, ground):
    kp = kernel_closed_form(model1, 0.7)
    other = initial_gaussian(1.0, 0.0, 0.8, GRID)
    a, b = 0.3 - 0.2j, 1.1 + 0.4j
    combo = ground.with_values(a * ground.values + b * other.values, 0.0)
    lhs = propagate(kp, combo, check_output=False).values
    rhs = a * propagate(kp, ground).values + b * propagate(kp, other).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_propagate_matches_analytic_gaussian(model1):
    chi = initial_gaussian(0.0, 0.0, 1.0, GRID)
    kp = kernel_closed_form(model1, 1.0)
    quad = propagate(kp, chi)
    exact = propagate_gaussian_analytic(kp, 0.0, 0.0, 1.0).to_grid(GRID)
    assert np.max(np.abs(quad.values - exact.values)) < 1e-6
    assert quad.t == 1.0


def test_quadrature_error_drops_with_resolution(model1):
    # Second-order-or-better decay of the propagate-vs-analytic error; the
    # packet is boosted so the chirp is resolved marginally at n=512.
    errs = {}
    kp = kernel_closed_form(model1, 0.35)
    for n in (512, 1024):
        grid = (-20.0, 20.0, n)
        chi = initial_gaussian(0.0, 6.0, 0.9, grid)
        quad = propagate(kp, chi, check_output=False)
        exact = propagate_gaussian_analytic(kp, 0.0, 6.0, 0.9).to_grid(grid)
        errs[n] = float(np.max(np.abs(quad.values - exact.values)))
    assert errs[512] > 1e-13  # measurable, not at rounding floor
    assert errs[512] / errs[1024] > 4.0


def test_sho_ground_state_is_stationary():
    c = builtin_model("model1", 1.0, 0.0)
    kp = kernel_closed_form(c, 1.3)
    out = propagate_gaussian_analytic(kp, 0.0, 0.0, 1.0)
    x = np.linspace(-5, 5, 64)
    expect = math.pi ** -0.25 * np.exp(-x ** 2 / 2.0) * np.exp(-0.5j * 1.3)
    assert np.max(np.abs(out.evaluate(x) - expect)) < 1e-12


def test_coherent_center_follows_classical_motion():
    c = builtin_model("model1", 1.0, 0.0)
    for t in (0.4, 1.1, 2.0):
        kp = kernel_closed_form(c, t)
        out = propagate_gaussian_analytic(kp, 1.0, 0.0, 1.0)
        expect = ehrenfest_closed_form(c, 1.0, 0.0, np.array([t]))[0]
        assert out.center == pytest.approx(expect, abs=1e-10)


def test_delta_family_limit(model1):
    chi = initial_gaussian(0.0, 0.0, 1.0, FINE)
    kp = kernel_closed_form(model1, 1e-3)
    out = propagate_gaussian_analytic(kp, 0.0, 0.0, 1.0).to_grid(FINE)
    assert np.max(np.abs(out.values - chi.values)) < 1e-3


def test_propagate_warns_when_underresolved(model1, ground):
    kp = kernel_closed_form(model1, 1e-3)
    with pytest.warns(UserWarning, match="phase"):
        propagate(kp, ground, check_output=False)


def test_squared_norm_basics(ground):
    assert squared_norm(ground) == pytest.approx(1.0, abs=1e-10)
    zero = ground.with_values(np.zeros_like(ground.values), 0.0)
    assert squared_norm(zero) == 0.0
    doubled = ground.with_values(2.0 * ground.values, 0.0)
    assert squared_norm(doubled) == pytest.approx(4.0, abs=1e-9)


# --- PDE residual -----------------------------------------------------------

def _snapshots(coeffs, chi, t, delta=1e-4):
    return [evolve(coeffs, chi, ti) for ti in (t - delta, t, t + delta)]


def test_pde_residual_propagated_state(model1):
    chi = initial_gaussian(0.0, 0.0, 1.0, (-25.0, 25.0, 4096))
    resid = pde_residual(model1, _snapshots(model1, chi, 1.0))
    assert resid < 1e-4


def test_pde_residual_exact_solution():
    c = builtin_model("model1", 1.0, 0.0)
    x = np.linspace(-20.0, 20.0, 4096)

    def sho(t):
        vals = math.pi ** -0.25 * np.exp(-x ** 2 / 2.0) * np.exp(-0.5j * t)
        return WaveGrid(-20.0, 20.0, 4096, vals, t)

    d = 1e-4
    assert pde_residual(c, [sho(1.0 - d), sho(1.0), sho(1.0 + d)]) < 1e-6


def test_pde_residual_rejects_noise(model1):
    # Negative control: the residual must be able to fail loudly.
    rng = np.random.default_rng(1)
    x = np.linspace(-20.0, 20.0, 2048)
    envelope = np.exp(-x ** 2 / 50.0)

    def noisy(t):
        vals = envelope * rng.standard_normal(2048) * np.exp(-1j * t)
        return WaveGrid(-20.0, 20.0, 2048, vals, t)

    d = 1e-4
    assert pde_residual(model1, [noisy(1.0 - d), noisy(1.0), noisy(1.0 + d)]) > 1.0


def test_pde_residual_grid_checks(model1, ground):
    other = initial_gaussian(0.0, 0.0, 1.0, FINE)
    with pytest.raises(ValueError):
        pde_residual(model1, [ground, other, ground])


# --- gauge maps --------------------------------------------------------------

def test_time_decay_gauge_rescales_norm(model1):
    chi = initial_gaussian(0.0, 0.0, 1.0, FINE)
    w = evolve(model1, chi, 1.0)
    g5 = gauge_time_decay(0.6)
    mapped = gauge_apply(g5, w)
    # e^{-lam t/2} per snapshot turns norm growth into conservation
    assert np.max(np.abs(mapped.values - math.exp(-0.3) * w.values)) == 0.0
    assert squared_norm(mapped) == pytest.approx(1.0, rel=1e-6)


def test_quadratic_phase_gauge_is_unimodular(ground):
    g10 = gauge_quadratic_phase(0.6, 1.0)
    mapped = gauge_apply(g10, ground)
    assert np.max(np.abs(np.abs(mapped.values) - np.abs(ground.values))) < 1e-15


@pytest.mark.parametrize("stages,target_kind", [
    (("g5",), "shifted"),
    (("g5", "g10"), "harmonic"),
])
def test_gauge_pipeline_maps_between_models(model1, stages, target_kind):
    chi = initial_gaussian(0.0, 0.0, 1.0, FINE)
    target = builtin_model(target_kind, 1.0, 0.6)
    g5 = gauge_time_decay(0.6)
    g10 = gauge_quadratic_phase(0.6, 1.0)
    snaps = []
    for w in _snapshots(model1, chi, 1.0):
        if "g5" in stages:
            w = gauge_apply(g5, w)
        if "g10" in stages:
            w = gauge_apply(g10, w)
        snaps.append(w)
    assert pde_residual(target, snaps) < 1e-4


# --- Fourier duality ---------------------------------------------------------

def test_fourier_transform_gaussian_pair():
    # F[e^{-x^2/2}]-family: Gaussian maps to Gaussian with inverse width.
    chi = initial_gaussian(0.0, 0.0, 1.0, GRID)
    hat = fourier_transform(chi)
    expect = initial_gaussian(0.0, 0.0, 1.0, GRID).values  # self-dual at s=1
    assert np.max(np.abs(hat.values - expect)) < 1e-12


def test_fourier_duality_self_dual_at_zero_damping(ground):
    assert fourier_duality_check(1.0, 0.0, 0.9, ground) < 1e-6


def test_fourier_duality_trivial_at_t0(ground):
    assert fourier_duality_check(1.0, 0.6, 0.0, ground) < 1e-12


def test_fourier_duality_damped():
    chi = initial_gaussian(0.0, 0.0, 1.0, FINE)
    assert fourier_duality_check(1.0, 0.6, 1.0, chi) < 1e-5


def test_fourier_duality_detects_aliasing():
    from quadosc.errors import AliasingError

    boosted = initial_gaussian(0.0, 19.0, 1.0, FINE)  # rides the p-grid edge
    with pytest.raises(AliasingError):
        fourier_duality_check(1.0, 0.6, 0.5, boosted)


def test_propagate_flags_truncation_unsafe_output(model1):
    # A right-moving packet on a tight box reaches the boundary by t = 1.3.
    chi = initial_gaussian(0.0, 2.0, 1.0, (-8.0, 8.0, 512))
    kp = kernel_closed_form(model1, 1.3)
    with pytest.raises(TruncationError):
        propagate(kp, chi)
    out = propagate(kp, chi, check_output=False)
    assert not out.truncation_safe


# --- composition -------------------------------------------------------------

def test_composition_semigroup(model1, ground):
    assert composition_check(model1, 0.4, 0.4, ground) < 1e-5
    assert composition_check(model1, 0.4, 0.0, ground) < 1e-12


def test_composition_rejects_time_dependent_model(ground):
    c3 = builtin_model("model3", 1.0, 0.6)
    with pytest.raises(ModelError):
        composition_check(c3, 0.3, 0.3, ground)
