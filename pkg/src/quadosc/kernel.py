"""Gaussian propagator synthesis.

The kernel G(x, y, t) = pref(t) * exp(i(alpha x^2 + beta x y + gamma y^2))
is parametrized by one solution mu(t) of the characteristic equation

    mu'' - tau(t) mu' + 4 sigma(t) mu = 0,   mu(0) = 0, mu'(0) = 2 a(0).

Two independent routes are provided: a generic numerical pipeline
(Runge-Kutta for mu, composite Simpson for the gamma integral) and the
literal closed forms for the built-in models.  Each serves as the oracle
for the other.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CausticError, ModelError, StepSizeError, TurningPointError, WindowError
from .models import ModelKind, Regime, h_factor, tau_sigma
from .numutil import composite_simpson, rk4_with_estimate

SOURCE_CLOSED = "closed_form"
SOURCE_NUMERIC = "runge_kutta"

_CAUSTIC_RTOL = 1e-12
_STEP_TOL_PER_TIME = 1e-8


@dataclass(frozen=True)
class MuSolution:
    """mu and mu' sampled on an ascending time grid starting at 0."""

    t_grid: np.ndarray
    mu: np.ndarray
    mu_prime: np.ndarray
    source: str

    def __post_init__(self):
        if self.t_grid[0] != 0.0:
            raise ValueError("t_grid must start at 0")
        if not (self.t_grid.size == self.mu.size == self.mu_prime.size):
            raise ValueError("t_grid, mu, mu_prime must have equal length")
        if np.any(np.diff(self.t_grid) <= 0.0):
            raise ValueError("t_grid must be strictly increasing")


@dataclass(frozen=True)
class KernelParams:
    """Propagator ingredients at one time t."""

    t: float
    alpha: float
    beta: float
    gamma: float
    prefactor: complex
    h: float
    source: str


def characteristic_frequency(coeffs):
    """Omega of the constant-coefficient characteristic equation,
    Omega^2 = 4 sigma(0) - tau(0)^2 / 4.

    Returns (regime, Omega) with Omega the oscillation frequency when
    positive, the hyperbolic rate when the square is negative, 0 at the
    critical point.  For every built-in model Omega equals
    sqrt(omega0^2 - lambda^2) (resp. the kappa analogue).
    """
    tau0, sigma0 = tau_sigma(coeffs, 0.0)
    disc = 4.0 * float(sigma0) - 0.25 * float(tau0) ** 2
    if disc > 0.0:
        return Regime.UNDERDAMPED, math.sqrt(disc)
    if disc < 0.0:
        return Regime.OVERDAMPED, math.sqrt(-disc)
    return Regime.CRITICAL, 0.0


def first_caustic(coeffs):
    """First zero of mu after t = 0 (pi/Omega underdamped, inf otherwise)."""
    regime, om = characteristic_frequency(coeffs)
    if regime is Regime.UNDERDAMPED:
        return math.pi / om
    return math.inf


def solve_mu_numeric(coeffs, t_end, steps):
    """Runge-Kutta solution of the characteristic equation.

    Classic RK4 on a uniform grid of `steps` intervals with dense output.
    A step-doubling estimate guards the step size: the run is rejected
    when the estimated error exceeds 1e-8 per unit time.
    """
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")
    if steps < 100:
        raise ValueError("steps must be >= 100")
    a0 = float(coeffs.a(0.0))
    if coeffs.kind is ModelKind.CUSTOM:
        def rhs(t, y):
            tau, sigma = tau_sigma(coeffs, t)
            return np.array([y[1], tau * y[1] - 4.0 * sigma * y[0]])
    else:
        tau0, sigma0 = tau_sigma(coeffs, 0.0)
        tau0 = float(tau0)
        four_sigma = 4.0 * float(sigma0)

        def rhs(t, y):
            return np.array([y[1], tau0 * y[1] - four_sigma * y[0]])

    t_grid, sol, err = rk4_with_estimate(rhs, [0.0, 2.0 * a0], t_end, steps)
    if err / t_end > _STEP_TOL_PER_TIME:
        raise StepSizeError(
            f"step-doubling error estimate {err:.3e} over [0, {t_end}] exceeds "
            f"{_STEP_TOL_PER_TIME:g} per unit time; increase steps (got {steps})"
        )
    return MuSolution(t_grid, sol[:, 0], sol[:, 1], SOURCE_NUMERIC)


def mu_closed_form(coeffs, t):
    """Closed-form (mu, mu') for the built-in models.

    All built-in models have constant tau and sigma, so
        mu(t) = 2 a(0) e^{tau t / 2} S(t)
    with S = sin(Omega t)/Omega, t, or sinh(kappa t)/kappa depending on
    the regime; mu' is the exact derivative.  The critical and
    hyperbolic branches are the analytic continuation Omega -> i kappa.
    """
    if coeffs.kind is ModelKind.CUSTOM:
        raise ModelError("mu_closed_form is only available for built-in models")
    t = np.asarray(t, dtype=float)
    regime, om = characteristic_frequency(coeffs)
    tau0, _ = tau_sigma(coeffs, 0.0)
    tau0 = float(tau0)
    if regime is Regime.UNDERDAMPED:
        s = np.sin(om * t) / om
        c = np.cos(om * t)
    elif regime is Regime.CRITICAL:
        s = t.copy() if t.ndim else float(t)
        c = np.ones_like(t) if t.ndim else 1.0
    else:
        s = np.sinh(om * t) / om
        c = np.cosh(om * t)
    amp = 2.0 * float(coeffs.a(0.0)) * np.exp(0.5 * tau0 * t)
    mu = amp * s
    mu_prime = amp * (0.5 * tau0 * s + c)
    if t.ndim == 0:
        return float(mu), float(mu_prime)
    return mu, mu_prime


def mu_solution_closed(coeffs, t_end, steps):
    """Closed-form MuSolution sampled on a uniform grid."""
    t_grid = np.linspace(0.0, t_end, steps + 1)
    mu, mu_prime = mu_closed_form(coeffs, t_grid)
    return MuSolution(t_grid, mu, mu_prime, SOURCE_CLOSED)


def _mu_bound(coeffs, t):
    """Crude upper bound for |mu| on (0, t], used by the caustic test."""
    tau0, _ = tau_sigma(coeffs, 0.0)
    regime, om = characteristic_frequency(coeffs)
    amp = 2.0 * abs(float(coeffs.a(0.0))) * math.exp(0.5 * abs(float(tau0)) * t)
    if regime is Regime.UNDERDAMPED:
        return amp / om
    if regime is Regime.CRITICAL:
        return amp * t
    return amp * math.sinh(om * t) / om


def _h_on_grid(coeffs, t_grid):
    if coeffs.kind is not ModelKind.CUSTOM:
        return h_factor(coeffs, t_grid)
    from scipy.integrate import cumulative_simpson
    integrand = np.asarray(coeffs.c(t_grid) - 2.0 * coeffs.d(t_grid), dtype=float)
    cum = cumulative_simpson(integrand, x=t_grid, initial=0.0)
    return np.exp(-cum)


def kernel_params_numeric(coeffs, mu, t, method="auto"):
    """Kernel parameters from a MuSolution via the generic pipeline.

    alpha = mu'/(4 a mu) - d/(2a) and beta = -h/mu are read off directly;
    gamma needs the integral of 4 a sigma h^2 / (mu')^2, evaluated by
    composite Simpson on the MuSolution grid.

    The integrand has a non-integrable-looking pole wherever mu' = 0
    (it cancels against the a h^2/(mu mu') boundary term).  Two methods:

    - "direct": single Simpson over [0, t]; raises TurningPointError if
      mu' crosses zero inside the range.
    - "auto" (default): the quadrature is split at an anchor where both
      |mu| and |mu'| are comfortably large, then continued with the
      exactly equivalent identity gamma' = -a h^2 / mu^2, which is
      regular up to the caustic.  This serves the whole first window,
      including t at or beyond the turning point of mu.

    t must lie on the MuSolution grid.  Raises CausticError at focal
    times or past the first zero of mu.
    """
    if method not in ("auto", "direct"):
        raise ValueError(f"unknown method {method!r}")
    tg = mu.t_grid
    i = int(np.argmin(np.abs(tg - t)))
    if abs(tg[i] - t) > 1e-9 * max(1.0, tg[-1]):
        raise ValueError(f"t={t} does not lie on the MuSolution grid")
    if i == 0:
        raise CausticError("kernel parameters undefined at t = 0 (delta kernel)")
    dt = tg[1] - tg[0]
    mu_t = float(mu.mu[i])
    mup_t = float(mu.mu_prime[i])

    sign0 = math.copysign(1.0, mu.mu[1])
    if np.any(sign0 * mu.mu[1 : i + 1] <= 0.0):
        raise CausticError(
            "mu crosses zero before the requested time; the numeric pipeline "
            "serves only the first window (0, first caustic)"
        )
    if abs(mu_t) < _CAUSTIC_RTOL * float(np.max(np.abs(mu.mu[: i + 1]))):
        raise CausticError(f"kernel singular at focal time t={t}")

    a_t = float(coeffs.a(t))
    d_t = float(coeffs.d(t))
    a0 = float(coeffs.a(0.0))
    d0 = float(coeffs.d(0.0))
    h_grid = np.asarray(_h_on_grid(coeffs, tg[: i + 1]), dtype=float)
    h_t = float(h_grid[i])

    alpha = mup_t / (4.0 * a_t * mu_t) - d_t / (2.0 * a_t)
    beta = -h_t / mu_t

    a_grid = np.asarray(coeffs.a(tg[: i + 1]), dtype=float)
    _, sigma_grid = tau_sigma(coeffs, tg[: i + 1])
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    mup_grid = mu.mu_prime[: i + 1]

    # First sign change of mu' locates the turning point of mu.
    signp = np.sign(mup_grid[0]) * np.sign(mup_grid)
    turn = np.nonzero(signp <= 0.0)[0]
    j_turn = int(turn[0]) if turn.size else None

    def gamma_direct(k):
        integrand = 4.0 * a_grid[: k + 1] * sigma_grid[: k + 1] \
            * h_grid[: k + 1] ** 2 / mup_grid[: k + 1] ** 2
        bterm = a_grid[k] * h_grid[k] ** 2 / (mu.mu[k] * mup_grid[k])
        return bterm + d0 / (2.0 * a0) - composite_simpson(integrand, dt)

    if method == "direct":
        if j_turn is not None:
            raise TurningPointError(
                f"mu' crosses zero at t~{tg[j_turn]:.6g} inside the quadrature "
                f"range [0, {t:.6g}]; use method='auto'"
            )
        gamma = gamma_direct(i)
    else:
        # Split point for the two-stage quadrature: the direct integrand
        # blows up like (mu')^-2 near a turning point and the
        # continuation integrand like mu^-2 near t = 0 and caustics, so
        # anchor where both |mu| and |mu'| (normalized) are largest.
        stop = i + 1 if j_turn is None else j_turn
        mu_n = np.abs(mu.mu[:stop]) / np.max(np.abs(mu.mu[:stop]))
        mup_n = np.abs(mup_grid[:stop]) / np.max(np.abs(mup_grid[:stop]))
        score = np.minimum(mu_n, mup_n)
        score[:2] = -1.0
        if score.size < 3:
            raise TurningPointError(
                "mu' turning point too close to t = 0 for this grid; refine steps"
            )
        anchor = int(np.argmax(score))
        if anchor >= i - 1:
            gamma = gamma_direct(i)
        else:
            gamma_anchor = gamma_direct(anchor)
            cont = a_grid[anchor:] * h_grid[anchor:] ** 2 / mu.mu[anchor : i + 1] ** 2
            gamma = gamma_anchor - composite_simpson(cont, dt)

    prefactor = complex(1.0 / np.sqrt(2j * math.pi * mu_t))
    return KernelParams(float(t), float(alpha), float(beta), float(gamma),
                        prefactor, h_t, SOURCE_NUMERIC)


def _closed_form_sc(regime, om, t):
    """S(t) = sin(Omega t)/Omega and C(t) = cos(Omega t), continued
    through the critical (S = t) and hyperbolic (sinh/cosh) regimes."""
    if regime is Regime.UNDERDAMPED:
        return math.sin(om * t) / om, math.cos(om * t)
    if regime is Regime.CRITICAL:
        return t, 1.0
    return math.sinh(om * t) / om, math.cosh(om * t)


def kernel_closed_form(coeffs, t, past_first_caustic=False):
    """Literal closed-form kernel parameters for a built-in model.

    Served for t in (0, first caustic) by default; later windows require
    `past_first_caustic=True`, which applies the tracked-branch rule
    (an extra factor e^{-i pi/2} on the prefactor per caustic crossed).
    """
    if coeffs.kind is ModelKind.CUSTOM:
        raise ModelError("closed-form kernels exist only for built-in models")
    if t <= 0.0:
        raise CausticError("kernel parameters undefined at t <= 0")
    regime, om = characteristic_frequency(coeffs)
    mu_t, _ = mu_closed_form(coeffs, t)
    if abs(mu_t) < _CAUSTIC_RTOL * _mu_bound(coeffs, t):
        raise CausticError(f"kernel singular at focal time t={t}")
    t_caustic = first_caustic(coeffs)
    crossings = int(math.floor(t / t_caustic)) if math.isfinite(t_caustic) else 0
    if crossings and not past_first_caustic:
        raise WindowError(
            f"t={t} lies beyond the first caustic {t_caustic:.6g}; pass "
            "past_first_caustic=True to apply the branch-tracking rule"
        )

    omega0 = coeffs.omega0
    lam = coeffs.lam
    s, c = _closed_form_sc(regime, om, t)
    base = c / (2.0 * omega0 * s)
    shift = lam / (2.0 * omega0)
    kind = coeffs.kind
    if kind in (ModelKind.MODEL1, ModelKind.MODEL2, ModelKind.SHIFTED):
        alpha = base + shift
        gamma = base - shift
        beta = -1.0 / (omega0 * s)
    elif kind is ModelKind.MODEL3:
        alpha = (base - shift) * math.exp(2.0 * lam * t)
        gamma = base + shift
        beta = -math.exp(lam * t) / (omega0 * s)
    else:  # HARMONIC
        alpha = gamma = base
        beta = -1.0 / (omega0 * s)

    h_t = float(h_factor(coeffs, t))
    phase = -0.25 * math.pi - 0.5 * math.pi * crossings
    prefactor = np.exp(1j * phase) / math.sqrt(2.0 * math.pi * abs(mu_t))
    return KernelParams(float(t), float(alpha), float(beta), float(gamma),
                        complex(prefactor), h_t, SOURCE_CLOSED)


def kernel_params(coeffs, t, source="closed", steps=2048):
    """Dispatch to the closed-form or the generic numeric pipeline."""
    if source == "closed":
        return kernel_closed_form(coeffs, t)
    if source == "numeric":
        mu = solve_mu_numeric(coeffs, t, steps)
        return kernel_params_numeric(coeffs, mu, t)
    raise ValueError(f"unknown source {source!r}")


def green_function(kp, x, y):
    """G(x, y) = prefactor * exp(i(alpha x^2 + beta x y + gamma y^2)).

    Broadcasts over array x, y; |G| is independent of x and y because
    alpha, beta, gamma are real.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g = kp.prefactor * np.exp(1j * (kp.alpha * x * x + kp.beta * x * y
                                    + kp.gamma * y * y))
    return complex(g) if g.ndim == 0 else g


def frequency_identity_residual(omega0, lam, t):
    """Residual of the trigonometric identity used to close the gamma
    integral: |w^2 - w0^2 sin^2 wt - w^2 cos^2 wt + lam^2 sin^2 wt|,
    with w = sqrt(w0^2 - lam^2).  Zero (to rounding) when underdamped."""
    if lam >= omega0:
        raise ModelError("identity defined for the underdamped regime")
    om = math.sqrt(omega0 * omega0 - lam * lam)
    sn = math.sin(om * t)
    cs = math.cos(om * t)
    return abs(om * om - omega0 * omega0 * sn * sn - om * om * cs * cs
               + lam * lam * sn * sn)


def antiderivative_inv_square(A, B, t):
    """Antiderivative sin t / (A (A cos t + B sin t)) of
    1 / (A cos t + B sin t)^2, vanishing at t = 0."""
    if A == 0.0:
        raise ValueError("A must be nonzero")
    denom = A * math.cos(t) + B * math.sin(t)
    if abs(denom) < 1e-14 * (abs(A) + abs(B)):
        raise ZeroDivisionError(f"A cos t + B sin t vanishes at t={t}")
    return math.sin(t) / (A * denom)
