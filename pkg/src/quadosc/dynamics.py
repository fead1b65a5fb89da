"""Wave-packet propagation through the Gaussian kernel and its checks.

The propagation integral psi(x, t) = int G(x, y, t) chi(y) dy is a
Gaussian-damped chirp at desk scales and is evaluated by the trapezoid
rule with a fixed left-to-right compensated accumulation (see _core).
Very small times belong to the analytic Gaussian path instead: the
kernel chirp then oscillates faster than any reasonable grid samples,
and `propagate` warns when the phase advances by more than pi per step.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _core
from .errors import AliasingError, ModelError, TruncationError
from .kernel import kernel_closed_form, kernel_params_numeric, solve_mu_numeric
from .models import ModelKind, builtin_model, _builtin_unchecked
from .numutil import derivative1_4th, derivative2_4th, trapezoid

_EDGE_DECAY = 1e-10


@dataclass(frozen=True, eq=False)
class WaveGrid:
    """Complex wavefunction samples on a uniform grid at one time.

    n must be a power of two >= 256; spacing is (x_max - x_min)/(n - 1)
    with both endpoints included.
    """

    x_min: float
    x_max: float
    n: int
    values: np.ndarray
    t: float

    def __post_init__(self):
        if self.n < 256 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 256, got {self.n}")
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.values.shape != (self.n,):
            raise ValueError("values must be a 1-D array of length n")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def truncation_safe(self):
        """True when |psi| at both edges is below 1e-10 * max|psi|."""
        amax = float(np.max(np.abs(self.values)))
        edge = max(abs(self.values[0]), abs(self.values[-1]))
        return edge <= _EDGE_DECAY * amax

    def with_values(self, values, t):
        return WaveGrid(self.x_min, self.x_max, self.n, np.asarray(values), float(t))

    def geometry(self):
        return (self.x_min, self.x_max, self.n)


def _resolve_grid(grid):
    if isinstance(grid, WaveGrid):
        return grid.geometry()
    x_min, x_max, n = grid
    return float(x_min), float(x_max), int(n)


def initial_gaussian(x0, p0, s, grid):
    """Normalized Gaussian packet (pi s^2)^(-1/4) e^{-(x-x0)^2/(2s^2) + i p0 x}.

    `grid` is (x_min, x_max, n) or a WaveGrid whose geometry to copy.
    Raises TruncationError when the packet does not decay at the edges
    and ValueError when the grid under-resolves it (trapezoid norm off).
    """
    if s <= 0.0:
        raise ValueError("width s must be positive")
    x_min, x_max, n = _resolve_grid(grid)
    x = np.linspace(x_min, x_max, n)
    vals = (math.pi * s * s) ** -0.25 * np.exp(
        -((x - x0) ** 2) / (2.0 * s * s) + 1j * p0 * x
    )
    w = WaveGrid(x_min, x_max, n, vals, 0.0)
    if not w.truncation_safe:
        raise TruncationError(
            f"Gaussian(x0={x0}, s={s}) does not decay at the grid edges"
        )
    norm = squared_norm(w)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(
            f"grid under-resolves the Gaussian: trapezoid norm {norm!r} != 1"
        )
    return w


def squared_norm(w):
    """Trapezoid integral of |psi|^2 over the grid."""
    return float(trapezoid(np.abs(w.values) ** 2, w.dx))


def _trap_weights(n):
    wts = np.ones(n)
    wts[0] = wts[-1] = 0.5
    return wts


def propagate(kp, chi, check_output=True):
    """Apply the Gaussian kernel to an initial wave: trapezoid quadrature
    of G(x, y) chi(y) over the grid for every grid x.

    chi must be at t = 0 and truncation-safe.  The output carries kp.t.
    """
    if chi.t != 0.0:
        raise ValueError(f"initial wave must be at t = 0, got t={chi.t}")
    if not chi.truncation_safe:
        raise TruncationError("input wave does not decay at the grid edges")
    x = chi.x
    support = np.abs(chi.values) > 1e-10 * np.max(np.abs(chi.values))
    radius = float(np.max(np.abs(x[support])))
    max_rate = (abs(kp.beta) + 2.0 * abs(kp.gamma)) * radius
    if max_rate * chi.dx > math.pi:
        warnings.warn(
            "kernel phase advances more than pi per grid step; quadrature "
            "is unreliable (use propagate_gaussian_analytic for small t)",
            stacklevel=2,
        )
    z = np.exp(1j * kp.gamma * x * x) * chi.values * _trap_weights(chi.n) * chi.dx
    acc = _core.chirp_sum(x, chi.x_min, chi.dx, z, kp.beta)
    vals = kp.prefactor * np.exp(1j * kp.alpha * x * x) * acc
    out = chi.with_values(vals, kp.t)
    if check_output and not out.truncation_safe:
        raise TruncationError("propagated wave reached the grid edges")
    return out


@dataclass(frozen=True)
class GaussianWave:
    """Closed-form complex Gaussian psi(x) = amp * exp(quad x^2 + lin x)."""

    amp: complex
    quad: complex
    lin: complex
    t: float

    @property
    def center(self):
        return -self.lin.real / (2.0 * self.quad.real) if self.quad.real else 0.0

    @property
    def sigma(self):
        return math.sqrt(-1.0 / (4.0 * self.quad.real))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return self.amp * np.exp(self.quad * x * x + self.lin * x)

    def to_grid(self, grid):
        x_min, x_max, n = _resolve_grid(grid)
        x = np.linspace(x_min, x_max, n)
        return WaveGrid(x_min, x_max, n, self.evaluate(x), self.t)


def propagate_gaussian_analytic(kp, x0, p0, s):
    """Exact Gaussian image of a Gaussian packet under the kernel.

    Completing the square in int G(x, y) chi(y) dy gives another complex
    Gaussian; its (amp, quad, lin) parameters are returned.  This is the
    quadrature oracle and the small-t path.
    """
    if s <= 0.0:
        raise ValueError("width s must be positive")
    A = 1.0 / (2.0 * s * s) - 1j * kp.gamma        # Re A > 0 always
    B0 = 1j * p0 + x0 / (s * s)
    amp = (
        kp.prefactor
        * (math.pi * s * s) ** -0.25
        * np.sqrt(math.pi / A)
        * np.exp(B0 * B0 / (4.0 * A) - x0 * x0 / (2.0 * s * s))
    )
    quad = 1j * kp.alpha - kp.beta ** 2 / (4.0 * A)
    lin = 1j * kp.beta * B0 / (2.0 * A)
    return GaussianWave(complex(amp), complex(quad), complex(lin), kp.t)


def apply_hamiltonian(coeffs, w):
    """H psi = -a psi_xx + b x^2 psi - i (c x psi_x + d psi) at t = w.t,
    with fourth-order finite differences for the derivatives."""
    t = w.t
    x = w.x
    psi = w.values
    psi_x = derivative1_4th(psi, w.dx)
    psi_xx = derivative2_4th(psi, w.dx)
    vals = (
        -coeffs.a(t) * psi_xx
        + coeffs.b(t) * x * x * psi
        - 1j * (coeffs.c(t) * x * psi_x + coeffs.d(t) * psi)
    )
    return w.with_values(vals, t)


def pde_residual(coeffs, snapshots):
    """Sup-norm residual of i psi_t - H psi over interior grid points,
    normalized by max|psi|.

    `snapshots` are three WaveGrids at t - delta, t, t + delta on the
    same grid; the time derivative is the centered difference.
    """
    wm, w0, wp = snapshots
    if not (wm.geometry() == w0.geometry() == wp.geometry()):
        raise ValueError("snapshots must share one grid")
    dm = w0.t - wm.t
    dp = wp.t - w0.t
    if abs(dm - dp) > 1e-12 * max(dm, dp) or dm <= 0.0:
        raise ValueError("snapshots must be equally spaced in time")
    psi_t = (wp.values - wm.values) / (dm + dp)
    rhs = apply_hamiltonian(coeffs, w0).values
    res = 1j * psi_t - rhs
    scale = float(np.max(np.abs(w0.values)))
    return float(np.max(np.abs(res[2:-2]))) / scale


@dataclass(frozen=True)
class GaugePhase:
    """Multiplicative gauge factor: the forward map is psi' = e^{i f(x,t)} psi.

    The inverse convention psi = e^{-i f} psi' is what maps the primed
    equation back; only the forward direction is exposed to avoid
    double-negation bugs.
    """

    f: Callable
    label: str


def gauge_time_decay(lam):
    """f = i lam t / 2: the real factor e^{-lam t/2} that turns the
    norm-growing model into the norm-conserving shifted oscillator."""
    return GaugePhase(lambda x, t: 1j * lam * t / 2.0 + 0.0 * x, "time-decay")


def gauge_quadratic_phase(lam, omega0):
    """f = -lam x^2 / (2 omega0): unimodular factor mapping the shifted
    oscillator to the plain harmonic oscillator at the reduced frequency."""
    return GaugePhase(lambda x, t: -lam * x * x / (2.0 * omega0), "quadratic-phase")


def gauge_apply(phase, w):
    """psi' = e^{i f(x, t)} psi evaluated at the wave's own time."""
    factor = np.exp(1j * phase.f(w.x, w.t))
    return w.with_values(factor * w.values, w.t)


def fourier_transform(w, grid=None):
    """Unitary continuum Fourier transform on the grid,
    psihat(p) = (2 pi)^(-1/2) int e^{-i p x} psi(x) dx (trapezoid),
    evaluated on a p-grid that defaults to the x-grid extents."""
    x_min, x_max, n = _resolve_grid(grid) if grid is not None else w.geometry()
    p = np.linspace(x_min, x_max, n)
    z = w.values * _trap_weights(w.n) * w.dx
    vals = _core.chirp_sum(p, w.x_min, w.dx, z, -1.0) / math.sqrt(2.0 * math.pi)
    return WaveGrid(x_min, x_max, n, vals, w.t)


def _at_time_zero(w):
    return w.with_values(w.values, 0.0)


def evolve(coeffs, w, t, source="closed", steps=2048):
    """Propagate a t = 0 wave to time t (identity when t = 0).

    Built-in models use the closed-form kernel by default; custom
    coefficients need source="numeric".
    """
    if t == 0.0:
        return w.with_values(w.values.copy(), 0.0)
    if source == "closed":
        kp = kernel_closed_form(coeffs, t)
    else:
        kp = kernel_params_numeric(coeffs, solve_mu_numeric(coeffs, t, steps), t)
    return propagate(kp, w)


def composition_check(coeffs, t1, t2, chi):
    """Semigroup defect sup|U(t1+t2) chi - U(t2) U(t1) chi|.

    Valid for autonomous models only; Model3 and custom coefficients are
    rejected.  Both legs use independent kernel evaluations.
    """
    if coeffs.kind in (ModelKind.MODEL3, ModelKind.CUSTOM):
        raise ModelError(f"{coeffs.kind.value} is not autonomous; composition "
                         "by time translation does not apply")
    direct = evolve(coeffs, chi, t1 + t2)
    first = evolve(coeffs, chi, t1)
    second = evolve(coeffs, _at_time_zero(first), t2) if t2 != 0.0 else first
    return float(np.max(np.abs(direct.values - second.values)))


def fourier_duality_check(omega0, lam, t, chi):
    """Momentum-representation duality residual.

    Under F with kernel e^{-i p x}/sqrt(2 pi), the norm-growing model at
    damping lam maps to the norm-decaying one at -lam, so
    F[U1(lam, t) chi] = U2(-lam, t) F[chi].  Returns the sup-norm of the
    difference, with both sides computed by independent code paths.
    (Either sign convention for F gives the same identity: the
    Hamiltonians are parity-even.)
    """
    if not chi.truncation_safe:
        raise TruncationError("input wave does not decay at the grid edges")
    chi_hat = fourier_transform(chi)
    tails = max(abs(chi_hat.values[0]), abs(chi_hat.values[-1]))
    if tails > 1e-8 * float(np.max(np.abs(chi_hat.values))):
        raise AliasingError("momentum-space tails exceed 1e-8 of the peak")
    model1 = builtin_model(ModelKind.MODEL1, omega0, lam)
    dual = _builtin_unchecked(ModelKind.MODEL2, omega0, -lam)
    side_a = fourier_transform(evolve(model1, chi, t))
    side_b = evolve(dual, chi_hat, t)
    return float(np.max(np.abs(side_a.values - side_b.values)))
