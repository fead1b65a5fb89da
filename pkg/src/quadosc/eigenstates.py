"""Stationary states of the shifted oscillator and the resummed kernel.

The shifted model separates into harmonic-oscillator eigenfunctions in
the stretched variable xi = x sqrt(w/w0), dressed by the unimodular
factor e^{i lam x^2 / (2 w0)}, with spectrum E_n = w (n + 1/2),
w = sqrt(w0^2 - lam^2).  The eigenfunction-expansion kernel is summed
through the Hermite Poisson kernel; on the unit circle the series is
Abel-regularized with a small damping eps.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import ModelError, ParsevalDefectError
from .models import ModelKind, builtin_model
from .numutil import derivative1_4th, trapezoid

_N_MAX = 400


def hermite(n, xi):
    """Physicists' Hermite polynomial H_n by the three-term recurrence
    H_{k+1} = 2 xi H_k - 2 k H_{k-1}.

    Raw values overflow quickly; n is capped at 400 (use
    hermite_function for the stable scaled evaluation).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > _N_MAX:
        raise ValueError(f"n={n} exceeds the overflow guard {_N_MAX}; "
                         "use hermite_function instead")
    xi = np.asarray(xi, dtype=float)
    h_prev = np.zeros_like(xi)
    h = np.ones_like(xi)
    for k in range(n):
        h, h_prev = 2.0 * xi * h - 2.0 * k * h_prev, h
    return float(h) if h.ndim == 0 else h


def hermite_sequence(n, xi):
    """All values H_0(xi) .. H_n(xi) from one pass of the recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > _N_MAX:
        raise ValueError(f"n={n} exceeds the overflow guard {_N_MAX}")
    out = np.empty(n + 1)
    h_prev, h = 0.0, 1.0
    out[0] = h
    for k in range(n):
        h, h_prev = 2.0 * xi * h - 2.0 * k * h_prev, h
        out[k + 1] = h
    return out


def hermite_function(n, xi):
    """Normalized Hermite function h_n(xi) = H_n e^{-xi^2/2} / sqrt(2^n n! sqrt(pi)),
    evaluated by the scaled recurrence (no overflow at any n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    xi = np.asarray(xi, dtype=float)
    h_prev = np.zeros_like(xi)
    h = math.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    for k in range(n):
        h, h_prev = (
            math.sqrt(2.0 / (k + 1.0)) * xi * h
            - math.sqrt(k / (k + 1.0)) * h_prev,
            h,
        )
    return float(h) if h.ndim == 0 else h


def _hermite_function_matrix(n_max, xi):
    """Rows h_0..h_{n_max} evaluated on the array xi."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((n_max + 1, xi.size))
    h_prev = np.zeros_like(xi)
    h = math.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    out[0] = h
    for k in range(n_max):
        h, h_prev = (
            math.sqrt(2.0 / (k + 1.0)) * xi * h
            - math.sqrt(k / (k + 1.0)) * h_prev,
            h,
        )
        out[k + 1] = h
    return out


def _reduced_frequency(omega0, lam):
    if omega0 <= 0.0:
        raise ModelError("omega0 must be positive")
    if not 0.0 <= lam < omega0:
        raise ModelError(f"eigenstates need 0 <= lambda < omega0, got lambda={lam}")
    return math.sqrt(omega0 * omega0 - lam * lam)


@dataclass(frozen=True)
class ShiftedEigenstate:
    """Stationary state phi_n of the shifted oscillator.

    phi_n(x) = C_n e^{i lam x^2/(2 w0)} e^{-xi^2/2} H_n(xi),
    xi = x sqrt(w/w0), with C_n real positive (phase convention) and
    |C_n|^2 = sqrt(w/w0) / (sqrt(pi) 2^n n!).
    """

    n: int
    omega0: float
    lam: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        _reduced_frequency(self.omega0, self.lam)

    @property
    def omega(self):
        return _reduced_frequency(self.omega0, self.lam)

    @property
    def energy(self):
        return self.omega * (self.n + 0.5)


def eigenstate_value(state, x):
    """phi_n evaluated at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    om = state.omega
    xi = x * math.sqrt(om / state.omega0)
    vals = (
        (om / state.omega0) ** 0.25
        * np.exp(1j * state.lam * x * x / (2.0 * state.omega0))
        * hermite_function(state.n, xi)
    )
    return complex(vals) if vals.ndim == 0 else vals


def energy(n, omega):
    """Eigenvalue E_n = omega (n + 1/2)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return omega * (n + 0.5)


def expansion_coefficients(chi, n_max, *, omega0, lam, defect_tol=1e-6):
    """Coefficients c_n = int phi_n^*(y) chi(y) dy for n <= n_max.

    Returns (c, parseval_defect) where the defect is
    |sum |c_n|^2 - ||chi||^2|; a defect above `defect_tol` raises
    ParsevalDefectError (n_max too small for this state).
    """
    om = _reduced_frequency(omega0, lam)
    x = chi.x
    xi = x * math.sqrt(om / omega0)
    basis = _hermite_function_matrix(n_max, xi) * (om / omega0) ** 0.25
    gauge = np.exp(-1j * lam * x * x / (2.0 * omega0))  # conj of the state phase
    weights = np.ones(chi.n)
    weights[0] = weights[-1] = 0.5
    integrand = basis * (gauge * chi.values * weights * chi.dx)
    c = integrand.sum(axis=1)
    norm2 = trapezoid(np.abs(chi.values) ** 2, chi.dx)
    defect = abs(float(np.sum(np.abs(c) ** 2) - norm2))
    if defect > defect_tol:
        raise ParsevalDefectError(defect, n_max)
    return c, defect


def reconstruct(c, grid, *, omega0, lam, t=0.0):
    """Superposition sum_n c_n e^{-i E_n t} phi_n(x) on a grid.

    `grid` is (x_min, x_max, n) or a WaveGrid whose geometry to copy.
    """
    from .dynamics import WaveGrid, _resolve_grid

    x_min, x_max, n = _resolve_grid(grid)
    x = np.linspace(x_min, x_max, n)
    om = _reduced_frequency(omega0, lam)
    xi = x * math.sqrt(om / omega0)
    basis = _hermite_function_matrix(len(c) - 1, xi) * (om / omega0) ** 0.25
    phases = np.exp(-1j * om * (np.arange(len(c)) + 0.5) * t)
    vals = (np.asarray(c) * phases) @ basis
    vals = vals * np.exp(1j * lam * x * x / (2.0 * omega0))
    return WaveGrid(x_min, x_max, n, vals, t)


def mehler_partial_sum(x, y, r, n_terms):
    """Partial sum over n <= n_terms of H_n(x) H_n(y) r^n / (2^n n!),
    by the overflow-safe scaled recurrence.  Requires |r| < 1."""
    r = complex(r)
    if abs(r) >= 1.0:
        raise ValueError(f"|r| must be < 1, got {abs(r)}")
    return complex(_core.hermite_weighted_cumsum(float(x), float(y), r, n_terms)[-1])


def mehler_closed_form(x, y, r):
    """Right side of the Hermite Poisson kernel:
    (1 - r^2)^(-1/2) exp((2 x y r - (x^2 + y^2) r^2) / (1 - r^2))."""
    r = complex(r)
    if abs(r) >= 1.0:
        raise ValueError(f"|r| must be < 1, got {abs(r)}")
    one_m = 1.0 - r * r
    return complex(np.exp((2.0 * x * y * r - (x * x + y * y) * r * r) / one_m)
                   / np.sqrt(one_m))


def expansion_kernel(x, y, t, n_terms, eps, *, omega0, lam):
    """Abel-regularized eigenfunction-expansion kernel
    sum_{n<=N} e^{-i w (n+1/2) t} e^{-n eps} phi_n(x) phi_n^*(y).

    eps > 0 is required: on the unit circle the series is only
    Abel-summable.  As N -> inf, eps -> 0+ this converges to the
    closed-form shifted-oscillator kernel.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive (Abel regularization)")
    om = _reduced_frequency(omega0, lam)
    scale = math.sqrt(om / omega0)
    xi_x = x * math.sqrt(om / omega0)
    xi_y = y * math.sqrt(om / omega0)
    rho = complex(np.exp(-(1j * om * t + eps)))
    s = _core.hermite_weighted_cumsum(float(xi_x), float(xi_y), rho, n_terms)[-1]
    hh = s * np.exp(-0.5 * (xi_x * xi_x + xi_y * xi_y)) / math.sqrt(math.pi)
    return complex(
        scale
        * np.exp(1j * lam * (x * x - y * y) / (2.0 * omega0))
        * np.exp(-0.5j * om * t)
        * hh
    )


@dataclass(frozen=True)
class LadderOperators:
    """First-order lowering/raising operators of the shifted oscillator.

    sqrt(2) a   = x_coeff * x + dx_coeff * d/dx
    sqrt(2) a+  = conj(x_coeff) * x - dx_coeff * d/dx
    with x_coeff = sqrt(w/w0) - i lam / sqrt(w0 w) and
    dx_coeff = sqrt(w0/w).  In the (alpha + i beta) x + gamma d/dx
    parametrization the constraint system 2 alpha gamma = 1,
    w(alpha^2 + beta^2) = w gamma^2 = w0/2, w beta gamma = -lam/2 holds.
    """

    omega0: float
    lam: float
    x_coeff: complex
    dx_coeff: float

    @property
    def omega(self):
        return _reduced_frequency(self.omega0, self.lam)

    @property
    def alpha(self):
        return self.x_coeff.real / math.sqrt(2.0)

    @property
    def beta(self):
        return self.x_coeff.imag / math.sqrt(2.0)

    @property
    def gamma(self):
        return self.dx_coeff / math.sqrt(2.0)


def ladder_operators(omega0, lam):
    om = _reduced_frequency(omega0, lam)
    x_coeff = math.sqrt(om / omega0) - 1j * lam / math.sqrt(omega0 * om)
    return LadderOperators(omega0, lam, x_coeff, math.sqrt(omega0 / om))


def ladder_apply(op, lower, w):
    """Apply a (lower=True) or a+ (lower=False) to a wave on its grid,
    derivatives by fourth-order central differences."""
    x = w.x
    psi_x = derivative1_4th(w.values, w.dx)
    if lower:
        vals = (op.x_coeff * x * w.values + op.dx_coeff * psi_x) / math.sqrt(2.0)
    else:
        vals = (np.conj(op.x_coeff) * x * w.values - op.dx_coeff * psi_x) / math.sqrt(2.0)
    return w.with_values(vals, w.t)


def eigen_table(omega0, lam, n_max, grid):
    """Per-level diagnostics: (n, E_n, norm defect, Rayleigh defect).

    The Rayleigh quotient uses the shifted-oscillator Hamiltonian applied
    by finite differences on the grid; its defect against w(n + 1/2)
    measures discretization plus eigenstate quality.
    """
    from .dynamics import WaveGrid, apply_hamiltonian, _resolve_grid

    coeffs = builtin_model(ModelKind.SHIFTED, omega0, lam)
    x_min, x_max, n = _resolve_grid(grid)
    x = np.linspace(x_min, x_max, n)
    rows = []
    for k in range(n_max + 1):
        state = ShiftedEigenstate(k, omega0, lam)
        w = WaveGrid(x_min, x_max, n, eigenstate_value(state, x), 0.0)
        norm2 = trapezoid(np.abs(w.values) ** 2, w.dx)
        hw = apply_hamiltonian(coeffs, w)
        quotient = trapezoid(np.conj(w.values) * hw.values, w.dx) / norm2
        rows.append((k, state.energy, abs(norm2 - 1.0),
                     abs(complex(quotient) - state.energy)))
    return rows
