"""Expectation-value dynamics for the non-self-adjoint Hamiltonians.

Expectation values here are the plain bilinear form int psi^* A psi dx
without dividing by the norm: for H != H+ the norm itself evolves
(<1> grows or decays like exp(int (d - c))), and every printed moment
law below refers to that unnormalized bracket.

Coefficients in this module are OPERATOR-form (p^2, x^2, px, xp); use
models.operator_form to convert from the PDE parametrization.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, StepSizeError
from .models import ModelKind, classify_damping, Regime
from .numutil import derivative1_4th, derivative2_4th, rk4_with_estimate, trapezoid

_STEP_TOL_PER_TIME = 1e-8


@dataclass(frozen=True)
class MomentState:
    """(<p^2>, <x^2>, <px+xp>, <x>, <p>, <1>) at one time."""

    p2: float
    x2: float
    sym: float
    x1: float = 0.0
    p1: float = 0.0
    one: float = 1.0
    t: float = 0.0

    def as_vector(self):
        return np.array([self.p2, self.x2, self.sym, self.x1, self.p1, self.one])

    @classmethod
    def from_vector(cls, v, t):
        return cls(*(float(c) for c in v), t=float(t))

    def uncertainty_ok(self, slack=1e-9):
        """Robertson-type positivity for wave-derived states:
        <p^2><x^2> >= (<px+xp>/2)^2 + (<1>/2)^2."""
        lhs = self.p2 * self.x2
        rhs = 0.25 * self.sym * self.sym + 0.25 * self.one * self.one
        return lhs >= rhs - slack


def quadratic_system_matrix(opc, t):
    """Coefficient matrix of the closed (<p^2>, <x^2>, <px+xp>) system:

        d<p^2>/dt    = -(3c + d) <p^2> - 2b <px+xp>
        d<x^2>/dt    =  (c + 3d) <x^2> + 2a <px+xp>
        d<px+xp>/dt  = 4a <p^2> - 4b <x^2> + (d - c) <px+xp>
    """
    a, b, c, d = opc.a(t), opc.b(t), opc.c(t), opc.d(t)
    return np.array([
        [-(3.0 * c + d), 0.0, -2.0 * b],
        [0.0, c + 3.0 * d, 2.0 * a],
        [4.0 * a, -4.0 * b, d - c],
    ])


def moment_rhs_general(opc, s, t):
    """Time derivative of a MomentState under H = a p^2 + b x^2 + c px + d xp.

    The quadratic block is the printed general system; the first-moment
    and norm rows follow from the same commutator calculus:
    d<x>/dt = 2a<p> + 2d<x>, d<p>/dt = -2b<x> - 2c<p>,
    d<1>/dt = (d - c)<1>.
    """
    a, b, c, d = opc.a(t), opc.b(t), opc.c(t), opc.d(t)
    dp2 = -(3.0 * c + d) * s.p2 - 2.0 * b * s.sym
    dx2 = (c + 3.0 * d) * s.x2 + 2.0 * a * s.sym
    dsym = 4.0 * a * s.p2 - 4.0 * b * s.x2 + (d - c) * s.sym
    dx1 = 2.0 * a * s.p1 + 2.0 * d * s.x1
    dp1 = -2.0 * b * s.x1 - 2.0 * c * s.p1
    done = (d - c) * s.one
    return MomentState(dp2, dx2, dsym, dx1, dp1, done, t=t)


def integrate_moments(opc, s0, t_end, steps):
    """RK4 trajectory of the moment system on a uniform grid.

    Returns the list of MomentStates at the steps+1 grid times; guards
    the step size with the same step-doubling estimate as the kernel
    module (1e-8 per unit time).
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")

    def rhs(t, v):
        a, b, c, d = opc.a(t), opc.b(t), opc.c(t), opc.d(t)
        return np.array([
            -(3.0 * c + d) * v[0] - 2.0 * b * v[2],
            (c + 3.0 * d) * v[1] + 2.0 * a * v[2],
            4.0 * a * v[0] - 4.0 * b * v[1] + (d - c) * v[2],
            2.0 * a * v[4] + 2.0 * d * v[3],
            -2.0 * b * v[3] - 2.0 * c * v[4],
            (d - c) * v[5],
        ])

    t_grid, sol, err = rk4_with_estimate(rhs, s0.as_vector(), t_end, steps)
    if err / t_end > _STEP_TOL_PER_TIME:
        raise StepSizeError(
            f"step-doubling error estimate {err:.3e} over [0, {t_end}] exceeds "
            f"{_STEP_TOL_PER_TIME:g} per unit time; increase steps (got {steps})"
        )
    return [MomentState.from_vector(sol[i], t_grid[i]) for i in range(t_grid.size)]


def _model1_mode_coefficients(omega0, lam, s0):
    """Coefficients of the three eigenmodes in the norm-growing model's
    initial-value solution, in the order (pure growth, cos, sin)."""
    om2 = omega0 * omega0 - lam * lam
    c0 = (omega0 * (s0.p2 + s0.x2) - lam * s0.sym) / (2.0 * om2)
    ccos = (
        lam / omega0 * s0.sym
        + (om2 - lam * lam) / (omega0 * omega0) * s0.x2
        - s0.p2
    ) / (2.0 * om2)
    csin = (s0.sym - 2.0 * lam / omega0 * s0.x2) / (2.0 * omega0 * math.sqrt(om2))
    return c0, ccos, csin


def closed_form_model1(omega0, lam, s0, t):
    """Closed-form moment state of the norm-growing model (underdamped).

    The quadratic block is the verbatim three-mode solution of the
    initial-value problem; first moments follow the damped-oscillator
    closed form and <1> grows as e^{lam t}.
    """
    if classify_damping(omega0, lam).regime is not Regime.UNDERDAMPED:
        raise ModelError("closed-form moments require the underdamped regime")
    om = math.sqrt(omega0 * omega0 - lam * lam)
    c0, ccos, csin = _model1_mode_coefficients(omega0, lam, s0)
    growth = math.exp(lam * t)
    cos2 = math.cos(2.0 * om * t)
    sin2 = math.sin(2.0 * om * t)
    lw = lam * lam - om * om
    v0 = np.array([omega0, omega0, 2.0 * lam])
    vcos = np.array([
        lw * cos2 - 2.0 * lam * om * sin2,
        omega0 * omega0 * cos2,
        2.0 * lam * omega0 * cos2 - 2.0 * omega0 * om * sin2,
    ])
    vsin = np.array([
        2.0 * lam * om * cos2 + lw * sin2,
        omega0 * omega0 * sin2,
        2.0 * omega0 * om * cos2 + 2.0 * lam * omega0 * sin2,
    ])
    p2, x2, sym = growth * (c0 * v0 + ccos * vcos + csin * vsin)

    xdot0 = omega0 * s0.p1
    u1 = (xdot0 - lam * s0.x1) / om
    x1 = growth * (s0.x1 * math.cos(om * t) + u1 * math.sin(om * t))
    p1 = growth * (
        lam * (s0.x1 * math.cos(om * t) + u1 * math.sin(om * t))
        + om * (-s0.x1 * math.sin(om * t) + u1 * math.cos(om * t))
    ) / omega0
    return MomentState(float(p2), float(x2), float(sym), float(x1), float(p1),
                       s0.one * growth, t=t)


@dataclass(frozen=True)
class EigenStructure:
    """Eigenvalues and eigenvectors of the norm-growing quadratic system."""

    r0: complex
    r_plus: complex
    r_minus: complex
    v0: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    det: complex


def eigen_structure_model1(omega0, lam):
    """r0 = lam, r+- = lam +- 2 i w with the printed eigenvectors; `det`
    holds the numerically evaluated determinant of the eigenvector
    matrix (analytically -8 i w0^2 w^3)."""
    if classify_damping(omega0, lam).regime is not Regime.UNDERDAMPED:
        raise ModelError("eigenstructure stated for the underdamped regime")
    om = math.sqrt(omega0 * omega0 - lam * lam)
    rp = lam + 1j * om
    rm = lam - 1j * om
    v0 = np.array([omega0, omega0, 2.0 * lam], dtype=complex)
    v_plus = np.array([rp * rp, omega0 * omega0, 2.0 * omega0 * rp])
    v_minus = np.array([rm * rm, omega0 * omega0, 2.0 * omega0 * rm])
    det = complex(np.linalg.det(np.column_stack([v0, v_plus, v_minus])))
    return EigenStructure(complex(lam), lam + 2j * om, lam - 2j * om,
                          v0, v_plus, v_minus, det)


def hamiltonian_expectation(opc, s):
    """<H> for H = a p^2 + b x^2 + c px + d xp.

    Operator ordering resolved through px = (S - i)/2, xp = (S + i)/2
    with S = px + xp:
        <H> = a<p^2> + b<x^2> + (c + d)/2 <S> + i (d - c)/2 <1>.
    """
    t = s.t
    a, b, c, d = opc.a(t), opc.b(t), opc.c(t), opc.d(t)
    return complex(
        a * s.p2 + b * s.x2 + 0.5 * (c + d) * s.sym + 0.5j * (d - c) * s.one
    )


def mechanical_energy(s, omega0, lam):
    """<E> for the shifted-oscillator energy operator
    E = (w0/2)(p^2 + x^2) - (lam/2)(px + xp)."""
    return 0.5 * omega0 * (s.p2 + s.x2) - 0.5 * lam * s.sym


def ehrenfest_closed_form(coeffs, x0, p0, t_grid):
    """<x>(t) for the three constant-coefficient models (underdamped).

    The first-moment systems close into the classical equations
        <x>'' - 2 lam <x>' + w0^2 <x> = 0   (norm-growing model)
        <x>'' + 2 lam <x>' + w0^2 <x> = 0   (norm-decaying model)
        <x>'' + (w0^2 - lam^2) <x> = 0      (shifted model)
    with <x>'(0) fixed by the first-order system.
    """
    kind = coeffs.kind
    omega0, lam = coeffs.omega0, coeffs.lam
    if classify_damping(omega0, lam).regime is not Regime.UNDERDAMPED:
        raise ModelError("closed-form Ehrenfest solutions need lambda < omega0")
    om = math.sqrt(omega0 * omega0 - lam * lam)
    t = np.asarray(t_grid, dtype=float)
    if kind is ModelKind.MODEL1:
        xdot0 = omega0 * p0
        return np.exp(lam * t) * (
            x0 * np.cos(om * t) + (xdot0 - lam * x0) / om * np.sin(om * t)
        )
    if kind is ModelKind.MODEL2:
        xdot0 = omega0 * p0 - 2.0 * lam * x0
        return np.exp(-lam * t) * (
            x0 * np.cos(om * t) + (xdot0 + lam * x0) / om * np.sin(om * t)
        )
    if kind is ModelKind.SHIFTED:
        xdot0 = omega0 * p0 - lam * x0
        return x0 * np.cos(om * t) + xdot0 / om * np.sin(om * t)
    raise ModelError(f"no closed-form Ehrenfest solution for {kind.value}")


def moments_from_wave(w):
    """MomentState extracted from a wave by trapezoid quadrature.

    Derivatives use fourth-order central differences; px + xp is applied
    discretely as -i(psi + 2 x psi_x).  The imaginary parts of the
    quadratures vanish analytically (symmetric operators) and are
    dropped.
    """
    if not w.truncation_safe:
        from .errors import TruncationError

        raise TruncationError("wave does not decay at the grid edges")
    x = w.x
    psi = w.values
    conj = np.conj(psi)
    psi_x = derivative1_4th(psi, w.dx)
    psi_xx = derivative2_4th(psi, w.dx)

    def bracket(arr):
        return float(np.real(trapezoid(conj * arr, w.dx)))

    return MomentState(
        p2=bracket(-psi_xx),
        x2=bracket(x * x * psi),
        sym=bracket(-1j * (psi + 2.0 * x * psi_x)),
        x1=bracket(x * psi),
        p1=bracket(-1j * psi_x),
        one=bracket(psi),
        t=w.t,
    )
