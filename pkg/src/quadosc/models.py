"""Catalog of damped-oscillator Hamiltonians as coefficient functions of time.

The canonical parametrization is the PDE form

    i psi_t = -a(t) psi_xx + b(t) x^2 psi - i (c(t) x psi_x + d(t) psi),

with an exact linear bridge to the operator form

    H = a(t) p^2 + b(t) x^2 + c(t) px + d(t) xp.

Both directions of the bridge are exposed because the two conventions
place the damping rate differently and silent sign bugs are easy to make.
"""

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import ModelError, QuadratureError


class ModelKind(str, enum.Enum):
    MODEL1 = "model1"       # H = (w0/2)(p^2+x^2) - lambda px   (norm grows)
    MODEL2 = "model2"       # H = (w0/2)(p^2+x^2) - lambda xp   (norm decays)
    SHIFTED = "shifted"     # self-adjoint average of the two
    MODEL3 = "model3"       # time-dependent unit of length
    HARMONIC = "harmonic"   # plain oscillator at the reduced frequency
    CUSTOM = "custom"


class Regime(str, enum.Enum):
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class DampingRegime:
    """Damping classification; `omega` holds sqrt(w0^2 - lambda^2) when
    underdamped, kappa = sqrt(lambda^2 - w0^2) when overdamped, 0 when
    critical."""

    regime: Regime
    omega: float


def classify_damping(omega0, lam):
    disc = omega0 * omega0 - lam * lam
    if disc > 0.0:
        return DampingRegime(Regime.UNDERDAMPED, math.sqrt(disc))
    if disc < 0.0:
        return DampingRegime(Regime.OVERDAMPED, math.sqrt(-disc))
    return DampingRegime(Regime.CRITICAL, 0.0)


@dataclass(frozen=True)
class CoefficientSet:
    """Time-dependent coefficients of the PDE form.

    `a, b, c, d` are vectorized callables of t.  `a_prime` and `d_prime`
    are exact derivative callables when known (built-in models, splined
    tables); when None they are approximated by centered differences.
    `omega0`/`lam` are set for built-in kinds and carried for the
    closed-form kernel formulas; `lam` may be negative only for internal
    dual constructions (sign-flipped propagators).
    """

    a: Callable
    b: Callable
    c: Callable
    d: Callable
    kind: ModelKind
    omega0: Optional[float] = None
    lam: Optional[float] = None
    a_prime: Optional[Callable] = field(default=None, repr=False)
    d_prime: Optional[Callable] = field(default=None, repr=False)

    def regime(self):
        if self.omega0 is None:
            raise ModelError("damping regime defined only for built-in models")
        return classify_damping(self.omega0, self.lam)


@dataclass(frozen=True)
class OperatorCoefficients:
    """Coefficients of p^2, x^2, px, xp in the operator form."""

    a: Callable
    b: Callable
    c: Callable
    d: Callable


def _const(value):
    def f(t):
        return value + 0.0 * np.asarray(t, dtype=float)
    return f


def _validate_params(omega0, lam):
    if not (math.isfinite(omega0) and math.isfinite(lam)):
        raise ModelError("omega0 and lambda must be finite")
    if omega0 <= 0.0:
        raise ModelError(f"omega0 must be positive, got {omega0}")
    if lam < 0.0:
        raise ModelError(f"lambda must be >= 0, got {lam}")


def _build(kind, omega0, lam):
    w2 = 0.5 * omega0
    zero = _const(0.0)
    if kind is ModelKind.MODEL1:
        return CoefficientSet(_const(w2), _const(w2), _const(-lam), _const(-lam),
                              kind, omega0, lam, a_prime=zero, d_prime=zero)
    if kind is ModelKind.MODEL2:
        return CoefficientSet(_const(w2), _const(w2), _const(-lam), zero,
                              kind, omega0, lam, a_prime=zero, d_prime=zero)
    if kind is ModelKind.SHIFTED:
        return CoefficientSet(_const(w2), _const(w2), _const(-lam), _const(-0.5 * lam),
                              kind, omega0, lam, a_prime=zero, d_prime=zero)
    if kind is ModelKind.MODEL3:
        def a(t):
            return w2 * np.exp(-2.0 * lam * np.asarray(t, dtype=float))

        def b(t):
            return w2 * np.exp(2.0 * lam * np.asarray(t, dtype=float))

        def a_prime(t):
            return -2.0 * lam * a(t)

        return CoefficientSet(a, b, zero, zero, kind, omega0, lam,
                              a_prime=a_prime, d_prime=zero)
    if kind is ModelKind.HARMONIC:
        reg = classify_damping(omega0, lam)
        # b = omega^2/(2 omega0) with omega^2 = omega0^2 - lambda^2,
        # negative past critical damping (inverted oscillator).
        sign = -1.0 if reg.regime is Regime.OVERDAMPED else 1.0
        b_val = sign * reg.omega ** 2 / (2.0 * omega0)
        return CoefficientSet(_const(w2), _const(b_val), zero, zero,
                              kind, omega0, lam, a_prime=zero, d_prime=zero)
    raise ModelError(f"no built-in coefficients for kind {kind!r}")


def builtin_model(kind, omega0, lam):
    """Coefficient functions for one of the built-in models.

    Parameters
    ----------
    kind : ModelKind or str
        One of model1 | model2 | shifted | model3 | harmonic.
    omega0 : float
        Bare oscillator frequency, > 0.
    lam : float
        Damping rate, >= 0.
    """
    kind = ModelKind(kind)
    if kind is ModelKind.CUSTOM:
        raise ModelError("custom models are built from tables, see custom_model()")
    _validate_params(omega0, lam)
    return _build(kind, omega0, lam)


def _builtin_unchecked(kind, omega0, lam):
    """Internal: built-in coefficients without the lambda >= 0 guard.

    The closed-form kernels are algebraic in lambda, so sign-flipped
    variants (needed by the momentum-representation duality) are valid.
    """
    if not math.isfinite(omega0) or omega0 <= 0.0 or not math.isfinite(lam):
        raise ModelError("invalid omega0/lambda")
    return _build(ModelKind(kind), omega0, lam)


def to_pde_form(opc):
    """Convert operator-form coefficients to the canonical PDE form.

    With px = -i(1 + x d/dx) and xp = -i x d/dx the exact bridge is
    c_pde = c_op + d_op and d_pde = c_op; a and b are copied.
    """
    def c(t):
        return opc.c(t) + opc.d(t)
    return CoefficientSet(opc.a, opc.b, c, opc.c, ModelKind.CUSTOM)


def operator_form(coeffs):
    """Inverse bridge: c_op = d_pde, d_op = c_pde - d_pde."""
    def d(t):
        return coeffs.c(t) - coeffs.d(t)
    return OperatorCoefficients(coeffs.a, coeffs.b, coeffs.d, d)


_FD_STEP = 1e-6


def _deriv(f, fprime, t):
    if fprime is not None:
        return fprime(t)
    t = np.asarray(t, dtype=float)
    return (f(t + _FD_STEP) - f(t - _FD_STEP)) / (2.0 * _FD_STEP)


def tau_sigma(coeffs, t):
    """Coefficients tau(t), sigma(t) of the characteristic equation
    mu'' - tau mu' + 4 sigma mu = 0.

    sigma is evaluated in the expanded form
        sigma = a b - c d + d^2 + (d/2)(a'/a) - d'/2
    which removes the removable d'/d singularity of the textbook
    expression at d = 0.
    """
    a = np.asarray(coeffs.a(t), dtype=float)
    if np.any(a == 0.0) or not np.all(np.isfinite(a)):
        raise ModelError(f"a(t) must be finite and nonzero, got {a} at t={t}")
    b = coeffs.b(t)
    c = coeffs.c(t)
    d = coeffs.d(t)
    ap = _deriv(coeffs.a, coeffs.a_prime, t)
    dp = _deriv(coeffs.d, coeffs.d_prime, t)
    if not (np.all(np.isfinite(ap)) and np.all(np.isfinite(dp))):
        raise ModelError(f"coefficient derivatives not finite at t={t}")
    tau = ap / a - 2.0 * c + 4.0 * d
    sigma = a * b - c * d + d * d + 0.5 * d * ap / a - 0.5 * dp
    return tau, sigma


def h_factor(coeffs, t, method="auto"):
    """Kernel weight h(t) = exp(-int_0^t (c - 2d) dtau).

    Built-in models use the closed-form integral; custom coefficients (or
    method="quadrature") use adaptive quadrature with absolute tolerance
    1e-12.  t must be >= 0.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ModelError("h_factor requires t >= 0")
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and coeffs.kind is not ModelKind.CUSTOM:
        lam = coeffs.lam
        if coeffs.kind is ModelKind.MODEL1:
            return np.exp(-lam * t_arr)
        if coeffs.kind is ModelKind.MODEL2:
            return np.exp(lam * t_arr)
        # shifted: c - 2d = -lam + lam = 0; model3/harmonic: c = d = 0
        return np.ones_like(t_arr) if t_arr.ndim else 1.0

    def integrand(tau):
        return float(coeffs.c(tau) - 2.0 * coeffs.d(tau))

    def one(tv):
        val, err = quad(integrand, 0.0, tv, epsabs=1e-12, epsrel=1e-12, limit=200)
        if err > 1e-10:
            raise QuadratureError("h_factor quadrature did not converge", err)
        return math.exp(-val)

    if t_arr.ndim == 0:
        return one(float(t_arr))
    return np.array([one(tv) for tv in t_arr])


def custom_model_from_table(t, a, b, c, d):
    """Custom coefficients from samples on a uniform time grid.

    Cubic-spline interpolation supplies values and derivatives.  The grid
    must be strictly increasing and uniform.
    """
    t = np.asarray(t, dtype=float)
    if t.size < 4:
        raise ModelError("need at least 4 samples for cubic interpolation")
    dt = np.diff(t)
    if np.any(dt <= 0.0):
        raise ModelError("time grid must be strictly increasing")
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ModelError("time grid must be uniform")
    cols = []
    for name, y in (("a", a), ("b", b), ("c", c), ("d", d)):
        y = np.asarray(y, dtype=float)
        if y.shape != t.shape:
            raise ModelError(f"column {name} has shape {y.shape}, expected {t.shape}")
        if not np.all(np.isfinite(y)):
            raise ModelError(f"column {name} contains non-finite values")
        cols.append(CubicSpline(t, y))
    sa, sb, sc, sd = cols
    if np.any(sa(t) == 0.0):
        raise ModelError("a(t) vanishes somewhere on the table")
    return CoefficientSet(sa, sb, sc, sd, ModelKind.CUSTOM,
                          a_prime=sa.derivative(), d_prime=sd.derivative())


def custom_model(path):
    """Load a custom model from a CSV file with header `t,a,b,c,d`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "a", "b", "c", "d"]:
            raise ModelError(f"{path}: expected CSV header 't,a,b,c,d'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 5:
                raise ModelError(f"{path}:{lineno}: expected 5 columns, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise ModelError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ModelError(f"{path}: no data rows")
    data = np.asarray(rows)
    return custom_model_from_table(data[:, 0], data[:, 1], data[:, 2],
                                   data[:, 3], data[:, 4])


def model_from_string(spec, omega0, lam):
    """Resolve a CLI/config model string: builtin name or `custom:<path>`."""
    if spec.startswith("custom:"):
        return custom_model(spec.split(":", 1)[1])
    try:
        kind = ModelKind(spec)
    except ValueError:
        names = " | ".join(k.value for k in ModelKind if k is not ModelKind.CUSTOM)
        raise ModelError(f"unknown model {spec!r}; expected {names} or custom:<path>")
    return builtin_model(kind, omega0, lam)
