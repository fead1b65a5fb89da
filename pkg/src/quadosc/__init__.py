"""Damped quantum oscillators with variable quadratic Hamiltonians.

Gaussian propagator synthesis, wave-packet dynamics, shifted-oscillator
eigenstates with ladder operators and Poisson-kernel resummation, and
expectation-value flows for non-self-adjoint Hamiltonians.  Every closed
form ships with an independent numerical cross-check; `quadosc verify`
runs the whole suite.
"""

from ._core import BACKEND
from .config import RunConfig, load_config, parse_config
from .dynamics import (
    GaugePhase,
    GaussianWave,
    WaveGrid,
    composition_check,
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
from .eigenstates import (
    LadderOperators,
    ShiftedEigenstate,
    eigenstate_value,
    energy,
    expansion_coefficients,
    expansion_kernel,
    hermite,
    hermite_function,
    hermite_sequence,
    ladder_apply,
    ladder_operators,
    mehler_closed_form,
    mehler_partial_sum,
)
from .kernel import (
    KernelParams,
    MuSolution,
    antiderivative_inv_square,
    frequency_identity_residual,
    green_function,
    kernel_closed_form,
    kernel_params,
    kernel_params_numeric,
    mu_closed_form,
    solve_mu_numeric,
)
from .models import (
    CoefficientSet,
    DampingRegime,
    ModelKind,
    OperatorCoefficients,
    builtin_model,
    classify_damping,
    custom_model,
    h_factor,
    operator_form,
    tau_sigma,
    to_pde_form,
)
from .moments import (
    EigenStructure,
    MomentState,
    closed_form_model1,
    ehrenfest_closed_form,
    eigen_structure_model1,
    hamiltonian_expectation,
    integrate_moments,
    mechanical_energy,
    moment_rhs_general,
    moments_from_wave,
)
from .verify import run_all

__version__ = "0.1.0"
