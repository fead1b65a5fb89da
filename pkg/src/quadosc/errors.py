"""Exception types shared across the package."""


class QuadOscError(Exception):
    """Base class for all library errors."""


class ModelError(QuadOscError):
    """Invalid model parameters or coefficient functions."""


class CausticError(QuadOscError):
    """Kernel requested at (or too close to) a focal time where mu(t) = 0."""


class TurningPointError(QuadOscError):
    """Direct gamma quadrature crosses a zero of mu'(t)."""


class WindowError(QuadOscError):
    """Time outside the default validity window (0, first caustic)."""


class StepSizeError(QuadOscError):
    """Embedded step-doubling error estimate exceeded the tolerance."""


class QuadratureError(QuadOscError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved_error):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


class TruncationError(QuadOscError):
    """Wavefunction does not decay at the grid boundary."""


class AliasingError(QuadOscError):
    """Momentum-space tails too large for the grid to resolve."""


class ParsevalDefectError(QuadOscError):
    """Eigenfunction expansion truncated too early for the requested state."""

    def __init__(self, defect, n_max):
        super().__init__(
            f"Parseval defect {defect:.3e} exceeds tolerance; "
            f"n_max={n_max} is insufficient for this state"
        )
        self.defect = defect
        self.n_max = n_max


class ConfigError(QuadOscError):
    """One or more configuration errors; `.errors` lists all of them."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
