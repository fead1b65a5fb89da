"""Backend selection for the hot kernels.

The Cython extension is used when it was built; otherwise the NumPy
fallback takes over with identical semantics.  `BACKEND` records which
one is active so benchmarks and tests can report it.
"""

try:
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:  # extension not built; pure-Python install
    from . import _fallback as _impl
    BACKEND = "python"

from . import _fallback as fallback  # always importable, for benchmarks/tests

chirp_sum = _impl.chirp_sum
hermite_weighted_cumsum = _impl.hermite_weighted_cumsum

__all__ = ["BACKEND", "chirp_sum", "hermite_weighted_cumsum", "fallback"]
