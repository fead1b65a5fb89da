"""Build script for the compiled quadrature core.

The extension is optional: if it is absent at import time the package
falls back to a NumPy implementation with identical semantics
(see quadosc._core).  Build in place with

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "quadosc._core._kernels",
                ["src/quadosc/_core/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
