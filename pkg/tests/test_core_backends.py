"""The compiled extension and the NumPy fallback must agree."""

import math

import numpy as np
import pytest

from quadosc import _core
from quadosc._core import _fallback

compiled = pytest.importorskip("quadosc._core._kernels", reason="extension not built")


def _random_case(seed, nx=700, ny=900):
    rng = np.random.default_rng(seed)
    xs = np.linspace(-8.0, 8.0, nx)
    y0, dy = -8.0, 16.0 / (ny - 1)
    z = rng.standard_normal(ny) + 1j * rng.standard_normal(ny)
    z *= np.exp(-np.linspace(-4, 4, ny) ** 2)
    beta = rng.uniform(-3.0, 3.0)
    return xs, y0, dy, z, beta


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_chirp_sum_backends_agree(seed):
    xs, y0, dy, z, beta = _random_case(seed)
    fast = compiled.chirp_sum(xs, y0, dy, z, beta)
    slow = _fallback.chirp_sum(xs, y0, dy, z, beta)
    scale = np.max(np.abs(slow))
    assert np.max(np.abs(fast - slow)) / scale < 1e-13


def test_chirp_sum_matches_direct_evaluation():
    xs, y0, dy, z, beta = _random_case(3, nx=40, ny=1500)
    y = y0 + dy * np.arange(z.size)
    direct = np.exp(1j * beta * np.outer(xs, y)) @ z
    for impl in (compiled, _fallback):
        got = impl.chirp_sum(xs, y0, dy, z, beta)
        assert np.max(np.abs(got - direct)) / np.max(np.abs(direct)) < 1e-12


def test_chirp_sum_compensation_beats_naive_float():
    # Summing many same-sign terms: the compensated accumulation must stay
    # at the working-precision answer.
    ny = 50000
    z = np.full(ny, 0.1 + 0.05j)
    got = _fallback.chirp_sum(np.array([0.0]), 0.0, 1e-4, z, 1.0)[0]
    assert got == pytest.approx(ny * (0.1 + 0.05j), rel=1e-15)


@pytest.mark.parametrize("r", [0.5 + 0.0j, 0.9 * np.exp(1.2j), -0.3 + 0.6j])
def test_hermite_cumsum_backends_agree(r):
    fast = compiled.hermite_weighted_cumsum(1.3, -0.7, r, 600)
    slow = _fallback.hermite_weighted_cumsum(1.3, -0.7, r, 600)
    assert np.max(np.abs(fast - slow)) < 1e-13 * np.max(np.abs(slow) + 1.0)


def test_hermite_cumsum_matches_explicit_terms():
    x, y, r, n = 0.8, -1.1, 0.4 + 0.3j, 30
    terms = []
    for k in range(n + 1):
        hk_x = _hermite(k, x)
        hk_y = _hermite(k, y)
        terms.append(hk_x * hk_y * r ** k / (2.0 ** k * math.factorial(k)))
    expect = np.cumsum(terms)
    got = _core.hermite_weighted_cumsum(x, y, r, n)
    assert np.max(np.abs(got - expect)) < 1e-12


def _hermite(n, x):
    h_prev, h = 0.0, 1.0
    for k in range(n):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return h


def test_backend_label():
    assert _core.BACKEND in ("compiled", "python")
