"""NumPy implementation of the hot kernels.

Semantics mirror the compiled extension: the oscillatory factor
exp(i*beta*x*y_j) advances along the uniform y-grid by one complex
rotation per step (re-anchored with a fresh exponential every
ANCHOR_EVERY steps to stop drift), and sums are Kahan-compensated.
The compiled module is preferred at import time when available.
"""

import math

import numpy as np

ANCHOR_EVERY = 512


def chirp_sum(xs, y0, dy, z, beta):
    """out[i] = sum_j exp(i*beta*xs[i]*y_j) * z[j],  y_j = y0 + j*dy."""
    xs = np.asarray(xs, dtype=float)
    z = np.asarray(z, dtype=complex)
    ny = z.size
    acc = np.zeros(xs.size, dtype=complex)
    comp = np.zeros(xs.size, dtype=complex)
    bx = beta * xs
    delta = np.exp(1j * bx * dy)
    rot = np.exp(1j * bx * y0)
    for j in range(ny):
        if j % ANCHOR_EVERY == 0:
            rot = np.exp(1j * bx * (y0 + j * dy))
        term = rot * z[j]
        y = term - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        rot = rot * delta
    return acc


def hermite_weighted_cumsum(x, y, r, nmax):
    """Partial sums S_N = sum_{n<=N} g_n(x) g_n(y) r^n, N = 0..nmax,
    with g_n = H_n / sqrt(2^n n!) evaluated by the stable recurrence."""
    out = np.empty(nmax + 1, dtype=complex)
    gx_prev, gy_prev = 0.0, 0.0
    gx, gy = 1.0, 1.0
    rn = complex(1.0)
    acc = complex(0.0)
    comp = complex(0.0)
    for n in range(nmax + 1):
        term = gx * gy * rn
        yk = term - comp
        t = acc + yk
        comp = (t - acc) - yk
        acc = t
        out[n] = acc
        s = math.sqrt(2.0 / (n + 1.0))
        q = math.sqrt(n / (n + 1.0))
        gx, gx_prev = x * s * gx - q * gx_prev, gx
        gy, gy_prev = y * s * gy - q * gy_prev, gy
        rn = rn * r
    return out
