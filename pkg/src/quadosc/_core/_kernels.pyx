# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see _fallback.py for the reference semantics."""

import numpy as np

from libc.math cimport cos, sin, sqrt

DEF ANCHOR_EVERY = 512


def chirp_sum(double[::1] xs, double y0, double dy,
              double complex[::1] z, double beta):
    """out[i] = sum_j exp(i*beta*xs[i]*y_j) * z[j],  y_j = y0 + j*dy."""
    cdef Py_ssize_t nx = xs.shape[0]
    cdef Py_ssize_t ny = z.shape[0]
    out_arr = np.empty(nx, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double bx, ph
    cdef double rot_re, rot_im, d_re, d_im, tmp
    cdef double zr, zi, tr, ti
    cdef double acc_re, acc_im, comp_re, comp_im, y_re, y_im, s_re, s_im
    for i in range(nx):
        bx = beta * xs[i]
        d_re = cos(bx * dy)
        d_im = sin(bx * dy)
        rot_re = 1.0
        rot_im = 0.0
        acc_re = acc_im = comp_re = comp_im = 0.0
        for j in range(ny):
            if j % ANCHOR_EVERY == 0:
                ph = bx * (y0 + j * dy)
                rot_re = cos(ph)
                rot_im = sin(ph)
            zr = z[j].real
            zi = z[j].imag
            tr = rot_re * zr - rot_im * zi
            ti = rot_re * zi + rot_im * zr
            # Kahan-compensated accumulation, real and imaginary parts.
            y_re = tr - comp_re
            s_re = acc_re + y_re
            comp_re = (s_re - acc_re) - y_re
            acc_re = s_re
            y_im = ti - comp_im
            s_im = acc_im + y_im
            comp_im = (s_im - acc_im) - y_im
            acc_im = s_im
            tmp = rot_re * d_re - rot_im * d_im
            rot_im = rot_re * d_im + rot_im * d_re
            rot_re = tmp
        out[i] = acc_re + 1j * acc_im
    return out_arr


def hermite_weighted_cumsum(double x, double y, double complex r, int nmax):
    """Partial sums S_N = sum_{n<=N} g_n(x) g_n(y) r^n, N = 0..nmax,
    with g_n = H_n / sqrt(2^n n!) evaluated by the stable recurrence."""
    out_arr = np.empty(nmax + 1, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double gx_prev = 0.0, gy_prev = 0.0
    cdef double gx = 1.0, gy = 1.0, gx_new, gy_new
    cdef double rn_re = 1.0, rn_im = 0.0, tmp
    cdef double r_re = r.real, r_im = r.imag
    cdef double acc_re = 0.0, acc_im = 0.0, comp_re = 0.0, comp_im = 0.0
    cdef double prod, tr, ti, y_re, y_im, s_re, s_im, s, q
    cdef int n
    for n in range(nmax + 1):
        prod = gx * gy
        tr = prod * rn_re
        ti = prod * rn_im
        y_re = tr - comp_re
        s_re = acc_re + y_re
        comp_re = (s_re - acc_re) - y_re
        acc_re = s_re
        y_im = ti - comp_im
        s_im = acc_im + y_im
        comp_im = (s_im - acc_im) - y_im
        acc_im = s_im
        out[n] = acc_re + 1j * acc_im
        s = sqrt(2.0 / (n + 1.0))
        q = sqrt(n / (n + 1.0))
        gx_new = x * s * gx - q * gx_prev
        gy_new = y * s * gy - q * gy_prev
        gx_prev = gx
        gy_prev = gy
        gx = gx_new
        gy = gy_new
        tmp = rn_re * r_re - rn_im * r_im
        rn_im = rn_re * r_im + rn_im * r_re
        rn_re = tmp
    return out_arr
