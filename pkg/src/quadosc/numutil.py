"""Small deterministic numerical helpers: quadrature and finite differences.

Everything here runs on uniform grids with a fixed accumulation order so
that outputs are bit-reproducible run to run.
"""

import numpy as np


def trapezoid(values, dx):
    """Composite trapezoid rule on a uniform grid."""
    values = np.asarray(values)
    if values.shape[-1] < 2:
        raise ValueError("trapezoid needs at least two samples")
    inner = values[..., 1:-1].sum(axis=-1)
    return (inner + 0.5 * (values[..., 0] + values[..., -1])) * dx


def composite_simpson(values, dx):
    """Composite Simpson rule on a uniform grid.

    Even interval counts use the classic 1/3 rule; odd counts finish with
    a 3/8 tail over the last three intervals.  Two intervals minimum.
    """
    y = np.asarray(values, dtype=float)
    m = y.size - 1  # number of intervals
    if m < 2:
        raise ValueError("composite_simpson needs at least two intervals")
    if m % 2 == 0:
        kend = m
        tail = 0.0
    else:
        kend = m - 3
        tail = 3.0 * dx / 8.0 * (y[m - 3] + 3.0 * y[m - 2] + 3.0 * y[m - 1] + y[m])
        if kend == 0:
            return tail
    body = y[0] + y[kend] + 4.0 * y[1:kend:2].sum() + 2.0 * y[2:kend:2].sum()
    return dx / 3.0 * body + tail


def derivative1_4th(values, dx):
    """Fourth-order first derivative on a uniform grid.

    Five-point centered stencil in the interior, one-sided fourth-order
    stencils at the two points nearest each edge.
    """
    y = np.asarray(values)
    if y.size < 6:
        raise ValueError("need at least 6 samples for the 4th-order stencil")
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * dx)
    for i in (0, 1):
        d[i] = (
            -25.0 * y[i] + 48.0 * y[i + 1] - 36.0 * y[i + 2]
            + 16.0 * y[i + 3] - 3.0 * y[i + 4]
        ) / (12.0 * dx)
    for i in (-2, -1):
        d[i] = (
            25.0 * y[i] - 48.0 * y[i - 1] + 36.0 * y[i - 2]
            - 16.0 * y[i - 3] + 3.0 * y[i - 4]
        ) / (12.0 * dx)
    return d


def derivative2_4th(values, dx):
    """Fourth-order second derivative on a uniform grid (5-point interior)."""
    y = np.asarray(values)
    if y.size < 6:
        raise ValueError("need at least 6 samples for the 4th-order stencil")
    d = np.empty_like(y)
    d[2:-2] = (
        -y[4:] + 16.0 * y[3:-1] - 30.0 * y[2:-2] + 16.0 * y[1:-3] - y[:-4]
    ) / (12.0 * dx * dx)
    # One-sided 4th-order second-derivative stencils (6 points); even under
    # reflection, so the right edge reuses them on the reversed array.
    c = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
    z = y[::-1]
    for i in (0, 1):
        d[i] = np.dot(c, y[i : i + 6]) / (dx * dx)
        d[-1 - i] = np.dot(c, z[i : i + 6]) / (dx * dx)
    return d


def rk4(rhs, y0, t_grid):
    """Classic fourth-order Runge-Kutta over a uniform time grid.

    `rhs(t, y) -> dy/dt` with `y` a 1-D float array.  Returns an array of
    shape (len(t_grid), len(y0)) containing the dense solution.
    """
    y0 = np.asarray(y0, dtype=float)
    out = np.empty((t_grid.size, y0.size))
    out[0] = y0
    y = y0.copy()
    for i in range(t_grid.size - 1):
        t = t_grid[i]
        h = t_grid[i + 1] - t
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


def rk4_with_estimate(rhs, y0, t_end, steps):
    """RK4 dense solve plus a step-doubling error estimate.

    Integrates once with `steps` intervals and once with `steps // 2`;
    the classic (fine - coarse)/15 comparison at the shared grid points
    estimates the fine-solution error, normalized by the solution scale
    max(1, sup|y|) so growing solutions are judged relatively.  Returns
    (t_grid, solution, error_estimate).
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t_fine = np.linspace(0.0, t_end, steps + 1)
    fine = rk4(rhs, y0, t_fine)
    half = steps // 2
    t_coarse = np.linspace(0.0, t_end, half + 1)
    coarse = rk4(rhs, y0, t_coarse)
    if steps % 2 == 0:
        err = np.max(np.abs(fine[::2][: half + 1] - coarse)) / 15.0
    else:
        err = np.max(np.abs(fine[-1] - coarse[-1])) / 15.0
    return t_fine, fine, err / max(1.0, float(np.max(np.abs(fine))))
