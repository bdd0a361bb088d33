"""Independent reference implementations used only by tests.

Nothing here imports the package's samplers or event logic: the squared
radial process is generated through its Markov transition density (noncentral
chi-square via the Poisson-gamma mixture), occupation events are evaluated by
direct loops, and range minima by linear scans.
"""

from __future__ import annotations

import math

import numpy as np


def squared_radial_paths_at(times, n_paths, dim, rng):
    """Exact skeleton of the squared radial process via its transition law.

    ``Z_{t+dt} | Z_t = z`` is ``dt`` times a noncentral chi-square with
    ``dim`` degrees of freedom and noncentrality ``z/dt``, realised as a
    central chi-square with ``dim + 2K`` degrees, ``K ~ Poisson(z/(2 dt))``.
    """
    z = np.zeros(n_paths)
    out = np.empty((n_paths, len(times)))
    t_prev = 0.0
    for j, t in enumerate(times):
        dt = t - t_prev
        k = rng.poisson(z / (2.0 * dt))
        z = dt * 2.0 * rng.standard_gamma((dim + 2 * k) / 2.0)
        out[:, j] = z
        t_prev = t
    return out


def occupation_event_direct(values_sq, times, levels, thresholds):
    """Direct-loop evaluation of the all-levels small-occupation event.

    ``values_sq`` holds squared path values at ``times`` (right ends of the
    cells starting at 0); returns one boolean per path.
    """
    widths = [times[0]] + [times[j] - times[j - 1] for j in range(1, len(times))]
    n_paths = values_sq.shape[0]
    flags = np.ones(n_paths, dtype=bool)
    for i in range(n_paths):
        for level, threshold in zip(levels, thresholds):
            occ = 0.0
            lv2 = level * level
            for j in range(len(times)):
                if values_sq[i, j] < lv2:
                    occ += widths[j]
            if occ > threshold:
                flags[i] = False
                break
    return flags


def gauge_direct(s: float) -> float:
    return s * s * math.log(math.log(1.0 / s)) if s > 0 else 0.0


def range_min_scan(data, a, b):
    """Linear-scan minimum over the inclusive cyclic range a..b."""
    n = len(data)
    if a <= b:
        return min(data[a : b + 1])
    return min(min(data[a:]), min(data[: b + 1]))


def chi_cdf(x, dim: int):
    """CDF of the norm of a standard Gaussian vector, by series-free quadrature."""
    from scipy.integrate import quad

    def pdf(z):
        return (
            2.0 ** (1.0 - dim / 2.0)
            / math.gamma(dim / 2.0)
            * z ** (dim - 1)
            * math.exp(-z * z / 2.0)
        )

    return quad(pdf, 0.0, x)[0]
