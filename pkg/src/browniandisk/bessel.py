"""Bessel processes, Bessel bridges, occupation times and closed-form densities.

A ``dim``-dimensional Bessel process is sampled as the pointwise Euclidean
norm of ``dim`` independent Brownian motions, which is exact in distribution
at the grid times (no SDE discretisation bias).  Bridges use the norm of
``dim`` independent Brownian bridges, pinned to 0 at both ends.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .rng import RandomStream

__all__ = [
    "GridPath",
    "sample_bessel_process",
    "sample_bessel_bridge",
    "occupation_time_below",
    "occupation_below_weighted",
    "last_passage_time",
    "half_time_densities",
]


@dataclass(frozen=True)
class GridPath:
    """A real-valued function sampled on a uniform time grid.

    Parameters
    ----------
    start_time : float
        Time of the first sample.
    step : float
        Grid spacing, strictly positive.
    values : numpy.ndarray
        Sampled values, at least two of them.
    """

    start_time: float
    step: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.step <= 0:
            raise ParameterError(f"step must be positive, got {self.step}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise ParameterError("values must be a 1-d array with at least 2 entries")
        if not np.all(np.isfinite(values)):
            raise ParameterError("values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.step * np.arange(self.values.size)

    @property
    def end_time(self) -> float:
        return self.start_time + self.step * (self.values.size - 1)

    @property
    def span(self) -> float:
        """Length of the time domain covered by the grid."""
        return self.step * (self.values.size - 1)

    def index_at(self, t: float, tol: float = 1e-9) -> int:
        """Grid index of time ``t``; raises if ``t`` is not a grid time."""
        k = round((t - self.start_time) / self.step)
        if not 0 <= k < self.values.size:
            raise ParameterError(f"time {t} outside grid domain")
        if abs(self.start_time + k * self.step - t) > tol * max(1.0, abs(t)):
            raise ParameterError(f"time {t} is not a grid time")
        return int(k)

    def value_at_nearest(self, t: float) -> float:
        """Value at the grid time closest to ``t`` (clamped to the domain)."""
        k = round((t - self.start_time) / self.step)
        k = min(max(k, 0), self.values.size - 1)
        return float(self.values[k])

    def scaled(self, factor: float) -> "GridPath":
        """The path with all values multiplied by ``factor``."""
        return GridPath(self.start_time, self.step, factor * np.asarray(self.values))

    def to_csv(self) -> str:
        """Flat text record: one header line, then one value per line."""
        buf = io.StringIO()
        buf.write(f"start_time={self.start_time!r},step={self.step!r},n={len(self)}\n")
        for v in self.values:
            buf.write(f"{v!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridPath":
        lines = text.strip().splitlines()
        header = dict(kv.split("=") for kv in lines[0].split(","))
        values = np.array([float(x) for x in lines[1:]])
        if len(values) != int(header["n"]):
            raise ParameterError("corrupt path record: length mismatch")
        return cls(float(header["start_time"]), float(header["step"]), values)


def _brownian_motions(dim: int, n_steps: int, step: float, rng: RandomStream) -> np.ndarray:
    """(dim, n_steps+1) array of independent Brownian motions started at 0."""
    increments = rng.standard_normal((dim, n_steps)) * np.sqrt(step)
    paths = np.empty((dim, n_steps + 1))
    paths[:, 0] = 0.0
    np.cumsum(increments, axis=1, out=paths[:, 1:])
    return paths


def sample_bessel_process(
    dim: int, horizon: float, step: float, rng: RandomStream
) -> GridPath:
    """Sample a ``dim``-dimensional Bessel process started from 0.

    The returned path is the pointwise norm of ``dim`` independent Brownian
    motions evaluated at ``k * step`` for ``k = 0..round(horizon/step)``;
    exact in distribution at the grid points.
    """
    if dim < 1:
        raise ParameterError(f"dim must be >= 1, got {dim}")
    if horizon <= 0 or step <= 0:
        raise ParameterError("horizon and step must be positive")
    n_steps = max(1, round(horizon / step))
    paths = _brownian_motions(dim, n_steps, step, rng)
    values = np.linalg.norm(paths, axis=0)
    values[0] = 0.0
    return GridPath(0.0, step, values)


def sample_bessel_bridge(
    dim: int, length: float, step: float, rng: RandomStream
) -> GridPath:
    """Sample a ``dim``-dimensional Bessel bridge from 0 to 0.

    The path is the pointwise norm of ``dim`` independent Brownian bridges of
    the given length.  The requested step is rounded so that it divides the
    length; first and last values are exactly 0.
    """
    if dim < 1:
        raise ParameterError(f"dim must be >= 1, got {dim}")
    if length <= 0 or step <= 0:
        raise ParameterError("length and step must be positive")
    n_steps = max(2, round(length / step))
    actual_step = length / n_steps
    w = _brownian_motions(dim, n_steps, actual_step, rng)
    t = actual_step * np.arange(n_steps + 1)
    bridges = w - (t / length) * w[:, -1][:, None]
    values = np.linalg.norm(bridges, axis=0)
    values[0] = 0.0
    values[-1] = 0.0
    return GridPath(0.0, actual_step, values)


def occupation_time_below(path: GridPath, level: float) -> float:
    """Riemann approximation of the time the path spends strictly below ``level``.

    Right-endpoint rule: each grid value after the first weights the cell
    ending at it, so a path identically 0 on [0, 1] has occupation exactly 1
    and the starting value (pinned below every level for processes started at
    0) adds nothing.
    """
    if level <= 0:
        raise ParameterError(f"level must be positive, got {level}")
    return path.step * int(np.count_nonzero(path.values[1:] < level))


def occupation_below_weighted(
    values: np.ndarray, widths: np.ndarray, level: float
) -> np.ndarray:
    """Occupation below ``level`` for values sampled at the right ends of cells.

    ``values`` may be 1-d or (replicas, points); ``widths`` holds the cell
    lengths, one per value.  Returns a scalar or a per-replica vector.
    """
    if level <= 0:
        raise ParameterError(f"level must be positive, got {level}")
    below = np.asarray(values) < level
    return below @ np.asarray(widths, dtype=np.float64)


def last_passage_time(path: GridPath, level: float) -> tuple[float, bool]:
    """Last grid time at which the path is at or below ``level``.

    Returns ``(time, censored)``; ``censored`` is True when the path is still
    at or below the level at the final grid point, in which case the true last
    passage may lie beyond the horizon.  A path never at or below the level
    returns the start time, uncensored.
    """
    if level <= 0:
        raise ParameterError(f"level must be positive, got {level}")
    if len(path) == 0:  # pragma: no cover - GridPath forbids this
        raise ParameterError("empty path")
    at_or_below = path.values <= level
    if not at_or_below.any():
        return path.start_time, False
    idx = int(np.flatnonzero(at_or_below)[-1])
    return path.start_time + idx * path.step, bool(at_or_below[-1])


_RHO_NORM = 8.0 / (3.0 * np.sqrt(np.pi))
_RHO_BAR_NORM = 32.0 * np.sqrt(2.0) / (3.0 * np.sqrt(np.pi))


def half_time_densities(x):
    """Densities at time 1/2 of the dimension-5 radial processes, and their ratio.

    For the process started at 0 the half-time value has density
    ``rho(x) = (8/(3 sqrt(pi))) x^4 exp(-x^2)``; for the length-1 bridge it is
    ``rho_bar(x) = (32 sqrt(2)/(3 sqrt(pi))) x^4 exp(-2 x^2)``; their ratio is
    ``f(x) = 4 sqrt(2) exp(-x^2)``.  Accepts scalars or arrays, x >= 0.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise DomainError("densities are defined for x >= 0")
    x4 = arr**4
    rho = _RHO_NORM * x4 * np.exp(-(arr**2))
    rho_bar = _RHO_BAR_NORM * x4 * np.exp(-2.0 * arr**2)
    f = 4.0 * np.sqrt(2.0) * np.exp(-(arr**2))
    if np.isscalar(x) or arr.ndim == 0:
        return float(rho), float(rho_bar), float(f)
    return rho, rho_bar, f
