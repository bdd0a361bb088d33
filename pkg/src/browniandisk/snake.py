"""Discretised snake excursions: lifetime trees with Gaussian branch labels.

The excursion measure over lifetime paths is height-normalised so that the
mass of ``{max zeta >= eps}`` is ``1/(2 eps)``.  Conditioned on that event it
is a probability law and is sampled in two exact stages:

* the maximum ``M`` has tail ``P(M >= m) = eps/m`` and is drawn by inverse cdf;
* given ``M = m`` the excursion is the concatenation of two independent
  3-dimensional Bessel paths run from 0 to their first passage of ``m``, the
  second one time-reversed (the classical decomposition of an excursion at its
  maximum), discretised on a uniform grid with the peak pinned at exactly ``m``.

Conditionally on the lifetime path, the head labels form a centred Gaussian
process whose covariance between two times is the minimum of the lifetime over
the in-between interval.  They are sampled by walking the lifetime grid with a
stack of (height, label) skeleton points: moving down erases the branch above
the new minimum (with a Brownian-bridge evaluation at the cut level) and
moving up grows fresh Gaussian increments, one per tree edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import GridPath
from .errors import ParameterError
from .rng import RandomStream

__all__ = [
    "SnakeExcursion",
    "sample_excursion_lifetime",
    "sample_snake_head",
    "sample_snake_excursion",
    "tree_distance",
    "sample_poisson_forest",
]

SQRT3 = math.sqrt(3.0)

# grid policy for forest atoms: aim for m^2/base_step points per excursion of
# height m, clamped so tiny trees stay resolved and tall ones stay affordable
MIN_TREE_POINTS = 64
MAX_TREE_POINTS = 1 << 17


@dataclass(frozen=True)
class SnakeExcursion:
    """One sampled snake trajectory.

    ``zeta`` is the lifetime path (nonnegative, zero at both ends), ``head``
    the label of the snake head on the same grid, ``duration`` the time span
    of ``zeta``, ``min_label`` the minimum head value, and ``cutoff`` the
    height threshold the excursion measure was conditioned on.
    """

    zeta: GridPath
    head: GridPath
    duration: float
    min_label: float
    cutoff: float

    def __post_init__(self):
        if len(self.zeta) != len(self.head) or self.zeta.step != self.head.step:
            raise ParameterError("zeta and head must share one grid")
        z = self.zeta.values
        if z[0] != 0.0 or z[-1] != 0.0 or np.any(z < 0.0):
            raise ParameterError("lifetime path must be nonnegative with zero endpoints")
        if self.head.values[0] != 0.0:
            raise ParameterError("head must start at 0")

    @property
    def max_height(self) -> float:
        return float(self.zeta.values.max())

    def to_record(self) -> dict:
        """Serialisable form: aligned arrays plus a small header."""
        return {
            "duration": self.duration,
            "min_label": self.min_label,
            "cutoff": self.cutoff,
            "step": self.zeta.step,
            "zeta": self.zeta.values.tolist(),
            "head": self.head.values.tolist(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SnakeExcursion":
        zeta = GridPath(0.0, rec["step"], np.asarray(rec["zeta"]))
        head = GridPath(0.0, rec["step"], np.asarray(rec["head"]))
        return cls(zeta, head, rec["duration"], rec["min_label"], rec["cutoff"])


def _bes3_to_first_passage(level: float, step: float, rng: RandomStream) -> np.ndarray:
    """Values of a 3-d Bessel path from 0, strictly before it first reaches level."""
    sqrt_step = math.sqrt(step)
    out = [np.zeros(1)]
    carry = np.zeros(3)
    block = 2048
    while True:
        w = carry[:, None] + np.cumsum(
            rng.standard_normal((3, block)) * sqrt_step, axis=1
        )
        r = np.linalg.norm(w, axis=0)
        hit = np.flatnonzero(r >= level)
        if hit.size:
            out.append(r[: hit[0]])
            return np.concatenate(out)
        out.append(r)
        carry = w[:, -1]


def _excursion_given_max(
    max_height: float, step: float, rng: RandomStream, cutoff: float
) -> GridPath:
    up = _bes3_to_first_passage(max_height, step, rng)
    down = _bes3_to_first_passage(max_height, step, rng)
    values = np.concatenate([up, [max_height], down[::-1]])
    values[0] = 0.0
    values[-1] = 0.0
    return GridPath(0.0, step, values)


def _adaptive_step(max_height: float, base_step: float, max_points: int) -> float:
    target = max_height**2 / base_step
    target = min(max(target, MIN_TREE_POINTS), min(MAX_TREE_POINTS, max_points))
    return max_height**2 / target


def _draw_max(epsilon: float, rng: RandomStream) -> float:
    u = float(rng.uniform())
    return epsilon / max(u, np.finfo(float).tiny)


def sample_excursion_lifetime(
    epsilon: float, step: float, rng: RandomStream, max_points: int = 1 << 22
) -> GridPath:
    """Sample one lifetime excursion conditioned on maximum height >= epsilon.

    The step is widened for rare very tall excursions so that the expected
    grid size stays below ``max_points``; the grid stays uniform per path.
    """
    if epsilon <= 0 or step <= 0:
        raise ParameterError("epsilon and step must be positive")
    m = _draw_max(epsilon, rng)
    expected = 2.0 * m**2 / (3.0 * step)
    eff_step = step if expected <= max_points else 2.0 * m**2 / (3.0 * max_points)
    return _excursion_given_max(m, eff_step, rng, epsilon)


def sample_snake_head(zeta: GridPath, rng: RandomStream) -> GridPath:
    """Sample head labels over a lifetime path, exactly on its grid.

    The covariance of the returned Gaussian values between grid times ``s`` and
    ``t`` equals ``min(zeta over [s, t])``, and two times bounding an interval
    on which ``zeta`` never dips below their common value receive exactly equal
    labels (the snake property, preserved without rounding).
    """
    z = np.asarray(zeta.values)
    if np.any(z < 0.0) or z[0] != 0.0:
        raise ParameterError("lifetime path must be nonnegative and start at 0")
    n = z.size
    noise = rng.standard_normal(2 * n)
    head = np.empty(n)
    head[0] = 0.0
    stack_level = [z[0]]
    stack_value = [0.0]
    j = 0
    for i in range(1, n):
        z_next = z[i]
        m = min(z[i - 1], z_next)
        upper_level = stack_level[-1]
        upper_value = stack_value[-1]
        while stack_level[-1] > m:
            upper_level = stack_level.pop()
            upper_value = stack_value.pop()
        low_level = stack_level[-1]
        if low_level == m:
            v_m = stack_value[-1]
        else:
            span = upper_level - low_level
            frac = (m - low_level) / span
            mean = stack_value[-1] + frac * (upper_value - stack_value[-1])
            var = (m - low_level) * (upper_level - m) / span
            v_m = mean + math.sqrt(var) * noise[j]
            j += 1
            stack_level.append(m)
            stack_value.append(v_m)
        if z_next > m:
            h = v_m + math.sqrt(z_next - m) * noise[j]
            j += 1
            stack_level.append(z_next)
            stack_value.append(h)
        else:
            h = v_m
        head[i] = h
    return GridPath(zeta.start_time, zeta.step, head)


def sample_snake_excursion(
    epsilon: float, step: float, rng: RandomStream, max_points: int = 1 << 22
) -> SnakeExcursion:
    """One full snake trajectory under the height-conditioned excursion law."""
    zeta = sample_excursion_lifetime(epsilon, step, rng, max_points)
    head = sample_snake_head(zeta, rng)
    return SnakeExcursion(
        zeta=zeta,
        head=head,
        duration=zeta.span,
        min_label=float(head.values.min()),
        cutoff=epsilon,
    )


def tree_distance(zeta: GridPath, s: float, t: float) -> float:
    """Distance in the genealogical tree encoded by the lifetime path.

    ``d(s, t) = zeta(s) + zeta(t) - 2 min(zeta over [s, t])`` with the minimum
    taken over grid times.
    """
    i = zeta.index_at(s)
    k = zeta.index_at(t)
    lo, hi = min(i, k), max(i, k)
    return float(
        zeta.values[i] + zeta.values[k] - 2.0 * zeta.values[lo : hi + 1].min()
    )


def _forest_atoms(
    span: float,
    epsilon: float,
    rng: RandomStream,
    base_step: float,
    max_points: int,
) -> list[tuple[float, SnakeExcursion]]:
    """Pre-thinning atoms of the Poisson forest over an interval of given span.

    The atom count is Poisson with mean ``span/epsilon`` (intensity 2 per unit
    time against excursion mass ``1/(2 eps)``); positions are uniform.
    """
    count = rng.poisson(span / epsilon)
    positions = np.sort(rng.uniform(0.0, span, size=count))
    atoms = []
    for t in positions:
        m = _draw_max(epsilon, rng)
        step = _adaptive_step(m, base_step, max_points)
        zeta = _excursion_given_max(m, step, rng, epsilon)
        head = sample_snake_head(zeta, rng)
        exc = SnakeExcursion(
            zeta=zeta,
            head=head,
            duration=zeta.span,
            min_label=float(head.values.min()),
            cutoff=epsilon,
        )
        atoms.append((float(t), exc))
    return atoms


def sample_poisson_forest(
    R: GridPath,
    epsilon: float,
    rng: RandomStream,
    base_step: float | None = None,
    max_points: int = MAX_TREE_POINTS,
) -> list[tuple[float, SnakeExcursion]]:
    """Sample the thinned forest hanging off a boundary bridge on [0, 1].

    Atoms whose minimum label falls below ``-sqrt(3) R_t`` at their attachment
    time are rejected, so every surviving excursion satisfies
    ``head + sqrt(3) R_t >= 0`` everywhere.  Returns survivors sorted by
    position.
    """
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    if R.start_time != 0.0 or abs(R.end_time - 1.0) > 1e-9:
        raise ParameterError("bridge must be defined on [0, 1]")
    if base_step is None:
        base_step = R.step
    atoms = _forest_atoms(1.0, epsilon, rng, base_step, max_points)
    return [
        (t, exc)
        for t, exc in atoms
        if exc.min_label >= -SQRT3 * R.value_at_nearest(t)
    ]
