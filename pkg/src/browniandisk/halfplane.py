"""A windowed half-plane complex and its truncated chain metric.

The boundary label process is built from two independent dimension-5 Bessel
processes glued back to back at 0 and windowed to [-T, T].  The truncated
metric restricts both interval minima and chain points to the sub-contour of
entries attached within [-eta, eta]; on the set of points whose labels stay
below a third of the smallest label outside the window, the truncated and full
chain metrics agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import GridPath, sample_bessel_process
from .contour import ContourSequence, assemble_contour
from .errors import ParameterError
from .graph import DEFAULT_POINT_CAP, MetricApprox, shortest_path_closure
from .rng import RandomStream
from .snake import SnakeExcursion, _forest_atoms

__all__ = [
    "HalfPlaneComplex",
    "build_halfplane",
    "metric_infty",
    "truncated_metric",
    "omega_eta",
    "low_label_entries",
]

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class HalfPlaneComplex:
    """Window size, glued two-sided boundary path, atoms and contour."""

    window: float
    X: GridPath
    atoms: tuple[tuple[float, SnakeExcursion], ...]
    contour: ContourSequence
    sigma_total: float

    @property
    def root_index(self) -> int:
        return self.contour.root_index


def build_halfplane(
    T: float,
    step: float,
    epsilon: float,
    rng: RandomStream,
    base_step: float | None = None,
    max_points: int = 1 << 17,
) -> HalfPlaneComplex:
    """Sample a windowed half-plane complex.

    The forest intensity matches the disk construction except that atoms with
    minimum label exactly at the threshold are rejected (strict inequality).
    """
    if T <= 0 or step <= 0 or epsilon <= 0:
        raise ParameterError("T, step and epsilon must be positive")
    neg = sample_bessel_process(5, T, step, rng)
    pos = sample_bessel_process(5, T, step, rng)
    values = np.concatenate([neg.values[::-1], pos.values[1:]])
    n_half = len(neg) - 1
    X = GridPath(-n_half * neg.step, neg.step, values)

    raw = _forest_atoms(2.0 * T, epsilon, rng, base_step or step, max_points)
    atoms = []
    for s, exc in raw:
        t = s - T
        if exc.min_label > -SQRT3 * X.value_at_nearest(t):
            atoms.append((t, exc))

    contour = assemble_contour(
        boundary_times=X.times,
        boundary_labels=SQRT3 * X.values,
        atoms=atoms,
        atom_label_offsets=np.array(
            [SQRT3 * X.value_at_nearest(t) for t, _ in atoms]
        ),
        root_time=X.times[n_half],
        topology="line",
    )
    return HalfPlaneComplex(
        window=T,
        X=X,
        atoms=tuple(atoms),
        contour=contour,
        sigma_total=float(sum(exc.duration for _, exc in atoms)),
    )


def metric_infty(
    complex_: HalfPlaneComplex, points: np.ndarray, cap: int = DEFAULT_POINT_CAP
) -> MetricApprox:
    """All-pairs chain distances on the full windowed contour."""
    points = np.asarray(points, dtype=np.int64)
    if complex_.root_index not in points:
        raise ParameterError("sampled points must include the root entry")
    return shortest_path_closure(complex_.contour, points, cap=cap)


def truncated_metric(
    complex_: HalfPlaneComplex,
    eta: float,
    points: np.ndarray,
    cap: int = DEFAULT_POINT_CAP,
) -> MetricApprox:
    """Chain distances using only the sub-contour attached within [-eta, eta].

    Interval minima are taken over the sub-contour as well, so the result can
    only dominate the full metric; the two agree exactly on low-label points.
    ``points`` must all be attached within the window.
    """
    if not 0.0 < eta <= complex_.window:
        raise ParameterError("eta must lie in (0, window]")
    contour = complex_.contour
    mask = np.abs(contour.position) <= eta
    points = np.asarray(points, dtype=np.int64)
    if not mask[points].all():
        raise ParameterError("all points must be attached within [-eta, eta]")
    sub_of_full = np.flatnonzero(mask)
    full_to_sub = -np.ones(len(contour), dtype=np.int64)
    full_to_sub[sub_of_full] = np.arange(sub_of_full.size)
    # the root sits at position 0 and is always inside the window
    sub = ContourSequence(
        labels=contour.labels[sub_of_full],
        kind=contour.kind[sub_of_full],
        position=contour.position[sub_of_full],
        atom_index=contour.atom_index[sub_of_full],
        tree_time=contour.tree_time[sub_of_full],
        root_index=int(full_to_sub[contour.root_index]),
        topology=contour.topology,
    )
    approx = shortest_path_closure(sub, full_to_sub[points], cap=cap)
    return MetricApprox(
        point_indices=sub_of_full[approx.point_indices],
        point_labels=approx.point_labels,
        dist=approx.dist,
    )


def omega_eta(complex_: HalfPlaneComplex, eta: float) -> float:
    """Smallest contour label attached outside [-eta, eta] (inf when none).

    Nondecreasing in eta: widening the window shrinks the outside set, so its
    minimum can only grow.
    """
    if eta <= 0:
        raise ParameterError("eta must be positive")
    outside = np.abs(complex_.contour.position) > eta
    if not outside.any():
        return math.inf
    return float(complex_.contour.labels[outside].min())


def low_label_entries(complex_: HalfPlaneComplex, eta: float) -> np.ndarray:
    """Contour entries whose label is at most a third of ``omega_eta``.

    All of them are attached within [-eta, eta]; chain distances between them
    never route through the outside of the window.
    """
    bound = omega_eta(complex_, eta) / 3.0
    return np.flatnonzero(complex_.contour.labels <= bound)
