"""The glued disk complex: boundary bridge, hanging forest, labels and metric.

The boundary is a scaled dimension-5 Bessel bridge on [0, 1]; a thinned
Poisson forest of snake excursions hangs off it, every contour label is
nonnegative, and the label of the root (boundary time 0) is exactly 0.  The
chain metric restricted to sampled points satisfies, exactly,

    dist(root, x) = label(x)

because every direct-distance edge dominates the label difference while the
single edge from the root costs exactly ``label(x)``.  In particular the
distance from the root along the boundary is the scaled bridge itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import GridPath, occupation_time_below
from .contour import ContourSequence, assemble_contour
from .errors import ParameterError
from .graph import (
    DEFAULT_POINT_CAP,
    MetricApprox,
    dijkstra_distances,
    shortest_path_closure,
)
from .rng import RandomStream
from .snake import SnakeExcursion, sample_poisson_forest
from . import bessel

__all__ = [
    "DiskComplex",
    "build_complex",
    "sample_disk_complex",
    "metric_shortest_path",
    "boundary_ball_volume_at_root",
    "reroot_boundary",
    "RerootView",
]

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class DiskComplex:
    """Boundary bridge, surviving atoms, contour with labels, total tree mass."""

    boundary: GridPath
    atoms: tuple[tuple[float, SnakeExcursion], ...]
    contour: ContourSequence
    sigma_total: float

    @property
    def root_index(self) -> int:
        return self.contour.root_index

    def entry_at_boundary_time(self, t: float) -> int:
        """Contour index of the boundary entry nearest to time ``t`` (mod 1)."""
        t = t - math.floor(t) if t not in (0.0, 1.0) else t
        idx = self.contour.boundary_entries
        times = self.contour.position[idx]
        return int(idx[np.argmin(np.abs(times - t))])


def build_complex(
    R: GridPath,
    atoms: list[tuple[float, SnakeExcursion]],
    contour_step: float | None = None,
) -> DiskComplex:
    """Assemble the glued complex from a bridge and a thinned forest.

    ``contour_step`` controls how densely the boundary is listed on the
    contour (it is rounded to a multiple of the bridge grid step); tree
    contours are always spliced in full at their attachment times.
    """
    if R.start_time != 0.0 or abs(R.end_time - 1.0) > 1e-9:
        raise ParameterError("bridge must be defined on [0, 1]")
    if R.values[0] != 0.0 or R.values[-1] != 0.0:
        raise ParameterError("bridge must vanish at both endpoints")
    positions = [t for t, _ in atoms]
    if any(not 0.0 < t < 1.0 for t in positions):
        raise ParameterError("atom positions must lie in (0, 1)")
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise ParameterError("atoms must be strictly sorted by position")

    stride = 1 if contour_step is None else max(1, round(contour_step / R.step))
    b_idx = np.arange(0, len(R), stride)
    if b_idx[-1] != len(R) - 1:
        b_idx = np.append(b_idx, len(R) - 1)
    offsets = np.array([SQRT3 * R.value_at_nearest(t) for t in positions])
    contour = assemble_contour(
        boundary_times=R.times[b_idx],
        boundary_labels=SQRT3 * R.values[b_idx],
        atoms=list(atoms),
        atom_label_offsets=offsets,
        root_time=0.0,
        topology="cycle",
    )
    return DiskComplex(
        boundary=R,
        atoms=tuple(atoms),
        contour=contour,
        sigma_total=float(sum(exc.duration for _, exc in atoms)),
    )


def sample_disk_complex(
    epsilon: float,
    bridge_step: float,
    rng: RandomStream,
    contour_step: float | None = None,
    tree_step: float | None = None,
) -> DiskComplex:
    """Bridge, forest and contour in one call (the usual entry point)."""
    R = bessel.sample_bessel_bridge(5, 1.0, bridge_step, rng)
    atoms = sample_poisson_forest(R, epsilon, rng, base_step=tree_step)
    return build_complex(R, atoms, contour_step=contour_step)


def metric_shortest_path(
    contour: ContourSequence,
    points: np.ndarray,
    cap: int = DEFAULT_POINT_CAP,
) -> MetricApprox:
    """All-pairs chain distances over sampled points (root must be included)."""
    points = np.asarray(points, dtype=np.int64)
    if contour.root_index not in points:
        raise ParameterError("sampled points must include the root entry")
    return shortest_path_closure(contour, points, cap=cap)


def boundary_ball_volume_at_root(R: GridPath, r: float) -> float:
    """Lebesgue volume of the boundary ball of radius ``r`` at the root.

    Equal to the time the scaled bridge spends strictly below ``r``; no metric
    graph is needed because boundary distances from the root are the scaled
    bridge itself.
    """
    if r <= 0:
        raise ParameterError("radius must be positive")
    return occupation_time_below(R.scaled(SQRT3), r)


class RerootView:
    """Boundary statistics computed after shifting the base point to ``u``.

    Distances from the new base point are genuine chain distances through the
    sampled contour; at ``u = 0`` (or 1) they reduce exactly to the labels, so
    every statistic agrees with the unshifted complex.
    """

    def __init__(self, complex_: DiskComplex, u: float):
        if not 0.0 <= u <= 1.0:
            raise ParameterError("reroot position must lie in [0, 1]")
        self.complex = complex_
        self.u = u
        self.base_entry = complex_.entry_at_boundary_time(u)

    def _nodes(self, label_bound: float) -> np.ndarray:
        contour = self.complex.contour
        keep = (contour.kind == 0) | (contour.labels <= label_bound)
        keep[self.base_entry] = True
        return np.flatnonzero(keep)

    def statistics(self, delta: float, radius: float) -> dict:
        """Pair distance to ``u + delta`` and ball volume at ``u``, one sweep.

        Tree entries whose label exceeds every useful chain bound are pruned;
        the pruning is exact for both statistics (a chain through a point with
        label above ``label(u) + bound`` always costs more than the direct
        edge it would improve).
        """
        contour = self.complex.contour
        target = self.complex.entry_at_boundary_time((self.u + delta) % 1.0)
        base_label = contour.labels[self.base_entry]
        target_label = contour.labels[target]
        bound = base_label + max(radius, target_label)
        nodes = self._nodes(bound)
        frontier = max(radius, contour.direct_distance(self.base_entry, int(target)))
        dist = dijkstra_distances(
            contour, self.base_entry, nodes, stop_frontier=frontier, settle=[target]
        )
        node_pos = {int(e): i for i, e in enumerate(nodes)}
        boundary_idx = contour.boundary_entries
        boundary_dist = dist[[node_pos[int(e)] for e in boundary_idx]]
        widths = contour.boundary_widths()
        volume = float(widths[boundary_dist < radius].sum())
        return {
            "pair_distance": float(dist[node_pos[int(target)]]),
            "ball_volume": volume,
        }


def reroot_boundary(complex_: DiskComplex, u: float) -> RerootView:
    return RerootView(complex_, u)
