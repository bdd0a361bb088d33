"""Boundary geometry of random disk-like surfaces.

Samplers for Bessel paths and snake excursions, glued boundary complexes with
an explicit chain metric, gauge-Hausdorff estimators, and a Monte Carlo
verification harness.
"""

from .bessel import (
    GridPath,
    half_time_densities,
    last_passage_time,
    occupation_time_below,
    sample_bessel_bridge,
    sample_bessel_process,
)
from .contour import ContourSequence, direct_distance, interval_min_label
from .disk import (
    DiskComplex,
    boundary_ball_volume_at_root,
    build_complex,
    metric_shortest_path,
    reroot_boundary,
    sample_disk_complex,
)
from .errors import DomainError, ParameterError, ResourceLimitError
from .gauge import Gauge, gauge_value
from .graph import MetricApprox
from .halfplane import (
    HalfPlaneComplex,
    build_halfplane,
    low_label_entries,
    metric_infty,
    omega_eta,
    truncated_metric,
)
from .hausdorff import (
    CoveringEstimate,
    DensityRatioSeries,
    bad_event_indicator,
    covering_upper_estimates,
    density_ratio_series,
    dyadic_covering_value,
    kappa_estimate,
)
from .rng import RandomStream
from .snake import (
    SnakeExcursion,
    sample_excursion_lifetime,
    sample_poisson_forest,
    sample_snake_excursion,
    sample_snake_head,
    tree_distance,
)

__version__ = "0.1.0"

__all__ = [
    "GridPath",
    "RandomStream",
    "Gauge",
    "gauge_value",
    "SnakeExcursion",
    "ContourSequence",
    "DiskComplex",
    "HalfPlaneComplex",
    "MetricApprox",
    "CoveringEstimate",
    "DensityRatioSeries",
    "ParameterError",
    "DomainError",
    "ResourceLimitError",
    "sample_bessel_process",
    "sample_bessel_bridge",
    "occupation_time_below",
    "last_passage_time",
    "half_time_densities",
    "sample_excursion_lifetime",
    "sample_snake_head",
    "sample_snake_excursion",
    "tree_distance",
    "sample_poisson_forest",
    "build_complex",
    "sample_disk_complex",
    "metric_shortest_path",
    "boundary_ball_volume_at_root",
    "reroot_boundary",
    "interval_min_label",
    "direct_distance",
    "build_halfplane",
    "metric_infty",
    "truncated_metric",
    "omega_eta",
    "low_label_entries",
    "dyadic_covering_value",
    "covering_upper_estimates",
    "density_ratio_series",
    "bad_event_indicator",
    "kappa_estimate",
]
