"""Experiment records, run configuration and tabular output.

Result rows are deterministic functions of (experiment, parameters, seed);
wall time and other non-reproducible facts live only in the sidecar metadata
file, never in the CSV rows.
"""

from __future__ import annotations

import configparser
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ParameterError

CSV_COLUMNS = ["experiment", "statistic", "params", "seed", "estimate", "stderr", "metadata"]

DEFAULTS: dict[str, dict] = {
    "run": {
        "seed": 20240810,
        "replicas": 0,  # 0 = keep each experiment's own default
        "threads": 1,
        "out": "results",
    },
    "verify-bessel-bound": {
        "n_min": 2,
        "n_max": 6,
        "gamma": 0.35,
        "replicas": 20000,
        "resolution": 40,
        "lead": 768,
        "clamp": 0.3,
        "batch": 2000,
    },
    "verify-ball-volume": {
        "n_list": "2,3,4",
        "gamma": 0.8,
        "replicas": 20000,
        "resolution": 30,
        "lead": 256,
        "clamp": 0.3,
        "mid_step": 1e-3,
        "batch": 1000,
    },
    "modulus": {
        "n_min": 3,
        "n_max": 7,
        "tail_replicas": 10000,
        "sup_replicas": 60,
        "level_min": 2,
        "level_max": 6,
        "eps_forest": 0.05,
        "bridge_step": 2.0**-9,
        "tree_step": 1e-3,
        "tree_cap": 500,
        "reroot_u": 0.37,
        "batch": 2000,
    },
    "reroot-test": {
        "replicas": 1000,
        "u_list": "0.25,0.5",
        "delta": 0.3,
        "radius": 1.5,
        "eps_forest": 0.05,
        "bridge_step": 2e-3,
        "tree_step": 2e-3,
        "base_replicas": 400,
        "p_fail": 1e-3,
        "p_pass": 0.01,
    },
    "estimate-kappa": {
        "replicas": 12,
        "eps_forest": 0.02,
        "bridge_step": 2.0**-13,
        "tree_step": 1e-3,
        "piece_exp": 10,
        "eps_list": "0.25,0.125,0.0625",
        "stability_factor": 4.0,
    },
    "build-disk": {
        "epsilon": 0.05,
        "bridge_step": 1e-3,
        "contour_step": 1e-3,
        "tree_step": 1e-3,
    },
}


@dataclass(frozen=True)
class ExperimentRecord:
    """One result row: reproducible from (experiment, params, seed)."""

    experiment: str
    statistic: str
    params: dict
    seed: int
    estimate: float
    stderr: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.stderr < 0:
            raise ParameterError("standard error must be nonnegative")

    def to_csv_row(self) -> list[str]:
        return [
            self.experiment,
            self.statistic,
            json.dumps(self.params, sort_keys=True),
            str(self.seed),
            repr(float(self.estimate)),
            repr(float(self.stderr)),
            json.dumps(self.metadata, sort_keys=True),
        ]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one built-in verification check of a command."""

    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


class RunConfig:
    """Validated configuration: flat INI sections of ``key = value`` pairs.

    Unknown sections or keys are rejected; values are coerced to the type of
    the documented default.  The effective configuration (defaults, file
    values, command-line overrides merged) is echoed into output headers.
    """

    def __init__(self, values: dict[str, dict] | None = None):
        self._values = {s: dict(d) for s, d in DEFAULTS.items()}
        for section, pairs in (values or {}).items():
            self._apply_section(section, pairs)

    def _apply_section(self, section: str, pairs: dict) -> None:
        if section not in DEFAULTS:
            raise ParameterError(f"unknown config section [{section}]")
        for key, raw in pairs.items():
            if key not in DEFAULTS[section]:
                raise ParameterError(f"unknown config key {key!r} in [{section}]")
            default = DEFAULTS[section][key]
            try:
                if isinstance(default, bool):
                    value = str(raw).lower() in ("1", "true", "yes")
                elif isinstance(default, int):
                    value = int(raw)
                elif isinstance(default, float):
                    value = float(raw)
                else:
                    value = str(raw)
            except ValueError as exc:
                raise ParameterError(
                    f"bad value for {key!r} in [{section}]: {raw!r}"
                ) from exc
            self._values[section][key] = value

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise OSError(f"config file not found: {path}")
        return cls({s: dict(parser[s]) for s in parser.sections()})

    def override(self, section: str, **pairs) -> None:
        self._apply_section(section, {k: v for k, v in pairs.items() if v is not None})

    def section(self, name: str) -> dict:
        if name not in self._values:
            raise ParameterError(f"unknown config section [{name}]")
        merged = dict(self._values[name])
        if name != "run" and "replicas" in merged and self._values["run"]["replicas"]:
            merged["replicas"] = self._values["run"]["replicas"]
        return merged

    @property
    def seed(self) -> int:
        return int(self._values["run"]["seed"])

    @property
    def threads(self) -> int:
        return max(1, int(self._values["run"]["threads"]))

    @property
    def out_dir(self) -> Path:
        return Path(self._values["run"]["out"])

    def echo_lines(self) -> list[str]:
        lines = []
        for section in sorted(self._values):
            for key in sorted(self._values[section]):
                lines.append(f"{section}.{key} = {self._values[section][key]}")
        return lines


def _csv_escape(cell: str) -> str:
    if any(ch in cell for ch in ",\"\n"):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def write_records(
    out_dir: Path,
    experiment: str,
    records: list[ExperimentRecord],
    checks: list[CheckResult],
    config: RunConfig,
    wall_time: float,
) -> Path:
    """Write the CSV table plus a sidecar metadata JSON; returns the CSV path.

    The CSV is byte-identical across reruns with the same config and seed;
    wall time lives only in the sidecar.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{experiment}.csv"
    lines = [f"# {line}" for line in config.echo_lines()]
    lines.append(",".join(CSV_COLUMNS))
    for rec in records:
        lines.append(",".join(_csv_escape(c) for c in rec.to_csv_row()))
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    meta = {
        "experiment": experiment,
        "config": config.echo_lines(),
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks
        ],
        "wall_time_seconds": wall_time,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    (out_dir / f"{experiment}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8"
    )
    return csv_path
