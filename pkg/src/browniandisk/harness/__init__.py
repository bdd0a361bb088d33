"""Reproducible Monte Carlo experiment harness and CLI."""

from .records import CheckResult, ExperimentRecord, RunConfig, write_records

__all__ = ["CheckResult", "ExperimentRecord", "RunConfig", "write_records"]
