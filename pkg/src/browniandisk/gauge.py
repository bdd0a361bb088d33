"""The gauge function ``h(s) = s^2 log log(1/s)`` used for boundary measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

DEFAULT_CLAMP = math.exp(-2.0)

# h is nondecreasing on [0, s*] where s* solves 2*loglog(1/s)*log(1/s) = 1;
# numerically s* ~ 0.2408.  Clamp points above s* keep h positive but not
# monotone near the top of the domain.
MONOTONE_LIMIT = 0.2408


@dataclass(frozen=True)
class Gauge:
    """Evaluator for ``h(s) = s^2 log log(1/s)`` on ``[0, clamp_point]``.

    ``clamp_point`` must lie in ``(0, 1/e)`` so that ``h > 0`` on the open
    domain.  Calls outside ``[0, clamp_point]`` raise :class:`DomainError`
    rather than silently extending the formula.
    """

    clamp_point: float = DEFAULT_CLAMP

    def __post_init__(self):
        if not 0.0 < self.clamp_point < math.exp(-1.0):
            raise ParameterError(
                f"clamp_point must lie in (0, e^-1), got {self.clamp_point}"
            )

    def __call__(self, s):
        arr = np.asarray(s, dtype=np.float64)
        if np.any(arr < 0.0) or np.any(arr > self.clamp_point):
            raise DomainError(
                f"gauge argument outside [0, {self.clamp_point}]: {s!r}"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(arr > 0.0, arr**2 * np.log(np.log(1.0 / np.where(arr > 0.0, arr, 0.5))), 0.0)
        if np.isscalar(s) or arr.ndim == 0:
            return float(out)
        return out

    def doubling_ratio(self, r):
        """``h(2r)/h(r)``, defined for ``0 < r <= clamp_point/2``; tends to 4."""
        arr = np.asarray(r, dtype=np.float64)
        if np.any(arr <= 0.0) or np.any(2.0 * arr > self.clamp_point):
            raise DomainError("doubling ratio needs 0 < r <= clamp_point/2")
        out = self(2.0 * arr) / self(arr)
        if np.isscalar(r) or arr.ndim == 0:
            return float(out)
        return out


def gauge_value(s, clamp_point: float = DEFAULT_CLAMP):
    """Evaluate the gauge with a throwaway :class:`Gauge` instance."""
    return Gauge(clamp_point)(s)
