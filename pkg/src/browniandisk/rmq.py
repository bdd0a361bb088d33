"""Sparse-table range-minimum queries over a static array.

O(n log n) preprocessing, O(1) per query, vectorised over query arrays.
Wrapping (cyclic) queries split into at most two linear ranges.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError


class SparseTableRMQ:
    """Minimum over ``data[a..b]`` (inclusive) for a static float array."""

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 1 or data.size == 0:
            raise ParameterError("RMQ needs a non-empty 1-d array")
        n = data.size
        levels = int(n).bit_length()
        table = np.empty((levels, n))
        table[0] = data
        for k in range(1, levels):
            half = 1 << (k - 1)
            m = n - (1 << k) + 1
            table[k, :m] = np.minimum(table[k - 1, :m], table[k - 1, half : half + m])
        self._table = table
        self.size = n

    def range_min(self, a, b):
        """Vectorised min over inclusive index ranges ``[a, b]`` with ``a <= b``."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if np.any(a < 0) or np.any(b >= self.size) or np.any(a > b):
            raise ParameterError("invalid range-minimum query bounds")
        length = (b - a + 1).astype(np.float64)
        # frexp gives the exact binary exponent, avoiding log2 rounding
        k = np.frexp(length)[1].astype(np.int64) - 1
        left = self._table[k, a]
        right = self._table[k, b - (1 << k) + 1]
        return np.minimum(left, right)

    def wrap_min(self, a, b):
        """Min over the forward cyclic range from ``a`` to ``b`` inclusive.

        For ``a <= b`` this is ``min(data[a..b])``; for ``a > b`` it wraps:
        ``min(data[a..n-1], data[0..b])``.
        """
        scalar = np.isscalar(a) and np.isscalar(b)
        a = np.atleast_1d(np.asarray(a, dtype=np.int64))
        b = np.atleast_1d(np.asarray(b, dtype=np.int64))
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape)
        straight = a <= b
        if straight.any():
            out[straight] = self.range_min(a[straight], b[straight])
        wrapped = ~straight
        if wrapped.any():
            m = int(wrapped.sum())
            tail = self.range_min(a[wrapped], np.full(m, self.size - 1, dtype=np.int64))
            head = self.range_min(np.zeros(m, dtype=np.int64), b[wrapped])
            out[wrapped] = np.minimum(tail, head)
        if scalar:
            return float(out[0])
        return out
