"""Reproducible, splittable random streams.

Every sampler in this package draws from a :class:`RandomStream`.  A stream is
identified by ``(seed, stream_id)`` and is backed by the counter-based Philox
generator, so identical identifiers reproduce identical draws on every
platform, and distinct ``stream_id`` values give statistically independent
streams.  Replica-level parallelism hands one stream per replica; results are
then independent of scheduling order.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError


class RandomStream:
    """A seeded, named source of randomness.

    Parameters
    ----------
    seed : int
        Global 64-bit experiment seed.
    stream_id : int, optional
        Index of this stream within the experiment (replica number, usually).

    Notes
    -----
    The underlying generator is created lazily and consumed sequentially by
    whatever operation holds the stream, so a stream should be used by one
    logical task.  Use :meth:`split` to derive independent child streams.
    """

    __slots__ = ("seed", "stream_id", "_key", "_generator")

    def __init__(self, seed: int, stream_id: int = 0, _key: tuple[int, ...] = ()):
        if not (0 <= int(seed) < 2**64):
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._key = _key
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            ss = np.random.SeedSequence(
                entropy=self.seed, spawn_key=(self.stream_id, *self._key)
            )
            self._generator = np.random.Generator(np.random.Philox(ss))
        return self._generator

    def split(self, index: int) -> "RandomStream":
        """Derive the ``index``-th child stream, independent of this one."""
        return RandomStream(self.seed, self.stream_id, _key=(*self._key, int(index)))

    def standard_normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None) -> np.ndarray:
        return self.generator.uniform(low, high, size)

    def poisson(self, lam: float) -> int:
        return int(self.generator.poisson(lam))

    def __repr__(self) -> str:  # pragma: no cover
        tail = f", key={self._key}" if self._key else ""
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}{tail})"
