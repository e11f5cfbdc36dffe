"""Counter-based uniform streams.

Every stream is a Philox bit generator keyed by ``(seed, stream_id)``.  Two
streams with the same key produce the same sequence; streams with different
``stream_id`` are independent.  Because the generator state is a pure counter,
a replication's draws depend only on its key, never on the order in which
replications are scheduled.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_stream_id(*coords) -> int:
    """Stable 64-bit id from arbitrary hashable coordinates.

    Uses blake2b on the ``repr`` of the coordinates so the value does not
    depend on ``PYTHONHASHSEED``.
    """
    digest = hashlib.blake2b(repr(coords).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class UniformStream:
    """Reproducible stream of uniform (and derived) variates.

    Single-owner: drawing advances the internal counter.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = self.seed | (self.stream_id << 64)
        self._bitgen = np.random.Philox(key=key)
        self.generator = np.random.Generator(self._bitgen)

    def __repr__(self):
        return f"UniformStream(seed={self.seed}, stream_id={self.stream_id}, position={self.position})"

    @property
    def position(self) -> int:
        """Number of 64-bit words consumed so far."""
        state = self._bitgen.state["state"]
        counter = 0
        for i, word in enumerate(state["counter"]):
            counter |= int(word) << (64 * i)
        return counter * 4 + int(self._bitgen.state["buffer_pos"]) - 4

    def spawn(self, stream_id: int) -> "UniformStream":
        """A fresh stream sharing this seed."""
        return UniformStream(self.seed, stream_id)

    def uniform(self, size=None):
        """Uniform draws on the open interval (0, 1)."""
        # random() returns multiples of 2**-53 on [0, 1); shift to the cell midpoint
        return self.generator.random(size) + 2.0**-54

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def chisquare(self, df, size=None):
        return self.generator.chisquare(df, size)

    def gamma(self, shape, size=None):
        return self.generator.standard_gamma(shape, size)
