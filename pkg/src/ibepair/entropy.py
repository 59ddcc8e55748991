"""Injectable randomness.

Every randomized operation in the package takes an entropy source: any object
with a ``read(n) -> bytes`` method. Three sources ship here:

* :class:`SystemEntropy` draws from the operating system (production use).
* :class:`SeededEntropy` simulates conditioned sensor readings from a seed, so
  runs are reproducible.
* :class:`FixedEntropy` replays a fixed byte string and fails when it runs out.
"""

from __future__ import annotations

import hashlib
import os
import random
import struct
from typing import Protocol

from .errors import EntropyExhausted


class EntropySource(Protocol):
    def read(self, n: int) -> bytes: ...


class SystemEntropy:
    def read(self, n: int) -> bytes:
        return os.urandom(n)


class SeededEntropy:
    """Deterministic stand-in for sensor-harvested entropy.

    A ``random.Random`` seeded from ``seed`` plays the role of raw gyroscope /
    accelerometer samples; each batch of samples is conditioned through
    SHA-256 together with a block counter before being handed out.
    """

    SAMPLES_PER_BLOCK = 6

    def __init__(self, seed: bytes | str | int, label: bytes | str = b""):
        if isinstance(seed, int):
            seed = seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "big")
        if isinstance(seed, str):
            seed = seed.encode()
        if isinstance(label, str):
            label = label.encode()
        self._key = hashlib.sha256(b"ibepair-entropy" + len(seed).to_bytes(4, "big") + seed + label).digest()
        self._sensor = random.Random(self._key)
        self._counter = 0
        self._buffer = b""

    def _block(self) -> bytes:
        readings = [self._sensor.gauss(0.0, 1.0) for _ in range(self.SAMPLES_PER_BLOCK)]
        raw = struct.pack(f">{self.SAMPLES_PER_BLOCK}d", *readings)
        self._counter += 1
        return hashlib.sha256(self._key + self._counter.to_bytes(8, "big") + raw).digest()

    def read(self, n: int) -> bytes:
        while len(self._buffer) < n:
            self._buffer += self._block()
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def fork(self, label: bytes | str) -> "SeededEntropy":
        """Derive an independent child stream (e.g. one per simulated device)."""
        if isinstance(label, str):
            label = label.encode()
        return SeededEntropy(self._key, label)


class FixedEntropy:
    """Replays ``data`` byte for byte; raises once exhausted."""

    def __init__(self, data: bytes):
        self._data = bytes(data)
        self._pos = 0

    def read(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise EntropyExhausted(
                f"requested {n} bytes, {len(self._data) - self._pos} remaining"
            )
        out = self._data[self._pos:self._pos + n]
        self._pos += n
        return out


def random_below(rng: EntropySource, n: int) -> int:
    """Uniform integer in [0, n) by rejection sampling."""
    if n <= 0:
        raise ValueError("upper bound must be positive")
    if n == 1:
        return 0
    k = (n - 1).bit_length()
    nbytes = (k + 7) // 8
    mask = (1 << k) - 1
    while True:
        v = int.from_bytes(rng.read(nbytes), "big") & mask
        if v < n:
            return v


def random_range(rng: EntropySource, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] inclusive."""
    return lo + random_below(rng, hi - lo + 1)


def shuffled(rng: EntropySource, items) -> list:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = random_below(rng, i + 1)
        out[i], out[j] = out[j], out[i]
    return out
