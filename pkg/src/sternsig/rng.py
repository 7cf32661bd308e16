"""Randomness sources.

Every sampler in the package takes an explicit ``rng`` argument implementing
:class:`Rng`.  Two concrete sources exist: :class:`SystemRng` (OS entropy,
the default for real keys) and :class:`SeededRng`, a SHAKE256 counter-mode
stream used for reproducible runs and golden files.

The sampling algorithms (rejection for ``randbelow``, Fisher-Yates for
permutations) live here rather than in :mod:`random` so that seeded output is
stable across Python versions.
"""

from __future__ import annotations

import hashlib
import os


class Rng:
    """Base class: subclasses only supply :meth:`randbytes`."""

    def randbytes(self, n: int) -> bytes:
        raise NotImplementedError

    def randbits(self, k: int) -> int:
        if k <= 0:
            return 0
        v = int.from_bytes(self.randbytes((k + 7) >> 3), "little")
        return v & ((1 << k) - 1)

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            v = self.randbits(k)
            if v < n:
                return v

    def permutation(self, n: int) -> list[int]:
        """Uniform permutation of ``range(n)`` (Fisher-Yates)."""
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    def sample(self, n: int, k: int) -> list[int]:
        """``k`` distinct values from ``range(n)``, uniform (partial Fisher-Yates)."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        p = list(range(n))
        for i in range(k):
            j = i + self.randbelow(n - i)
            p[i], p[j] = p[j], p[i]
        return p[:k]


class SystemRng(Rng):
    def randbytes(self, n: int) -> bytes:
        return os.urandom(n)


class SeededRng(Rng):
    """Deterministic byte stream: SHAKE256(seed || counter) blocks."""

    _BLOCK = 1088

    def __init__(self, seed: bytes | int | str):
        if isinstance(seed, int):
            seed = seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "little")
        elif isinstance(seed, str):
            seed = seed.encode()
        self._seed = bytes(seed)
        self._ctr = 0
        self._buf = b""
        self._pos = 0

    def randbytes(self, n: int) -> bytes:
        out = bytearray()
        while n > 0:
            if self._pos >= len(self._buf):
                self._buf = hashlib.shake_256(
                    self._seed + self._ctr.to_bytes(8, "little")
                ).digest(self._BLOCK)
                self._ctr += 1
                self._pos = 0
            take = min(n, len(self._buf) - self._pos)
            out += self._buf[self._pos:self._pos + take]
            self._pos += take
            n -= take
        return bytes(out)

    def fork(self, label: bytes | int) -> "SeededRng":
        """Independent child stream; used to split work per trial."""
        if isinstance(label, int):
            label = label.to_bytes(8, "little")
        return SeededRng(hashlib.sha3_256(b"fork" + self._seed + label).digest())


def default_rng(seed: bytes | None = None) -> Rng:
    return SystemRng() if seed is None else SeededRng(seed)
