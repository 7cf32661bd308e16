"""Commitment functions ``G: R -> M`` and the objects used to instantiate them.

Three instantiations share the :class:`CommitmentScheme` surface:

* :class:`HashCommitment` -- XOF digest of a domain tag and the slot bytes.
* :class:`SrfCommitment` -- a small-range function ``h . g``.
* :class:`FeistelCommitment` -- a keyed 4-round Feistel permutation, which is
  invertible and therefore lets the extractor recover committed slots.

Inputs shorter than ``input_len`` are zero-padded (:func:`pad_response`)
before evaluation, so a scheme whose slots are narrower than a permutation
block can still commit through it.
"""

from __future__ import annotations

import hashlib
import statistics
import threading
from dataclasses import dataclass, field
from typing import Callable

from .rng import Rng, SeededRng

Xof = Callable[[bytes, int], bytes]
Prf = Callable[[bytes, bytes, int], bytes]


def shake256(data: bytes, outlen: int) -> bytes:
    return hashlib.shake_256(data).digest(outlen)


def shake256_prf(key: bytes, data: bytes, outlen: int) -> bytes:
    """Prefix-keyed SHAKE256; the key is length-framed so (key, data) parses uniquely."""
    return hashlib.shake_256(len(key).to_bytes(2, "little") + key + data).digest(outlen)


class CommitError(ValueError):
    pass


# -- padding ---------------------------------------------------------------

def pad_response(z: bytes, target_len: int) -> bytes:
    """``z || 0...0`` up to ``target_len`` bytes."""
    if target_len < len(z):
        raise CommitError(f"cannot pad {len(z)} bytes down to {target_len}")
    return z + bytes(target_len - len(z))


def strip_pad(padded: bytes, orig_len: int) -> bytes:
    """Inverse of :func:`pad_response`; rejects a nonzero suffix."""
    if orig_len > len(padded):
        raise CommitError("original length exceeds padded length")
    if any(padded[orig_len:]):
        raise CommitError("nonzero padding")
    return padded[:orig_len]


# -- the common surface ----------------------------------------------------

class CommitmentScheme:
    kind = "abstract"
    input_len: int
    output_len: int

    def evaluate(self, z: bytes) -> bytes:
        raise NotImplementedError

    def commit(self, z: bytes, rep: int = 0, slot: int = 0) -> bytes:
        """Commit slot ``slot`` of repetition ``rep``.

        Only the hash instantiation folds ``rep``/``slot`` into its input; the
        permutation and SRF instantiations are functions of ``z`` alone.
        """
        if len(z) != self.input_len:
            z = pad_response(z, self.input_len)
        return self.evaluate(z)

    @property
    def invertible(self) -> bool:
        return False


def hash_commit(tag: bytes, z: bytes, output_len: int, xof: Xof = shake256) -> bytes:
    return xof(tag + z, output_len)


HASH_SCHEME_ID = 0x01


def commit_tag(rep: int, slot: int, scheme_id: int = HASH_SCHEME_ID) -> bytes:
    """1 byte scheme id, 2 bytes repetition index (LE), 1 byte slot index."""
    return bytes([scheme_id]) + rep.to_bytes(2, "little") + bytes([slot])


class HashCommitment(CommitmentScheme):
    kind = "hash"

    def __init__(self, input_len: int, output_len: int, xof: Xof = shake256,
                 scheme_id: int = HASH_SCHEME_ID):
        if output_len <= 0:
            raise ValueError("output_len must be positive")
        self.input_len = input_len
        self.output_len = output_len
        self.xof = xof
        self.scheme_id = scheme_id

    def evaluate(self, z: bytes) -> bytes:
        return self.commit(z)

    def commit(self, z: bytes, rep: int = 0, slot: int = 0) -> bytes:
        if len(z) != self.input_len:
            z = pad_response(z, self.input_len)
        return hash_commit(commit_tag(rep, slot, self.scheme_id), z, self.output_len, self.xof)


# -- Feistel ---------------------------------------------------------------

RoundFn = Callable[[int, int], int]


class FeistelPermutation:
    """Four-round Feistel network on ``2m``-bit blocks.

    Blocks are integers ``L << m | R``.  Round ``i`` (1..4) maps
    ``(L, R) -> (R, L ^ f(i, R))``.  The round function is either supplied
    directly or derived from ``key`` through a keyed PRF with the round index
    in the prefix.
    """

    ROUNDS = 4
    _TABLE_MAX_M = 12

    def __init__(self, m: int, key: bytes = b"", round_fn: RoundFn | None = None,
                 prf: Prf = shake256_prf):
        if m <= 0:
            raise ValueError("half-width must be positive")
        self.m = m
        self.key = key
        self.prf = prf
        self._mask = (1 << m) - 1
        self._hb = (m + 7) >> 3
        self._round_fn = round_fn or self._prf_round
        self._tables = None
        if m <= self._TABLE_MAX_M:
            # small blocks: tabulate each round function once
            self._tables = [
                [self._round_fn(i, v) & self._mask for v in range(1 << m)]
                for i in range(1, self.ROUNDS + 1)
            ]

    def _prf_round(self, i: int, half: int) -> int:
        out = self.prf(self.key, bytes([i]) + half.to_bytes(self._hb, "big"), self._hb)
        return int.from_bytes(out, "big") & self._mask

    def _f(self, i: int, half: int) -> int:
        if self._tables is not None:
            return self._tables[i - 1][half]
        return self._round_fn(i, half) & self._mask

    @property
    def width(self) -> int:
        return 2 * self.m

    def _check(self, x: int):
        if x < 0 or x >> (2 * self.m):
            raise ValueError(f"block does not fit in {2 * self.m} bits")

    def forward(self, x: int) -> int:
        self._check(x)
        m, mask = self.m, self._mask
        left, right = x >> m, x & mask
        for i in range(1, self.ROUNDS + 1):
            left, right = right, left ^ self._f(i, right)
        return (left << m) | right

    def inverse(self, y: int) -> int:
        self._check(y)
        m, mask = self.m, self._mask
        left, right = y >> m, y & mask
        for i in range(self.ROUNDS, 0, -1):
            left, right = right ^ self._f(i, left), left
        return (left << m) | right

    def _block_bytes(self) -> int:
        if (2 * self.m) % 8:
            raise ValueError("byte interface needs 2m divisible by 8")
        return (2 * self.m) // 8

    def forward_bytes(self, x: bytes) -> bytes:
        nb = self._block_bytes()
        if len(x) != nb:
            raise ValueError(f"block must be {nb} bytes")
        return self.forward(int.from_bytes(x, "big")).to_bytes(nb, "big")

    def inverse_bytes(self, y: bytes) -> bytes:
        nb = self._block_bytes()
        if len(y) != nb:
            raise ValueError(f"block must be {nb} bytes")
        return self.inverse(int.from_bytes(y, "big")).to_bytes(nb, "big")


def feistel_forward(p: FeistelPermutation, x: int) -> int:
    return p.forward(x)


def feistel_inverse(p: FeistelPermutation, y: int) -> int:
    return p.inverse(y)


class FeistelCommitment(CommitmentScheme):
    """``G = Fe4(f_K)`` on ``block_len``-byte strings; ``input_len == output_len``."""

    kind = "feistel"

    def __init__(self, key: bytes, block_len: int, prf: Prf = shake256_prf):
        self.perm = FeistelPermutation(4 * block_len, key, prf=prf)
        self.input_len = self.output_len = block_len

    def evaluate(self, z: bytes) -> bytes:
        return self.perm.forward_bytes(z)

    def invert(self, x: bytes) -> bytes:
        return self.perm.inverse_bytes(x)

    @property
    def invertible(self) -> bool:
        return True


# -- small-range functions -------------------------------------------------

class SmallRangeFunction:
    """``h . g`` with ``g: X -> [r]`` and ``h: [r] -> Y`` injective.

    ``X`` is the set of ``domain_len``-byte strings, ``Y`` the set of
    ``range_len``-byte strings (``range_len`` defaults to ``domain_len``,
    giving a map ``X -> X``).  Both halves are derived from ``seed`` and
    materialised lazily.  ``h`` is drawn without replacement: a candidate
    value already issued to another index is rejected and redrawn.
    """

    def __init__(self, seed: bytes, domain_len: int, r: int, range_len: int | None = None):
        range_len = domain_len if range_len is None else range_len
        if r < 1:
            raise ValueError("range size must be positive")
        if r > 1 << (8 * range_len):
            raise ValueError("range size exceeds the codomain")
        self.seed = seed
        self.domain_len = domain_len
        self.range_len = range_len
        self.r = r
        self._g: dict[bytes, int] = {}
        self._h: dict[int, bytes] = {}
        self._issued: dict[bytes, int] = {}
        self._lock = threading.Lock()

    def g(self, x: bytes) -> int:
        if len(x) != self.domain_len:
            raise ValueError(f"input must be {self.domain_len} bytes")
        with self._lock:
            v = self._g.get(x)
            if v is None:
                v = SeededRng(b"srf-g" + self.seed + x).randbelow(self.r)
                self._g[x] = v
            return v

    def h(self, j: int) -> bytes:
        if not 0 <= j < self.r:
            raise ValueError("index out of range")
        with self._lock:
            v = self._h.get(j)
            if v is None:
                stream = SeededRng(b"srf-h" + self.seed + j.to_bytes(16, "little"))
                while True:
                    v = stream.randbytes(self.range_len)
                    if v not in self._issued:
                        break
                self._issued[v] = j
                self._h[j] = v
            return v

    def __call__(self, x: bytes) -> bytes:
        return self.h(self.g(x))

    def image_size(self) -> int:
        return len(self._issued)


def sample_srf(rng_seed: bytes, domain_len: int, r: int, range_len: int | None = None) -> SmallRangeFunction:
    return SmallRangeFunction(rng_seed, domain_len, r, range_len)


class SrfCommitment(CommitmentScheme):
    kind = "srf"

    def __init__(self, seed: bytes, input_len: int, output_len: int, r: int):
        self.srf = SmallRangeFunction(seed, input_len, r, output_len)
        self.input_len = input_len
        self.output_len = output_len

    def evaluate(self, z: bytes) -> bytes:
        return self.srf(z)


class LazyRandomPermutation:
    """Random permutation of ``domain_len``-byte strings, sampled on demand."""

    def __init__(self, rng: Rng, domain_len: int):
        self.rng = rng
        self.domain_len = domain_len
        self._fwd: dict[bytes, bytes] = {}
        self._used: set[bytes] = set()

    def __call__(self, x: bytes) -> bytes:
        v = self._fwd.get(x)
        if v is None:
            while True:
                v = self.rng.randbytes(self.domain_len)
                if v not in self._used:
                    break
            self._used.add(v)
            self._fwd[x] = v
        return v


# -- birthday experiment ---------------------------------------------------

@dataclass
class CollisionStats:
    r: int
    trials: int
    counts: list[int] = field(repr=False)
    median: float = 0.0
    collisions: int = 0

    def within(self, lo_factor: float = 0.5, hi_factor: float = 4.0) -> bool:
        root = self.r ** 0.5
        return lo_factor * root <= self.median <= hi_factor * root


def _queries_to_collision(f, rng: Rng, domain_len: int, max_queries: int | None) -> int | None:
    seen_in: set[bytes] = set()
    seen_out: set[bytes] = set()
    q = 0
    while max_queries is None or q < max_queries:
        x = rng.randbytes(domain_len)
        if x in seen_in:
            continue
        seen_in.add(x)
        q += 1
        y = f(x)
        if y in seen_out:
            return q
        seen_out.add(y)
    return None


def srf_collision_experiment(domain_len: int, r: int, trials: int, seed: bytes = b"srf") -> CollisionStats:
    """Median number of distinct random queries until an SRF output repeats."""
    if r < 4:
        raise ValueError("r must be at least 4")
    base = SeededRng(seed)
    counts = []
    for t in range(trials):
        trng = base.fork(t)
        f = SmallRangeFunction(trng.randbytes(32), domain_len, r)
        counts.append(_queries_to_collision(f, trng, domain_len, None))
    return CollisionStats(r, trials, counts, statistics.median(counts), trials)


def permutation_collision_control(domain_len: int, queries: int, trials: int,
                                  seed: bytes = b"perm") -> CollisionStats:
    """Same query loop against a lazily sampled random permutation."""
    base = SeededRng(seed)
    counts = []
    collisions = 0
    for t in range(trials):
        trng = base.fork(t)
        q = _queries_to_collision(LazyRandomPermutation(trng, domain_len), trng, domain_len, queries)
        if q is not None:
            collisions += 1
            counts.append(q)
    median = statistics.median(counts) if counts else float("inf")
    return CollisionStats(1 << (8 * domain_len), trials, counts, median, collisions)
