"""GF(2) vectors, matrices and coordinate permutations.

Vectors are packed into a single Python ``int`` (bit ``i`` of the integer is
coordinate ``i``), which plays the role of a multi-word bitset: XOR, AND and
popcount all run word-parallel in C.  Bits at positions ``>= n`` are always
zero; every constructor enforces this.

Byte encoding is little-endian bit-in-byte: coordinate ``i`` lives in byte
``i // 8`` at bit position ``i % 8``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .rng import Rng


class DimensionError(ValueError):
    pass


def _nbytes(n: int) -> int:
    return (n + 7) >> 3


@dataclass(frozen=True)
class BitVector:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "BitVector":
        values = list(values)
        bits = 0
        for i, b in enumerate(values):
            if b not in (0, 1):
                raise ValueError("entries must be 0 or 1")
            bits |= b << i
        return cls(len(values), bits)

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "BitVector":
        """Strict decode: wrong length or nonzero pad bits raise ``ValueError``."""
        if len(data) != _nbytes(n):
            raise ValueError(f"expected {_nbytes(n)} bytes for {n} bits, got {len(data)}")
        return cls(n, int.from_bytes(data, "little"))

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes(_nbytes(self.n), "little")

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.n)]

    def weight(self) -> int:
        return self.bits.bit_count()

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.n

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise DimensionError(f"length mismatch {self.n} != {other.n}")
        return BitVector(self.n, self.bits ^ other.bits)

    def __repr__(self) -> str:
        return f"BitVector({''.join(map(str, self.to_list()))})"


def hamming_weight(v: BitVector) -> int:
    return v.bits.bit_count()


@dataclass(frozen=True)
class BitMatrix:
    """Row-major matrix; ``rows[i]`` is row ``i`` packed like a BitVector."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError("row has bits beyond ncols")

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        vecs = [BitVector.from_list(r) for r in rows]
        ncols = vecs[0].n if vecs else 0
        if any(v.n != ncols for v in vecs):
            raise DimensionError("ragged rows")
        return cls(len(vecs), ncols, tuple(v.bits for v in vecs))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_bytes(cls, data: bytes, nrows: int, ncols: int) -> "BitMatrix":
        rb = _nbytes(ncols)
        if len(data) != rb * nrows:
            raise ValueError("matrix byte length mismatch")
        rows = tuple(
            BitVector.from_bytes(data[i * rb:(i + 1) * rb], ncols).bits
            for i in range(nrows)
        )
        return cls(nrows, ncols, rows)

    def to_bytes(self) -> bytes:
        rb = _nbytes(self.ncols)
        return b"".join(r.to_bytes(rb, "little") for r in self.rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def to_lists(self) -> list[list[int]]:
        return [self.row(i).to_list() for i in range(self.nrows)]

    def rank(self) -> int:
        return gf2_rank(self.rows, self.ncols)


def gf2_rank(rows: Sequence[int], ncols: int) -> int:
    """Rank by Gaussian elimination on packed rows."""
    work = list(rows)
    rank = 0
    for col in range(ncols):
        bit = 1 << col
        pivot = next((j for j in range(rank, len(work)) if work[j] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        p = work[rank]
        for j in range(len(work)):
            if j != rank and work[j] & bit:
                work[j] ^= p
        rank += 1
        if rank == len(work):
            break
    return rank


def syndrome(H: BitMatrix, e: BitVector) -> BitVector:
    """``s = e H^T``: bit ``i`` of ``s`` is the parity of ``row_i(H) & e``."""
    if e.n != H.ncols:
        raise DimensionError(f"vector length {e.n} != matrix columns {H.ncols}")
    x = e.bits
    s = 0
    for i, r in enumerate(H.rows):
        s |= ((r & x).bit_count() & 1) << i
    return BitVector(H.nrows, s)


def solve(H: BitMatrix, s: BitVector) -> BitVector | None:
    """Some ``t`` with ``t H^T = s`` (free variables zero), or ``None``."""
    if s.n != H.nrows:
        raise DimensionError("syndrome length mismatch")
    # augment each row with its right-hand-side bit at position ncols
    aug = [r | (((s.bits >> i) & 1) << H.ncols) for i, r in enumerate(H.rows)]
    pivots = []
    rank = 0
    for col in range(H.ncols):
        bit = 1 << col
        pivot = next((j for j in range(rank, len(aug)) if aug[j] & bit), None)
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        p = aug[rank]
        for j in range(len(aug)):
            if j != rank and aug[j] & bit:
                aug[j] ^= p
        pivots.append(col)
        rank += 1
    rhs = 1 << H.ncols
    if any(aug[j] == rhs for j in range(rank, len(aug))):
        return None
    t = 0
    for j, col in enumerate(pivots):
        if aug[j] & rhs:
            t |= 1 << col
    return BitVector(H.ncols, t)


def sample_full_rank_matrix(rng: Rng, rows: int, cols: int) -> BitMatrix:
    """Uniform over full-rank ``rows x cols`` matrices (rejection sampling)."""
    if not 0 < rows <= cols:
        raise ValueError("need 0 < rows <= cols")
    while True:
        m = tuple(rng.randbits(cols) for _ in range(rows))
        if gf2_rank(m, cols) == rows:
            return BitMatrix(rows, cols, m)


def sample_weight_w_vector(rng: Rng, n: int, w: int) -> BitVector:
    if not 0 <= w <= n:
        raise ValueError("need 0 <= w <= n")
    bits = 0
    for i in rng.sample(n, w):
        bits |= 1 << i
    return BitVector(n, bits)


def sample_vector(rng: Rng, n: int) -> BitVector:
    return BitVector(n, rng.randbits(n))


@dataclass(frozen=True)
class CoordPermutation:
    """Permutation of ``range(n)``; applying it sends input bit i to output ``map[i]``."""

    map: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.map) != list(range(len(self.map))):
            raise ValueError("not a permutation")

    @property
    def n(self) -> int:
        return len(self.map)

    @classmethod
    def identity(cls, n: int) -> "CoordPermutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, rng: Rng, n: int) -> "CoordPermutation":
        return cls(tuple(rng.permutation(n)))

    def __call__(self, v: BitVector) -> BitVector:
        return permute(self, v)


def permute(sigma: CoordPermutation, v: BitVector) -> BitVector:
    if sigma.n != v.n:
        raise DimensionError(f"permutation size {sigma.n} != vector length {v.n}")
    x = v.bits
    out = 0
    for i, t in enumerate(sigma.map):
        if (x >> i) & 1:
            out |= 1 << t
    return BitVector(v.n, out)


def invert_permutation(sigma: CoordPermutation) -> CoordPermutation:
    inv = [0] * sigma.n
    for i, t in enumerate(sigma.map):
        inv[t] = i
    return CoordPermutation(tuple(inv))


def compose(a: CoordPermutation, b: CoordPermutation) -> CoordPermutation:
    """``a`` after ``b``."""
    if a.n != b.n:
        raise DimensionError("size mismatch")
    return CoordPermutation(tuple(a.map[b.map[i]] for i in range(a.n)))
