"""Stern's identification scheme over syndrome decoding.

Public key ``(H, s)`` with ``H`` a full-rank ``(n-k) x n`` parity-check matrix,
secret key ``e`` of weight ``w`` with ``e H^T = s``.  One round commits to
three slots::

    z1 = (sigma, s')      s' = y H^T
    z2 = sigma(y)
    z3 = sigma(y ^ e)

Challenge ``c`` opens the two slots other than ``c``.

Slot encoding (the fixed-width space ``R``): one tag byte equal to the slot
number, the body, then zero bytes up to ``slot_len``.  The slot-1 body is the
permutation as ``n`` little-endian u16 entries followed by the packed ``s'``;
slot-2/3 bodies are packed ``n``-bit vectors.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass

from . import gf2
from .commit import CommitmentScheme, HashCommitment
from .gf2 import BitMatrix, BitVector, CoordPermutation
from .idscheme import CommitAndOpenScheme, Commitments, Opened
from .rng import Rng

CHALLENGES = (1, 2, 3)
DUMMY_TAG = 0xFF


class SlotFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SternParams:
    n: int
    k: int
    w: int

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError("need 0 < k < n")
        if not 0 <= self.w <= self.n:
            raise ValueError("need 0 <= w <= n")
        if self.n > 0xFFFF:
            raise ValueError("n must fit in 16 bits")

    @property
    def r_syn(self) -> int:
        """Syndrome length ``n - k``."""
        return self.n - self.k

    def body_len(self, slot: int) -> int:
        if slot == 1:
            return 2 * self.n + (self.r_syn + 7) // 8
        if slot in (2, 3):
            return (self.n + 7) // 8
        raise SlotFormatError(f"no slot {slot}")

    @property
    def slot_len(self) -> int:
        return 1 + max(self.body_len(1), self.body_len(2))


@dataclass(frozen=True)
class SternPublicKey:
    H: BitMatrix
    s: BitVector


@dataclass(frozen=True)
class SternSecretKey:
    e: BitVector


@dataclass(frozen=True)
class SternResponse:
    sigma: CoordPermutation
    s_prime: BitVector
    z2: BitVector
    z3: BitVector

    def encode_slots(self, params: SternParams) -> tuple[bytes, bytes, bytes]:
        return (
            encode_slot1(params, self.sigma, self.s_prime),
            encode_vec_slot(params, 2, self.z2),
            encode_vec_slot(params, 3, self.z3),
        )

    @classmethod
    def from_slots(cls, params: SternParams, slots) -> "SternResponse":
        if len(slots) != 3:
            raise SlotFormatError("need three slots")
        sigma, sp = decode_slot1(params, slots[0])
        return cls(sigma, sp, decode_vec_slot(params, 2, slots[1]),
                   decode_vec_slot(params, 3, slots[2]))


# -- slot codec ------------------------------------------------------------

def _frame(params: SternParams, tag: int, body: bytes) -> bytes:
    return bytes([tag]) + body + bytes(params.slot_len - 1 - len(body))


def _unframe(params: SternParams, tag: int, data: bytes) -> bytes:
    if len(data) != params.slot_len:
        raise SlotFormatError(f"slot must be {params.slot_len} bytes, got {len(data)}")
    if data[0] != tag:
        raise SlotFormatError(f"expected slot tag {tag}, got {data[0]}")
    blen = params.body_len(tag)
    if any(data[1 + blen:]):
        raise SlotFormatError("nonzero slot padding")
    return data[1:1 + blen]


def encode_slot1(params: SternParams, sigma: CoordPermutation, s_prime: BitVector) -> bytes:
    if sigma.n != params.n or s_prime.n != params.r_syn:
        raise gf2.DimensionError("slot 1 dimension mismatch")
    body = struct.pack(f"<{params.n}H", *sigma.map) + s_prime.to_bytes()
    return _frame(params, 1, body)


def decode_slot1(params: SternParams, data: bytes) -> tuple[CoordPermutation, BitVector]:
    body = _unframe(params, 1, data)
    n = params.n
    entries = struct.unpack(f"<{n}H", body[:2 * n])
    try:
        sigma = CoordPermutation(entries)
        sp = BitVector.from_bytes(body[2 * n:], params.r_syn)
    except ValueError as exc:
        raise SlotFormatError(str(exc)) from None
    return sigma, sp


def encode_vec_slot(params: SternParams, tag: int, v: BitVector) -> bytes:
    if v.n != params.n:
        raise gf2.DimensionError("vector slot length mismatch")
    return _frame(params, tag, v.to_bytes())


def decode_vec_slot(params: SternParams, tag: int, data: bytes) -> BitVector:
    body = _unframe(params, tag, data)
    try:
        return BitVector.from_bytes(body, params.n)
    except ValueError as exc:
        raise SlotFormatError(str(exc)) from None


# -- per-challenge relations -----------------------------------------------

def check_c1(params: SternParams, z2: BitVector, z3: BitVector) -> bool:
    return (z2 ^ z3).weight() == params.w


def check_c2(pk: SternPublicKey, sigma: CoordPermutation, s_prime: BitVector, z3: BitVector) -> bool:
    lhs = gf2.syndrome(pk.H, gf2.permute(gf2.invert_permutation(sigma), z3))
    return lhs == pk.s ^ s_prime


def check_c3(pk: SternPublicKey, sigma: CoordPermutation, s_prime: BitVector, z2: BitVector) -> bool:
    return gf2.syndrome(pk.H, gf2.permute(gf2.invert_permutation(sigma), z2)) == s_prime


# -- the scheme ------------------------------------------------------------

class Stern(CommitAndOpenScheme):
    n_slots = 3
    challenges = CHALLENGES

    def __init__(self, params: SternParams, commitment: CommitmentScheme | None = None,
                 commit_len: int = 32):
        self.params = params
        if commitment is None:
            commitment = HashCommitment(params.slot_len, commit_len)
        if commitment.input_len < params.slot_len:
            raise ValueError("commitment input narrower than a slot")
        self.commitment = commitment

    def slot_len(self) -> int:
        return self.params.slot_len

    def opened_slots(self, c: int) -> tuple[int, ...]:
        self.check_challenge(c)
        return tuple(j for j in (1, 2, 3) if j != c)

    # key generation
    def keygen(self, rng: Rng) -> tuple[SternPublicKey, SternSecretKey]:
        p = self.params
        H = gf2.sample_full_rank_matrix(rng, p.r_syn, p.n)
        e = gf2.sample_weight_w_vector(rng, p.n, p.w)
        return SternPublicKey(H, gf2.syndrome(H, e)), SternSecretKey(e)

    def check_keypair(self, pk: SternPublicKey, sk: SternSecretKey | None = None) -> bool:
        p = self.params
        if pk.H.nrows != p.r_syn or pk.H.ncols != p.n or pk.s.n != p.r_syn:
            return False
        if pk.H.rank() != p.r_syn:
            return False
        if sk is None:
            return True
        return sk.e.n == p.n and sk.e.weight() == p.w and gf2.syndrome(pk.H, sk.e) == pk.s

    # prover
    def respond(self, pk: SternPublicKey, e: BitVector, sigma: CoordPermutation,
                y: BitVector) -> SternResponse:
        """Deterministic prover core for explicit coins ``(sigma, y)``."""
        z2 = gf2.permute(sigma, y)
        return SternResponse(sigma, gf2.syndrome(pk.H, y), z2, z2 ^ gf2.permute(sigma, e))

    def prover_first(self, pk: SternPublicKey, sk: SternSecretKey, rng: Rng,
                     rep: int = 0) -> tuple[SternResponse, Commitments]:
        sigma = CoordPermutation.random(rng, self.params.n)
        y = gf2.sample_vector(rng, self.params.n)
        z = self.respond(pk, sk.e, sigma, y)
        return z, self.commit_slots(z.encode_slots(self.params), rep)

    def prover_slots(self, pk, sk, rng):
        sigma = CoordPermutation.random(rng, self.params.n)
        y = gf2.sample_vector(rng, self.params.n)
        return self.respond(pk, sk.e, sigma, y).encode_slots(self.params)

    def prover_second(self, z: SternResponse, c: int) -> Opened:
        return self.open(z.encode_slots(self.params), c)

    # verifier
    def relation(self, pk: SternPublicKey, c: int, opened: Opened) -> bool:
        p = self.params
        try:
            if c == 1:
                z2 = decode_vec_slot(p, 2, opened[0])
                z3 = decode_vec_slot(p, 3, opened[1])
                return check_c1(p, z2, z3)
            if c == 2:
                sigma, sp = decode_slot1(p, opened[0])
                return check_c2(pk, sigma, sp, decode_vec_slot(p, 3, opened[1]))
            if c == 3:
                sigma, sp = decode_slot1(p, opened[0])
                return check_c3(pk, sigma, sp, decode_vec_slot(p, 2, opened[1]))
        except (SlotFormatError, IndexError, TypeError, gf2.DimensionError):
            return False
        return False

    def verify(self, pk: SternPublicKey, c: int, opened: Opened, x: Commitments,
               rep: int = 0) -> bool:
        return self.verify_opened(pk, c, opened, x, rep)

    # simulator
    def simulate_opened(self, pk: SternPublicKey, c: int, coins) -> Opened:
        """Opened values for challenge ``c`` from explicit simulator coins.

        ``c=1``: coins ``(u, t)``, ``u`` uniform, ``t`` weight ``w``.
        ``c=2``: coins ``(sigma, t)``, ``t`` uniform.
        ``c=3``: coins ``(sigma, y)``, ``y`` uniform.
        """
        p = self.params
        a, b = coins
        if c == 1:
            return encode_vec_slot(p, 2, a), encode_vec_slot(p, 3, a ^ b)
        if c == 2:
            sp = gf2.syndrome(pk.H, b) ^ pk.s
            return encode_slot1(p, a, sp), encode_vec_slot(p, 3, gf2.permute(a, b))
        if c == 3:
            return (encode_slot1(p, a, gf2.syndrome(pk.H, b)),
                    encode_vec_slot(p, 2, gf2.permute(a, b)))
        raise ValueError(f"invalid challenge {c!r}")

    def sample_simulator_coins(self, c: int, rng: Rng):
        n = self.params.n
        if c == 1:
            return gf2.sample_vector(rng, n), gf2.sample_weight_w_vector(rng, n, self.params.w)
        return CoordPermutation.random(rng, n), gf2.sample_vector(rng, n)

    def simulate(self, pk: SternPublicKey, c: int, rng: Rng, rep: int = 0) -> tuple[Commitments, Opened]:
        self.check_challenge(c)
        opened = self.simulate_opened(pk, c, self.sample_simulator_coins(c, rng))
        dummy = bytes([DUMMY_TAG]) + bytes(self.params.slot_len - 1)
        x = [b""] * 3
        for j, z in zip(self.opened_slots(c), opened):
            x[j - 1] = self.commitment.commit(z, rep, j)
        x[c - 1] = self.commitment.commit(dummy, rep, c)
        return tuple(x), opened

    # extractor
    def extract(self, z) -> BitVector:
        """``sigma^-1(z2 ^ z3)``; accepts a :class:`SternResponse` or three slot encodings."""
        if not isinstance(z, SternResponse):
            z = SternResponse.from_slots(self.params, z)
        return gf2.permute(gf2.invert_permutation(z.sigma), z.z2 ^ z.z3)

    def is_witness(self, pk: SternPublicKey, e: BitVector) -> bool:
        return e.n == self.params.n and e.weight() == self.params.w and gf2.syndrome(pk.H, e) == pk.s


def all_permutations(n: int):
    for p in itertools.permutations(range(n)):
        yield CoordPermutation(p)


def all_vectors(n: int):
    for v in range(1 << n):
        yield BitVector(n, v)


def all_weight_w(n: int, w: int):
    for pos in itertools.combinations(range(n), w):
        yield BitVector(n, sum(1 << i for i in pos))


def simulator_coin_space(params: SternParams, c: int):
    """Every coin tuple of the simulator for challenge ``c``, each equally likely."""
    if c == 1:
        return itertools.product(all_vectors(params.n), list(all_weight_w(params.n, params.w)))
    return itertools.product(all_permutations(params.n), list(all_vectors(params.n)))
