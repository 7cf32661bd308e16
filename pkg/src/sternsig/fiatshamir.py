"""Fiat-Shamir signatures from the r-fold parallel Stern scheme.

Challenges are recomputed from the commitments and the message, never
stored.  Wire formats (all integers little-endian)::

    params block   n:u16 k:u16 w:u16 r:u16 commit_len:u8            (9 bytes)
    signature      "STFS" version:u8=1 params
                   r*3 commitments of commit_len bytes, row-major
                   per repetition, both opened slots in ascending slot order:
                       tag:u8 length:u32 body
    public key     "STPK" params H(row-major packed) s(packed)
    secret key     "STSK" params e(packed)

An opened slot's body is its encoding with the leading tag and trailing zero
padding removed; the verifier re-frames it before recommitting.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

from .commit import CommitmentScheme, pad_response, shake256, strip_pad
from .gf2 import BitMatrix, BitVector
from .idscheme import ParallelTranscript, parallel_open, parallel_prove_first, parallel_verify
from .rng import Rng
from .stern import Stern, SternParams, SternPublicKey, SternSecretKey

SIG_MAGIC = b"STFS"
PK_MAGIC = b"STPK"
SK_MAGIC = b"STSK"
VERSION = 1

__all__ = [
    "FormatError", "SigParams", "Signature", "challenges_from_stream", "derive_challenges",
    "sign", "verify_signature", "keygen", "pad_response", "strip_pad",
    "encode_public_key", "decode_public_key", "encode_secret_key", "decode_secret_key",
]

MSG_TAG = b"sternsig/FS-msg/v1"
ID_TAG = b"sternsig/FS-id/v1"


class FormatError(ValueError):
    """Malformed key or signature bytes."""


# -- challenge derivation --------------------------------------------------

def challenges_from_stream(stream: Callable[[int], bytes], r: int) -> tuple[int, ...]:
    """Map 2-bit groups of an XOF stream to challenges.

    ``stream(L)`` returns the first ``L`` bytes.  Each byte is read from its
    least significant bits upward: values 0, 1, 2 become challenges 1, 2, 3,
    value 3 is skipped.
    """
    out: list[int] = []
    length = max(16, r // 2 + 16)
    pos = 0
    while True:
        buf = stream(length)
        for byte in buf[pos:]:
            for shift in (0, 2, 4, 6):
                v = (byte >> shift) & 3
                if v != 3:
                    out.append(v + 1)
                    if len(out) == r:
                        return tuple(out)
        pos = len(buf)
        length *= 2


def derive_challenges(x_bytes: bytes, m_bytes: bytes | None, r: int,
                      xof=shake256) -> tuple[int, ...]:
    """``c = H(x, m)`` as ``r`` challenges in ``{1, 2, 3}``.

    Hash input is ``tag || len(m):u64 || m || x``.  With ``m_bytes=None``
    the identification-only form ``H(x)`` is used, under its own tag.
    """
    if m_bytes is None:
        data = ID_TAG + x_bytes
    else:
        data = MSG_TAG + len(m_bytes).to_bytes(8, "little") + m_bytes + x_bytes
    return challenges_from_stream(lambda L: xof(data, L), r)


# -- parameters and keys ---------------------------------------------------

@dataclass(frozen=True)
class SigParams:
    n: int
    k: int
    w: int
    r: int
    commit_len: int

    _FMT = "<HHHHB"
    SIZE = struct.calcsize(_FMT)

    @property
    def stern(self) -> SternParams:
        return SternParams(self.n, self.k, self.w)

    def pack(self) -> bytes:
        return struct.pack(self._FMT, self.n, self.k, self.w, self.r, self.commit_len)

    @classmethod
    def unpack(cls, data: bytes) -> "SigParams":
        if len(data) < cls.SIZE:
            raise FormatError("truncated params block")
        p = cls(*struct.unpack(cls._FMT, data[:cls.SIZE]))
        try:
            p.stern
        except ValueError as exc:
            raise FormatError(f"bad params: {exc}") from None
        if p.r < 1 or p.commit_len < 1:
            raise FormatError("bad params: r and commit_len must be positive")
        return p

    def scheme(self, commitment: CommitmentScheme | None = None) -> Stern:
        return Stern(self.stern, commitment, self.commit_len)


def encode_public_key(params: SigParams, pk: SternPublicKey) -> bytes:
    return PK_MAGIC + params.pack() + pk.H.to_bytes() + pk.s.to_bytes()


def decode_public_key(data: bytes) -> tuple[SigParams, SternPublicKey]:
    if data[:4] != PK_MAGIC:
        raise FormatError("bad public key magic")
    p = SigParams.unpack(data[4:])
    rs = p.n - p.k
    rb, sb = (p.n + 7) // 8, (rs + 7) // 8
    off = 4 + SigParams.SIZE
    if len(data) != off + rs * rb + sb:
        raise FormatError("public key length mismatch")
    try:
        H = BitMatrix.from_bytes(data[off:off + rs * rb], rs, p.n)
        s = BitVector.from_bytes(data[off + rs * rb:], rs)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return p, SternPublicKey(H, s)


def encode_secret_key(params: SigParams, sk: SternSecretKey) -> bytes:
    return SK_MAGIC + params.pack() + sk.e.to_bytes()


def decode_secret_key(data: bytes) -> tuple[SigParams, SternSecretKey]:
    if data[:4] != SK_MAGIC:
        raise FormatError("bad secret key magic")
    p = SigParams.unpack(data[4:])
    off = 4 + SigParams.SIZE
    if len(data) != off + (p.n + 7) // 8:
        raise FormatError("secret key length mismatch")
    try:
        return p, SternSecretKey(BitVector.from_bytes(data[off:], p.n))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# -- signatures ------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    params: SigParams
    x: tuple[tuple[bytes, ...], ...]
    opened: tuple[tuple[bytes, ...], ...]   # full slot encodings, ascending slot order

    def x_bytes(self) -> bytes:
        return b"".join(b"".join(row) for row in self.x)

    def encode(self) -> bytes:
        sp = self.params.stern
        out = [SIG_MAGIC, bytes([VERSION]), self.params.pack(), self.x_bytes()]
        for pair in self.opened:
            for slot in pair:
                tag = slot[0]
                body = slot[1:1 + sp.body_len(tag)]
                out.append(struct.pack("<BI", tag, len(body)) + body)
        return b"".join(out)

    @classmethod
    def decode(cls, data: bytes, expect: SigParams | None = None) -> "Signature":
        if data[:4] != SIG_MAGIC:
            raise FormatError("bad signature magic")
        if len(data) < 5 or data[4] != VERSION:
            raise FormatError("unsupported signature version")
        p = SigParams.unpack(data[5:])
        if expect is not None and p != expect:
            raise FormatError("signature parameters do not match the key")
        sp = p.stern
        off = 5 + SigParams.SIZE
        xlen = p.r * 3 * p.commit_len
        if len(data) < off + xlen:
            raise FormatError("truncated commitments")
        flat = [data[off + i * p.commit_len:off + (i + 1) * p.commit_len] for i in range(3 * p.r)]
        x = tuple(tuple(flat[3 * i:3 * i + 3]) for i in range(p.r))
        off += xlen
        opened = []
        for _ in range(p.r):
            pair = []
            prev = 0
            for _ in range(2):
                if len(data) < off + 5:
                    raise FormatError("truncated opened slot header")
                tag, blen = struct.unpack_from("<BI", data, off)
                off += 5
                if tag not in (1, 2, 3) or tag <= prev:
                    raise FormatError("bad or out-of-order slot tag")
                if blen != sp.body_len(tag):
                    raise FormatError("wrong slot body length")
                if len(data) < off + blen:
                    raise FormatError("truncated opened slot body")
                body = data[off:off + blen]
                off += blen
                pair.append(bytes([tag]) + pad_response(body, sp.slot_len - 1))
                prev = tag
            opened.append(tuple(pair))
        if off != len(data):
            raise FormatError("trailing bytes after signature")
        return cls(p, x, tuple(opened))


def sign(scheme: Stern, params: SigParams, pk: SternPublicKey, sk: SternSecretKey,
         m: bytes, rng: Rng) -> Signature:
    Z, X = parallel_prove_first(scheme, pk, sk, params.r, rng)
    sig_x = tuple(X)
    c = derive_challenges(b"".join(b"".join(row) for row in sig_x), m, params.r)
    return Signature(params, sig_x, parallel_open(scheme, Z, c))


def verify_signature(scheme: Stern, params: SigParams, pk: SternPublicKey, m: bytes,
                     sig: Signature | bytes) -> bool:
    """Never raises on malformed input; returns ``False`` instead."""
    try:
        if isinstance(sig, (bytes, bytearray)):
            sig = Signature.decode(bytes(sig), params)
        elif sig.params != params:
            return False
        if len(sig.x) != params.r or any(len(xi) != 3 or any(len(b) != params.commit_len for b in xi)
                                        for xi in sig.x):
            return False
        c = derive_challenges(sig.x_bytes(), m, params.r)
        for ci, pair in zip(c, sig.opened):
            if tuple(z[0] for z in pair) != scheme.opened_slots(ci):
                return False
        return parallel_verify(scheme, pk, ParallelTranscript(sig.x, c, sig.opened))
    except (FormatError, ValueError, IndexError, TypeError):
        return False


def keygen(params: SigParams, rng: Rng, commitment: CommitmentScheme | None = None):
    scheme = params.scheme(commitment)
    pk, sk = scheme.keygen(rng)
    return scheme, pk, sk
