import hashlib
import math
import struct

import pytest
from hypothesis import given, settings, strategies as st

from sternsig.commit import FeistelCommitment
from sternsig.fiatshamir import (FormatError, SigParams, Signature, challenges_from_stream,
                                 decode_public_key, decode_secret_key, derive_challenges,
                                 encode_public_key, encode_secret_key, keygen, sign,
                                 verify_signature)
from sternsig.rng import SeededRng

TOY = SigParams(32, 16, 4, 20, 16)


def oracle_challenges(data: bytes, r: int) -> tuple[int, ...]:
    """Reference: expand a long stream to a bit string and read 2-bit groups."""
    stream = hashlib.shake_256(data).digest(64 + r)
    bits = "".join(format(b, "08b")[::-1] for b in stream)   # bit 0 of each byte first
    out = []
    for i in range(0, len(bits), 2):
        v = int(bits[i]) + 2 * int(bits[i + 1])
        if v < 3:
            out.append(v + 1)
            if len(out) == r:
                return tuple(out)
    raise AssertionError("stream too short")


def _fixed(buf):
    return lambda L: (buf * (L // len(buf) + 1))[:L]


@pytest.fixture(scope="module")
def keys():
    return keygen(TOY, SeededRng(b"fiat-shamir keys"))


# -- challenge derivation ------------------------------------------------------

def test_stream_mapping_examples():
    # groups 00 01 10 (then 11 filler), low bits first
    assert challenges_from_stream(_fixed(bytes([0b11100100])), 3) == (1, 2, 3)
    # groups 11 11 00
    assert challenges_from_stream(_fixed(bytes([0b00001111])), 1) == (1,)


def test_stream_all_rejections_then_value():
    buf = bytes([0xFF] * 40) + bytes([0b10])
    calls = []

    def stream(L):
        calls.append(L)
        return (buf + bytes(L))[:L]

    assert challenges_from_stream(stream, 1) == (3,)
    assert len(calls) > 1          # the stream was extended


@settings(max_examples=100)
@given(st.binary(max_size=64), st.binary(max_size=64), st.integers(1, 300))
def test_derive_matches_oracle(x, m, r):
    data = b"sternsig/FS-msg/v1" + len(m).to_bytes(8, "little") + m + x
    assert derive_challenges(x, m, r) == oracle_challenges(data, r)


def test_identification_form_hashes_x_only():
    x = b"commitments"
    assert derive_challenges(x, None, 30) == oracle_challenges(b"sternsig/FS-id/v1" + x, 30)
    assert derive_challenges(x, None, 30) != derive_challenges(x, b"", 30)


def test_message_framing_is_unambiguous():
    assert derive_challenges(b"bc", b"a", 40) != derive_challenges(b"c", b"ab", 40)


def test_trit_frequencies():
    N, r = 100_000, 1
    counts = [0, 0, 0]
    for i in range(N):
        counts[derive_challenges(i.to_bytes(4, "little"), b"freq", r)[0] - 1] += 1
    sigma = math.sqrt(N * (1 / 3) * (2 / 3))
    for c in counts:
        assert abs(c - N / 3) <= 3 * sigma


# -- sign / verify -------------------------------------------------------------

def test_sign_verify_1000_messages(keys):
    scheme, pk, sk = keys
    rng = SeededRng(b"1000 messages")
    for _ in range(1000):
        m = rng.randbytes(1 + rng.randbelow(64))
        sig = sign(scheme, TOY, pk, sk, m, rng)
        assert verify_signature(scheme, TOY, pk, m, sig)


def test_other_message_rejected(keys):
    scheme, pk, sk = keys
    rng = SeededRng(b"other message")
    accepts = 0
    for i in range(10_000):
        m = i.to_bytes(4, "little")
        sig = sign(scheme, TOY, pk, sk, m, rng) if i % 100 == 0 else sig
        if verify_signature(scheme, TOY, pk, m + b"'", sig.encode()):
            accepts += 1
    assert accepts == 0


def test_signatures_differ_across_rng(keys):
    scheme, pk, sk = keys
    a = sign(scheme, TOY, pk, sk, b"m", SeededRng(b"one"))
    b = sign(scheme, TOY, pk, sk, b"m", SeededRng(b"two"))
    assert set(sum(a.x, ())).isdisjoint(sum(b.x, ()))


def test_signing_is_deterministic_given_seed(keys):
    scheme, pk, sk = keys
    a = sign(scheme, TOY, pk, sk, b"m", SeededRng(b"fixed"))
    b = sign(scheme, TOY, pk, sk, b"m", SeededRng(b"fixed"))
    assert a.encode() == b.encode()


def test_verifier_recomputes_signer_challenges(keys):
    scheme, pk, sk = keys
    sig = sign(scheme, TOY, pk, sk, b"msg", SeededRng(b"recompute"))
    c = derive_challenges(sig.x_bytes(), b"msg", TOY.r)
    assert tuple(tuple(z[0] for z in pair) for pair in sig.opened) == \
        tuple(scheme.opened_slots(ci) for ci in c)


def test_verify_never_raises(keys):
    scheme, pk, _ = keys
    for junk in (b"", b"STFS", b"STFS\x01" + bytes(9), bytes(500)):
        assert verify_signature(scheme, TOY, pk, b"m", junk) is False


def test_wrong_params_rejected(keys):
    scheme, pk, sk = keys
    sig = sign(scheme, TOY, pk, sk, b"m", SeededRng(b"params"))
    other = SigParams(32, 16, 4, 21, 16)
    assert not verify_signature(scheme, other, pk, b"m", sig.encode())


# -- wire format ---------------------------------------------------------------

def test_roundtrip_and_truncations(keys):
    scheme, pk, sk = keys
    sig = sign(scheme, TOY, pk, sk, b"truncate me", SeededRng(b"trunc"))
    data = sig.encode()
    assert Signature.decode(data) == sig
    assert Signature.decode(data).encode() == data
    for cut in range(len(data)):
        with pytest.raises(FormatError):
            Signature.decode(data[:cut])
        assert not verify_signature(scheme, TOY, pk, b"truncate me", data[:cut])
    with pytest.raises(FormatError):
        Signature.decode(data + b"\x00")


def test_signature_layout_walk(keys):
    scheme, pk, sk = keys
    data = sign(scheme, TOY, pk, sk, b"", SeededRng(b"layout")).encode()
    assert data[:4] == b"STFS" and data[4] == 1
    assert struct.unpack_from("<HHHHB", data, 5) == (32, 16, 4, 20, 16)
    off = 14 + 20 * 3 * 16
    p = TOY.stern
    for _ in range(20):
        tags = []
        for _ in range(2):
            tag, length = struct.unpack_from("<BI", data, off)
            assert length == p.body_len(tag)
            tags.append(tag)
            off += 5 + length
        assert tags[0] < tags[1]
    assert off == len(data)


def test_decode_rejects_bad_tags(keys):
    scheme, pk, sk = keys
    data = bytearray(sign(scheme, TOY, pk, sk, b"", SeededRng(b"tags")).encode())
    off = 14 + 20 * 3 * 16
    for bad in (0, 4, 0xFF):
        d = bytearray(data)
        d[off] = bad
        with pytest.raises(FormatError):
            Signature.decode(bytes(d))
    d = bytearray(data)
    d[0] = ord("X")
    with pytest.raises(FormatError):
        Signature.decode(bytes(d))


def test_key_roundtrip(keys):
    scheme, pk, sk = keys
    pkb, skb = encode_public_key(TOY, pk), encode_secret_key(TOY, sk)
    assert pkb[:4] == b"STPK" and skb[:4] == b"STSK"
    assert len(pkb) == 4 + 9 + 16 * 4 + 2 and len(skb) == 4 + 9 + 4
    assert decode_public_key(pkb) == (TOY, pk)
    assert decode_secret_key(skb) == (TOY, sk)
    for bad in (pkb[:-1], pkb + b"\x00", b"XXXX" + pkb[4:]):
        with pytest.raises(FormatError):
            decode_public_key(bad)
    with pytest.raises(FormatError):
        decode_secret_key(skb[:-1])


def test_bad_params_block():
    with pytest.raises(FormatError):
        SigParams.unpack(SigParams(8, 8, 1, 1, 1).pack())
    with pytest.raises(FormatError):
        SigParams.unpack(SigParams(8, 4, 1, 0, 1).pack())


# -- padded Feistel commitments end to end -------------------------------------

def test_feistel_padded_sign_verify():
    rng = SeededRng(b"feistel fs")
    base = SigParams(16, 8, 3, 12, 0)
    block = base.stern.slot_len + 5          # forces zero padding before the permutation
    params = SigParams(16, 8, 3, 12, block)
    G = FeistelCommitment(rng.randbytes(32), block)
    scheme, pk, sk = keygen(params, rng, G)
    for i in range(50):
        m = bytes([i])
        sig = sign(scheme, params, pk, sk, m, rng)
        assert all(len(b) == block for row in sig.x for b in row)
        assert verify_signature(scheme, params, pk, m, sig.encode())
        assert not verify_signature(scheme, params, pk, m + b"!", sig.encode())
