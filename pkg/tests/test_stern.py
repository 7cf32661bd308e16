from collections import Counter
from fractions import Fraction

import pytest

from sternsig import gf2
from sternsig.gf2 import BitVector
from sternsig.stern import (SlotFormatError, Stern, SternParams, SternResponse, all_permutations,
                            all_vectors, all_weight_w, decode_slot1, encode_slot1,
                            encode_vec_slot)
from sternsig.rng import SeededRng


def test_params_validation():
    for bad in ((8, 0, 2), (8, 8, 2), (8, 4, 9), (8, 4, -1)):
        with pytest.raises(ValueError):
            SternParams(*bad)
    p = SternParams(32, 16, 4)
    assert p.r_syn == 16
    assert p.body_len(1) == 64 + 2 and p.body_len(2) == p.body_len(3) == 4
    assert p.slot_len == 1 + 66


def test_keygen_invariants_1000():
    rng = SeededRng(b"keygen 1000")
    scheme = Stern(SternParams(8, 4, 2))
    for _ in range(1000):
        pk, sk = scheme.keygen(rng)
        assert pk.H.rank() == 4
        assert gf2.hamming_weight(sk.e) == 2
        assert gf2.syndrome(pk.H, sk.e) == pk.s
        assert scheme.check_keypair(pk, sk)


def test_keygen_w0_gives_zero_syndrome(rng):
    scheme = Stern(SternParams(8, 4, 0))
    pk, sk = scheme.keygen(rng)
    assert sk.e == BitVector.zeros(8)
    assert pk.s == BitVector.zeros(4)


def test_prover_first_properties(toy_keys, rng):
    scheme, pk, sk = toy_keys
    for rep in range(200):
        z, x = scheme.prover_first(pk, sk, rng, rep)
        assert scheme.commit_slots(z.encode_slots(scheme.params), rep) == x
        assert (z.z2 ^ z.z3).weight() == 2
        assert gf2.syndrome(pk.H, gf2.permute(gf2.invert_permutation(z.sigma), z.z2)) == z.s_prime
        assert all(len(xi) == 16 for xi in x)


def test_prover_second_opens_complement(toy_keys, rng):
    scheme, pk, sk = toy_keys
    z, _ = scheme.prover_first(pk, sk, rng)
    s1, s2, s3 = z.encode_slots(scheme.params)
    assert scheme.prover_second(z, 1) == (s2, s3)
    assert scheme.prover_second(z, 2) == (s1, s3)
    assert scheme.prover_second(z, 3) == (s1, s2)
    with pytest.raises(ValueError):
        scheme.prover_second(z, 4)


def test_perfect_completeness_10k():
    rng = SeededRng(b"completeness 10k")
    scheme = Stern(SternParams(16, 8, 3), commit_len=16)
    pk, sk = scheme.keygen(rng)
    failures = 0
    for t in range(10_000):
        z, x = scheme.prover_first(pk, sk, rng)
        c = 1 + t % 3
        if not scheme.verify(pk, c, scheme.prover_second(z, c), x):
            failures += 1
    assert failures == 0


def test_bit_flip_in_opened_slot_rejected():
    rng = SeededRng(b"mutation 10k")
    scheme = Stern(SternParams(16, 8, 3), commit_len=16)
    pk, sk = scheme.keygen(rng)
    accepts = 0
    for _ in range(10_000):
        z, x = scheme.prover_first(pk, sk, rng)
        c = 1 + rng.randbelow(3)
        opened = [bytearray(o) for o in scheme.prover_second(z, c)]
        which = rng.randbelow(2)
        pos = rng.randbelow(len(opened[which]))
        opened[which][pos] ^= 1 << rng.randbelow(8)
        if scheme.verify(pk, c, tuple(bytes(o) for o in opened), x):
            accepts += 1
    assert accepts == 0


def test_wrong_syndrome_fails_c2(toy_keys, rng):
    scheme, pk, sk = toy_keys
    flipped = type(pk)(pk.H, pk.s ^ BitVector(pk.s.n, 1))
    for _ in range(100):
        z, x = scheme.prover_first(pk, sk, rng)
        opened = scheme.prover_second(z, 2)
        assert scheme.verify(pk, 2, opened, x)
        assert not scheme.verify(flipped, 2, opened, x)


def test_relation_rejects_malformed(toy_keys, rng):
    scheme, pk, sk = toy_keys
    z, _ = scheme.prover_first(pk, sk, rng)
    s1, s2, s3 = z.encode_slots(scheme.params)
    assert not scheme.relation(pk, 1, (s2[:-1], s3))
    assert not scheme.relation(pk, 1, (s3, s2))          # wrong tags
    assert not scheme.relation(pk, 2, (s1,))
    bad = bytearray(s1)
    bad[1:3] = bad[3:5]                                   # duplicate sigma entry
    assert not scheme.relation(pk, 3, (bytes(bad), s2))
    assert not scheme.relation(pk, 7, (s1, s2))


def test_slot_codec_roundtrip_and_strictness(rng):
    p = SternParams(10, 4, 3)
    sigma = gf2.CoordPermutation.random(rng, 10)
    sp = gf2.sample_vector(rng, 6)
    s1 = encode_slot1(p, sigma, sp)
    assert len(s1) == p.slot_len and s1[0] == 1
    assert decode_slot1(p, s1) == (sigma, sp)
    v = encode_vec_slot(p, 2, gf2.sample_vector(rng, 10))
    assert len(v) == p.slot_len
    with pytest.raises(SlotFormatError):
        decode_slot1(p, s1[:-1] + bytes([s1[-1] | 0x80]))   # bit past s'
    with pytest.raises(SlotFormatError):
        decode_slot1(p, s1 + b"\x00")
    with pytest.raises(SlotFormatError):
        decode_slot1(p, v)


def test_slot1_layout():
    p = SternParams(3, 1, 1)
    s1 = encode_slot1(p, gf2.CoordPermutation((2, 0, 1)), BitVector.from_list([1, 0]))
    assert s1 == bytes([1, 2, 0, 0, 0, 1, 0, 0b01])


# -- simulator -----------------------------------------------------------------

def test_simulated_transcripts_verify(toy_keys, rng):
    scheme, pk, _ = toy_keys
    for t in range(300):
        c = 1 + t % 3
        x, opened = scheme.simulate(pk, c, rng, rep=t)
        assert scheme.verify(pk, c, opened, x, rep=t)


def test_simulator_c3_relation(toy_keys, rng):
    scheme, pk, _ = toy_keys
    for _ in range(100):
        _, (s1, s2) = scheme.simulate(pk, 3, rng)
        sigma, sp = decode_slot1(scheme.params, s1)
        z2 = gf2.permute(gf2.invert_permutation(sigma), BitVector.from_bytes(s2[1:2], 8))
        assert gf2.syndrome(pk.H, z2) == sp


def test_simulator_c1_matches_honest_by_enumeration():
    """Opened (z2, z3) for c=1 is (U, U xor W): count both sides over all coins."""
    scheme = Stern(SternParams(4, 2, 1), commit_len=16)
    pk, sk = scheme.keygen(SeededRng(b"hvzk c1"))
    honest = Counter()
    for sigma in all_permutations(4):
        for y in all_vectors(4):
            z2 = gf2.permute(sigma, y)
            z3 = z2 ^ gf2.permute(sigma, sk.e)
            honest[(z2.bits, z3.bits)] += 1
    target = Counter()
    for u in range(16):
        for t in all_weight_w(4, 1):
            target[(u, u ^ t.bits)] += 1
    simulated = Counter()
    for u in all_vectors(4):
        for t in all_weight_w(4, 1):
            s2, s3 = scheme.simulate_opened(pk, 1, (u, t))
            simulated[(s2[1], s3[1])] += 1
    nh, nt, ns = sum(honest.values()), sum(target.values()), sum(simulated.values())
    assert {k: Fraction(v, nh) for k, v in honest.items()} == \
        {k: Fraction(v, nt) for k, v in target.items()} == \
        {k: Fraction(v, ns) for k, v in simulated.items()}


# -- extraction ----------------------------------------------------------------

def test_extract_recovers_key_1000():
    rng = SeededRng(b"extract 1000")
    scheme = Stern(SternParams(16, 8, 3))
    for _ in range(1000):
        pk, sk = scheme.keygen(rng)
        z, _ = scheme.prover_first(pk, sk, rng)
        assert scheme.extract(z) == sk.e
        assert scheme.extract(z.encode_slots(scheme.params)) == sk.e


def test_extracted_witness_when_all_relations_pass(toy_keys, rng):
    scheme, pk, sk = toy_keys
    for _ in range(200):
        z, _ = scheme.prover_first(pk, sk, rng)
        slots = z.encode_slots(scheme.params)
        if all(scheme.relation(pk, c, scheme.open(slots, c)) for c in (1, 2, 3)):
            e = scheme.extract(slots)
            assert gf2.syndrome(pk.H, e) == pk.s and e.weight() == 2


def test_semi_mutated_response_fails_witness_check(toy_keys, rng):
    """A response answering only challenges 1 and 2 extracts a non-witness."""
    scheme, pk, sk = toy_keys
    p = scheme.params
    for _ in range(100):
        sigma = gf2.CoordPermutation.random(rng, p.n)
        y = gf2.sample_vector(rng, p.n)
        e2 = gf2.sample_weight_w_vector(rng, p.n, p.w)
        if gf2.syndrome(pk.H, e2) == pk.s:
            continue
        # s' chosen so that challenge 2 passes with the wrong e2
        sp = gf2.syndrome(pk.H, y ^ e2) ^ pk.s
        z = SternResponse(sigma, sp, gf2.permute(sigma, y), gf2.permute(sigma, y ^ e2))
        slots = z.encode_slots(p)
        passing = {c for c in (1, 2, 3) if scheme.relation(pk, c, scheme.open(slots, c))}
        assert passing == {1, 2}
        assert not scheme.is_witness(pk, scheme.extract(slots))


def test_extract_rejects_malformed_slot1(toy_keys, rng):
    scheme, pk, sk = toy_keys
    z, _ = scheme.prover_first(pk, sk, rng)
    s1, s2, s3 = z.encode_slots(scheme.params)
    with pytest.raises(SlotFormatError):
        scheme.extract((s2, s2, s3))
