"""Executable versions of the constructive steps behind the security argument.

Everything here runs at desk scale: the Feistel-committed extractor, exact
HVZK distance by enumeration, completeness runs, the subset lemma, SRF
collision statistics and a query-budgeted forgery attempt.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import gf2
from .commit import (CommitError, FeistelCommitment, FeistelPermutation, strip_pad,
                     permutation_collision_control, srf_collision_experiment)
from .fiatshamir import SigParams, Signature, derive_challenges, sign, verify_signature
from .gf2 import CoordPermutation
from .idscheme import parallel_prove_first, subset_coordinate_lemma
from .rng import Rng, SeededRng
from .stern import (Stern, SternParams, SternPublicKey, SternSecretKey, all_permutations,
                    all_vectors, all_weight_w, encode_slot1, encode_vec_slot,
                    simulator_coin_space)


# -- Feistel-mode extraction -----------------------------------------------

def feistel_block_len(slot_len: int, min_block_len: int = 0) -> int:
    """Smallest whole-byte block holding a slot; bit width 8*len is even."""
    return max(slot_len, min_block_len)


def feistel_scheme(params: SternParams, key: bytes, min_block_len: int = 0) -> Stern:
    block = feistel_block_len(params.slot_len, min_block_len)
    return Stern(params, FeistelCommitment(key, block))


def invert_commitments(x: Sequence[Sequence[bytes]], commitment) -> tuple[tuple[bytes, ...], ...]:
    if not getattr(commitment, "invertible", False):
        raise TypeError("commitment scheme is not invertible")
    return tuple(tuple(commitment.invert(xj) for xj in xi) for xi in x)


@dataclass
class ExtractionResult:
    rep: int
    challenges: tuple[int, ...]
    slots: tuple[bytes, ...]
    witness: gf2.BitVector | None = None
    inversions: int = 0
    relation_checks: int = 0


def _strip_slots(preimages: Sequence[bytes], slot_len: int) -> tuple[bytes, ...]:
    out = []
    for z in preimages:
        try:
            out.append(strip_pad(z, slot_len))
        except CommitError:
            out.append(z)   # fails the relation's length check
    return tuple(out)


def extract_special_plus(scheme: Stern, pk: SternPublicKey, x, gamma: int = 3) -> ExtractionResult | None:
    """Invert every commitment, then find the first repetition answering ``gamma`` challenges."""
    pre = invert_commitments(x, scheme.commitment)
    inversions = sum(len(xi) for xi in x)
    checks = 0
    for i, zi in enumerate(pre):
        slots = _strip_slots(zi, scheme.slot_len())
        passing = []
        for b in scheme.challenges:
            checks += 1
            opened = tuple(slots[j - 1] for j in scheme.opened_slots(b))
            if scheme.relation(pk, b, opened):
                passing.append(b)
        if len(passing) >= gamma:
            res = ExtractionResult(i, tuple(passing[:gamma]), slots,
                                   inversions=inversions, relation_checks=checks)
            if set(res.challenges) == set(scheme.challenges):
                e = scheme.extract(slots)
                if scheme.is_witness(pk, e):
                    res.witness = e
            return res
    return None


# -- exact HVZK ------------------------------------------------------------

class SternSimulator:
    def __init__(self, scheme: Stern):
        self.scheme = scheme

    def coin_space(self, c: int):
        return simulator_coin_space(self.scheme.params, c)

    def opened(self, pk, c, coins):
        return self.scheme.simulate_opened(pk, c, coins)


class BrokenSimulator(SternSimulator):
    """Negative control: for ``c=1`` the masked difference has weight ``w+1``."""

    def coin_space(self, c: int):
        p = self.scheme.params
        if c == 1:
            return itertools.product(all_vectors(p.n), list(all_weight_w(p.n, p.w + 1)))
        return super().coin_space(c)


def statistical_distance(p: Counter, q: Counter) -> Fraction:
    np_, nq = sum(p.values()), sum(q.values())
    keys = set(p) | set(q)
    return sum((abs(Fraction(p[k], np_) - Fraction(q[k], nq)) for k in keys), Fraction(0)) / 2


def honest_opened_distribution(scheme: Stern, pk, sk, c: int) -> Counter:
    n = scheme.params.n
    dist: Counter = Counter()
    for sigma in all_permutations(n):
        for y in all_vectors(n):
            z = scheme.respond(pk, sk.e, sigma, y)
            dist[scheme.open(z.encode_slots(scheme.params), c)] += 1
    return dist


def simulated_opened_distribution(sim, pk, c: int) -> Counter:
    dist: Counter = Counter()
    for coins in sim.coin_space(c):
        dist[sim.opened(pk, c, coins)] += 1
    return dist


MAX_HVZK_N = 4


def hvzk_exact_distance(scheme: Stern, pk, sk, simulator=None) -> dict[int, Fraction]:
    """Exact statistical distance per challenge between honest and simulated openings."""
    if scheme.params.n > MAX_HVZK_N:
        raise ValueError(f"enumeration limited to n <= {MAX_HVZK_N}")
    sim = simulator or SternSimulator(scheme)
    return {
        c: statistical_distance(honest_opened_distribution(scheme, pk, sk, c),
                                simulated_opened_distribution(sim, pk, c))
        for c in scheme.challenges
    }


# -- completeness ----------------------------------------------------------

@dataclass
class CompletenessResult:
    trials: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def completeness_suite(params: SigParams, trials: int, rng: Rng, commitment=None,
                       msg_len: int = 32) -> CompletenessResult:
    scheme = params.scheme(commitment)
    pk, sk = scheme.keygen(rng)
    failures = 0
    for _ in range(trials):
        m = rng.randbytes(msg_len)
        sig = sign(scheme, params, pk, sk, m, rng)
        if not verify_signature(scheme, params, pk, m, sig.encode()):
            failures += 1
    return CompletenessResult(trials, failures)


# -- extractor run over many honest transcripts ----------------------------

@dataclass
class ExtractionRun:
    transcripts: int
    successes: int = 0
    exact_key_matches: int = 0
    failures: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.successes == self.exact_key_matches == self.transcripts


def extraction_run(params: SternParams, r: int, transcripts: int, rng: Rng,
                   gamma: int = 3, min_block_len: int = 0) -> ExtractionRun:
    run = ExtractionRun(transcripts)
    for t in range(transcripts):
        scheme = feistel_scheme(params, rng.randbytes(32), min_block_len)
        pk, sk = scheme.keygen(rng)
        _, X = parallel_prove_first(scheme, pk, sk, r, rng)
        res = extract_special_plus(scheme, pk, X, gamma)
        if res is None or res.witness is None:
            run.failures.append(t)
            continue
        run.successes += 1
        if res.witness == sk.e:
            run.exact_key_matches += 1
    return run


# -- Feistel checks --------------------------------------------------------

@dataclass
class FeistelCheck:
    bijective_keys: int
    keys: int
    roundtrip_failures: int
    roundtrip_samples: int
    zero_round_identity: bool

    @property
    def passed(self) -> bool:
        return (self.bijective_keys == self.keys and self.roundtrip_failures == 0
                and self.zero_round_identity)


def feistel_bijectivity(rng: Rng, m_small: int = 8, keys: int = 10, m_large: int = 64,
                        samples: int = 100_000) -> FeistelCheck:
    size = 1 << (2 * m_small)
    good = 0
    for _ in range(keys):
        p = FeistelPermutation(m_small, rng.randbytes(32))
        image = {p.forward(v) for v in range(size)}
        if len(image) == size and all(p.inverse(p.forward(v)) == v for v in range(size)):
            good += 1
    big = FeistelPermutation(m_large, rng.randbytes(32))
    bad = 0
    for _ in range(samples):
        v = rng.randbits(2 * m_large)
        if big.inverse(big.forward(v)) != v:
            bad += 1
    zero = FeistelPermutation(m_small, round_fn=lambda i, h: 0)
    ident = all(zero.forward(v) == v for v in range(size))
    return FeistelCheck(good, keys, bad, samples, ident)


# -- subset lemma ----------------------------------------------------------

@dataclass
class SubsetLemmaCheck:
    checked: int = 0
    counterexamples: int = 0
    spurious_none: int = 0


def _check_subset(S, r: int, gamma: int, acc: SubsetLemmaCheck):
    res = subset_coordinate_lemma(S, gamma)
    if len(S) >= (gamma - 1) ** r + 1:
        acc.checked += 1
        if res is None:
            acc.counterexamples += 1
            return
    if res is not None:
        i, vals = res
        if len(set(vals)) != gamma or not all(any(t[i] == v for t in S) for v in vals):
            acc.counterexamples += 1
    elif len(S) > (gamma - 1) ** r:
        acc.spurious_none += 1


def subset_lemma_exhaustive(challenges: Sequence[int], r: int, gamma: int) -> SubsetLemmaCheck:
    universe = list(itertools.product(challenges, repeat=r))
    acc = SubsetLemmaCheck()
    for mask in range(1, 1 << len(universe)):
        S = [universe[j] for j in range(len(universe)) if (mask >> j) & 1]
        _check_subset(S, r, gamma, acc)
    return acc


def subset_lemma_sampled(challenges: Sequence[int], r: int, gamma: int, samples: int,
                         seed: int = 0) -> SubsetLemmaCheck:
    universe = list(itertools.product(challenges, repeat=r))
    lo = (gamma - 1) ** r + 1
    rnd = random.Random(seed)
    acc = SubsetLemmaCheck()
    for _ in range(samples):
        S = rnd.sample(universe, rnd.randint(lo, len(universe)))
        _check_subset(S, r, gamma, acc)
    return acc


# -- forgery smoke test ----------------------------------------------------

def cheating_slots(scheme: Stern, pk: SternPublicKey, dodge: int, rng: Rng) -> tuple[bytes, ...]:
    """Slots that answer every challenge except ``dodge``, built without the secret key."""
    p = scheme.params
    sigma = CoordPermutation.random(rng, p.n)
    y = gf2.sample_vector(rng, p.n)
    if dodge == 1:
        t = gf2.solve(pk.H, pk.s)   # right syndrome, wrong weight
        sp = gf2.syndrome(pk.H, y)
    else:
        t = gf2.sample_weight_w_vector(rng, p.n, p.w)   # right weight, wrong syndrome
        sp = gf2.syndrome(pk.H, y) if dodge == 2 else gf2.syndrome(pk.H, y ^ t) ^ pk.s
    return (encode_slot1(p, sigma, sp), encode_vec_slot(p, 2, gf2.permute(sigma, y)),
            encode_vec_slot(p, 3, gf2.permute(sigma, y ^ t)))


@dataclass
class ForgeryRun:
    runs: int
    queries: int
    forgeries: int = 0
    best_matches: list[int] = field(default_factory=list)


def forgery_smoke(params: SigParams, runs: int, queries: int, rng: Rng,
                  message: bytes = b"forge me") -> ForgeryRun:
    """Grinding adversary: each hash query tries a fresh choice of dodged challenges.

    Per repetition it prepares, for each challenge, slots answering the other
    two.  A query succeeds on repetition ``i`` iff the derived challenge
    differs from the dodge picked there, probability 2/3 each.
    """
    out = ForgeryRun(runs, queries)
    r = params.r
    for _ in range(runs):
        scheme = params.scheme()
        pk, _sk = scheme.keygen(rng)
        prepared = []
        for i in range(r):
            per_dodge = {}
            for d in (1, 2, 3):
                slots = cheating_slots(scheme, pk, d, rng)
                per_dodge[d] = (slots, scheme.commit_slots(slots, rep=i))
            prepared.append(per_dodge)
        best = (-1, None, None)
        for _ in range(queries):
            dodges = [1 + rng.randbelow(3) for _ in range(r)]
            x = tuple(prepared[i][d][1] for i, d in enumerate(dodges))
            c = derive_challenges(b"".join(b"".join(row) for row in x), message, r)
            hits = sum(ci != di for ci, di in zip(c, dodges))
            if hits > best[0]:
                best = (hits, dodges, x)
        hits, dodges, x = best
        out.best_matches.append(hits)
        c = derive_challenges(b"".join(b"".join(row) for row in x), message, r)
        opened = tuple(scheme.open(prepared[i][d][0], c[i]) for i, d in enumerate(dodges))
        forged = Signature(params, x, opened)
        if verify_signature(scheme, params, pk, message, forged.encode()):
            out.forgeries += 1
    return out


# -- SRF ---------------------------------------------------------------------

def srf_birthday(ranges: Iterable[int] = (2 ** 8, 2 ** 10, 2 ** 12), trials: int = 500,
                 domain_len: int = 4, seed: bytes = b"srf-birthday"):
    stats = [srf_collision_experiment(domain_len, r, trials, seed + r.to_bytes(4, "little"))
             for r in ranges]
    control = permutation_collision_control(domain_len, 4 * int(max(ranges) ** 0.5), 100, seed + b"ctl")
    return stats, control


def seeded(seed: bytes | None, default: bytes) -> SeededRng:
    return SeededRng(seed if seed is not None else default)
