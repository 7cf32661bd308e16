"""Commit-and-open identification schemes and their parallel repetition.

A scheme commits to ``n_slots`` byte strings with a :class:`CommitmentScheme`
and, on challenge ``c``, opens the slots in ``opened_slots(c)``.  Slots are
numbered from 1; repetitions from 0.

Verification is split in two on purpose.  :meth:`CommitAndOpenScheme.relation`
looks only at the opened values and the public key, while the commitment check
recomputes ``G`` on each opened slot.  Extractors and the valid-challenge
analysis need the relation check on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .commit import CommitmentScheme
from .rng import Rng

Commitments = tuple[bytes, ...]
Opened = tuple[bytes, ...]


class CommitAndOpenScheme:
    n_slots: int
    challenges: tuple[int, ...]
    commitment: CommitmentScheme

    # -- scheme-specific ---------------------------------------------------
    def keygen(self, rng: Rng) -> tuple[Any, Any]:
        raise NotImplementedError

    def prover_slots(self, pk, sk, rng: Rng) -> tuple[bytes, ...]:
        """Fresh full response vector ``z = (z_1, ..., z_n)`` as slot encodings."""
        raise NotImplementedError

    def opened_slots(self, c: int) -> tuple[int, ...]:
        """``I_c`` in ascending order."""
        raise NotImplementedError

    def relation(self, pk, c: int, opened: Opened) -> bool:
        """Relation check on the opened slots only; must not raise on garbage."""
        raise NotImplementedError

    def slot_len(self) -> int:
        raise NotImplementedError

    # -- generic -----------------------------------------------------------
    def commit_slots(self, slots: Sequence[bytes], rep: int = 0) -> Commitments:
        return tuple(self.commitment.commit(z, rep, j + 1) for j, z in enumerate(slots))

    def prover_first_slots(self, pk, sk, rng: Rng, rep: int = 0) -> tuple[tuple[bytes, ...], Commitments]:
        slots = self.prover_slots(pk, sk, rng)
        return slots, self.commit_slots(slots, rep)

    def open(self, slots: Sequence[bytes], c: int) -> Opened:
        self.check_challenge(c)
        return tuple(slots[j - 1] for j in self.opened_slots(c))

    def check_challenge(self, c: int):
        if c not in self.challenges:
            raise ValueError(f"invalid challenge {c!r}")

    def check_commitments(self, c: int, opened: Opened, x: Commitments, rep: int = 0) -> bool:
        idx = self.opened_slots(c)
        if len(opened) != len(idx) or len(x) != self.n_slots:
            return False
        for j, z in zip(idx, opened):
            if len(z) != self.slot_len():
                return False
            if self.commitment.commit(z, rep, j) != x[j - 1]:
                return False
        return True

    def verify_opened(self, pk, c: int, opened: Opened, x: Commitments, rep: int = 0) -> bool:
        if c not in self.challenges:
            return False
        return self.check_commitments(c, opened, x, rep) and self.relation(pk, c, opened)


@dataclass(frozen=True)
class ParallelTranscript:
    x: tuple[Commitments, ...]
    c: tuple[int, ...]
    opened: tuple[Opened, ...]

    @property
    def r(self) -> int:
        return len(self.x)

    def slice(self, i: int) -> tuple[Commitments, int, Opened]:
        return self.x[i], self.c[i], self.opened[i]


def parallel_prove_first(scheme: CommitAndOpenScheme, pk, sk, r: int, rng: Rng):
    """``r`` independent first messages; returns ``(Z, X)``."""
    if r < 1:
        raise ValueError("need at least one repetition")
    Z, X = [], []
    for i in range(r):
        z, x = scheme.prover_first_slots(pk, sk, rng, rep=i)
        Z.append(z)
        X.append(x)
    return tuple(Z), tuple(X)


def parallel_open(scheme: CommitAndOpenScheme, Z, c: Sequence[int]) -> tuple[Opened, ...]:
    if len(c) != len(Z):
        raise ValueError("challenge vector length mismatch")
    return tuple(scheme.open(z, ci) for z, ci in zip(Z, c))


def parallel_verify(scheme: CommitAndOpenScheme, pk, t: ParallelTranscript) -> bool:
    if t.r < 1:
        raise ValueError("empty transcript")
    if not (len(t.c) == len(t.opened) == t.r):
        return False
    return all(scheme.verify_opened(pk, t.c[i], t.opened[i], t.x[i], rep=i) for i in range(t.r))


def valid_challenge_set(scheme: CommitAndOpenScheme, pk, slots: Sequence[bytes]) -> frozenset[int]:
    """Challenges whose opening of the known full vector passes the relation."""
    return frozenset(
        c for c in scheme.challenges
        if scheme.relation(pk, c, tuple(slots[j - 1] for j in scheme.opened_slots(c)))
    )


def subset_coordinate_lemma(S: Iterable[Sequence[int]], gamma: int):
    """Find a coordinate carrying at least ``gamma`` distinct values across ``S``.

    Returns ``(i, values)`` for the smallest such coordinate ``i`` with the
    ``gamma`` smallest values, or ``None``.  When ``|S| >= (gamma-1)**r + 1``
    a coordinate always exists.
    """
    S = [tuple(t) for t in S]
    if not S:
        return None
    r = len(S[0])
    if any(len(t) != r for t in S):
        raise ValueError("tuples of unequal length")
    for i in range(r):
        vals = sorted({t[i] for t in S})
        if len(vals) >= gamma:
            return i, tuple(vals[:gamma])
    return None
