"""Repetition count and commitment size for a target security level.

For ``r`` parallel repetitions of a scheme with challenge space ``C`` and
``gamma``-special soundness, the signature loses (up to constants)

    challenge search   q_H^2 * (gamma-1)^r / |C|^r
    commitment         (q_G + q_H)^3 / |M|

All hidden constants are taken to be 1.  A term counts as sufficient only
when its log2 is strictly negative; exactly 0 is reported as ``threshold``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SecurityTarget:
    lam: int
    qh_log2: float | None = None
    qg_log2: float | None = None
    gamma: int = 3
    challenge_size: int = 3

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if self.gamma < 2:
            raise ValueError("gamma must be >= 2")
        if self.challenge_size < self.gamma:
            raise ValueError("challenge space smaller than gamma")

    @property
    def qh(self) -> float:
        return self.lam if self.qh_log2 is None else self.qh_log2

    @property
    def qg(self) -> float:
        return self.lam if self.qg_log2 is None else self.qg_log2


def repetitions_for(lam: int, gamma: int = 3, challenge_size: int = 3) -> int:
    """Smallest ``r`` with ``2^(2 lam) * ((gamma-1)/|C|)^r < 1``, decided in integers."""
    if challenge_size <= gamma - 1:
        raise ValueError("no finite r exists when |C| <= gamma - 1")
    num, den = gamma - 1, challenge_size
    r = max(0, math.floor(2 * lam / math.log2(den / num)) - 2)
    while (4 ** lam) * num ** r >= den ** r:
        r += 1
    return r


def commit_bits_for(lam: int) -> int:
    """``3 lam`` bits, rounded up to whole bytes."""
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    return 8 * ((3 * lam + 7) // 8)


def _log2_sum(a: float, b: float) -> float:
    hi, lo = max(a, b), min(a, b)
    return hi + math.log2(1 + 2.0 ** (lo - hi))


def _status(log2_value: float) -> str:
    if log2_value < 0:
        return "ok"
    if log2_value == 0:
        return "threshold"
    return "insufficient"


@dataclass
class BoundReport:
    target: SecurityTarget
    r: int
    commit_bits: int
    challenge_log2: float
    collision_log2: float
    collision_full_log2: float
    picnic_r: int
    notes: list[str] = field(default_factory=list)

    @property
    def challenge_status(self) -> str:
        return _status(self.challenge_log2)

    @property
    def collision_status(self) -> str:
        return _status(self.collision_log2)

    @property
    def ok(self) -> bool:
        return self.challenge_status == "ok" and self.collision_status in ("ok", "threshold")

    def key_values(self) -> dict[str, object]:
        t = self.target
        slots = 3
        return {
            "lambda": t.lam,
            "gamma": t.gamma,
            "challenge_size": t.challenge_size,
            "qh_log2": t.qh,
            "qg_log2": t.qg,
            "r": self.r,
            "commit_bits": self.commit_bits,
            "commit_bytes": self.commit_bits // 8,
            "challenge_term_log2": round(self.challenge_log2, 6),
            "challenge_term_status": self.challenge_status,
            "collision_term_log2": round(self.collision_log2, 6),
            "collision_term_status": self.collision_status,
            "collision_full_term_log2": round(self.collision_full_log2, 6),
            "picnic_crosscheck_r": self.picnic_r,
            "extractor_overhead": f"{slots}*r + {slots}*|C| = {slots * self.r + slots * t.challenge_size}",
        }

    def table(self) -> str:
        kv = self.key_values()
        rows = [
            ("security target lambda", kv["lambda"]),
            ("special-soundness gamma", kv["gamma"]),
            ("challenge space |C|", kv["challenge_size"]),
            ("hash queries log2 q_H", kv["qh_log2"]),
            ("commit queries log2 q_G", kv["qg_log2"]),
            ("repetitions r", kv["r"]),
            ("commitment size |M| (bits)", kv["commit_bits"]),
            ("log2 q_H^2 (gamma-1)^r/|C|^r", f"{kv['challenge_term_log2']} [{kv['challenge_term_status']}]"),
            ("log2 q_G^3/|M|", f"{kv['collision_term_log2']} [{kv['collision_term_status']}]"),
            ("log2 (q_G+q_H)^3/|M|", kv["collision_full_term_log2"]),
            ("r from q_H^2 2^r/3^r <= 1", kv["picnic_crosscheck_r"]),
            ("reduction time overhead", kv["extractor_overhead"]),
        ]
        width = max(len(a) for a, _ in rows)
        lines = [f"{a:<{width}}  {b}" for a, b in rows]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def _picnic_r(qh_log2: float) -> int:
    # non-strict form: smallest r with 2 qh + r log2(2/3) <= 0
    r = 0
    while 2 * qh_log2 + r * math.log2(2 / 3) > 0:
        r += 1
    return r


def bound_report(target: SecurityTarget, r: int | None = None,
                 commit_bits: int | None = None) -> BoundReport:
    if r is None:
        r = repetitions_for(target.lam, target.gamma, target.challenge_size)
    if commit_bits is None:
        commit_bits = commit_bits_for(target.lam)
    ratio = math.log2((target.gamma - 1) / target.challenge_size)
    challenge = 2 * target.qh + r * ratio
    collision = 3 * target.qg - commit_bits
    full = 3 * _log2_sum(target.qg, target.qh) - commit_bits
    notes = [
        "O(.) constants set to 1; figures are an audit aid, not a proof",
        "reduction running time t' = O_n(t) + n*r + n*|C| (polynomial O_n(t) left symbolic)",
        "signature min-entropy term of the HVZK-to-EUF-CMA step is not computed",
    ]
    return BoundReport(target, r, commit_bits, challenge, collision, full, _picnic_r(target.qh), notes)


# (n, k, w) presets keyed by the smallest lambda they are used for.  These are
# not derived from an attack-cost model.
CODE_PRESETS = [
    (1, (32, 16, 4)),
    (32, (256, 128, 28)),
    (64, (768, 384, 76)),
    (128, (1536, 768, 152)),
]


def code_params_for(lam: int) -> tuple[int, int, int]:
    chosen = CODE_PRESETS[0][1]
    for lo, nkw in CODE_PRESETS:
        if lam >= lo:
            chosen = nkw
    return chosen
