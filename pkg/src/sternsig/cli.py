"""Command-line interface.

Exit codes: 0 success / valid, 1 signature rejected or harness check failed,
2 malformed input file, 3 usage error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import tempfile

from . import harness
from .commit import FeistelCommitment, HashCommitment, SrfCommitment
from .fiatshamir import (FormatError, SigParams, Signature, decode_public_key, decode_secret_key,
                         encode_public_key, encode_secret_key, sign, verify_signature)
from .params import SecurityTarget, bound_report, code_params_for, commit_bits_for, repetitions_for
from .rng import SeededRng, SystemRng
from .stern import Stern, SternParams

EXIT_OK, EXIT_REJECT, EXIT_MALFORMED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 4
TOY_LAMBDA = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _seed(hexstr):
    if hexstr is None:
        return None
    try:
        seed = bytes.fromhex(hexstr)
    except ValueError:
        raise UsageError("seed must be hex") from None
    if len(seed) < 16:
        raise UsageError("seed must be at least 16 bytes (32 hex digits)")
    return seed


def _rng(hexstr):
    seed = _seed(hexstr)
    return SystemRng() if seed is None else SeededRng(seed)


def _parse_params(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--params expects comma-separated integers") from None
    return vals


def _toy_banner(lam: int | None):
    bar = "!" * 66
    what = f"lambda={lam}" if lam is not None else "explicit parameters"
    print(f"{bar}\n!! WARNING: toy parameters ({what}); NOT secure, testing only.\n{bar}",
          file=sys.stderr)


def _sig_params(args) -> SigParams:
    if args.lam is not None and args.params is not None:
        raise UsageError("--lambda and --params are mutually exclusive")
    if args.params is not None:
        vals = _parse_params(args.params)
        if len(vals) not in (4, 5):
            raise UsageError("--params expects n,k,w,r[,commit_bytes]")
        n, k, w, r = vals[:4]
        clen = vals[4] if len(vals) == 5 else 32
        try:
            SternParams(n, k, w)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if r < 1 or not 0 < clen < 256:
            raise UsageError("need r >= 1 and 0 < commit_bytes < 256")
        _toy_banner(None)
        return SigParams(n, k, w, r, clen)
    lam = args.lam if args.lam is not None else 128
    if lam < 1:
        raise UsageError("lambda must be positive")
    if lam < TOY_LAMBDA:
        _toy_banner(lam)
    n, k, w = code_params_for(lam)
    return SigParams(n, k, w, repetitions_for(lam), commit_bits_for(lam) // 8)


def _commitment(args, params: SigParams):
    kind = getattr(args, "commit", "hash")
    slot_len = params.stern.slot_len
    if kind == "hash":
        return HashCommitment(slot_len, params.commit_len)
    key = _seed(args.commit_key) if args.commit_key else None
    if key is None:
        raise UsageError(f"--commit {kind} needs --commit-key HEX")
    if kind == "feistel":
        if params.commit_len != slot_len:
            raise UsageError(f"feistel commitments need commit_bytes == slot length ({slot_len})")
        return FeistelCommitment(key, slot_len)
    return SrfCommitment(key, slot_len, params.commit_len, 1 << min(8 * params.commit_len, 64))


def _write_atomic(path: str, data: bytes):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


# -- subcommands -------------------------------------------------------------

def cmd_keygen(args) -> int:
    params = _sig_params(args)
    scheme = params.scheme(_commitment(args, params))
    pk, sk = scheme.keygen(_rng(args.seed))
    pk_bytes = encode_public_key(params, pk)
    _write_atomic(args.out_pk, pk_bytes)
    _write_atomic(args.out_sk, encode_secret_key(params, sk))
    print(f"n={params.n} k={params.k} w={params.w} r={params.r} commit_bytes={params.commit_len}")
    print(f"fingerprint={hashlib.sha3_256(pk_bytes).hexdigest()}")
    return EXIT_OK


def _load_pk(path):
    return decode_public_key(_read(path))


def cmd_sign(args) -> int:
    params, pk = _load_pk(args.pk)
    sk_params, sk = decode_secret_key(_read(args.sk))
    if sk_params != params:
        raise FormatError("secret key parameters do not match the public key")
    scheme = params.scheme(_commitment(args, params))
    if not scheme.check_keypair(pk, sk):
        raise FormatError("key pair fails its invariants")
    sig = sign(scheme, params, pk, sk, _read(args.message), _rng(args.seed))
    _write_atomic(args.out, sig.encode())
    return EXIT_OK


def cmd_verify(args) -> int:
    params, pk = _load_pk(args.pk)
    raw = _read(args.signature)
    Signature.decode(raw, params)   # malformed -> exit 2
    scheme = params.scheme(_commitment(args, params))
    ok = verify_signature(scheme, params, pk, _read(args.message), raw)
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_params(args) -> int:
    try:
        target = SecurityTarget(args.lam, args.qh, args.qg, args.gamma, args.challenge_size)
        rep = bound_report(target)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(rep.table())
    print()
    for k, v in rep.key_values().items():
        print(f"{k}={v}")
    return EXIT_OK


def _harness_params(args, default=(32, 16, 4, 20)) -> tuple[int, int, int, int]:
    if args.params is None:
        return default
    vals = _parse_params(args.params)
    if len(vals) != 4:
        raise UsageError("--params expects n,k,w,r")
    try:
        SternParams(*vals[:3])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return vals


def _emit(summary: dict) -> int:
    for k, v in summary.items():
        print(f"{k}={v}")
    return EXIT_OK if summary.get("pass") else EXIT_REJECT


def cmd_harness(args) -> int:
    rng = _rng(args.seed) if args.seed else SeededRng(b"sternsig-harness")
    which = args.experiment
    if which == "completeness":
        n, k, w, r = _harness_params(args)
        trials = args.trials or 1000
        res = harness.completeness_suite(SigParams(n, k, w, r, 16), trials, rng)
        return _emit({"experiment": which, "trials": trials, "failures": res.failures,
                      "pass": res.passed})
    if which == "extract":
        n, k, w, r = _harness_params(args)
        trials = args.trials or 100
        run = harness.extraction_run(SternParams(n, k, w), r, trials, rng)
        return _emit({"experiment": which, "transcripts": trials, "successes": run.successes,
                      "exact_key_matches": run.exact_key_matches, "pass": run.passed})
    if which == "hvzk":
        n, k, w, _ = _harness_params(args, (4, 2, 1, 1))
        scheme = Stern(SternParams(n, k, w), commit_len=16)
        try:
            pk, sk = scheme.keygen(rng)
            dist = harness.hvzk_exact_distance(scheme, pk, sk)
            broken = harness.hvzk_exact_distance(scheme, pk, sk, harness.BrokenSimulator(scheme)) \
                if w < n else {1: None}
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out = {"experiment": which}
        out.update({f"distance_c{c}": str(d) for c, d in dist.items()})
        out["broken_distance_c1"] = str(broken[1])
        out["pass"] = all(d == 0 for d in dist.values()) and (broken[1] is None or broken[1] > 0)
        return _emit(out)
    if which == "srf-collision":
        trials = args.trials or 500
        stats, control = harness.srf_birthday(trials=trials, seed=rng.randbytes(16))
        out = {"experiment": which}
        ok = control.collisions == 0
        for s in stats:
            out[f"median_r{s.r}"] = s.median
            ok = ok and s.within()
        out["control_collisions"] = control.collisions
        out["pass"] = ok
        return _emit(out)
    if which == "subset-lemma":
        trials = args.trials or 100_000
        out = {"experiment": which}
        bad = 0
        for r in (1, 2):
            for g in (2, 3):
                acc = harness.subset_lemma_exhaustive((1, 2, 3), r, g)
                out[f"exhaustive_r{r}_g{g}_checked"] = acc.checked
                bad += acc.counterexamples + acc.spurious_none
        for g in (2, 3):
            acc = harness.subset_lemma_sampled((1, 2, 3), 3, g, trials, seed=rng.randbits(32))
            out[f"sampled_r3_g{g}_checked"] = acc.checked
            bad += acc.counterexamples + acc.spurious_none
        out["counterexamples"] = bad
        out["pass"] = bad == 0
        return _emit(out)
    if which == "feistel-bijectivity":
        samples = args.trials or 100_000
        chk = harness.feistel_bijectivity(rng, samples=samples)
        return _emit({"experiment": which, "bijective_keys": f"{chk.bijective_keys}/{chk.keys}",
                      "roundtrip_failures": chk.roundtrip_failures,
                      "zero_round_identity": chk.zero_round_identity, "pass": chk.passed})
    if which == "forgery":
        n, k, w, r = _harness_params(args, (32, 16, 4, 40))
        runs = args.trials or 100
        fr = harness.forgery_smoke(SigParams(n, k, w, r, 16), runs, 1000, rng)
        return _emit({"experiment": which, "runs": runs, "queries_per_run": 1000,
                      "best_hits": max(fr.best_matches), "forgeries": fr.forgeries,
                      "pass": fr.forgeries == 0})
    raise UsageError(f"unknown experiment {which}")


HARNESS_EXPERIMENTS = ("completeness", "extract", "hvzk", "srf-collision", "subset-lemma",
                       "feistel-bijectivity", "forgery")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sternsig", description="Stern code-based Fiat-Shamir signatures")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def commit_opts(p):
        p.add_argument("--commit", choices=("hash", "feistel", "srf"), default="hash")
        p.add_argument("--commit-key", help="hex key for feistel/srf commitments")

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--params", help="n,k,w,r[,commit_bytes]")
    p.add_argument("--out-pk", required=True)
    p.add_argument("--out-sk", required=True)
    p.add_argument("--seed", help="hex seed (>= 16 bytes) for deterministic output")
    commit_opts(p)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="sign a message file")
    p.add_argument("--pk", required=True)
    p.add_argument("--sk", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed")
    commit_opts(p)
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="verify a signature; exit 0 iff valid")
    p.add_argument("--pk", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--signature", required=True)
    commit_opts(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("params", help="repetitions and commitment size for a security level")
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--gamma", type=int, default=3)
    p.add_argument("--challenge-size", type=int, default=3)
    p.add_argument("--qh", type=float, help="log2 of hash queries (default lambda)")
    p.add_argument("--qg", type=float, help="log2 of commitment queries (default lambda)")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("harness", help="run a desk-scale check")
    p.add_argument("experiment", choices=HARNESS_EXPERIMENTS)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed")
    p.add_argument("--params", help="n,k,w,r")
    p.set_defaults(func=cmd_harness)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
