"""ibepair command line.

Exit codes: 0 success, 1 usage, 2 parse or I/O failure, 3 cryptographic
verification failure. Output files are written to a temporary sibling and
renamed into place, so a failed command never leaves a partial file.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import ibe
from .bench import MIN_ITERS, MODES, CorrectnessGateFailed, run_bench
from .entropy import SeededEntropy, SystemEntropy
from .errors import (
    AuthenticationError,
    DecodeError,
    IbePairError,
    KeyVerificationError,
    MessageLengthError,
    ParameterError,
    PointError,
    SearchBudgetExceeded,
)
from .protocol import DemoFailure, run_demo

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CRYPTO = 0, 1, 2, 3

PRODUCTION_QBITS = 160
PRODUCTION_PBITS = 512
CT_MAGIC = b"IBEPAIR\x01"
MODE_DIRECT = b"D"
MODE_HYBRID = b"H"


class UsageError(Exception):
    pass


class CryptoFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(value: str) -> bytes:
    try:
        seed = bytes.fromhex(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be hex, got {value!r}") from None
    if not seed:
        raise argparse.ArgumentTypeError("seed must not be empty")
    return seed


def _rng(seed: bytes | None, label: str):
    return SeededEntropy(seed, label) if seed is not None else SystemEntropy()


def write_atomic(path: str | Path, data: bytes | str):
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_params(path: str) -> ibe.SystemParams:
    return ibe.params_from_text(_read_text(path))


# --- ciphertext container ------------------------------------------------------

def pack_ciphertext(mode: bytes, identity: bytes, body: bytes) -> bytes:
    return CT_MAGIC + mode + len(identity).to_bytes(2, "big") + identity + body


def unpack_ciphertext(data: bytes) -> tuple[bytes, bytes, bytes]:
    head = len(CT_MAGIC)
    if data[:head] != CT_MAGIC:
        raise DecodeError("not an ibepair ciphertext (bad magic)", offset=0)
    if len(data) < head + 3:
        raise DecodeError("ciphertext header truncated", offset=len(data))
    mode = data[head:head + 1]
    if mode not in (MODE_DIRECT, MODE_HYBRID):
        raise DecodeError(f"unknown ciphertext mode {mode!r}", offset=head)
    idlen = int.from_bytes(data[head + 1:head + 3], "big")
    start = head + 3
    if len(data) < start + idlen:
        raise DecodeError("recipient identity truncated", offset=start)
    return mode, data[start:start + idlen], data[start + idlen:]


# --- commands -----------------------------------------------------------------

def cmd_gen_params(args) -> int:
    if args.qbits < 8:
        raise UsageError("--qbits must be at least 8")
    if args.pbits < args.qbits + 12:
        raise UsageError("--pbits must be at least qbits + 12")
    toy = args.qbits < PRODUCTION_QBITS or args.pbits < PRODUCTION_PBITS
    if toy and not args.allow_toy:
        raise UsageError(f"sizes below {PRODUCTION_QBITS}-bit q / {PRODUCTION_PBITS}-bit p need --allow-toy")
    if toy:
        print(f"warning: toy profile ({args.qbits}-bit q, {args.pbits}-bit p) offers no real security",
              file=sys.stderr)
    params, master = ibe.setup(ibe.Profile(args.qbits, args.pbits), _rng(args.seed, "gen-params"))
    text = ibe.params_to_text(params)
    write_atomic(args.params_out, text)
    write_atomic(args.master_out, ibe.master_to_text(master))
    print(f"p: {params.p.bit_length()} bits, q: {params.q.bit_length()} bits, n: {params.n}")
    print(f"fingerprint: {params.fingerprint()}")
    return EXIT_OK


def cmd_extract(args) -> int:
    if not args.id:
        raise UsageError("--id must be non-empty")
    params = _load_params(args.params)
    master = ibe.master_from_text(_read_text(args.master))
    keys = ibe.extract(params, master, args.id)
    if not ibe.verify_key(params, keys):
        print("verify: FAILED", file=sys.stderr)
        raise CryptoFailure("extracted key fails e(Pr, P) = e(Pu, Pu_PKG)")
    write_atomic(args.out, ibe.keys_to_text(keys))
    print(f"id: {args.id} (hash counter {keys.counter})")
    print("verify: OK")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    params = _load_params(args.params)
    if args.key:
        recipient = ibe.keys_from_text(_read_text(args.key), params).public_only()
    else:
        if not args.id:
            raise UsageError("--id must be non-empty")
        recipient = ibe.derive_public_key(params, args.id)
    data = Path(args.input).read_bytes()
    rng = _rng(args.seed, "encrypt")
    if args.hybrid:
        body = ibe.hybrid_encrypt(params, recipient, data, rng).to_bytes()
        mode = MODE_HYBRID
    else:
        try:
            body = ibe.encrypt_message(params, recipient, data, rng).to_bytes()
        except MessageLengthError:
            room = params.n_bytes - ibe.LENGTH_PREFIX
            raise UsageError(f"input is {len(data)} bytes but direct mode carries at most {room}; "
                             "pass --hybrid") from None
        mode = MODE_DIRECT
    write_atomic(args.output, pack_ciphertext(mode, recipient.identity, body))
    print(f"encrypted {len(data)} bytes for {recipient.identity.decode('utf-8', 'replace')} "
          f"({'hybrid' if args.hybrid else 'direct'})")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    params = _load_params(args.params)
    keys = ibe.keys_from_text(_read_text(args.key), params)
    if not keys.has_private:
        raise UsageError("key file holds no private key")
    mode, identity, body = unpack_ciphertext(Path(args.input).read_bytes())
    if identity != keys.identity:
        raise CryptoFailure("key identity does not match the ciphertext recipient")
    if not ibe.verify_key(params, keys):
        raise CryptoFailure("private key fails the pairing check against these parameters")
    if mode == MODE_HYBRID:
        plain = ibe.hybrid_decrypt(params, keys, ibe.HybridCiphertext.from_bytes(body, params))
    else:
        c = ibe.Ciphertext.from_bytes(body, params)
        try:
            plain = ibe.decrypt_message(params, keys, c)
        except (DecodeError, PointError) as exc:
            raise CryptoFailure(f"decryption failed: {exc}") from exc
    write_atomic(args.output, plain)
    print(f"decrypted {len(plain)} bytes")
    return EXIT_OK


def cmd_demo(args) -> int:
    params = _load_params(args.params)
    master = ibe.master_from_text(_read_text(args.master))
    result = run_demo(params, master, args.id_a, args.id_b, _rng(args.seed, "demo"),
                      bulk_size=args.bulk_bytes)
    for line in result.summary:
        print(line)
    kinds = " ".join(f"{t:#04x}" for t in result.transcript.frame_types())
    print(f"transcript: {len(result.transcript)} frames [{kinds}]")
    if args.transcript:
        t = result.transcript
        write_atomic(args.transcript, t.export_structured() if args.transcript_format == "json" else t.export_lines())
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.iters < MIN_ITERS:
        raise UsageError(f"--iters must be at least {MIN_ITERS}")
    if args.pbits < 20:
        raise UsageError("--pbits must be at least 20")
    modes = MODES if args.mode == "all" else (args.mode,)
    params = master = None
    if args.params:
        params = _load_params(args.params)
        if args.master:
            master = ibe.master_from_text(_read_text(args.master))
    report = run_bench(args.pbits, args.iters, _rng(args.seed, "bench"), modes=modes,
                       include_ibe=not args.no_ibe, params=params, master=master)
    print(report.render())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ibepair", description="Identity-based encryption over a Tate pairing.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-params", help="generate system parameters and a master key")
    p.add_argument("--qbits", type=int, default=PRODUCTION_QBITS)
    p.add_argument("--pbits", type=int, default=PRODUCTION_PBITS)
    p.add_argument("--seed", type=_seed, help="hex seed for a reproducible run")
    p.add_argument("--allow-toy", action="store_true", help="permit sizes below 160/512 bits")
    p.add_argument("--params-out", required=True)
    p.add_argument("--master-out", required=True)
    p.set_defaults(func=cmd_gen_params)

    p = sub.add_parser("extract", help="derive and verify the key pair for an identity")
    p.add_argument("--params", required=True)
    p.add_argument("--master", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("encrypt", help="encrypt a file to an identity")
    p.add_argument("--params", required=True)
    who = p.add_mutually_exclusive_group(required=True)
    who.add_argument("--id")
    who.add_argument("--key", help="key file of the recipient (only the public part is used)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--hybrid", action="store_true", help="CEK envelope for inputs of any size")
    p.add_argument("--seed", type=_seed)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a file with a private key file")
    p.add_argument("--params", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("demo", help="run PKG and two simulated devices end to end")
    p.add_argument("--params", required=True)
    p.add_argument("--master", required=True)
    p.add_argument("--id-a", default="+15551230001")
    p.add_argument("--id-b", default="+15551230002")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--transcript")
    p.add_argument("--transcript-format", choices=("lines", "json"), default="lines")
    p.add_argument("--bulk-bytes", type=int, default=64 * 1024)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("bench", help="time affine, projective and precomputed pairings")
    p.add_argument("--pbits", type=int, default=PRODUCTION_PBITS)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--mode", choices=MODES + ("all",), default="all")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--params", help="benchmark existing parameters instead of generating")
    p.add_argument("--master")
    p.add_argument("--no-ibe", action="store_true", help="skip encrypt/decrypt timings")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ibepair {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DecodeError, ParameterError, PointError, SearchBudgetExceeded) as exc:
        print(f"ibepair {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DemoFailure as exc:
        print(f"ibepair demo: {exc.phase} phase failed: {exc.__cause__}", file=sys.stderr)
        return EXIT_CRYPTO
    except (CryptoFailure, AuthenticationError, KeyVerificationError, CorrectnessGateFailed) as exc:
        print(f"ibepair {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_CRYPTO
    except IbePairError as exc:
        print(f"ibepair {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO


if __name__ == "__main__":
    sys.exit(main())
