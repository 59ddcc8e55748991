"""Boneh-Franklin BasicIdent identity-based encryption, plus a hybrid envelope.

BasicIdent is only CPA secure. The hybrid mode adds an HMAC over the bulk
ciphertext, which protects that payload's integrity, but it does not make the
IBE layer itself CCA secure (no Fujisaki-Okamoto transform is applied).

A compromised PKG master key exposes every message ever sent under its
parameters.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .curve import (
    AffinePoint,
    CurveParams,
    is_on_curve,
    map_to_point,
    mul,
    point_byte_len,
    point_from_bytes,
    point_to_bytes,
    random_generator,
)
from .entropy import EntropySource, random_range
from .errors import (
    AuthenticationError,
    DecodeError,
    DegenerateHashError,
    MessageLengthError,
    ParameterError,
    PointError,
    SearchBudgetExceeded,
)
from .field import FpElement, PrimeField, gen_solinas_prime, gen_system_prime
from .pairing import GtElement, PairingContext, PrecomputedPairing, apply_precomputed, precompute
from .symmetric import NONCE_LEN, TAG_LEN, derive_keys, seal, unseal

DEFAULT_N = 256
HASH_RETRY_LIMIT = 256
CEK_LEN = 32
LENGTH_PREFIX = 2

PARAMS_HEADER = "ibepair-params v1"
MASTER_HEADER = "ibepair-master v1"
KEY_HEADER = "ibepair-key v1"


@dataclass(frozen=True)
class Profile:
    bits_q: int = 160
    bits_p: int = 512
    n: int = DEFAULT_N


DEFAULT_PROFILE = Profile()


def _check_n(n: int):
    if n % 8 or not 8 <= n <= 256:
        raise ParameterError("mask length n must be a multiple of 8 between 8 and 256")


@dataclass(frozen=True)
class SystemParams:
    """Public parameters {p, q, n, P, Pu_PKG, H1, H2}.

    H1 and H2 are fixed to the SHA-256 constructions in this module; the
    file format version pins them.
    """

    p: int
    q: int
    n: int
    P: AffinePoint
    pu_pkg: AffinePoint

    @cached_property
    def curve(self) -> CurveParams:
        return CurveParams(self.p, self.q)

    @property
    def fp(self) -> PrimeField:
        return self.curve.fp

    @cached_property
    def pairing(self) -> PairingContext:
        return PairingContext(self.curve)

    @cached_property
    def pkg_table(self) -> PrecomputedPairing:
        """Miller lines for Pu_PKG; g_ID = e(Pu_PKG, Pu_ID) by symmetry."""
        return precompute(self.pu_pkg, self.pairing)

    @property
    def n_bytes(self) -> int:
        return self.n // 8

    def validate(self):
        """Check every structural invariant; raises :class:`ParameterError`."""
        _check_n(self.n)
        self.curve.validate()
        for name, pt in (("P", self.P), ("Pu_PKG", self.pu_pkg)):
            if pt.is_infinity:
                raise ParameterError(f"{name} is the point at infinity")
            if pt.x.field.p != self.p or not is_on_curve(pt):
                raise ParameterError(f"{name} is not on the curve")
            if not mul(self.q, pt).is_infinity:
                raise ParameterError(f"{name} does not have order q")

    def fingerprint(self) -> str:
        return hashlib.sha256(params_to_text(self).encode()).hexdigest()


@dataclass(frozen=True)
class MasterKey:
    s: int

    def __repr__(self):
        return "MasterKey(s=<hidden>)"


@dataclass(frozen=True)
class IdentityKeys:
    """An identity with its public point and, once extracted, its private point."""

    identity: bytes
    counter: int
    public: AffinePoint
    private: AffinePoint | None = None

    @property
    def has_private(self) -> bool:
        return self.private is not None

    def public_only(self) -> "IdentityKeys":
        return IdentityKeys(self.identity, self.counter, self.public)

    def __repr__(self):
        shown = self.identity.decode("utf-8", "replace")
        return f"IdentityKeys({shown!r}, counter={self.counter}, private={'yes' if self.has_private else 'no'})"


@dataclass(frozen=True)
class Ciphertext:
    U: AffinePoint
    V: bytes

    def to_bytes(self) -> bytes:
        return point_to_bytes(self.U) + self.V

    @classmethod
    def from_bytes(cls, data: bytes, params: SystemParams) -> "Ciphertext":
        plen = point_byte_len(params.fp)
        if len(data) != plen + params.n_bytes:
            raise DecodeError(f"ciphertext must be {plen + params.n_bytes} bytes, got {len(data)}")
        try:
            U = point_from_bytes(data[:plen], params.fp)
        except PointError as exc:
            raise DecodeError(f"ciphertext point: {exc}", offset=0) from exc
        return cls(U, data[plen:])

    @staticmethod
    def byte_len(params: SystemParams) -> int:
        return point_byte_len(params.fp) + params.n_bytes


@dataclass(frozen=True)
class HybridCiphertext:
    cek_ct: Ciphertext
    nonce: bytes
    body: bytes
    tag: bytes

    def to_bytes(self) -> bytes:
        return self.cek_ct.to_bytes() + self.nonce + self.tag + self.body

    @classmethod
    def from_bytes(cls, data: bytes, params: SystemParams) -> "HybridCiphertext":
        clen = Ciphertext.byte_len(params)
        if len(data) < clen + NONCE_LEN + TAG_LEN:
            raise DecodeError("hybrid ciphertext is truncated", offset=len(data))
        cek_ct = Ciphertext.from_bytes(data[:clen], params)
        nonce = data[clen:clen + NONCE_LEN]
        tag = data[clen + NONCE_LEN:clen + NONCE_LEN + TAG_LEN]
        return cls(cek_ct, nonce, data[clen + NONCE_LEN + TAG_LEN:], tag)


def _as_identity(identity) -> bytes:
    if isinstance(identity, str):
        identity = identity.encode("utf-8")
    if not identity:
        raise ValueError("identity must be non-empty")
    return bytes(identity)


def h1(g: GtElement, n: int = DEFAULT_N) -> bytes:
    """H1: F_p^2 -> {0,1}^n."""
    _check_n(n)
    return hashlib.sha256(b"BF-H1" + g.to_bytes()).digest()[: n // 8]


def h2(identity: bytes, counter: int, fp: PrimeField) -> FpElement:
    """H2: {0,1}* -> F_p, expanded to |p| + 128 bits before reduction."""
    seed = b"BF-H2" + counter.to_bytes(4, "big") + identity
    need = (fp.p.bit_length() + 128 + 7) // 8
    out = b""
    block = 0
    while len(out) < need:
        out += hashlib.sha256(block.to_bytes(4, "big") + seed).digest()
        block += 1
    return fp(int.from_bytes(out[:need], "big"))


def setup(profile: Profile = DEFAULT_PROFILE, rng: EntropySource | None = None) -> tuple[SystemParams, MasterKey]:
    """Generate a fresh PKG: Solinas q, system prime p, generator P, master s."""
    if rng is None:
        from .entropy import SystemEntropy
        rng = SystemEntropy()
    _check_n(profile.n)
    q = gen_solinas_prime(profile.bits_q, rng)
    p = gen_system_prime(q, profile.bits_p, rng)
    curve = CurveParams(p, q.q)
    P = random_generator(curve, rng)
    s = random_range(rng, 1, q.q - 1)
    return SystemParams(p, q.q, profile.n, P, mul(s, P)), MasterKey(s)


def setup_from(p: int, q: int, P: AffinePoint, s: int, n: int = DEFAULT_N) -> tuple[SystemParams, MasterKey]:
    """Build a PKG from hand-chosen values (toy curves, test vectors)."""
    if not 1 <= s < q:
        raise ParameterError("master key must lie in [1, q-1]")
    params = SystemParams(p, q, n, P, mul(s, P))
    params.validate()
    return params, MasterKey(s)


def derive_public_key(params: SystemParams, identity) -> IdentityKeys:
    """Pu_ID = map_to_point(H2(counter, ID)) for the first counter that works."""
    identity = _as_identity(identity)
    for counter in range(HASH_RETRY_LIMIT):
        try:
            Q = map_to_point(h2(identity, counter, params.fp), params.curve)
        except DegenerateHashError:
            continue
        return IdentityKeys(identity, counter, Q)
    raise SearchBudgetExceeded("hash-to-point", HASH_RETRY_LIMIT, HASH_RETRY_LIMIT)


def extract(params: SystemParams, master: MasterKey, identity) -> IdentityKeys:
    """PKG side: Pr_ID = s * Pu_ID."""
    keys = derive_public_key(params, identity)
    return IdentityKeys(keys.identity, keys.counter, keys.public, mul(master.s, keys.public))


def verify_key(params: SystemParams, keys: IdentityKeys) -> bool:
    """e(Pr_ID, P) == e(Pu_ID, Pu_PKG); needs no secret."""
    if not keys.has_private or not is_on_curve(keys.private) or keys.private.is_infinity:
        return False
    expected = derive_public_key(params, keys.identity)
    if expected.public != keys.public:
        return False
    ctx = params.pairing
    lhs = apply_precomputed(_table(keys.private, params), params.P, ctx)
    return lhs == apply_precomputed(params.pkg_table, keys.public, ctx)


@lru_cache(maxsize=128)
def _table(point: AffinePoint, params: SystemParams) -> PrecomputedPairing:
    return precompute(point, params.pairing)


@lru_cache(maxsize=128)
def _gid(public: AffinePoint, params: SystemParams) -> GtElement:
    return apply_precomputed(params.pkg_table, public, params.pairing)


def _recipient(params, recipient) -> IdentityKeys:
    if isinstance(recipient, IdentityKeys):
        return recipient
    return derive_public_key(params, recipient)


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def encrypt(params: SystemParams, recipient, m: bytes, rng: EntropySource, *,
            r: int | None = None) -> Ciphertext:
    """C = (rP, m XOR H1(g_ID^r)) with g_ID = e(Pu_ID, Pu_PKG).

    ``recipient`` is an identity (str/bytes) or its :class:`IdentityKeys`.
    ``r`` overrides the ephemeral scalar; it exists for test vectors only.
    """
    if len(m) != params.n_bytes:
        raise MessageLengthError(f"BasicIdent encrypts exactly {params.n_bytes} bytes, got {len(m)}")
    keys = _recipient(params, recipient)
    if r is None:
        r = random_range(rng, 1, params.q - 1)
    return Ciphertext(mul(r, params.P), _xor(m, h1(_gid(keys.public, params) ** r, params.n)))


def decrypt(params: SystemParams, keys: IdentityKeys, c: Ciphertext) -> bytes:
    """m = V XOR H1(e(Pr_ID, U))."""
    if not keys.has_private:
        raise ValueError(f"no private key for {keys.identity!r}")
    if c.U.is_infinity or not is_on_curve(c.U):
        raise PointError("ciphertext point U is not a valid curve point")
    if len(c.V) != params.n_bytes:
        raise MessageLengthError("ciphertext mask has the wrong length")
    g = apply_precomputed(_table(keys.private, params), c.U, params.pairing)
    return _xor(c.V, h1(g, params.n))


def frame_message(msg: bytes, n_bytes: int) -> bytes:
    """2-byte big-endian length, message, zero padding to one block."""
    room = n_bytes - LENGTH_PREFIX
    if len(msg) > room:
        raise MessageLengthError(f"direct mode carries at most {room} bytes; use hybrid mode for {len(msg)}")
    return len(msg).to_bytes(LENGTH_PREFIX, "big") + msg + bytes(room - len(msg))


def unframe_message(block: bytes) -> bytes:
    length = int.from_bytes(block[:LENGTH_PREFIX], "big")
    if length > len(block) - LENGTH_PREFIX:
        raise DecodeError("framed length exceeds the block", offset=0)
    return block[LENGTH_PREFIX:LENGTH_PREFIX + length]


def encrypt_message(params: SystemParams, recipient, msg: bytes, rng: EntropySource) -> Ciphertext:
    """Direct mode for short messages (at most n/8 - 2 bytes)."""
    return encrypt(params, recipient, frame_message(msg, params.n_bytes), rng)


def decrypt_message(params: SystemParams, keys: IdentityKeys, c: Ciphertext) -> bytes:
    return unframe_message(decrypt(params, keys, c))


def hybrid_encrypt(params: SystemParams, recipient, payload: bytes, rng: EntropySource) -> HybridCiphertext:
    """Encrypt payload under a fresh CEK and IBE-encrypt the CEK to the recipient."""
    if params.n_bytes != CEK_LEN:
        raise ParameterError("hybrid mode needs n = 256 to carry a 256-bit CEK")
    cek = rng.read(CEK_LEN)
    cek_ct = encrypt(params, recipient, cek, rng)
    nonce = rng.read(NONCE_LEN)
    enc_key, mac_key = derive_keys(cek, b"BF-CEK")
    body, tag = seal(enc_key, mac_key, nonce, payload)
    return HybridCiphertext(cek_ct, nonce, body, tag)


def hybrid_decrypt(params: SystemParams, keys: IdentityKeys, hc: HybridCiphertext) -> bytes:
    """Recover the CEK, authenticate, then decrypt.

    Every failure (mangled CEK ciphertext, wrong key, bad tag) surfaces as
    :class:`AuthenticationError` without releasing plaintext.
    """
    if params.n_bytes != CEK_LEN:
        raise ParameterError("hybrid mode needs n = 256 to carry a 256-bit CEK")
    try:
        cek = decrypt(params, keys, hc.cek_ct)
    except (PointError, MessageLengthError) as exc:
        raise AuthenticationError(f"CEK ciphertext rejected: {exc}") from exc
    enc_key, mac_key = derive_keys(cek, b"BF-CEK")
    return unseal(enc_key, mac_key, hc.nonce, hc.body, hc.tag)


# --- text file formats ------------------------------------------------------

_HEX = re.compile(r"[0-9a-f]+\Z")


def _int_hex(v: int) -> str:
    return format(v, "x")


def params_to_text(params: SystemParams) -> str:
    lines = [
        PARAMS_HEADER,
        f"p = {_int_hex(params.p)}",
        f"q = {_int_hex(params.q)}",
        f"n = {_int_hex(params.n)}",
        f"P = {point_to_bytes(params.P).hex()}",
        f"pupkg = {point_to_bytes(params.pu_pkg).hex()}",
    ]
    return "\n".join(lines) + "\n"


def master_to_text(master: MasterKey) -> str:
    return f"{MASTER_HEADER}\ns = {_int_hex(master.s)}\n"


def keys_to_text(keys: IdentityKeys) -> str:
    lines = [
        KEY_HEADER,
        f"id = {keys.identity.hex()}",
        f"counter = {_int_hex(keys.counter)}",
        f"pu = {point_to_bytes(keys.public).hex()}",
    ]
    if keys.private is not None:
        lines.append(f"pr = {point_to_bytes(keys.private).hex()}")
    return "\n".join(lines) + "\n"


def _parse_fields(text: str, header: str, names: list[str], optional: tuple[str, ...] = ()) -> dict[str, tuple[str, int]]:
    """Parse ``name = hex`` lines in fixed order; returns name -> (value, line number)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != header:
        raise DecodeError(f"expected header {header!r}", line=1)
    body = lines[1:]
    out = {}
    expected = list(names) + list(optional)
    for idx, line in enumerate(body, start=2):
        if idx - 2 >= len(expected):
            raise DecodeError("unexpected extra line", line=idx)
        want = expected[idx - 2]
        name, sep, value = line.partition(" = ")
        if not sep:
            raise DecodeError("expected 'name = value'", line=idx)
        if name != want:
            raise DecodeError(f"expected field {want!r}, found {name!r}", line=idx)
        if not _HEX.match(value):
            raise DecodeError(f"field {name!r} is not lowercase hex", line=idx)
        out[name] = (value, idx)
    missing = [n for n in names if n not in out]
    if missing:
        raise DecodeError(f"missing field {missing[0]!r}", line=len(lines) + 1)
    return out


def _parse_int(value: str, line: int) -> int:
    if len(value) > 1 and value[0] == "0":
        raise DecodeError("integer has leading zeros", line=line)
    return int(value, 16)


def _parse_point(value: str, line: int, fp: PrimeField) -> AffinePoint:
    if len(value) % 2:
        raise DecodeError("odd-length hex", line=line)
    try:
        return point_from_bytes(bytes.fromhex(value), fp)
    except PointError as exc:
        raise DecodeError(str(exc), line=line) from exc


def params_from_text(text: str, validate: bool = True) -> SystemParams:
    f = _parse_fields(text, PARAMS_HEADER, ["p", "q", "n", "P", "pupkg"])
    p = _parse_int(*f["p"])
    q = _parse_int(*f["q"])
    n = _parse_int(*f["n"])
    try:
        curve = CurveParams(p, q)
    except ParameterError as exc:
        raise DecodeError(str(exc), line=f["q"][1]) from exc
    params = SystemParams(p, q, n, _parse_point(*f["P"], curve.fp), _parse_point(*f["pupkg"], curve.fp))
    if validate:
        params.validate()
    return params


def master_from_text(text: str) -> MasterKey:
    f = _parse_fields(text, MASTER_HEADER, ["s"])
    return MasterKey(_parse_int(*f["s"]))


def keys_from_text(text: str, params: SystemParams) -> IdentityKeys:
    f = _parse_fields(text, KEY_HEADER, ["id", "counter", "pu"], optional=("pr",))
    id_hex, id_line = f["id"]
    if len(id_hex) % 2:
        raise DecodeError("odd-length hex", line=id_line)
    private = _parse_point(*f["pr"], params.fp) if "pr" in f else None
    return IdentityKeys(
        bytes.fromhex(id_hex),
        _parse_int(*f["counter"]),
        _parse_point(*f["pu"], params.fp),
        private,
    )
