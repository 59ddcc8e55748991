"""AES-256-CTR with an HMAC-SHA256 tag (encrypt-then-MAC).

Used for the hybrid CEK envelope and for bulk session traffic.
"""

from __future__ import annotations

import hashlib
import hmac

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import AuthenticationError

NONCE_LEN = 16
TAG_LEN = 32


def tagged_hash(tag: bytes, *parts: bytes) -> bytes:
    """SHA-256 over a domain tag and length-prefixed parts."""
    h = hashlib.sha256()
    h.update(len(tag).to_bytes(2, "big") + tag)
    for part in parts:
        h.update(len(part).to_bytes(4, "big") + part)
    return h.digest()


def derive_keys(secret: bytes, label: bytes = b"") -> tuple[bytes, bytes]:
    """(encryption key, MAC key) from a 32-byte secret."""
    return tagged_hash(b"ibepair-enc", secret, label), tagged_hash(b"ibepair-mac", secret, label)


def _ctr(key: bytes, nonce: bytes, data: bytes) -> bytes:
    ctx = Cipher(algorithms.AES(key), modes.CTR(nonce)).encryptor()
    return ctx.update(data) + ctx.finalize()


def seal(enc_key: bytes, mac_key: bytes, nonce: bytes, payload: bytes) -> tuple[bytes, bytes]:
    if len(nonce) != NONCE_LEN:
        raise ValueError(f"nonce must be {NONCE_LEN} bytes")
    body = _ctr(enc_key, nonce, payload)
    tag = hmac.new(mac_key, nonce + body, hashlib.sha256).digest()
    return body, tag


def unseal(enc_key: bytes, mac_key: bytes, nonce: bytes, body: bytes, tag: bytes) -> bytes:
    """Verify the tag, then decrypt. Nothing is decrypted on failure."""
    expected = hmac.new(mac_key, nonce + body, hashlib.sha256).digest()
    if not hmac.compare_digest(expected, tag):
        raise AuthenticationError("authentication tag mismatch")
    return _ctr(enc_key, nonce, body)
