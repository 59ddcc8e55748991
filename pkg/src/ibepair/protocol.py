"""Two-phase device protocol over simulated transports.

Phase one (pairing) exchanges :class:`PairingRecord` TLVs over an
out-of-band channel standing in for an NFC tap. Phase two (communication)
runs over a separate link standing in for Bluetooth or Wi-Fi and offers:

* direct messages: one BasicIdent block addressed to the peer identity,
* session establishment: ephemeral Diffie-Hellman whose messages travel
  inside hybrid IBE envelopes, finished by a two-way key confirmation,
* bulk transfer: AES-CTR + HMAC under keys derived from the session key.

Every frame that crosses a simulated channel is appended to a shared
:class:`Transcript`, so tests can play eavesdropper. The PKG link is
assumed authentic and private; devices still check returned keys with the
pairing equation.

Wire frame: 4-byte big-endian length (= 1 + len(payload)), 1-byte type,
payload.
"""

from __future__ import annotations

import enum
import hashlib
import hmac
import json
import threading
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable

from . import ibe
from .curve import AffinePoint, mul, point_from_bytes, point_to_bytes
from .entropy import EntropySource, random_range
from .errors import (
    AuthenticationError,
    DecodeError,
    IbePairError,
    KeyVerificationError,
    MessageLengthError,
    PointError,
    ProtocolError,
    StateError,
)
from .ibe import Ciphertext, HybridCiphertext, IdentityKeys, MasterKey, SystemParams
from .symmetric import NONCE_LEN, TAG_LEN, derive_keys, seal, tagged_hash, unseal

DIRECT_MAX = 30


class FrameType(enum.IntEnum):
    EXTRACT_REQ = 0x01
    EXTRACT_RESP = 0x02
    PAIR_RECORD = 0x10
    DIRECT_MSG = 0x20
    SESSION_INIT = 0x21
    SESSION_CONFIRM = 0x22
    BULK_MSG = 0x30
    ERROR = 0x7F


class ErrorCode(enum.IntEnum):
    BAD_REQUEST = 1
    UNSUPPORTED = 2
    INTERNAL = 3


@dataclass(frozen=True)
class WireFrame:
    type: FrameType
    payload: bytes

    def encode(self) -> bytes:
        return (len(self.payload) + 1).to_bytes(4, "big") + bytes([self.type]) + self.payload

    @classmethod
    def decode(cls, data: bytes) -> "WireFrame":
        if len(data) < 5:
            raise ProtocolError(f"frame truncated: {len(data)} bytes, header needs 5")
        length = int.from_bytes(data[:4], "big")
        if length != len(data) - 4:
            raise ProtocolError(f"frame length field says {length}, {len(data) - 4} bytes follow")
        try:
            ftype = FrameType(data[4])
        except ValueError:
            raise ProtocolError(f"unknown frame type {data[4]:#04x}") from None
        return cls(ftype, bytes(data[5:]))

    @classmethod
    def error(cls, code: ErrorCode, detail: str) -> "WireFrame":
        return cls(FrameType.ERROR, bytes([code]) + detail.encode("utf-8"))


def _expect(frame: WireFrame, ftype: FrameType) -> bytes:
    if frame.type == FrameType.ERROR:
        code = frame.payload[0] if frame.payload else 0
        detail = frame.payload[1:].decode("utf-8", "replace")
        raise ProtocolError(f"peer reported error {code}: {detail}")
    if frame.type != ftype:
        raise ProtocolError(f"expected {ftype.name}, got {frame.type.name}")
    return frame.payload


# --- pairing records ----------------------------------------------------------

class Capability(enum.IntFlag):
    BLUETOOTH = 0x01
    WIFI = 0x02
    DIRECT = 0x04
    SESSION = 0x08


TAG_NAME = 0x01
TAG_ADDRESS = 0x02
TAG_IDENTITY = 0x03
TAG_CAPABILITIES = 0x04


@dataclass(frozen=True)
class PairingRecord:
    """What devices swap on tap: name, link address, identity, capability flags."""

    device_name: str
    link_address: bytes
    identity: str
    capabilities: int = 0

    def __post_init__(self):
        if len(self.link_address) != 6:
            raise ValueError("link address must be 6 bytes")
        if not self.identity:
            raise ValueError("identity must be non-empty")
        if not 0 <= self.capabilities <= 0xFFFF:
            raise ValueError("capabilities must fit in 16 bits")


def _tlv(tag: int, value: bytes) -> bytes:
    if len(value) > 0xFFFF:
        raise ValueError(f"TLV value for tag {tag:#04x} is too long")
    return bytes([tag]) + len(value).to_bytes(2, "big") + value


def encode_pairing_record(r: PairingRecord) -> bytes:
    return (
        _tlv(TAG_NAME, r.device_name.encode("utf-8"))
        + _tlv(TAG_ADDRESS, r.link_address)
        + _tlv(TAG_IDENTITY, r.identity.encode("utf-8"))
        + _tlv(TAG_CAPABILITIES, r.capabilities.to_bytes(2, "big"))
    )


def decode_pairing_record(data: bytes) -> PairingRecord:
    """Parse the TLV layout; tags must appear exactly once, in ascending order."""
    fields = {}
    offsets = {}
    pos = 0
    last = 0
    while pos < len(data):
        if len(data) - pos < 3:
            raise DecodeError("truncated TLV header", offset=pos)
        tag = data[pos]
        length = int.from_bytes(data[pos + 1:pos + 3], "big")
        if tag not in (TAG_NAME, TAG_ADDRESS, TAG_IDENTITY, TAG_CAPABILITIES):
            raise DecodeError(f"unknown tag {tag:#04x}", offset=pos)
        if tag == last:
            raise DecodeError(f"duplicate tag {tag:#04x}", offset=pos)
        if tag < last:
            raise DecodeError(f"tag {tag:#04x} out of order", offset=pos)
        if pos + 3 + length > len(data):
            raise DecodeError(f"TLV value for tag {tag:#04x} truncated", offset=pos)
        fields[tag] = data[pos + 3:pos + 3 + length]
        offsets[tag] = pos
        last = tag
        pos += 3 + length
    for tag in (TAG_NAME, TAG_ADDRESS, TAG_IDENTITY, TAG_CAPABILITIES):
        if tag not in fields:
            raise DecodeError(f"missing tag {tag:#04x}", offset=len(data))
    try:
        name = fields[TAG_NAME].decode("utf-8")
    except UnicodeDecodeError:
        raise DecodeError("device name is not UTF-8", offset=offsets[TAG_NAME]) from None
    try:
        identity = fields[TAG_IDENTITY].decode("utf-8")
    except UnicodeDecodeError:
        raise DecodeError("identity is not UTF-8", offset=offsets[TAG_IDENTITY]) from None
    if not identity:
        raise DecodeError("identity is empty", offset=offsets[TAG_IDENTITY])
    if len(fields[TAG_ADDRESS]) != 6:
        raise DecodeError("link address must be 6 bytes", offset=offsets[TAG_ADDRESS])
    if len(fields[TAG_CAPABILITIES]) != 2:
        raise DecodeError("capabilities must be 2 bytes", offset=offsets[TAG_CAPABILITIES])
    return PairingRecord(name, bytes(fields[TAG_ADDRESS]), identity,
                         int.from_bytes(fields[TAG_CAPABILITIES], "big"))


# --- transcript and channels --------------------------------------------------

@dataclass(frozen=True)
class TranscriptEntry:
    counter: int
    channel: str
    direction: str
    frame: bytes


class Transcript:
    """Append-only log of every frame on every simulated channel."""

    def __init__(self):
        self._entries: list[TranscriptEntry] = []
        self._lock = threading.Lock()

    def record(self, channel: str, direction: str, frame: bytes):
        with self._lock:
            self._entries.append(TranscriptEntry(len(self._entries), channel, direction, bytes(frame)))

    @property
    def entries(self) -> tuple[TranscriptEntry, ...]:
        return tuple(self._entries)

    def __len__(self):
        return len(self._entries)

    def frame_types(self) -> list[int | None]:
        return [e.frame[4] if len(e.frame) >= 5 else None for e in self._entries]

    def export_lines(self) -> str:
        return "".join(f"{e.direction},{e.frame.hex()}\n" for e in self._entries)

    def export_structured(self) -> str:
        rows = []
        for e in self._entries:
            ftype = e.frame[4] if len(e.frame) >= 5 else None
            try:
                type_name = FrameType(ftype).name
            except (ValueError, TypeError):
                type_name = None
            rows.append(json.dumps({
                "counter": e.counter,
                "channel": e.channel,
                "direction": e.direction,
                "type": type_name,
                "frame": e.frame.hex(),
            }, sort_keys=True))
        return "".join(r + "\n" for r in rows)


Tap = Callable[[str, str, bytes], "bytes | None"]


class Link:
    """In-memory, reliable byte channel between named endpoints.

    ``tap`` sees every frame in flight as ``tap(src, dst, data)`` and returns
    the bytes to deliver (possibly modified) or None to drop the frame.
    """

    def __init__(self, name: str, transcript: Transcript, tap: Tap | None = None):
        self.name = name
        self.transcript = transcript
        self.tap = tap
        self._queues: dict[str, deque] = defaultdict(deque)

    def send(self, src: str, dst: str, data: bytes):
        if self.tap is not None:
            data = self.tap(src, dst, data)
            if data is None:
                return
        self.transcript.record(self.name, f"{src}->{dst}", data)
        self._queues[dst].append(bytes(data))

    def inject(self, dst: str, data: bytes):
        """Deliver bytes as an active attacker would (recorded as such)."""
        self.transcript.record(self.name, f"?->{dst}", data)
        self._queues[dst].append(bytes(data))

    def recv(self, dst: str) -> bytes:
        q = self._queues[dst]
        if not q:
            raise ProtocolError(f"nothing waiting for {dst} on {self.name}")
        return q.popleft()

    def pending(self, dst: str) -> int:
        return len(self._queues[dst])


class PKGServer:
    """Answers EXTRACT_REQ frames. Serves one request at a time."""

    def __init__(self, params: SystemParams, master: MasterKey):
        self.params = params
        self._master = master
        self._lock = threading.Lock()

    def handle(self, data: bytes) -> bytes:
        with self._lock:
            try:
                frame = WireFrame.decode(data)
            except ProtocolError as exc:
                return WireFrame.error(ErrorCode.BAD_REQUEST, str(exc)).encode()
            if frame.type != FrameType.EXTRACT_REQ:
                return WireFrame.error(ErrorCode.UNSUPPORTED, f"cannot serve {frame.type.name}").encode()
            try:
                identity = frame.payload.decode("utf-8")
                if not identity:
                    raise ValueError("empty identity")
            except ValueError as exc:
                return WireFrame.error(ErrorCode.BAD_REQUEST, str(exc)).encode()
            keys = ibe.extract(self.params, self._master, identity)
            return WireFrame(FrameType.EXTRACT_RESP, point_to_bytes(keys.private)).encode()


class PKGChannel:
    """The device-to-PKG link. Authenticity and privacy are assumed."""

    assumed_secure = True

    def __init__(self, server, transcript: Transcript, name: str = "pkg", tap: Tap | None = None):
        self.server = server
        self.transcript = transcript
        self.name = name
        self.tap = tap

    def request(self, src: str, data: bytes) -> bytes:
        self.transcript.record(self.name, f"{src}->PKG", data)
        resp = self.server.handle(data)
        if self.tap is not None:
            resp = self.tap("PKG", src, resp)
        self.transcript.record(self.name, f"PKG->{src}", resp)
        return resp


# --- devices ------------------------------------------------------------------

class DeviceStatus(enum.Enum):
    UNPAIRED = "unpaired"
    PAIRED = "paired"
    SESSION_READY = "session_ready"


def gather_entropy(source: EntropySource, nbytes: int) -> bytes:
    if nbytes < 1:
        raise ValueError("nbytes must be at least 1")
    return source.read(nbytes)


@dataclass
class _Session:
    key: bytes
    send_keys: tuple[bytes, bytes]
    recv_keys: tuple[bytes, bytes]


@dataclass
class _PendingSession:
    role: str
    x: int
    X: AffinePoint
    nonce: bytes
    peer_nonce: bytes | None = None
    peer_X: AffinePoint | None = None
    key: bytes | None = None


@dataclass
class Device:
    """One simulated phone or laptop. Single-threaded actor."""

    name: str
    identity: str
    params: SystemParams
    link_address: bytes
    rng: EntropySource
    capabilities: int = Capability.BLUETOOTH | Capability.DIRECT | Capability.SESSION
    allow_repairing: bool = False
    status: DeviceStatus = DeviceStatus.UNPAIRED
    keys: IdentityKeys | None = None
    key_error: str | None = None
    peer: PairingRecord | None = None
    peer_keys: IdentityKeys | None = None
    link: Link | None = None
    _session: _Session | None = field(default=None, repr=False)
    _pending: _PendingSession | None = field(default=None, repr=False)

    def record(self) -> PairingRecord:
        return PairingRecord(self.name, self.link_address, self.identity, int(self.capabilities))

    @property
    def session_key(self) -> bytes | None:
        return self._session.key if self._session else None

    def _require(self, *allowed: DeviceStatus):
        if self.status not in allowed:
            names = ", ".join(s.name for s in allowed)
            raise StateError(f"{self.name} is {self.status.name}; operation needs {names}")

    def _require_private(self):
        if self.keys is None or not self.keys.has_private:
            raise StateError(f"{self.name} has no private key yet")

    def _send(self, ftype: FrameType, payload: bytes) -> WireFrame:
        frame = WireFrame(ftype, payload)
        self.link.send(self.name, self.peer.device_name, frame.encode())
        return frame

    def _recv(self, ftype: FrameType) -> bytes:
        return _expect(WireFrame.decode(self.link.recv(self.name)), ftype)

    # communication phase: direct

    def send_direct(self, msg: bytes) -> WireFrame:
        self._require(DeviceStatus.PAIRED, DeviceStatus.SESSION_READY)
        if len(msg) > DIRECT_MAX:
            raise MessageLengthError(f"direct messages carry at most {DIRECT_MAX} bytes; use bulk mode")
        c = ibe.encrypt_message(self.params, self.peer_keys, msg, self.rng)
        return self._send(FrameType.DIRECT_MSG, c.to_bytes())

    def recv_direct(self) -> bytes:
        self._require(DeviceStatus.PAIRED, DeviceStatus.SESSION_READY)
        self._require_private()
        payload = self._recv(FrameType.DIRECT_MSG)
        c = Ciphertext.from_bytes(payload, self.params)
        return ibe.decrypt_message(self.params, self.keys, c)

    # communication phase: session

    def _envelope(self, ftype: FrameType, body: bytes) -> WireFrame:
        hc = ibe.hybrid_encrypt(self.params, self.peer_keys, body, self.rng)
        return self._send(ftype, hc.to_bytes())

    def _open_envelope(self, ftype: FrameType) -> bytes:
        payload = self._recv(ftype)
        try:
            hc = HybridCiphertext.from_bytes(payload, self.params)
            return ibe.hybrid_decrypt(self.params, self.keys, hc)
        except (DecodeError, PointError, AuthenticationError) as exc:
            self._pending = None
            raise ProtocolError(f"session aborted: {exc}") from exc

    def _fresh_dh(self, role: str) -> _PendingSession:
        x = random_range(self.rng, 1, self.params.q - 1)
        return _PendingSession(role, x, mul(x, self.params.P), gather_entropy(self.rng, NONCE_LEN))

    def _check_peer_point(self, data: bytes) -> AffinePoint:
        try:
            Y = point_from_bytes(data, self.params.fp)
        except PointError as exc:
            self._pending = None
            raise ProtocolError(f"session aborted: {exc}") from exc
        if Y.is_infinity or not mul(self.params.q, Y).is_infinity:
            self._pending = None
            raise ProtocolError("session aborted: peer DH share is not in the order-q subgroup")
        return Y

    def _ids(self, role: str) -> tuple[bytes, bytes]:
        me, peer = self.identity.encode(), self.peer.identity.encode()
        return (me, peer) if role == "initiator" else (peer, me)

    def _derive(self, pend: _PendingSession) -> bytes:
        id_i, id_r = self._ids(pend.role)
        if pend.role == "initiator":
            n_i, n_r, X_i, X_r = pend.nonce, pend.peer_nonce, pend.X, pend.peer_X
        else:
            n_i, n_r, X_i, X_r = pend.peer_nonce, pend.nonce, pend.peer_X, pend.X
        shared = mul(pend.x, pend.peer_X)
        return tagged_hash(b"ibepair-session", point_to_bytes(shared), id_i, id_r, n_i, n_r,
                           point_to_bytes(X_i), point_to_bytes(X_r))

    def _confirm_tag(self, key: bytes, who: bytes) -> bytes:
        return hmac.new(tagged_hash(b"ibepair-confirm", key), who, hashlib.sha256).digest()

    def start_session(self) -> WireFrame:
        """Initiator: send SESSION_INIT = Enc_peer(nonce_i || X_i)."""
        self._require(DeviceStatus.PAIRED, DeviceStatus.SESSION_READY)
        self._require_private()
        self._pending = self._fresh_dh("initiator")
        return self._envelope(FrameType.SESSION_INIT, self._pending.nonce + point_to_bytes(self._pending.X))

    def accept_session(self) -> WireFrame:
        """Responder: answer SESSION_INIT with Enc_peer(nonce_i || nonce_r || X_r || mac_r)."""
        self._require(DeviceStatus.PAIRED, DeviceStatus.SESSION_READY)
        self._require_private()
        body = self._open_envelope(FrameType.SESSION_INIT)
        pend = self._fresh_dh("responder")
        pend.peer_nonce = body[:NONCE_LEN]
        if len(pend.peer_nonce) != NONCE_LEN:
            raise ProtocolError("session aborted: SESSION_INIT too short")
        pend.peer_X = self._check_peer_point(body[NONCE_LEN:])
        pend.key = self._derive(pend)
        self._pending = pend
        mac = self._confirm_tag(pend.key, b"responder")
        return self._envelope(FrameType.SESSION_CONFIRM,
                              pend.peer_nonce + pend.nonce + point_to_bytes(pend.X) + mac)

    def finish_session(self) -> WireFrame:
        """Initiator: check the echoed nonce and responder MAC, then confirm back."""
        pend = self._pending
        if pend is None or pend.role != "initiator":
            raise StateError(f"{self.name} has no session start in progress")
        body = self._open_envelope(FrameType.SESSION_CONFIRM)
        if len(body) < 2 * NONCE_LEN + 32 or body[:NONCE_LEN] != pend.nonce:
            self._pending = None
            raise ProtocolError("session aborted: confirmation does not echo our fresh nonce")
        pend.peer_nonce = body[NONCE_LEN:2 * NONCE_LEN]
        mac = body[-32:]
        pend.peer_X = self._check_peer_point(body[2 * NONCE_LEN:-32])
        pend.key = self._derive(pend)
        if not hmac.compare_digest(mac, self._confirm_tag(pend.key, b"responder")):
            self._pending = None
            raise ProtocolError("session aborted: responder confirmation MAC mismatch")
        frame = self._envelope(FrameType.SESSION_CONFIRM,
                               pend.peer_nonce + self._confirm_tag(pend.key, b"initiator"))
        self._activate(pend.key)
        return frame

    def complete_session(self):
        """Responder: check the initiator's confirmation over our fresh nonce."""
        pend = self._pending
        if pend is None or pend.role != "responder":
            raise StateError(f"{self.name} has no session acceptance in progress")
        body = self._open_envelope(FrameType.SESSION_CONFIRM)
        if len(body) != NONCE_LEN + 32 or body[:NONCE_LEN] != pend.nonce:
            self._pending = None
            raise ProtocolError("session aborted: confirmation does not echo our fresh nonce")
        if not hmac.compare_digest(body[NONCE_LEN:], self._confirm_tag(pend.key, b"initiator")):
            self._pending = None
            raise ProtocolError("session aborted: initiator confirmation MAC mismatch")
        self._activate(pend.key)

    def _activate(self, key: bytes):
        me, peer = self.identity.encode(), self.peer.identity.encode()
        self._session = _Session(key, derive_keys(key, b"bulk:" + me), derive_keys(key, b"bulk:" + peer))
        self._pending = None
        self.status = DeviceStatus.SESSION_READY

    # communication phase: bulk

    def send_bulk(self, payload: bytes) -> WireFrame:
        self._require(DeviceStatus.SESSION_READY)
        nonce = gather_entropy(self.rng, NONCE_LEN)
        body, tag = seal(*self._session.send_keys, nonce, payload)
        return self._send(FrameType.BULK_MSG, nonce + body + tag)

    def recv_bulk(self) -> bytes:
        self._require(DeviceStatus.SESSION_READY)
        payload = self._recv(FrameType.BULK_MSG)
        if len(payload) < NONCE_LEN + TAG_LEN:
            raise ProtocolError("bulk frame too short")
        nonce, body, tag = payload[:NONCE_LEN], payload[NONCE_LEN:-TAG_LEN], payload[-TAG_LEN:]
        return unseal(*self._session.recv_keys, nonce, body, tag)


def request_private_key(d: Device, pkg: PKGChannel) -> IdentityKeys:
    """Fetch Pr_ID from the PKG and accept it only if the pairing check passes."""
    req = WireFrame(FrameType.EXTRACT_REQ, d.identity.encode("utf-8")).encode()
    resp = WireFrame.decode(pkg.request(d.name, req))
    try:
        payload = _expect(resp, FrameType.EXTRACT_RESP)
        private = point_from_bytes(payload, d.params.fp)
    except (ProtocolError, PointError) as exc:
        d.key_error = str(exc)
        raise KeyVerificationError(f"{d.name}: bad key response: {exc}") from exc
    public = ibe.derive_public_key(d.params, d.identity)
    keys = IdentityKeys(public.identity, public.counter, public.public, private)
    if not ibe.verify_key(d.params, keys):
        d.key_error = "pairing check e(Pr, P) = e(Pu, Pu_PKG) failed"
        raise KeyVerificationError(f"{d.name}: PKG returned a key that fails the pairing check")
    d.keys = keys
    d.key_error = None
    return keys


def pair_devices(a: Device, b: Device, oob: Link, link: Link | None = None):
    """Swap pairing records over the out-of-band channel; both become PAIRED.

    Nothing changes on either side unless both records parse. ``link`` is
    the communication-phase channel (a fresh one on the same transcript if
    omitted).
    """
    for d in (a, b):
        if d.status != DeviceStatus.UNPAIRED and not d.allow_repairing:
            raise StateError(f"{d.name} is already paired")
    oob.send(a.name, b.name, WireFrame(FrameType.PAIR_RECORD, encode_pairing_record(a.record())).encode())
    try:
        rec_a = decode_pairing_record(_expect(WireFrame.decode(oob.recv(b.name)), FrameType.PAIR_RECORD))
    except (DecodeError, ProtocolError) as exc:
        raise ProtocolError(f"pairing aborted by {b.name}: {exc}") from exc
    oob.send(b.name, a.name, WireFrame(FrameType.PAIR_RECORD, encode_pairing_record(b.record())).encode())
    try:
        rec_b = decode_pairing_record(_expect(WireFrame.decode(oob.recv(a.name)), FrameType.PAIR_RECORD))
    except (DecodeError, ProtocolError) as exc:
        raise ProtocolError(f"pairing aborted by {a.name}: {exc}") from exc
    keys_a = ibe.derive_public_key(b.params, rec_a.identity)
    keys_b = ibe.derive_public_key(a.params, rec_b.identity)
    if link is None:
        link = Link("link", oob.transcript)
    for d, rec, keys in ((a, rec_b, keys_b), (b, rec_a, keys_a)):
        d.peer = rec
        d.peer_keys = keys
        d.link = link
        d._session = None
        d._pending = None
        d.status = DeviceStatus.PAIRED


def establish_session(a: Device, b: Device, link: Link | None = None) -> bytes:
    """Run INIT, CONFIRM, CONFIRM between initiator ``a`` and responder ``b``.

    Returns the (never transmitted) session key, identical on both sides.
    """
    for d in (a, b):
        d._require(DeviceStatus.PAIRED, DeviceStatus.SESSION_READY)
        if link is not None:
            d.link = link
    a.start_session()
    b.accept_session()
    a.finish_session()
    b.complete_session()
    return a.session_key


# --- scripted demo --------------------------------------------------------------

DEMO_PHASES = ("pairing", "extraction", "direct", "session", "bulk")


@dataclass
class DemoResult:
    transcript: Transcript
    summary: list[str]
    delivered: dict[str, bytes]
    sent: dict[str, bytes]
    session_keys: tuple[bytes, bytes]


class DemoFailure(IbePairError):
    def __init__(self, phase: str, cause: Exception):
        super().__init__(f"{phase} phase failed: {cause}")
        self.phase = phase


def run_demo(params: SystemParams, master: MasterKey, id_a: str, id_b: str, rng: EntropySource,
             bulk_size: int = 64 * 1024) -> DemoResult:
    """PKG plus two devices: pairing, extraction, direct, session, bulk."""
    transcript = Transcript()
    pkg = PKGChannel(PKGServer(params, master), transcript)
    oob = Link("nfc", transcript)
    link = Link("bt", transcript)
    rng_a = _child(rng, b"device-A")
    rng_b = _child(rng, b"device-B")
    a = Device("A", id_a, params, bytes.fromhex("0200000000a1"), rng_a)
    b = Device("B", id_b, params, bytes.fromhex("0200000000b2"), rng_b)
    summary, sent, delivered = [], {}, {}
    phase = "pairing"
    try:
        pair_devices(a, b, oob, link)
        summary.append(f"pairing: {a.name} ({b.peer.identity}) <-> {b.name} ({a.peer.identity})")
        phase = "extraction"
        request_private_key(a, pkg)
        request_private_key(b, pkg)
        summary.append("extraction: both private keys verified against the pairing equation")
        phase = "direct"
        sent["direct"] = b"hello from " + id_a.encode()[:19]
        a.send_direct(sent["direct"])
        delivered["direct"] = b.recv_direct()
        if delivered["direct"] != sent["direct"]:
            raise ValueError("direct message corrupted")
        summary.append(f"direct: {len(sent['direct'])}-byte message delivered")
        phase = "session"
        establish_session(a, b)
        if a.session_key != b.session_key:
            raise ValueError("session keys differ")
        summary.append("session: keys agree (fingerprint %s)" % hashlib.sha256(a.session_key).hexdigest()[:16])
        phase = "bulk"
        sent["bulk"] = rng.read(bulk_size)
        a.send_bulk(sent["bulk"])
        delivered["bulk"] = b.recv_bulk()
        sent["bulk-reply"] = b"ack:" + hashlib.sha256(delivered["bulk"]).digest()
        b.send_bulk(sent["bulk-reply"])
        delivered["bulk-reply"] = a.recv_bulk()
        if delivered != sent:
            raise ValueError("bulk payload corrupted")
        summary.append(f"bulk: {bulk_size} bytes delivered and acknowledged")
    except Exception as exc:
        raise DemoFailure(phase, exc) from exc
    return DemoResult(transcript, summary, delivered, sent, (a.session_key, b.session_key))


def _child(rng, label: bytes):
    fork = getattr(rng, "fork", None)
    return fork(label) if fork else rng
