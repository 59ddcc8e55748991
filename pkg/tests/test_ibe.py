import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import load_golden, toy_params
from ibepair import ibe
from ibepair.curve import AffinePoint, point_to_bytes
from ibepair.entropy import SeededEntropy
from ibepair.errors import (
    AuthenticationError,
    DecodeError,
    MessageLengthError,
    ParameterError,
    PointError,
)
from ibepair.pairing import tate_pairing

GOLDEN_SETUPS = {
    "toy_p11": (11, 3),
    "toy_p59": (59, 5),
    "toy_p131": (131, 11),
}


def golden_params(name):
    g = load_golden(name)
    p, q = int(g["p"], 16), int(g["q"], 16)
    P = bytes.fromhex(g["P"])
    return g, toy_params(p, q, (P[1], P[2]), int(g["s"], 16))


@pytest.mark.parametrize("name", sorted(GOLDEN_SETUPS))
def test_golden_vector(name):
    g, (params, master) = golden_params(name)
    assert point_to_bytes(params.pu_pkg).hex() == g["pupkg"]
    keys = ibe.extract(params, master, bytes.fromhex(g["id"]))
    assert keys.counter == int(g["counter"], 16)
    assert point_to_bytes(keys.public).hex() == g["pu"]
    assert point_to_bytes(keys.private).hex() == g["pr"]
    assert tate_pairing(params.P, params.P, params.pairing).to_bytes().hex() == g["epp"]
    m = bytes.fromhex(g["m"])
    c = ibe.encrypt(params, bytes.fromhex(g["id"]), m, SeededEntropy(0), r=int(g["r"], 16))
    assert c.to_bytes().hex() == g["ciphertext"]
    assert ibe.decrypt(params, keys, ibe.Ciphertext.from_bytes(bytes.fromhex(g["ciphertext"]), params)) == m


def test_toy_pkg_public_key():
    params, _ = toy_params(11, 3, (0, 1), 2)
    assert point_to_bytes(params.pu_pkg) == bytes.fromhex("04000a")


def test_toy_golden_identity_hashes_to_generator():
    g, (params, _) = golden_params("toy_p11")
    assert ibe.derive_public_key(params, bytes.fromhex(g["id"])).public == params.P


@pytest.mark.parametrize("p,q,P,s", [(11, 3, (0, 1), 2), (59, 5, (18, 13), 3)])
def test_every_8_bit_message_round_trips(p, q, P, s):
    params, master = toy_params(p, q, P, s, n=8)
    keys = ibe.extract(params, master, "exhaustive")
    rng = SeededEntropy(b"exhaustive")
    for m in range(256):
        c = ibe.encrypt(params, keys, bytes([m]), rng)
        assert ibe.decrypt(params, keys, c) == bytes([m])


def test_setup_is_deterministic_under_seed():
    a = ibe.setup(ibe.Profile(bits_q=160, bits_p=256), SeededEntropy(9))
    b = ibe.setup(ibe.Profile(bits_q=160, bits_p=256), SeededEntropy(9))
    assert a[0] == b[0] and a[1].s == b[1].s
    assert ibe.params_to_text(a[0]) == ibe.params_to_text(b[0])


def test_default_profile_sizes(pkg512):
    params, master = pkg512
    assert params.p.bit_length() == 512 and params.q.bit_length() == 160
    assert params.n == 256 and params.n_bytes == 32
    params.validate()
    assert repr(master).count(format(master.s, "x")) == 0


def test_h1_h2_shapes(pkg512):
    params, _ = pkg512
    g = tate_pairing(params.P, params.P, params.pairing)
    assert len(ibe.h1(g)) == 32
    assert len(ibe.h1(g, 64)) == 8
    assert ibe.h2(b"alice", 0, params.fp) == ibe.h2(b"alice", 0, params.fp)
    assert ibe.h2(b"alice", 0, params.fp) != ibe.h2(b"alice", 1, params.fp)
    with pytest.raises(ValueError):
        ibe.h1(g, 12)


def test_extract_and_verify(pkg512):
    params, master = pkg512
    keys = ibe.extract(params, master, "+15551234")
    assert ibe.verify_key(params, keys)
    assert ibe.extract(params, master, "+15551234") == keys
    forged = ibe.IdentityKeys(keys.identity, keys.counter, keys.public, keys.public)
    assert not ibe.verify_key(params, forged)
    other = ibe.extract(params, master, "+15559999")
    swapped = ibe.IdentityKeys(keys.identity, keys.counter, keys.public, other.private)
    assert not ibe.verify_key(params, swapped)
    assert not ibe.verify_key(params, keys.public_only())


def test_round_trip_and_wrong_key(pkg512):
    params, master = pkg512
    rng = SeededEntropy(b"ibe-roundtrip")
    alice = ibe.extract(params, master, "alice")
    bob = ibe.extract(params, master, "bob")
    for _ in range(5):
        m = rng.read(32)
        c = ibe.encrypt(params, "alice", m, rng)
        assert ibe.decrypt(params, alice, c) == m
        assert ibe.decrypt(params, bob, c) != m


def test_encrypt_deterministic_under_seed(pkg512):
    params, _ = pkg512
    m = bytes(32)
    c1 = ibe.encrypt(params, "carol", m, SeededEntropy(3))
    c2 = ibe.encrypt(params, "carol", m, SeededEntropy(3))
    assert c1 == c2


def test_encrypt_rejects_wrong_length(pkg512):
    params, _ = pkg512
    with pytest.raises(MessageLengthError):
        ibe.encrypt(params, "alice", b"short", SeededEntropy(1))


def test_decrypt_input_checks(pkg512):
    params, master = pkg512
    alice = ibe.extract(params, master, "alice")
    c = ibe.encrypt(params, "alice", bytes(32), SeededEntropy(1))
    with pytest.raises(ValueError):
        ibe.decrypt(params, alice.public_only(), c)
    with pytest.raises(PointError):
        ibe.decrypt(params, alice, ibe.Ciphertext(AffinePoint(), c.V))
    with pytest.raises(DecodeError):
        ibe.Ciphertext.from_bytes(c.to_bytes()[:-1], params)


def test_empty_identity_rejected(pkg512):
    params, _ = pkg512
    with pytest.raises(ValueError):
        ibe.derive_public_key(params, "")


@given(st.binary(max_size=30))
def test_framing_round_trip(msg):
    block = ibe.frame_message(msg, 32)
    assert len(block) == 32
    assert ibe.unframe_message(block) == msg


def test_framing_limits():
    with pytest.raises(MessageLengthError):
        ibe.frame_message(bytes(31), 32)
    with pytest.raises(DecodeError):
        ibe.unframe_message(b"\x00\x1f" + bytes(30))


def test_direct_message_round_trip(pkg512):
    params, master = pkg512
    alice = ibe.extract(params, master, "alice")
    c = ibe.encrypt_message(params, "alice", b"hello", SeededEntropy(2))
    assert ibe.decrypt_message(params, alice, c) == b"hello"


def test_hybrid_round_trip_and_tamper(pkg512):
    params, master = pkg512
    alice = ibe.extract(params, master, "alice")
    payload = SeededEntropy(4).read(5000)
    hc = ibe.hybrid_encrypt(params, "alice", payload, SeededEntropy(5))
    blob = hc.to_bytes()
    assert ibe.hybrid_decrypt(params, alice, ibe.HybridCiphertext.from_bytes(blob, params)) == payload
    clen = ibe.Ciphertext.byte_len(params)
    for pos in (clen, clen + 20, clen + 50, len(blob) - 1):
        bad = bytearray(blob)
        bad[pos] ^= 0x01
        with pytest.raises(AuthenticationError):
            ibe.hybrid_decrypt(params, alice, ibe.HybridCiphertext.from_bytes(bytes(bad), params))
    # inside the IBE block a flip either breaks the point encoding or the CEK
    for pos in (0, 1, 40, clen - 1):
        bad = bytearray(blob)
        bad[pos] ^= 0x01
        with pytest.raises((DecodeError, AuthenticationError)):
            ibe.hybrid_decrypt(params, alice, ibe.HybridCiphertext.from_bytes(bytes(bad), params))
    bob = ibe.extract(params, master, "bob")
    with pytest.raises(AuthenticationError):
        ibe.hybrid_decrypt(params, bob, hc)


def test_hybrid_needs_256_bit_mask():
    params, _ = toy_params(59, 5, (18, 13), 3, n=8)
    with pytest.raises(ParameterError):
        ibe.hybrid_encrypt(params, "x", b"data", SeededEntropy(1))


def test_text_formats_round_trip(pkg512):
    params, master = pkg512
    text = ibe.params_to_text(params)
    assert text.startswith("ibepair-params v1\n")
    assert ibe.params_from_text(text) == params
    assert ibe.params_to_text(ibe.params_from_text(text)) == text
    assert ibe.master_from_text(ibe.master_to_text(master)).s == master.s
    keys = ibe.extract(params, master, "alice")
    ktext = ibe.keys_to_text(keys)
    assert ibe.keys_from_text(ktext, params) == keys
    pub = ibe.keys_to_text(keys.public_only())
    assert "pr = " not in pub
    assert ibe.keys_from_text(pub, params) == keys.public_only()


def test_toy_params_text_is_bit_exact():
    params, master = toy_params(11, 3, (0, 1), 2)
    assert ibe.params_to_text(params) == "ibepair-params v1\np = b\nq = 3\nn = 100\nP = 040001\npupkg = 04000a\n"
    assert ibe.master_to_text(master) == "ibepair-master v1\ns = 2\n"


@pytest.mark.parametrize("text,line", [
    ("ibepair-params v2\n", 1),
    ("ibepair-params v1\np = 0b\nq = 3\nn = 100\nP = 040001\npupkg = 04000a\n", 2),
    ("ibepair-params v1\np = b\nq = 3\nn = 100\nP = 040001\npupkg = 04000A\n", 6),
    ("ibepair-params v1\np = b\nq = 3\nn = 100\nP = 040002\npupkg = 04000a\n", 5),
    ("ibepair-params v1\np = b\nq = 3\nn = 100\npupkg = 04000a\n", 5),
    ("ibepair-params v1\np = b\nq = 3\nn = 100\nP = 040001\npupkg = 04000a\nx = 1\n", 7),
    ("ibepair-params v1\np = b\nq = 5\nn = 100\nP = 040001\npupkg = 04000a\n", 3),
    ("ibepair-params v1\np = b\nq = 3\nn = 100\nP = 040001\n", 6),
])
def test_params_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(DecodeError) as info:
        ibe.params_from_text(text)
    assert info.value.line == line


def test_master_parse_rejects_bad_hex():
    with pytest.raises(DecodeError) as info:
        ibe.master_from_text("ibepair-master v1\ns = 2g\n")
    assert info.value.line == 2


def test_params_validation_catches_wrong_order_pkg_key():
    params, _ = toy_params(59, 5, (18, 13), 3)
    # (58, 0) is on the curve but has order 2
    text = ibe.params_to_text(params).replace("pupkg = 041c33", "pupkg = 043a00")
    with pytest.raises(ParameterError):
        ibe.params_from_text(text)
