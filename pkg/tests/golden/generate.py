"""Regenerate the golden vectors from the straight-line oracle.

    python3 tests/golden/generate.py

Writes one ``name = hex`` file per vector. The package is never imported.
"""

import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

import oracles as o  # noqa: E402

MESSAGE = bytes.fromhex("0f1e2d3c4b5a69788796a5b4c3d2e1f000112233445566778899aabbccddeeff")

VECTORS = {
    # the degenerate 11/3 curve; id chosen so it hashes to (0, 1)
    "toy_p11": dict(p=11, q=3, P=(0, 1), s=2, r=2, want_pu=(0, 1)),
    "toy_p59": dict(p=59, q=5, P=(18, 13), s=3, r=4, identity=b"alice@toy"),
    "toy_p131": dict(p=131, q=11, P=None, s=7, r=5, identity=b"+15551234"),
}


def find_identity(p, q, want):
    k = 0
    while True:
        ident = f"toy-id-{k}".encode()
        if o.hash_to_point(ident, p, q)[1] == want:
            return ident
        k += 1


def first_generator(p, q):
    return next(P for P in o.curve_points(p) if P is not o.O and o.order(P, p) == q)


def build(name, p, q, P, s, r, identity=None, want_pu=None):
    P = P or first_generator(p, q)
    identity = identity or find_identity(p, q, want_pu)
    v = o.bf_encrypt(p, q, P, s, identity, MESSAGE, r)
    pb = lambda X: o.point_bytes(X, p).hex()  # noqa: E731
    rows = [
        ("p", format(p, "x")), ("q", format(q, "x")), ("P", pb(P)), ("s", format(s, "x")),
        ("pupkg", pb(v["pupkg"])), ("id", identity.hex()), ("counter", format(v["counter"], "x")),
        ("pu", pb(v["pu"])), ("pr", pb(v["pr"])), ("r", format(r, "x")), ("m", MESSAGE.hex()),
        ("gid", o.gt_bytes(v["gid"], p).hex()), ("epp", o.gt_bytes(o.pairing(P, P, p, q), p).hex()),
        ("U", pb(v["U"])), ("V", v["V"].hex()), ("ciphertext", v["ciphertext"].hex()),
    ]
    text = "".join(f"{k} = {val}\n" for k, val in rows)
    (HERE / f"{name}.txt").write_text(text)
    print(f"{name}: {text}")


if __name__ == "__main__":
    for name, cfg in VECTORS.items():
        build(name, **cfg)
