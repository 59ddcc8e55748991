"""Reduced Tate pairing on y^2 = x^3 + 1 with embedding degree 2.

The symmetric pairing is

    e(P, Q) = f_{q,P}(phi(Q)) ** ((p^2 - 1) / q),    phi(x, y) = (zeta*x, y)

where zeta is a primitive cube root of unity in F_p^2 and f_{q,P} is built
by Miller's double-and-add loop. Denominators (vertical lines) are kept,
because the distorted abscissa zeta*x is not in F_p.

Three evaluation strategies give bit-identical results:

* affine Miller loop (one F_p inversion per step),
* Jacobian Miller loop (inversion free; lines scaled by F_p factors that the
  final exponentiation erases),
* precomputed: the affine line coefficients depend only on P, so they can be
  computed once and replayed against any number of Q.

The inner loops work on raw integers mod p. An F_p^2 value a + b*i is a
tuple ``(a, b)`` there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .curve import AffinePoint, CurveParams, INFINITY, is_on_curve, lift_x, mul, point_add, point_to_bytes
from .entropy import SeededEntropy
from .errors import MillerCollisionError, PointError
from .field import Fp2Element

RETRY_LIMIT = 32


@dataclass(frozen=True)
class GtElement:
    """An element of the order-q subgroup of F_p^2*."""

    value: Fp2Element

    def __mul__(self, other: "GtElement") -> "GtElement":
        return GtElement(self.value * other.value)

    def __pow__(self, e: int) -> "GtElement":
        return GtElement(self.value ** e)

    def inverse(self) -> "GtElement":
        # unitary after final exponentiation, so the inverse is the conjugate
        return GtElement(self.value.conjugate())

    def is_one(self) -> bool:
        return self.value == 1

    def to_bytes(self) -> bytes:
        return self.value.to_bytes()

    def __repr__(self):
        return f"GtElement({self.value.a:#x} + {self.value.b:#x}*i)"


class PairingContext:
    """Everything the pairing needs beyond the two points. Immutable."""

    def __init__(self, params: CurveParams):
        self.params = params
        self.p = params.p
        self.q = params.q
        self.fp2 = params.fp2
        self.zeta = self.fp2.find_order3_element()
        self.final_exponent = (self.p * self.p - 1) // self.q
        self._hard_exponent = (self.p + 1) // self.q
        self.one = GtElement(self.fp2.one)

    def __repr__(self):
        return f"PairingContext(p={self.p:#x}, q={self.q:#x})"


def distortion_map(Q: AffinePoint, ctx: PairingContext) -> AffinePoint:
    """phi(x, y) = (zeta*x, y), mapping E(F_p) into E(F_p^2)."""
    if Q.is_infinity:
        return INFINITY
    fp2 = ctx.fp2
    x = Q.x if isinstance(Q.x, Fp2Element) else fp2.embed(Q.x)
    y = Q.y if isinstance(Q.y, Fp2Element) else fp2.embed(Q.y)
    return AffinePoint(ctx.zeta * x, y)


def _embed(Q: AffinePoint, ctx: PairingContext) -> AffinePoint:
    if Q.is_infinity:
        return Q
    return AffinePoint(ctx.fp2.embed(Q.x), ctx.fp2.embed(Q.y))


class MillerStep(NamedTuple):
    """One line of the Miller loop, in affine form.

    The line is ``y - slope*x + offset`` or, when ``slope`` is None, the
    vertical ``x + offset``. ``vertical`` is the abscissa of the resulting
    point (the denominator ``x - vertical``), or None when that point is O.
    """

    doubling: bool
    slope: int | None
    offset: int
    vertical: int | None


def _affine_steps(xP: int, yP: int, q: int, p: int) -> Iterable[MillerStep]:
    """Generate the Miller lines for f_{q,P}; depends on P only."""
    x, y = xP, yP
    at_infinity = False
    bits = bin(q)[3:]
    for i, bit in enumerate(bits):
        if at_infinity:
            raise ValueError("P reached O before the end of the loop; its order is not q")
        if y == 0:
            raise ValueError("doubling a point of order 2")
        lam = 3 * x * x * pow(2 * y, -1, p) % p
        x3 = (lam * lam - 2 * x) % p
        y3 = (lam * (x - x3) - y) % p
        yield MillerStep(True, lam, (lam * x - y) % p, x3)
        x, y = x3, y3
        if bit == "1":
            if x == xP:
                if y != yP:
                    # T = -P: the chord is the vertical through P and T + P = O
                    yield MillerStep(False, None, -xP % p, None)
                    at_infinity = True
                    continue
                raise ValueError("T = P inside the Miller loop; q is too small for P")
            lam = (y - yP) * pow(x - xP, -1, p) % p
            x3 = (lam * lam - x - xP) % p
            y3 = (lam * (x - x3) - y) % p
            yield MillerStep(False, lam, (lam * x - y) % p, x3)
            x, y = x3, y3
    if not at_infinity:
        raise ValueError("q*P != O; P is not in the order-q subgroup")


def _evaluate_steps(steps: Iterable[MillerStep], xq, yq, p: int):
    """Accumulate numerator and denominator of f_{q,P}(Q) from line data."""
    xq0, xq1 = xq
    yq0, yq1 = yq
    fa, fb = 1, 0
    ga, gb = 1, 0
    for doubling, slope, offset, vertical in steps:
        if doubling:
            fa, fb = (fa + fb) * (fa - fb) % p, 2 * fa * fb % p
            ga, gb = (ga + gb) * (ga - gb) % p, 2 * ga * gb % p
        if slope is None:
            la, lb = (xq0 + offset) % p, xq1
        else:
            la, lb = (yq0 - slope * xq0 + offset) % p, (yq1 - slope * xq1) % p
        if la == 0 and lb == 0:
            raise MillerCollisionError("line vanishes at the evaluation point")
        fa, fb = (fa * la - fb * lb) % p, (fa * lb + fb * la) % p
        if vertical is not None:
            va, vb = (xq0 - vertical) % p, xq1
            if va == 0 and vb == 0:
                raise MillerCollisionError("vertical vanishes at the evaluation point")
            ga, gb = (ga * va - gb * vb) % p, (ga * vb + gb * va) % p
    return (fa, fb), (ga, gb)


def _jacobian_miller(xP: int, yP: int, xq, yq, q: int, p: int):
    """Miller loop with T in Jacobian coordinates; lines scaled by F_p factors."""
    xq0, xq1 = xq
    yq0, yq1 = yq
    X, Y, Z = xP, yP, 1
    fa, fb = 1, 0
    ga, gb = 1, 0
    at_infinity = False
    for bit in bin(q)[3:]:
        if at_infinity:
            raise ValueError("P reached O before the end of the loop; its order is not q")
        if Y == 0:
            raise ValueError("doubling a point of order 2")
        # dbl-2009-l, keeping the pieces the tangent line needs
        A = X * X % p
        B = Y * Y % p
        C = B * B % p
        ZZ = Z * Z % p
        D = 2 * ((X + B) * (X + B) - A - C) % p
        E = 3 * A % p
        X3 = (E * E - 2 * D) % p
        Y3 = (E * (D - X3) - 8 * C) % p
        Z3 = 2 * Y * Z % p
        cy = Z3 * ZZ % p
        cx = -E * ZZ % p
        c0 = (E * X - 2 * B) % p
        la = (cy * yq0 + cx * xq0 + c0) % p
        lb = (cy * yq1 + cx * xq1) % p
        vz = Z3 * Z3 % p
        va = (vz * xq0 - X3) % p
        vb = vz * xq1 % p
        if (la == 0 and lb == 0) or (va == 0 and vb == 0):
            raise MillerCollisionError("line or vertical vanishes at the evaluation point")
        fa, fb = (fa + fb) * (fa - fb) % p, 2 * fa * fb % p
        ga, gb = (ga + gb) * (ga - gb) % p, 2 * ga * gb % p
        fa, fb = (fa * la - fb * lb) % p, (fa * lb + fb * la) % p
        ga, gb = (ga * va - gb * vb) % p, (ga * vb + gb * va) % p
        X, Y, Z = X3, Y3, Z3
        if bit == "1":
            # madd-2007-bl with affine P
            ZZ = Z * Z % p
            U2 = xP * ZZ % p
            S2 = yP * Z * ZZ % p
            H = (U2 - X) % p
            rr = (S2 - Y) % p
            if H == 0:
                if rr == 0:
                    raise ValueError("T = P inside the Miller loop; q is too small for P")
                la, lb = (xq0 - xP) % p, xq1
                if la == 0 and lb == 0:
                    raise MillerCollisionError("vertical line vanishes at the evaluation point")
                fa, fb = (fa * la - fb * lb) % p, (fa * lb + fb * la) % p
                at_infinity = True
                continue
            HH = H * H % p
            I = 4 * HH % p
            J = H * I % p
            r = 2 * rr % p
            V = X * I % p
            X3 = (r * r - J - 2 * V) % p
            Y3 = (r * (V - X3) - 2 * Y * J) % p
            Z3 = 2 * Z * H % p
            la = (Z3 * yq0 - r * xq0 + r * xP - Z3 * yP) % p
            lb = (Z3 * yq1 - r * xq1) % p
            vz = Z3 * Z3 % p
            va = (vz * xq0 - X3) % p
            vb = vz * xq1 % p
            if (la == 0 and lb == 0) or (va == 0 and vb == 0):
                raise MillerCollisionError("line or vertical vanishes at the evaluation point")
            fa, fb = (fa * la - fb * lb) % p, (fa * lb + fb * la) % p
            ga, gb = (ga * va - gb * vb) % p, (ga * vb + gb * va) % p
            X, Y, Z = X3, Y3, Z3
    if not at_infinity:
        raise ValueError("q*P != O; P is not in the order-q subgroup")
    return (fa, fb), (ga, gb)


def _as_pair(v) -> tuple[int, int]:
    if isinstance(v, Fp2Element):
        return v.a, v.b
    return v.value, 0


def _quotient(num, den, fp2) -> Fp2Element:
    return Fp2Element(num[0], num[1], fp2) / Fp2Element(den[0], den[1], fp2)


def miller_loop(P: AffinePoint, Q: AffinePoint, order: int, coords: str = "affine") -> Fp2Element:
    """Raw Miller value f_{order,P}(Q) for P in E(F_p) and Q in E(F_p^2).

    ``coords`` selects affine or Jacobian arithmetic for the running point;
    the two raw values differ by an F_p factor. Raises
    :class:`MillerCollisionError` if a line vanishes at Q.
    """
    if P.is_infinity or Q.is_infinity:
        raise ValueError("the Miller loop is undefined at the point at infinity")
    fp2 = Q.x.field if isinstance(Q.x, Fp2Element) else None
    if fp2 is None:
        raise TypeError("Q must have F_p^2 coordinates; apply the distortion map first")
    p = fp2.p
    xq, yq = _as_pair(Q.x), _as_pair(Q.y)
    xP, yP = P.x.value, P.y.value
    if coords == "affine":
        num, den = _evaluate_steps(_affine_steps(xP, yP, order, p), xq, yq, p)
    elif coords == "jacobian":
        num, den = _jacobian_miller(xP, yP, xq, yq, order, p)
    else:
        raise ValueError(f"unknown coordinate system {coords!r}")
    return _quotient(num, den, fp2)


def final_exponentiation(f: Fp2Element, ctx: PairingContext) -> GtElement:
    """f ** ((p^2 - 1)/q), computed as (conj(f)/f) ** ((p + 1)/q)."""
    if f.is_zero():
        raise ValueError("cannot exponentiate a zero Miller value")
    g = f.conjugate() / f
    return GtElement(g ** ctx._hard_exponent)


def _randomized_representatives(P: AffinePoint, Q: AffinePoint, ctx: PairingContext):
    """Points Q + q*R for pseudo-random R in E(F_p^2), all equivalent to Q.

    The reduced pairing only sees Q modulo q*E(F_p^2), so these are valid
    stand-ins when a Miller line happens to vanish at Q itself. The stream is
    seeded from the inputs so the retry path stays deterministic.
    """
    rng = SeededEntropy(point_to_bytes(P) + point_to_bytes(Q), b"miller-retry")
    fp = ctx.params.fp
    for _ in range(RETRY_LIMIT):
        R1 = mul(ctx.q, lift_x(fp.random(rng)))
        R2 = mul(ctx.q, lift_x(fp.random(rng)))
        shift = point_add(_embed(R1, ctx), distortion_map(R2, ctx), validate=False)
        Q2 = point_add(Q, shift, validate=False)
        if not Q2.is_infinity:
            yield Q2


def _pair_with(P, Q, ctx, evaluate) -> GtElement:
    Qd = distortion_map(Q, ctx)
    try:
        return final_exponentiation(evaluate(Qd), ctx)
    except MillerCollisionError as first:
        for Q2 in _randomized_representatives(P, Qd, ctx):
            try:
                return final_exponentiation(evaluate(Q2), ctx)
            except MillerCollisionError:
                continue
        raise first


def _check_inputs(*points):
    for R in points:
        if not is_on_curve(R):
            raise PointError(f"{R!r} is not on y^2 = x^3 + 1")


def tate_pairing(P: AffinePoint, Q: AffinePoint, ctx: PairingContext,
                 coords: str = "jacobian", validate: bool = True) -> GtElement:
    """e(P, Q) for P, Q in the order-q subgroup of E(F_p); e(P, O) = e(O, Q) = 1."""
    if validate:
        _check_inputs(P, Q)
    if P.is_infinity or Q.is_infinity:
        return ctx.one
    return _pair_with(P, Q, ctx, lambda Qd: miller_loop(P, Qd, ctx.q, coords))


@dataclass(frozen=True)
class PrecomputedPairing:
    """Miller line data for a fixed first argument, reusable across many Q."""

    P: AffinePoint
    steps: tuple[MillerStep, ...]


def precompute(P: AffinePoint, ctx: PairingContext) -> PrecomputedPairing:
    _check_inputs(P)
    if P.is_infinity:
        return PrecomputedPairing(P, ())
    return PrecomputedPairing(P, tuple(_affine_steps(P.x.value, P.y.value, ctx.q, ctx.p)))


def apply_precomputed(pre: PrecomputedPairing, Q: AffinePoint, ctx: PairingContext,
                      validate: bool = True) -> GtElement:
    """Same value as ``tate_pairing(pre.P, Q, ctx)``."""
    if validate:
        _check_inputs(Q)
    if pre.P.is_infinity or Q.is_infinity:
        return ctx.one
    p = ctx.p

    def evaluate(Qd):
        num, den = _evaluate_steps(pre.steps, _as_pair(Qd.x), _as_pair(Qd.y), p)
        return _quotient(num, den, ctx.fp2)

    return _pair_with(pre.P, Q, ctx, evaluate)
