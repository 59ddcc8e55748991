"""The supersingular curve E: y^2 = x^3 + 1 over F_p (and F_p^2).

The group law works for coordinates from either field: the point operations
only use field-element operators, so a point whose coordinates are
:class:`~ibepair.field.Fp2Element` instances lives on E(F_p^2).

For p = 11 (mod 12), #E(F_p) = p + 1 and the curve has embedding degree 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .entropy import EntropySource
from .errors import DegenerateHashError, ParameterError, PointError
from .field import Fp2Field, FpElement, PrimeField, check_system_prime


@dataclass(frozen=True)
class CurveParams:
    """p, the subgroup order q and the cofactor h = (p+1)/q."""

    p: int
    q: int

    def __post_init__(self):
        if self.q <= 1 or (self.p + 1) % self.q:
            raise ParameterError("q must divide p+1")
        if self.p % 12 != 11:
            raise ParameterError("p must be 11 mod 12")

    @property
    def cofactor(self) -> int:
        return (self.p + 1) // self.q

    @cached_property
    def fp(self) -> PrimeField:
        return PrimeField(self.p)

    @cached_property
    def fp2(self) -> Fp2Field:
        return Fp2Field(self.fp)

    def validate(self):
        """Raise :class:`ParameterError` unless p, q satisfy the curve constraints."""
        problems = check_system_prime(self.p, self.q, require_square_free=False)
        if problems:
            raise ParameterError("; ".join(problems))


@dataclass(frozen=True)
class AffinePoint:
    """(x, y), or the point at infinity when both are None."""

    x: object = None
    y: object = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __neg__(self):
        return negate(self)

    def __repr__(self):
        if self.is_infinity:
            return "AffinePoint(O)"
        return f"AffinePoint({self.x!r}, {self.y!r})"


INFINITY = AffinePoint()


@dataclass(frozen=True)
class JacobianPoint:
    """(X : Y : Z) standing for (X/Z^2, Y/Z^3); Z = 0 is infinity."""

    X: object
    Y: object
    Z: object

    @property
    def is_infinity(self) -> bool:
        return self.Z == 0


JACOBIAN_INFINITY = JacobianPoint(1, 1, 0)


def is_on_curve(P: AffinePoint) -> bool:
    if P.is_infinity:
        return True
    return P.y * P.y == P.x * P.x * P.x + 1


def _check(P):
    if not is_on_curve(P):
        raise PointError(f"{P!r} is not on y^2 = x^3 + 1")


def negate(P: AffinePoint) -> AffinePoint:
    if P.is_infinity:
        return P
    return AffinePoint(P.x, -P.y)


def point_double(P: AffinePoint) -> AffinePoint:
    if P.is_infinity or P.y.is_zero():
        return INFINITY
    lam = 3 * P.x * P.x / (2 * P.y)
    x3 = lam * lam - 2 * P.x
    return AffinePoint(x3, lam * (P.x - x3) - P.y)


def point_add(P: AffinePoint, Q: AffinePoint, validate: bool = True) -> AffinePoint:
    if validate:
        _check(P)
        _check(Q)
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y == Q.y:
            return point_double(P)
        return INFINITY
    lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    return AffinePoint(x3, lam * (P.x - x3) - P.y)


def scalar_mul(n: int, P: AffinePoint) -> AffinePoint:
    """Left-to-right double-and-add in affine coordinates."""
    if n < 0:
        return scalar_mul(-n, negate(P))
    R = INFINITY
    for bit in bin(n)[2:]:
        R = point_double(R)
        if bit == "1":
            R = point_add(R, P, validate=False)
    return R


def to_jacobian(P: AffinePoint) -> JacobianPoint:
    if P.is_infinity:
        return JACOBIAN_INFINITY
    return JacobianPoint(P.x, P.y, P.x * 0 + 1)


def from_jacobian(J: JacobianPoint) -> AffinePoint:
    if J.is_infinity:
        return INFINITY
    zinv = J.Z.inverse()
    zinv2 = zinv * zinv
    return AffinePoint(J.X * zinv2, J.Y * zinv2 * zinv)


def jacobian_double(J: JacobianPoint) -> JacobianPoint:
    # dbl-2009-l, a = 0
    if J.is_infinity or J.Y == 0:
        return JACOBIAN_INFINITY
    X, Y, Z = J.X, J.Y, J.Z
    A = X * X
    B = Y * Y
    C = B * B
    D = 2 * ((X + B) * (X + B) - A - C)
    E = 3 * A
    F = E * E
    X3 = F - 2 * D
    return JacobianPoint(X3, E * (D - X3) - 8 * C, 2 * Y * Z)


def jacobian_add(J1: JacobianPoint, J2: JacobianPoint) -> JacobianPoint:
    # add-2007-bl
    if J1.is_infinity:
        return J2
    if J2.is_infinity:
        return J1
    Z1Z1 = J1.Z * J1.Z
    Z2Z2 = J2.Z * J2.Z
    U1 = J1.X * Z2Z2
    U2 = J2.X * Z1Z1
    S1 = J1.Y * J2.Z * Z2Z2
    S2 = J2.Y * J1.Z * Z1Z1
    H = U2 - U1
    rr = S2 - S1
    if H == 0:
        if rr == 0:
            return jacobian_double(J1)
        return JACOBIAN_INFINITY
    I = (2 * H) * (2 * H)
    J = H * I
    r = 2 * rr
    V = U1 * I
    X3 = r * r - J - 2 * V
    Y3 = r * (V - X3) - 2 * S1 * J
    Z3 = ((J1.Z + J2.Z) * (J1.Z + J2.Z) - Z1Z1 - Z2Z2) * H
    return JacobianPoint(X3, Y3, Z3)


def jacobian_scalar_mul(n: int, J: JacobianPoint) -> JacobianPoint:
    if n < 0:
        return jacobian_scalar_mul(-n, JacobianPoint(J.X, -J.Y, J.Z))
    R = JACOBIAN_INFINITY
    for bit in bin(n)[2:]:
        R = jacobian_double(R)
        if bit == "1":
            R = jacobian_add(R, J)
    return R


def jacobian_equal(J1: JacobianPoint, J2: JacobianPoint) -> bool:
    if J1.is_infinity or J2.is_infinity:
        return J1.is_infinity and J2.is_infinity
    Z1Z1, Z2Z2 = J1.Z * J1.Z, J2.Z * J2.Z
    return J1.X * Z2Z2 == J2.X * Z1Z1 and J1.Y * Z2Z2 * J2.Z == J2.Y * Z1Z1 * J1.Z


def _dbl_int(X, Y, Z, p):
    if Z == 0 or Y == 0:
        return 1, 1, 0
    A = X * X % p
    B = Y * Y % p
    C = B * B % p
    D = 2 * ((X + B) * (X + B) - A - C) % p
    E = 3 * A
    X3 = (E * E - 2 * D) % p
    return X3, (E * (D - X3) - 8 * C) % p, 2 * Y * Z % p


def _add_int(X1, Y1, Z1, X2, Y2, Z2, p):
    if Z1 == 0:
        return X2, Y2, Z2
    if Z2 == 0:
        return X1, Y1, Z1
    Z1Z1 = Z1 * Z1 % p
    Z2Z2 = Z2 * Z2 % p
    U1 = X1 * Z2Z2 % p
    U2 = X2 * Z1Z1 % p
    S1 = Y1 * Z2 * Z2Z2 % p
    S2 = Y2 * Z1 * Z1Z1 % p
    H = (U2 - U1) % p
    rr = (S2 - S1) % p
    if H == 0:
        return _dbl_int(X1, Y1, Z1, p) if rr == 0 else (1, 1, 0)
    I = 4 * H * H % p
    J = H * I % p
    r = 2 * rr
    V = U1 * I % p
    X3 = (r * r - J - 2 * V) % p
    return X3, (r * (V - X3) - 2 * S1 * J) % p, ((Z1 + Z2) * (Z1 + Z2) - Z1Z1 - Z2Z2) * H % p


def _wnaf(n: int, w: int) -> list[int]:
    digits = []
    while n:
        if n & 1:
            d = n & ((1 << w) - 1)
            if d >= 1 << (w - 1):
                d -= 1 << w
            n -= d
        else:
            d = 0
        digits.append(d)
        n >>= 1
    return digits


def _mul_fp(n: int, x: int, y: int, p: int) -> tuple[int, int, int]:
    # width-5 wNAF over plain integers; same formulas as the object path
    base = (x, y, 1)
    twice = _dbl_int(*base, p)
    table = [base]
    for _ in range(7):
        table.append(_add_int(*table[-1], *twice, p))
    R = (1, 1, 0)
    for d in reversed(_wnaf(n, 5)):
        R = _dbl_int(*R, p)
        if d > 0:
            R = _add_int(*R, *table[d >> 1], p)
        elif d < 0:
            X, Y, Z = table[-d >> 1]
            R = _add_int(*R, X, p - Y, Z, p)
    return R


def mul(n: int, P: AffinePoint) -> AffinePoint:
    """Scalar multiplication through Jacobian coordinates (one inversion total).

    Points over F_p take a width-5 wNAF path on plain integers; anything
    else goes through the generic field-object ladder.
    """
    if P.is_infinity:
        return P
    if not isinstance(P.x, FpElement):
        return from_jacobian(jacobian_scalar_mul(n, to_jacobian(P)))
    if n < 0:
        n, P = -n, negate(P)
    field = P.x.field
    p = field.p
    X, Y, Z = _mul_fp(n, P.x.value, P.y.value, p)
    if Z == 0:
        return INFINITY
    zinv = pow(Z, -1, p)
    zinv2 = zinv * zinv % p
    return AffinePoint(field(X * zinv2), field(Y * zinv2 * zinv))


def lift_x(y: FpElement) -> AffinePoint:
    """The unique affine point of E(F_p) with ordinate y."""
    return AffinePoint((y * y - 1).cube_root(), y)


def map_to_point(y0: FpElement, params: CurveParams) -> AffinePoint:
    """Hash-to-curve core: recover x by cube root, then clear the cofactor.

    Raises :class:`DegenerateHashError` if the cleared point is infinity; the
    caller is expected to re-hash with a new counter.
    """
    Q = mul(params.cofactor, lift_x(y0))
    if Q.is_infinity:
        raise DegenerateHashError(f"y0={y0.value:#x} maps to a point of order dividing the cofactor")
    return Q


def random_generator(params: CurveParams, rng: EntropySource, max_tries: int = 1000) -> AffinePoint:
    """A point of order exactly q (q prime, so anything but O qualifies)."""
    for _ in range(max_tries):
        try:
            return map_to_point(params.fp.random(rng), params)
        except DegenerateHashError:
            continue
    raise ParameterError("could not find a point of order q; is q | p+1?")


def enumerate_points(field: PrimeField) -> list[AffinePoint]:
    """Every point of E(F_p) including infinity, by brute force. Toy sizes only."""
    p = field.p
    squares = {}
    for y in range(p):
        squares.setdefault(y * y % p, []).append(y)
    pts = [INFINITY]
    for x in range(p):
        for y in squares.get((x * x * x + 1) % p, []):
            pts.append(AffinePoint(field(x), field(y)))
    return pts


def point_to_bytes(P: AffinePoint) -> bytes:
    """0x00 for infinity, otherwise 0x04 || x || y in canonical field encoding."""
    if P.is_infinity:
        return b"\x00"
    return b"\x04" + P.x.to_bytes() + P.y.to_bytes()


def point_from_bytes(data: bytes, field, validate: bool = True) -> AffinePoint:
    """Inverse of :func:`point_to_bytes`; ``field`` is a PrimeField or Fp2Field."""
    if data == b"\x00":
        return INFINITY
    width = field.base.byte_len * 2 if isinstance(field, Fp2Field) else field.byte_len
    if len(data) != 1 + 2 * width or data[0] != 0x04:
        raise PointError(f"bad point encoding ({len(data)} bytes, prefix {data[:1].hex() or 'none'})")
    try:
        P = AffinePoint(field.from_bytes(data[1:1 + width]), field.from_bytes(data[1 + width:]))
    except ValueError as exc:
        raise PointError(str(exc)) from exc
    if validate:
        _check(P)
    return P


def point_byte_len(field) -> int:
    width = field.base.byte_len * 2 if isinstance(field, Fp2Field) else field.byte_len
    return 1 + 2 * width
