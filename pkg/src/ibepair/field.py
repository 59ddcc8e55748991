"""Arithmetic in F_p and F_p^2 = F_p[i]/(i^2 + 1), plus prime generation.

Elements are immutable and carry their field. Combining elements of two
different fields raises :class:`FieldMismatchError`; plain ``int`` operands
are coerced into the element's field.

Nothing here is constant time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .entropy import EntropySource, SystemEntropy, random_below, random_range, shuffled
from .errors import FieldMismatchError, SearchBudgetExceeded

MR_ROUNDS = 64

_SMALL_PRIMES = [
    p for p in range(3, 2000)
    if all(p % d for d in range(2, int(p ** 0.5) + 1))
]


def is_probable_prime(n: int, rounds: int = MR_ROUNDS, rng: EntropySource | None = None) -> bool:
    """Miller-Rabin with random bases; error probability at most 4**-rounds."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    rng = rng or SystemEntropy()
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = random_range(rng, 2, n - 2)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _coerce_int(field, other):
    if isinstance(other, FpElement):
        if other.field.p != field.p:
            raise FieldMismatchError(f"F_{other.field.p} element used with F_{field.p}")
        return other.value
    if isinstance(other, int):
        return other % field.p
    return None


class PrimeField:
    """The field F_p. Equal moduli give equal (interchangeable) fields."""

    __slots__ = ("p", "byte_len", "__weakref__")

    def __init__(self, p: int):
        if p < 2:
            raise ValueError("modulus must be at least 2")
        self.p = p
        self.byte_len = (p.bit_length() + 7) // 8

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __call__(self, value: int) -> "FpElement":
        return FpElement(value, self)

    @property
    def zero(self):
        return FpElement(0, self)

    @property
    def one(self):
        return FpElement(1, self)

    def random(self, rng: EntropySource) -> "FpElement":
        return FpElement(random_below(rng, self.p), self)

    def from_bytes(self, data: bytes) -> "FpElement":
        if len(data) != self.byte_len:
            raise ValueError(f"expected {self.byte_len} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= self.p:
            raise ValueError("encoded integer is not reduced")
        return FpElement(v, self)

    def elements(self):
        """Every element, in order. Only sensible for toy moduli."""
        return (FpElement(v, self) for v in range(self.p))


class FpElement:
    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        self.value = value % field.p
        self.field = field

    def _other(self, other):
        v = _coerce_int(self.field, other)
        if v is None:
            return NotImplemented
        return v

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FpElement(self.value + v, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FpElement(self.value - v, self.field)

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FpElement(v - self.value, self.field)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FpElement(self.value * v, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.field)

    def inverse(self) -> "FpElement":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse in F_p")
        return FpElement(pow(self.value, -1, self.field.p), self.field)

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return self * FpElement(v, self.field).inverse()

    def __rtruediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FpElement(v, self.field) * self.inverse()

    def __pow__(self, e: int):
        """Square-and-multiply; ``0 ** 0`` is 1. Negative exponents invert first."""
        if e < 0:
            return self.inverse() ** (-e)
        result, base = 1, self.value
        p = self.field.p
        while e:
            if e & 1:
                result = result * base % p
            base = base * base % p
            e >>= 1
        return FpElement(result, self.field)

    def cube_root(self) -> "FpElement":
        """The unique cube root when p = 2 (mod 3)."""
        p = self.field.p
        if p % 3 != 2:
            raise ValueError("cube roots are unique only when p = 2 mod 3")
        return FpElement(pow(self.value, (2 * p - 1) // 3, p), self.field)

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Fp({self.value})"

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(self.field.byte_len, "big")


class Fp2Field:
    """F_p^2 built as F_p[i]/(i^2 + 1); requires p = 3 (mod 4)."""

    __slots__ = ("base", "p", "__weakref__")

    def __init__(self, base: PrimeField | int):
        if isinstance(base, int):
            base = PrimeField(base)
        if base.p % 4 != 3:
            raise ValueError("i^2 = -1 only defines a field when p = 3 mod 4")
        self.base = base
        self.p = base.p

    def __eq__(self, other):
        return isinstance(other, Fp2Field) and other.p == self.p

    def __hash__(self):
        return hash(("Fp2", self.p))

    def __repr__(self):
        return f"Fp2Field({self.p})"

    def __call__(self, a, b=0) -> "Fp2Element":
        return Fp2Element(int(a), int(b), self)

    @property
    def zero(self):
        return Fp2Element(0, 0, self)

    @property
    def one(self):
        return Fp2Element(1, 0, self)

    @property
    def i(self):
        return Fp2Element(0, 1, self)

    def random(self, rng: EntropySource) -> "Fp2Element":
        return Fp2Element(random_below(rng, self.p), random_below(rng, self.p), self)

    def from_bytes(self, data: bytes) -> "Fp2Element":
        n = self.base.byte_len
        if len(data) != 2 * n:
            raise ValueError(f"expected {2 * n} bytes, got {len(data)}")
        a = self.base.from_bytes(data[:n])
        b = self.base.from_bytes(data[n:])
        return Fp2Element(a.value, b.value, self)

    def embed(self, x: FpElement) -> "Fp2Element":
        if x.field.p != self.p:
            raise FieldMismatchError("base element from a different field")
        return Fp2Element(x.value, 0, self)

    def find_order3_element(self) -> "Fp2Element":
        """A primitive cube root of unity: u^((p^2-1)/3) for u = 1+i, 2+i, ..."""
        e = (self.p * self.p - 1) // 3
        k = 1
        while True:
            z = Fp2Element(k, 1, self) ** e
            if z != self.one:
                return z
            k += 1


class Fp2Element:
    """a + b*i with integer parts already reduced mod p."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a: int, b: int, field: Fp2Field):
        p = field.p
        self.a = a % p
        self.b = b % p
        self.field = field

    @property
    def real(self) -> FpElement:
        return FpElement(self.a, self.field.base)

    @property
    def imag(self) -> FpElement:
        return FpElement(self.b, self.field.base)

    def _other(self, other):
        if isinstance(other, Fp2Element):
            if other.field.p != self.field.p:
                raise FieldMismatchError(f"F_{other.field.p}^2 element used with F_{self.field.p}^2")
            return other.a, other.b
        if isinstance(other, FpElement):
            if other.field.p != self.field.p:
                raise FieldMismatchError(f"F_{other.field.p} element used with F_{self.field.p}^2")
            return other.value, 0
        if isinstance(other, int):
            return other, 0
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Fp2Element(self.a + o[0], self.b + o[1], self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Fp2Element(self.a - o[0], self.b - o[1], self.field)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Fp2Element(o[0] - self.a, o[1] - self.b, self.field)

    def __neg__(self):
        return Fp2Element(-self.a, -self.b, self.field)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        c, d = o
        a, b = self.a, self.b
        return Fp2Element(a * c - b * d, a * d + b * c, self.field)

    __rmul__ = __mul__

    def conjugate(self) -> "Fp2Element":
        """a - b*i, which is also the Frobenius image x^p."""
        return Fp2Element(self.a, -self.b, self.field)

    def norm(self) -> FpElement:
        return FpElement(self.a * self.a + self.b * self.b, self.field.base)

    def inverse(self) -> "Fp2Element":
        if self.a == 0 and self.b == 0:
            raise ZeroDivisionError("zero has no inverse in F_p^2")
        p = self.field.p
        t = pow(self.a * self.a + self.b * self.b, -1, p)
        return Fp2Element(self.a * t, -self.b * t, self.field)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * Fp2Element(o[0], o[1], self.field).inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Fp2Element(o[0], o[1], self.field) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        p = self.field.p
        ra, rb = 1, 0
        ba, bb = self.a, self.b
        while e:
            if e & 1:
                ra, rb = (ra * ba - rb * bb) % p, (ra * bb + rb * ba) % p
            ba, bb = (ba + bb) * (ba - bb) % p, 2 * ba * bb % p
            e >>= 1
        return Fp2Element(ra, rb, self.field)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Fp2Element):
            return self.field.p == other.field.p and self.a == other.a and self.b == other.b
        if isinstance(other, FpElement):
            return self.field.p == other.field.p and self.b == 0 and self.a == other.value
        if isinstance(other, int):
            p = self.field.p
            return self.b == 0 and self.a == other % p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.a, self.b))

    def __repr__(self):
        return f"Fp2({self.a} + {self.b}*i)"

    def to_bytes(self) -> bytes:
        n = self.field.base.byte_len
        return self.a.to_bytes(n, "big") + self.b.to_bytes(n, "big")


@dataclass(frozen=True)
class GroupOrder:
    """A prime group order q, with its Solinas shape when it has one.

    For a Solinas prime ``q == 2**a + sign_b * 2**b + sign_1``.
    """

    q: int
    a: int | None = None
    b: int | None = None
    sign_b: int | None = None
    sign_1: int | None = None

    @classmethod
    def from_form(cls, a: int, b: int, sign_b: int, sign_1: int) -> "GroupOrder":
        if not 0 < b < a:
            raise ValueError("Solinas form needs 0 < b < a")
        if sign_b not in (1, -1) or sign_1 not in (1, -1):
            raise ValueError("signs must be +1 or -1")
        return cls((1 << a) + sign_b * (1 << b) + sign_1, a, b, sign_b, sign_1)

    @property
    def is_solinas(self) -> bool:
        return self.a is not None

    @cached_property
    def bits(self) -> int:
        return self.q.bit_length()

    def __int__(self):
        return self.q

    def describe(self) -> str:
        if not self.is_solinas:
            return hex(self.q)
        sb = "+" if self.sign_b > 0 else "-"
        s1 = "+" if self.sign_1 > 0 else "-"
        return f"2^{self.a} {sb} 2^{self.b} {s1} 1"


def solinas_candidates(bits: int) -> list[GroupOrder]:
    """All numbers 2^a +- 2^b +- 1 of exactly ``bits`` bits with a in {bits-1, bits}."""
    out = []
    for a in (bits - 1, bits):
        for b in range(1, a):
            for sign_b in (1, -1):
                for sign_1 in (1, -1):
                    g = GroupOrder.from_form(a, b, sign_b, sign_1)
                    if g.q.bit_length() == bits:
                        out.append(g)
    return out


def gen_solinas_prime(bits: int, rng: EntropySource, budget: int | None = None) -> GroupOrder:
    """Random Solinas prime of ``bits`` bits.

    The candidate list is shuffled with ``rng`` and scanned; ``budget`` caps how
    many candidates are tested (default: all of them).
    """
    if bits < 4:
        raise ValueError("Solinas primes need at least 4 bits")
    candidates = shuffled(rng, solinas_candidates(bits))
    if budget is None:
        budget = len(candidates)
    for tried, cand in enumerate(candidates[:budget], start=1):
        if is_probable_prime(cand.q, rng=rng):
            return cand
    raise SearchBudgetExceeded(f"{bits}-bit Solinas prime", budget, min(budget, len(candidates)))


def system_prime_candidate(q: int, r: int) -> int:
    return 12 * q * r - 1


def check_system_prime(p: int, q: int, *, require_square_free: bool = True) -> list[str]:
    """Constraint violations for a (p, q) pair; empty when the pair is usable."""
    problems = []
    if not is_probable_prime(q):
        problems.append("q is not prime")
    if not is_probable_prime(p):
        problems.append("p is not prime")
    if p % 12 != 11:
        problems.append("p is not 11 mod 12")
    if (p + 1) % q:
        problems.append("q does not divide p+1")
    elif require_square_free and (p + 1) % (q * q) == 0:
        problems.append("q^2 divides p+1")
    return problems


def gen_system_prime(q: GroupOrder | int, bits: int, rng: EntropySource, budget: int = 100_000) -> int:
    """A ``bits``-bit prime p = 12*q*r - 1, so p = 11 mod 12 and q | p+1 (but q^2 does not)."""
    q = int(q)
    if q < 5:
        raise ValueError("q must be at least 5; q = 2, 3 always divide p+1 twice")
    if bits < q.bit_length() + 12:
        raise ValueError(f"p must have at least {q.bit_length() + 12} bits for a {q.bit_length()}-bit q")
    step = 12 * q
    r_lo = ((1 << (bits - 1)) + 1 + step - 1) // step
    r_hi = (1 << bits) // step
    for tried in range(1, budget + 1):
        r = random_range(rng, r_lo, r_hi)
        if (12 * r) % q == 0:
            continue
        p = system_prime_candidate(q, r)
        if p.bit_length() != bits:
            continue
        if is_probable_prime(p, rng=rng):
            return p
    raise SearchBudgetExceeded(f"{bits}-bit system prime for q={q:#x}", budget, budget)
