"""Exact arithmetic in the prime field F_p and its quadratic extension F_p^2.

Values are canonical residues at all times (no lazy reduction), so equality
and serialization are byte-exact. Moduli are primes p with 5 <= p < 2^63;
intermediate products use Python integers and never overflow.
"""

import random

from .errors import ModulusMismatch, NotInvertible
from .primes import is_prime

MAX_MODULUS_BITS = 63


def _check_modulus(p: int) -> int:
    p = int(p)
    if p.bit_length() > MAX_MODULUS_BITS:
        raise ValueError(f"modulus must fit in {MAX_MODULUS_BITS} bits, got {p.bit_length()} bits")
    if p < 5:
        raise ValueError("modulus must be a prime >= 5 (characteristic 2 and 3 are excluded)")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


class FieldElement:
    """A residue mod p with exact operator arithmetic."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = p
        self.value = value % p

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ModulusMismatch(f"moduli differ: {self.p} vs {other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(v - self.value, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * v, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return FieldElement(pow(self.value, e, self.p), self.p)

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise NotInvertible("0 has no inverse")
        return FieldElement(pow(self.value, -1, self.p), self.p)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value} mod {self.p})"


class Fp:
    """The field GF(p); doubles as the ring adapter used by SquareMatrix.

    Serialization: fixed-width big-endian byte strings of width
    ceil(bitlen(p)/8); textual form is the lowercase hex of those bytes.
    """

    commutative = True

    def __init__(self, p: int):
        self.p = _check_modulus(p)
        self.byte_width = (self.p.bit_length() + 7) // 8
        self._nonresidue = None

    def __call__(self, value: int) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.p != self.p:
                raise ModulusMismatch(f"moduli differ: {self.p} vs {value.p}")
            return value
        return FieldElement(value, self.p)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self.p)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self.p)

    def inv(self, x: FieldElement) -> FieldElement:
        return self(x).inv()

    def random_element(self, rng: random.Random) -> FieldElement:
        return FieldElement(rng.randrange(self.p), self.p)

    def sqrt(self, a) -> tuple[FieldElement, ...]:
        """All square roots of a in F_p (a tuple of size 0, 1 or 2)."""
        return tuple(FieldElement(r, self.p) for r in sqrt_mod(int(self(a)), self.p))

    def nonresidue(self) -> FieldElement:
        if self._nonresidue is None:
            self._nonresidue = smallest_nonresidue(self.p)
        return FieldElement(self._nonresidue, self.p)

    def quadratic_extension(self) -> "Fp2":
        return Fp2(self.p, int(self.nonresidue()))

    def encode(self, x) -> bytes:
        return int(self(x)).to_bytes(self.byte_width, "big")

    def decode(self, data: bytes) -> FieldElement:
        if len(data) != self.byte_width:
            raise ValueError(f"expected {self.byte_width} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= self.p:
            raise ValueError("encoded value is not a canonical residue")
        return FieldElement(v, self.p)

    def to_hex(self, x) -> str:
        return self.encode(x).hex()

    def from_hex(self, s: str) -> FieldElement:
        return self.decode(bytes.fromhex(s))

    def __eq__(self, other):
        return isinstance(other, Fp) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"Fp({self.p})"


def legendre(a: int, p: int) -> int:
    """1 for a nonzero residue, -1 for a non-residue, 0 for a = 0."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod p."""
    for d in range(2, p):
        if legendre(d, p) == -1:
            return d
    raise ValueError(f"no non-residue found mod {p}")  # unreachable for prime p >= 3


def sqrt_mod(a: int, p: int) -> tuple[int, ...]:
    """Exactly the roots of x^2 = a in F_p, sorted ascending.

    p = 3 mod 4 uses the exponent shortcut; p = 1 mod 4 runs Tonelli-Shanks.
    """
    a %= p
    if a == 0:
        return (0,)
    if legendre(a, p) == -1:
        return ()
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return tuple(sorted((r, p - r)))
    # Tonelli-Shanks: write p-1 = q * 2^s with q odd.
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = smallest_nonresidue(p)
    c = pow(z, q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return tuple(sorted((r, p - r)))


class QuadExtElement:
    """c0 + c1*t in F_p[t]/(t^2 - d); componentwise canonical."""

    __slots__ = ("c0", "c1", "p", "d")

    def __init__(self, c0: int, c1: int, p: int, d: int):
        self.p = p
        self.d = d
        self.c0 = c0 % p
        self.c1 = c1 % p

    def _check(self, other: "QuadExtElement"):
        if self.p != other.p or self.d != other.d:
            raise ModulusMismatch("elements live in different quadratic extensions")

    def __add__(self, other):
        self._check(other)
        return QuadExtElement(self.c0 + other.c0, self.c1 + other.c1, self.p, self.d)

    def __sub__(self, other):
        self._check(other)
        return QuadExtElement(self.c0 - other.c0, self.c1 - other.c1, self.p, self.d)

    def __neg__(self):
        return QuadExtElement(-self.c0, -self.c1, self.p, self.d)

    def __mul__(self, other):
        self._check(other)
        p = self.p
        c0 = (self.c0 * other.c0 + self.d * self.c1 * other.c1) % p
        c1 = (self.c0 * other.c1 + self.c1 * other.c0) % p
        return QuadExtElement(c0, c1, p, self.d)

    def norm(self) -> int:
        """N(c0 + c1 t) = c0^2 - d*c1^2, the product with the conjugate."""
        return (self.c0 * self.c0 - self.d * self.c1 * self.c1) % self.p

    def conj(self) -> "QuadExtElement":
        """Frobenius x -> x^p, i.e. t -> -t."""
        return QuadExtElement(self.c0, -self.c1, self.p, self.d)

    def inv(self) -> "QuadExtElement":
        n = self.norm()
        if n == 0:
            raise NotInvertible("0 has no inverse in the quadratic extension")
        ninv = pow(n, -1, self.p)
        return QuadExtElement(self.c0 * ninv, -self.c1 * ninv, self.p, self.d)

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        result = QuadExtElement(1, 0, self.p, self.d)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_one(self) -> bool:
        return self.c0 == 1 and self.c1 == 0

    def in_base_field(self) -> bool:
        return self.c1 == 0

    def __eq__(self, other):
        if not isinstance(other, QuadExtElement):
            return NotImplemented
        return (self.p, self.d, self.c0, self.c1) == (other.p, other.d, other.c0, other.c1)

    def __hash__(self):
        return hash((self.p, self.d, self.c0, self.c1))

    def __repr__(self):
        return f"QuadExtElement({self.c0} + {self.c1}*t mod {self.p}, t^2={self.d})"


class Fp2:
    """The quadratic extension F_p[t]/(t^2 - d) for a non-residue d."""

    def __init__(self, p: int, d: int | None = None):
        self.p = _check_modulus(p)
        if d is None:
            d = smallest_nonresidue(p)
        d %= p
        if legendre(d, p) != -1:
            raise ValueError(f"{d} is a square mod {p}; need a non-residue")
        self.d = d

    def element(self, c0: int, c1: int = 0) -> QuadExtElement:
        return QuadExtElement(c0, c1, self.p, self.d)

    def embed(self, x) -> QuadExtElement:
        return QuadExtElement(int(x) % self.p, 0, self.p, self.d)

    @property
    def one(self) -> QuadExtElement:
        return self.element(1)

    @property
    def zero(self) -> QuadExtElement:
        return self.element(0)

    def sqrt_of_base(self, a: int) -> QuadExtElement:
        """A square root (in F_p^2) of a base-field element a.

        Every base-field element is a square here: either sqrt(a) in F_p, or
        sqrt(a/d)*t when a is a non-residue.
        """
        a %= self.p
        roots = sqrt_mod(a, self.p)
        if roots:
            return self.element(roots[0])
        ad = a * pow(self.d, -1, self.p) % self.p
        r = sqrt_mod(ad, self.p)[0]
        return self.element(0, r)

    def random_element(self, rng: random.Random) -> QuadExtElement:
        return self.element(rng.randrange(self.p), rng.randrange(self.p))

    def __repr__(self):
        return f"Fp2(p={self.p}, d={self.d})"
