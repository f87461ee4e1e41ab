"""The noncommutative coefficient ring F_p[S3].

Basis order is fixed as [e, (123), (132), (12), (13), (23)] and composition
is right-to-left: (g*h)(x) = g(h(x)). The multiplication table is generated
from pointwise permutation composition at import time, never hand-entered.

The semisimple decomposition F_p[S3] ~ F_p + F_p + Mat2(F_p) (valid for
p not in {2, 3}) drives inversion: three tiny component inversions instead
of one 6x6 solve. The 6x6 left-multiplication (regular representation)
matrix is exposed as an independent test oracle.
"""

import random
from dataclasses import dataclass

from .errors import ModulusMismatch, NotInvertible

#: images (g(1), g(2), g(3)) for each basis permutation, in basis order
PERMUTATIONS = (
    (1, 2, 3),  # e
    (2, 3, 1),  # (123)
    (3, 1, 2),  # (132)
    (2, 1, 3),  # (12)
    (3, 2, 1),  # (13)
    (1, 3, 2),  # (23)
)

PERM_NAMES = ("e", "(123)", "(132)", "(12)", "(13)", "(23)")

SIGNS = (1, 1, 1, -1, -1, -1)


def compose(g: int, h: int) -> int:
    """Index of g∘h, where (g∘h)(x) = g(h(x))."""
    gm, hm = PERMUTATIONS[g], PERMUTATIONS[h]
    image = tuple(gm[hm[x] - 1] for x in range(3))
    return PERMUTATIONS.index(image)


CAYLEY = tuple(tuple(compose(g, h) for h in range(6)) for g in range(6))
INVERSE = tuple(next(h for h in range(6) if CAYLEY[g][h] == 0) for g in range(6))
#: CONV_INDEX[h][g] = index of h^-1 ∘ g; the convolution gather table
CONV_INDEX = tuple(tuple(CAYLEY[INVERSE[h]][g] for g in range(6)) for h in range(6))


def _build_standard_rep():
    """Derive all six 2x2 standard-representation matrices from the two
    pinned generator images, closing under the homomorphism property."""
    gen_3cycle = ((0, -1), (1, -1))  # image of (123)
    gen_swap = ((0, 1), (1, 0))      # image of (12)

    def mul2(a, b):
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
            for i in range(2)
        )

    rep = {0: ((1, 0), (0, 1)), 1: gen_3cycle, 3: gen_swap}
    while len(rep) < 6:
        for g in list(rep):
            for h in list(rep):
                k = CAYLEY[g][h]
                m = mul2(rep[g], rep[h])
                if k in rep:
                    assert rep[k] == m, "standard representation is inconsistent"
                else:
                    rep[k] = m
    return tuple(rep[g] for g in range(6))


#: integral 2x2 standard-representation matrices, entries in {-1, 0, 1}
STD_REP = _build_standard_rep()


class AlgebraElement:
    """A vector of 6 canonical residues, indexed by the basis permutations."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p: int):
        if len(coeffs) != 6:
            raise ValueError("an algebra element has exactly 6 coefficients")
        self.p = p
        self.coeffs = tuple(int(c) % p for c in coeffs)

    @classmethod
    def delta(cls, g: int, p: int) -> "AlgebraElement":
        """The basis element for permutation index g."""
        coeffs = [0] * 6
        coeffs[g] = 1
        return cls(coeffs, p)

    @classmethod
    def scalar(cls, v: int, p: int) -> "AlgebraElement":
        return cls((v, 0, 0, 0, 0, 0), p)

    def _check(self, other: "AlgebraElement"):
        if self.p != other.p:
            raise ModulusMismatch(f"moduli differ: {self.p} vs {other.p}")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return AlgebraElement(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.p
        )

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return AlgebraElement(
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.p
        )

    def __neg__(self):
        return AlgebraElement(tuple(-a for a in self.coeffs), self.p)

    def __mul__(self, other):
        """Convolution product c(g) = sum_h a(h) * b(h^-1 g)."""
        if isinstance(other, int):
            return AlgebraElement(tuple(a * other for a in self.coeffs), self.p)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        p = self.p
        a, b = self.coeffs, other.coeffs
        out = [0] * 6
        for h in range(6):
            ah = a[h]
            if ah:
                row = CONV_INDEX[h]
                for g in range(6):
                    out[g] = (out[g] + ah * b[row[g]]) % p
        return AlgebraElement(out, p)

    def __rmul__(self, other):
        if isinstance(other, int):
            return AlgebraElement(tuple(a * other for a in self.coeffs), self.p)
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            return algebra_inverse(self) ** (-e)
        result = AlgebraElement.delta(0, self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inv(self) -> "AlgebraElement":
        return algebra_inverse(self)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        terms = [
            f"{c}*{PERM_NAMES[g]}" for g, c in enumerate(self.coeffs) if c
        ]
        return f"AlgebraElement({' + '.join(terms) or '0'} mod {self.p})"


@dataclass(frozen=True)
class WedderburnImage:
    """Semisimple components: two scalars and one 2x2 matrix over F_p."""

    triv: int
    sign: int
    std: tuple  # ((s00, s01), (s10, s11))
    p: int


def wedderburn_forward(a: AlgebraElement) -> WedderburnImage:
    """Evaluate a at the three irreducible representations."""
    p = a.p
    triv = sum(a.coeffs) % p
    sign = sum(s * c for s, c in zip(SIGNS, a.coeffs)) % p
    s = [[0, 0], [0, 0]]
    for g, c in enumerate(a.coeffs):
        if c:
            rho = STD_REP[g]
            for i in range(2):
                for j in range(2):
                    s[i][j] = (s[i][j] + c * rho[i][j]) % p
    return WedderburnImage(triv, sign, (tuple(s[0]), tuple(s[1])), p)


def wedderburn_inverse(w: WedderburnImage) -> AlgebraElement:
    """Exact two-sided inverse of wedderburn_forward.

    a(g) = 6^-1 * (triv + sgn(g)*sign + 2*Tr(rho(g^-1) * std)).
    """
    p = w.p
    inv6 = pow(6, -1, p)
    s = w.std
    coeffs = []
    for g in range(6):
        rho_inv = STD_REP[INVERSE[g]]
        tr = sum(rho_inv[i][j] * s[j][i] for i in range(2) for j in range(2))
        coeffs.append(inv6 * (w.triv + SIGNS[g] * w.sign + 2 * tr) % p)
    return AlgebraElement(coeffs, p)


def vanishing_components(a: AlgebraElement) -> tuple[str, ...]:
    """Names of the semisimple components where a is singular (empty iff invertible)."""
    w = wedderburn_forward(a)
    bad = []
    if w.triv == 0:
        bad.append("trivial")
    if w.sign == 0:
        bad.append("sign")
    det = (w.std[0][0] * w.std[1][1] - w.std[0][1] * w.std[1][0]) % a.p
    if det == 0:
        bad.append("standard")
    return tuple(bad)


def is_invertible(a: AlgebraElement) -> bool:
    return not vanishing_components(a)


def algebra_inverse(a: AlgebraElement) -> AlgebraElement:
    """Invert via the semisimple components; fails iff any component vanishes."""
    bad = vanishing_components(a)
    if bad:
        raise NotInvertible(
            f"algebra element is singular in component(s): {', '.join(bad)}",
            components=bad,
        )
    p = a.p
    w = wedderburn_forward(a)
    s = w.std
    det = (s[0][0] * s[1][1] - s[0][1] * s[1][0]) % p
    dinv = pow(det, -1, p)
    std_inv = (
        (s[1][1] * dinv % p, -s[0][1] * dinv % p),
        (-s[1][0] * dinv % p, s[0][0] * dinv % p),
    )
    img = WedderburnImage(pow(w.triv, -1, p), pow(w.sign, -1, p), std_inv, p)
    return wedderburn_inverse(img)


def regular_representation(a: AlgebraElement):
    """6x6 left-multiplication matrix over F_p: column j is a * delta_j.

    Kept as an independent invertibility oracle for the component criterion.
    """
    m = [[0] * 6 for _ in range(6)]
    for h, c in enumerate(a.coeffs):
        if c:
            for j in range(6):
                m[CAYLEY[h][j]][j] = (m[CAYLEY[h][j]][j] + c) % a.p
    return m


class GroupAlgebra:
    """Ring adapter for F_p[S3], as consumed by the generic matrix layer."""

    commutative = False

    def __init__(self, p: int):
        if p in (2, 3):
            raise ValueError("the algebra is only supported away from characteristic 2 and 3")
        self.p = p

    @property
    def zero(self) -> AlgebraElement:
        return AlgebraElement((0,) * 6, self.p)

    @property
    def one(self) -> AlgebraElement:
        return AlgebraElement.delta(0, self.p)

    def delta(self, g: int) -> AlgebraElement:
        return AlgebraElement.delta(g, self.p)

    def scalar(self, v: int) -> AlgebraElement:
        return AlgebraElement.scalar(v, self.p)

    def inv(self, a: AlgebraElement) -> AlgebraElement:
        return algebra_inverse(a)

    def element(self, coeffs) -> AlgebraElement:
        return AlgebraElement(coeffs, self.p)

    def random_element(self, rng: random.Random) -> AlgebraElement:
        return AlgebraElement(tuple(rng.randrange(self.p) for _ in range(6)), self.p)

    def random_invertible(self, rng: random.Random) -> AlgebraElement:
        while True:
            a = self.random_element(rng)
            if is_invertible(a):
                return a

    def __eq__(self, other):
        return isinstance(other, GroupAlgebra) and other.p == self.p

    def __hash__(self):
        return hash(("GroupAlgebra", self.p))

    def __repr__(self):
        return f"GroupAlgebra(F_{self.p}[S3])"
