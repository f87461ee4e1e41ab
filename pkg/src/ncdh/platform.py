"""The platform group GL2(F_p[S3]).

Matrices are int64 arrays of shape (2, 2, 6) (entry (i, j) holds the 6
algebra coefficients). For moduli below the int64 safety bound the arithmetic
runs on the kernel backend; larger moduli use exact Python integers.

Inversion and order computation go through the semisimple block transform
M -> (A1, A2, A4) with A1, A2 in Mat2(F_p) and A4 in Mat4(F_p): a platform
matrix is invertible iff all three blocks are, and its multiplicative order
is the lcm of the block orders, each obtained by stripping primes from the
factored block group order.
"""

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _backend, _fpmat
from ._fpmat import FAST_MODULUS_LIMIT
from .errors import (
    CharacteristicExcluded,
    ModulusMismatch,
    NoNoncommutingTorus,
    NotInvertible,
    ThresholdUnreachable,
)
from .field import _check_modulus
from .ncmatrix import SquareMatrix, structured_invertible
from .primes import factorize, largest_divisor_in_range
from .s3 import (
    CONV_INDEX,
    INVERSE,
    SIGNS,
    STD_REP,
    AlgebraElement,
    GroupAlgebra,
)

CONV = np.array(CONV_INDEX, dtype=np.int64)
RHO = np.array(STD_REP, dtype=np.int64)  # (6, 2, 2), entries in {-1, 0, 1}
RHO_INV = np.array([STD_REP[INVERSE[g]] for g in range(6)], dtype=np.int64)
SGN = np.array(SIGNS, dtype=np.int64)

STRUCTURED_KINDS = ("upper", "lower", "schur")

_BLOCK_NAMES = ("trivial", "sign", "standard")


def _py_mul(a, b, p):
    """Exact 2x2 product over the algebra on nested lists of Python ints."""
    out = [[[0] * 6 for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            acc = out[i][j]
            for k in range(2):
                ae = a[i][k]
                be = b[k][j]
                for h in range(6):
                    ah = ae[h]
                    if ah:
                        row = CONV_INDEX[h]
                        for g in range(6):
                            acc[g] = (acc[g] + ah * be[row[g]]) % p
    return out


class PlatformMatrix:
    """Immutable 2x2 matrix over F_p[S3]."""

    __slots__ = ("arr", "p")

    def __init__(self, arr, p: int):
        a = np.array(arr, dtype=np.int64)
        if a.shape != (2, 2, 6):
            raise ValueError(f"expected shape (2, 2, 6), got {a.shape}")
        a %= p
        a.flags.writeable = False
        self.arr = a
        self.p = p

    # -- construction ------------------------------------------------------

    @classmethod
    def identity(cls, p: int) -> "PlatformMatrix":
        a = np.zeros((2, 2, 6), dtype=np.int64)
        a[0, 0, 0] = 1
        a[1, 1, 0] = 1
        return cls(a, p)

    @classmethod
    def from_entries(cls, e00, e01, e10, e11) -> "PlatformMatrix":
        p = e00.p
        for e in (e01, e10, e11):
            if e.p != p:
                raise ModulusMismatch("entries have mixed moduli")
        a = np.array(
            [[e00.coeffs, e01.coeffs], [e10.coeffs, e11.coeffs]], dtype=np.int64
        )
        return cls(a, p)

    @classmethod
    def from_square_matrix(cls, m: SquareMatrix) -> "PlatformMatrix":
        if m.n != 2:
            raise ValueError("platform matrices are 2x2")
        return cls.from_entries(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def to_square_matrix(self) -> SquareMatrix:
        ga = GroupAlgebra(self.p)
        rows = tuple(
            tuple(AlgebraElement(self.arr[i, j].tolist(), self.p) for j in range(2))
            for i in range(2)
        )
        return SquareMatrix(rows, ga)

    def entry(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement(self.arr[i, j].tolist(), self.p)

    # -- arithmetic --------------------------------------------------------

    @property
    def _fast(self) -> bool:
        return self.p < FAST_MODULUS_LIMIT

    def _check(self, other: "PlatformMatrix"):
        if self.p != other.p:
            raise ModulusMismatch(f"moduli differ: {self.p} vs {other.p}")

    def __mul__(self, other):
        if not isinstance(other, PlatformMatrix):
            return NotImplemented
        self._check(other)
        if self._fast:
            return PlatformMatrix(_backend.pm_mul(self.arr, other.arr, self.p, CONV), self.p)
        def tolists(m):
            return [[m.arr[i, j].tolist() for j in range(2)] for i in range(2)]
        return PlatformMatrix(np.array(_py_mul(tolists(self), tolists(other), self.p)), self.p)

    def pow(self, e: int) -> "PlatformMatrix":
        if e < 0:
            return inverse(self).pow(-e)
        result = PlatformMatrix.identity(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    __pow__ = pow

    def conjugate_by_torus(self, x: int, y: int) -> "PlatformMatrix":
        """T M T^-1 for the torus element T = [[x, y], [y, x]]."""
        p = self.p
        x %= p
        y %= p
        if (x * x - y * y) % p == 0:
            raise NotInvertible("torus parameters need x^2 != y^2")
        if self._fast:
            return PlatformMatrix(_backend.torus_conj(self.arr, x, y, p), p)
        t = TorusElement(x, y, p)
        return t.to_matrix() * self * t.inverse().to_matrix()

    def is_identity(self) -> bool:
        return self == PlatformMatrix.identity(self.p)

    def __eq__(self, other):
        if not isinstance(other, PlatformMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.arr, other.arr)

    def __hash__(self):
        return hash((self.p, self.arr.tobytes()))

    # -- serialization -----------------------------------------------------

    @property
    def byte_width(self) -> int:
        return (self.p.bit_length() + 7) // 8

    def coefficients(self) -> list[int]:
        """The 24 coefficients: entries row-major, basis order within each."""
        return [int(v) for v in self.arr.reshape(24)]

    def to_bytes(self) -> bytes:
        w = self.byte_width
        return b"".join(v.to_bytes(w, "big") for v in self.coefficients())

    @classmethod
    def from_bytes(cls, data: bytes, p: int) -> "PlatformMatrix":
        w = (p.bit_length() + 7) // 8
        if len(data) != 24 * w:
            raise ValueError(f"expected {24 * w} bytes, got {len(data)}")
        vals = [int.from_bytes(data[i * w : (i + 1) * w], "big") for i in range(24)]
        if any(v >= p for v in vals):
            raise ValueError("non-canonical coefficient in serialized matrix")
        return cls(np.array(vals, dtype=np.int64).reshape(2, 2, 6), p)

    def to_hex_list(self) -> list[str]:
        w = self.byte_width
        return [v.to_bytes(w, "big").hex() for v in self.coefficients()]

    @classmethod
    def from_hex_list(cls, items, p: int) -> "PlatformMatrix":
        if len(items) != 24:
            raise ValueError(f"expected 24 hex coefficients, got {len(items)}")
        return cls.from_bytes(b"".join(bytes.fromhex(s) for s in items), p)

    def __repr__(self):
        return f"PlatformMatrix(p={self.p}, coeffs={self.coefficients()})"


@dataclass(frozen=True)
class TorusElement:
    """[[x, y], [y, x]] with x^2 != y^2; the commuting conjugator family."""

    x: int
    y: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "x", self.x % self.p)
        object.__setattr__(self, "y", self.y % self.p)
        if (self.x * self.x - self.y * self.y) % self.p == 0:
            raise NotInvertible("torus element needs x^2 != y^2")

    def to_matrix(self) -> PlatformMatrix:
        a = np.zeros((2, 2, 6), dtype=np.int64)
        a[0, 0, 0] = self.x
        a[1, 1, 0] = self.x
        a[0, 1, 0] = self.y
        a[1, 0, 0] = self.y
        return PlatformMatrix(a, self.p)

    def inverse(self) -> "TorusElement":
        s = pow((self.x * self.x - self.y * self.y) % self.p, -1, self.p)
        return TorusElement(s * self.x % self.p, -s * self.y % self.p, self.p)

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        if self.p != other.p:
            raise ModulusMismatch("torus elements have different moduli")
        x = (self.x * other.x + self.y * other.y) % self.p
        y = (self.x * other.y + self.y * other.x) % self.p
        return TorusElement(x, y, self.p)

    def conjugate(self, m: PlatformMatrix) -> PlatformMatrix:
        if m.p != self.p:
            raise ModulusMismatch(f"moduli differ: {self.p} vs {m.p}")
        return m.conjugate_by_torus(self.x, self.y)


class WedderburnBlocks:
    """Block image (A1, A2, A4) of a platform matrix."""

    __slots__ = ("a1", "a2", "a4", "p")

    def __init__(self, a1, a2, a4, p):
        self.a1 = np.asarray(a1, dtype=np.int64) % p
        self.a2 = np.asarray(a2, dtype=np.int64) % p
        self.a4 = np.asarray(a4, dtype=np.int64) % p
        if self.a1.shape != (2, 2) or self.a2.shape != (2, 2) or self.a4.shape != (4, 4):
            raise ValueError("blocks must have shapes (2,2), (2,2), (4,4)")
        self.p = p

    def __eq__(self, other):
        if not isinstance(other, WedderburnBlocks):
            return NotImplemented
        return (
            self.p == other.p
            and np.array_equal(self.a1, other.a1)
            and np.array_equal(self.a2, other.a2)
            and np.array_equal(self.a4, other.a4)
        )

    def __repr__(self):
        return f"WedderburnBlocks(p={self.p}, a1={self.a1.tolist()}, a2={self.a2.tolist()}, a4={self.a4.tolist()})"


def wedderburn_blocks(m: PlatformMatrix) -> WedderburnBlocks:
    """Apply the semisimple transform entrywise; the 2x2 standard images sit
    in A4 as the (i, j) 2x2 blocks."""
    p = m.p
    arr = m.arr
    if m._fast:
        a1 = arr.sum(axis=2) % p
        a2 = (arr * SGN).sum(axis=2) % p
        std = np.einsum("ijg,gab->iajb", arr, RHO) % p
        a4 = std.reshape(4, 4)
        return WedderburnBlocks(a1, a2, a4, p)
    a1 = [[0] * 2 for _ in range(2)]
    a2 = [[0] * 2 for _ in range(2)]
    a4 = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            coeffs = [int(v) for v in arr[i, j]]
            a1[i][j] = sum(coeffs) % p
            a2[i][j] = sum(s * c for s, c in zip(SIGNS, coeffs)) % p
            for a in range(2):
                for b in range(2):
                    a4[2 * i + a][2 * j + b] = (
                        sum(c * STD_REP[g][a][b] for g, c in enumerate(coeffs)) % p
                    )
    return WedderburnBlocks(a1, a2, a4, p)


def from_wedderburn_blocks(blocks: WedderburnBlocks) -> PlatformMatrix:
    """Inverse of wedderburn_blocks (exact ring isomorphism)."""
    p = blocks.p
    inv6 = pow(6, -1, p)
    if p < FAST_MODULUS_LIMIT:
        r = blocks.a4.reshape(2, 2, 2, 2)  # r[i, a, j, b] = a4[2i+a, 2j+b]
        tr = np.einsum("gab,ibja->ijg", RHO_INV, r)
        coeffs = (
            blocks.a1[:, :, None] + SGN[None, None, :] * blocks.a2[:, :, None] + 2 * tr
        ) * inv6 % p
        return PlatformMatrix(coeffs, p)
    out = np.zeros((2, 2, 6), dtype=np.int64)
    a1, a2, a4 = blocks.a1.tolist(), blocks.a2.tolist(), blocks.a4.tolist()
    for i in range(2):
        for j in range(2):
            for g in range(6):
                rho = STD_REP[INVERSE[g]]
                tr = sum(rho[a][b] * a4[2 * i + b][2 * j + a] for a in range(2) for b in range(2))
                out[i, j, g] = inv6 * (a1[i][j] + SIGNS[g] * a2[i][j] + 2 * tr) % p
    return PlatformMatrix(out, p)


def singular_blocks(m: PlatformMatrix) -> tuple[str, ...]:
    blocks = wedderburn_blocks(m)
    bad = []
    for name, blk in zip(_BLOCK_NAMES, (blocks.a1, blocks.a2, blocks.a4)):
        if _fpmat.det_mod(blk, m.p) == 0:
            bad.append(name)
    return tuple(bad)


def is_invertible(m: PlatformMatrix) -> bool:
    return not singular_blocks(m)


def inverse(m: PlatformMatrix) -> PlatformMatrix:
    """Invert through the block isomorphism (Gaussian elimination per block)."""
    blocks = wedderburn_blocks(m)
    inverted = []
    bad = []
    for name, blk in zip(_BLOCK_NAMES, (blocks.a1, blocks.a2, blocks.a4)):
        try:
            inverted.append(_fpmat.inv_mod(blk, m.p))
        except NotInvertible:
            bad.append(name)
    if bad:
        raise NotInvertible(
            f"matrix is singular in block(s): {', '.join(bad)}", components=bad
        )
    return from_wedderburn_blocks(WedderburnBlocks(*inverted, m.p))


def block_charpolys(m: PlatformMatrix):
    """Characteristic polynomials of the three blocks (a similarity invariant)."""
    blocks = wedderburn_blocks(m)
    return (
        _fpmat.charpoly(blocks.a1, m.p),
        _fpmat.charpoly(blocks.a2, m.p),
        _fpmat.charpoly(blocks.a4, m.p),
    )


# -- group and element orders ----------------------------------------------

_CYCLOTOMIC = {
    1: lambda p: p - 1,
    2: lambda p: p + 1,
    3: lambda p: p * p + p + 1,
    4: lambda p: p * p + 1,
}


def gl_order(p: int, k: int) -> int:
    """|GL_k(F_p)| = prod_{i=0}^{k-1} (p^k - p^i)."""
    return math.prod(p**k - p**i for i in range(k))


@lru_cache(maxsize=None)
def gl_order_factored(p: int, k: int) -> tuple[tuple[int, int], ...]:
    """Factorization of |GL_k(F_p)| assembled from the cyclotomic pieces
    p, p-1, p+1, p^2+1, p^2+p+1 (k <= 4), never from the monolithic product."""
    if k > 4:
        raise ValueError("factored orders are provided for k <= 4 only")
    factors: dict[int, int] = {p: k * (k - 1) // 2}
    for i in range(1, k + 1):
        for d, piece in _CYCLOTOMIC.items():
            if i % d == 0:
                for q, e in factorize(piece(p)).items():
                    factors[q] = factors.get(q, 0) + e
    return tuple(sorted(factors.items()))


def unit_group_order(p: int) -> int:
    """|GL_2(F_p[S3])| = p^8 (p-1)^8 (p+1)^4 (p^2+1) (p^2+p+1).

    Valid away from characteristic 2 and 3, where the algebra is semisimple.
    """
    if p in (2, 3):
        raise CharacteristicExcluded("the order formula requires characteristic not in {2, 3}")
    p = _check_modulus(p)
    return p**8 * (p - 1) ** 8 * (p + 1) ** 4 * (p * p + 1) * (p * p + p + 1)


def fp_matrix_order(a: np.ndarray, p: int) -> int:
    """Exact multiplicative order of an invertible k x k matrix over F_p."""
    a = np.asarray(a, dtype=np.int64) % p
    k = a.shape[0]
    if _fpmat.det_mod(a, p) == 0:
        raise NotInvertible("matrix is singular; order undefined")
    ident = _fpmat.identity(k)
    group = dict(gl_order_factored(p, k))
    n_full = 1
    for q, e in group.items():
        n_full *= q**e
    order = 1
    for q, e in group.items():
        b = _fpmat.matpow(a, n_full // q**e, p)
        d = 0
        while not np.array_equal(b, ident):
            b = _fpmat.matpow(b, q, p)
            d += 1
            if d > e:
                raise ArithmeticError("order computation exceeded the group exponent")
        order *= q**d
    return order


def element_order(m: PlatformMatrix) -> int:
    """Exact multiplicative order: lcm of the block orders."""
    blocks = wedderburn_blocks(m)
    bad = [
        name
        for name, blk in zip(_BLOCK_NAMES, (blocks.a1, blocks.a2, blocks.a4))
        if _fpmat.det_mod(blk, m.p) == 0
    ]
    if bad:
        raise NotInvertible(
            f"matrix is singular in block(s): {', '.join(bad)}", components=bad
        )
    o1 = fp_matrix_order(blocks.a1, m.p)
    o2 = fp_matrix_order(blocks.a2, m.p)
    o4 = fp_matrix_order(blocks.a4, m.p)
    return math.lcm(o1, o2, o4)


# -- samplers ----------------------------------------------------------------

def random_structured(rng: random.Random, ga: GroupAlgebra):
    """One random guaranteed-invertible 2x2 over the algebra, with inverse."""
    kind = STRUCTURED_KINDS[rng.randrange(3)]
    if kind == "schur":
        return structured_invertible(
            "schur",
            u=ga.random_invertible(rng),
            b=ga.random_element(rng),
            c=ga.random_element(rng),
            ring=ga,
        )
    return structured_invertible(
        kind,
        a=ga.random_invertible(rng),
        b=ga.random_invertible(rng),
        c=ga.random_element(rng),
        ring=ga,
    )


def commutes_with_torus(m: PlatformMatrix) -> bool:
    """True iff m commutes with every torus element (exact: the torus is
    generated over the scalars by the antidiagonal element)."""
    j = np.zeros((2, 2, 6), dtype=np.int64)
    j[0, 1, 0] = 1
    j[1, 0, 0] = 1
    jm = PlatformMatrix(j, m.p)
    return jm * m == m * jm


def sample_platform_element(
    rng: random.Random,
    p: int,
    steps: int,
    min_order: int,
    max_order: int | None = None,
    retry_cap: int = 64,
) -> PlatformMatrix:
    """Product of `steps` random structured invertibles, resampled until the
    element order reaches min_order (and, when max_order is given, replaced
    by a power whose order lands in [min_order, max_order])."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    ga = GroupAlgebra(p)
    if steps == 0:
        if min_order <= 1:
            return PlatformMatrix.identity(p)
        raise ThresholdUnreachable(
            "steps=0 always yields the identity (order 1)"
        )
    for _ in range(retry_cap):
        prod = None
        for _ in range(steps):
            x, _ = random_structured(rng, ga)
            prod = x if prod is None else prod * x
        m = PlatformMatrix.from_square_matrix(prod)
        o = element_order(m)
        if max_order is not None and o > max_order:
            target = largest_divisor_in_range(factorize(o), min_order, max_order)
            if target is None:
                continue
            m = m.pow(o // target)
            o = target
        if o >= min_order:
            return m
    raise ThresholdUnreachable(
        f"no element of order >= {min_order} found in {retry_cap} attempts"
    )


def sample_torus(rng: random.Random, x: PlatformMatrix, max_tries: int = 100000) -> TorusElement:
    """Uniform torus element with x^2 != y^2, resampled until it does not
    commute with the base matrix. Raises NoNoncommutingTorus when the base
    matrix centralizes the whole torus (checked exactly up front)."""
    if commutes_with_torus(x):
        raise NoNoncommutingTorus("base matrix commutes with every torus element")
    p = x.p
    for _ in range(max_tries):
        tx = rng.randrange(p)
        ty = rng.randrange(p)
        if (tx * tx - ty * ty) % p == 0:
            continue
        t = TorusElement(tx, ty, p)
        tm = t.to_matrix()
        if tm * x == x * tm:
            continue
        return t
    raise RuntimeError("torus sampling failed to terminate")  # unreachable in practice


def warmup_backend() -> None:
    """Compile the kernels once (cheap no-op on the numpy backend)."""
    _backend.warmup(CONV)
