"""Independent oracles shared by the test modules.

These deliberately avoid the library's computation paths: determinants are
Laplace cofactor expansions, convolution multiplies basis elements pairwise
through the raw composition table, and inverses come from adjugates.
"""

import numpy as np

from ncdh.field import Fp
from ncdh.ncmatrix import SquareMatrix
from ncdh.platform import PlatformMatrix
from ncdh.s3 import CAYLEY, AlgebraElement, GroupAlgebra


def laplace_det(m: SquareMatrix):
    """Classical determinant by cofactor expansion along the first row."""
    if m.n == 1:
        return m[0, 0]
    acc = None
    for j in range(m.n):
        term = m[0, j] * laplace_det(m.minor(0, j))
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def adjugate_inverse(m: SquareMatrix) -> SquareMatrix:
    """Inverse over a commutative field ring via the adjugate."""
    det = laplace_det(m)
    dinv = m.ring.inv(det)
    n = m.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            cof = laplace_det(m.minor(j, i))
            if (i + j) % 2:
                cof = -cof
            row.append(cof * dinv)
        rows.append(tuple(row))
    return SquareMatrix(tuple(rows), m.ring)


def pairwise_convolution(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Product by expanding both factors over the basis and composing."""
    p = a.p
    out = [0] * 6
    for g, ca in enumerate(a.coeffs):
        for h, cb in enumerate(b.coeffs):
            out[CAYLEY[g][h]] = (out[CAYLEY[g][h]] + ca * cb) % p
    return AlgebraElement(out, p)


def random_field_matrix(rng, fp: Fp, n: int) -> SquareMatrix:
    return SquareMatrix(
        tuple(tuple(fp(rng.randrange(fp.p)) for _ in range(n)) for _ in range(n)), fp
    )


def random_invertible_field_matrix(rng, fp: Fp, n: int) -> SquareMatrix:
    while True:
        m = random_field_matrix(rng, fp, n)
        if not laplace_det(m).is_zero():
            return m


def random_algebra_matrix(rng, ga: GroupAlgebra, n: int = 2) -> SquareMatrix:
    return SquareMatrix(
        tuple(tuple(ga.random_element(rng) for _ in range(n)) for _ in range(n)), ga
    )


def random_platform_matrix(rng, p: int) -> PlatformMatrix:
    arr = np.array(
        [[[rng.randrange(p) for _ in range(6)] for _ in range(2)] for _ in range(2)],
        dtype=np.int64,
    )
    return PlatformMatrix(arr, p)


def random_invertible_platform(rng, p: int) -> PlatformMatrix:
    from ncdh.platform import is_invertible

    while True:
        m = random_platform_matrix(rng, p)
        if is_invertible(m):
            return m
