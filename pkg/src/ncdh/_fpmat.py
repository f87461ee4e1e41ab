"""Small dense matrices over F_p (numpy int64 with a big-int fallback).

The numpy path is valid while accumulated products stay inside int64, i.e.
for p below FAST_MODULUS_LIMIT; larger moduli route through exact Python
integers. Gaussian elimination and characteristic polynomials always use
Python integers (they are never on a hot path).
"""

import numpy as np

from .errors import NotInvertible

#: moduli below this bound are safe for int64 kernel arithmetic
FAST_MODULUS_LIMIT = 1 << 29


def identity(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.int64)


def asarray(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return a


def _matmul_py(a, b, p):
    k = len(a)
    return [
        [sum(a[i][t] * b[t][j] for t in range(k)) % p for j in range(k)]
        for i in range(k)
    ]


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if p < FAST_MODULUS_LIMIT:
        return (a @ b) % p
    return np.array(_matmul_py(a.tolist(), b.tolist(), p), dtype=np.int64)


def matpow(a: np.ndarray, e: int, p: int) -> np.ndarray:
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result = identity(a.shape[0])
    base = a % p
    while e:
        if e & 1:
            result = matmul(result, base, p)
        base = matmul(base, base, p)
        e >>= 1
    return result


def det_mod(a: np.ndarray, p: int) -> int:
    """Determinant mod p by Gaussian elimination with modular pivots."""
    m = [[int(v) % p for v in row] for row in a.tolist()]
    k = len(m)
    det = 1
    for col in range(k):
        pivot = next((r for r in range(col, k) if m[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det = det * m[col][col] % p
        inv = pow(m[col][col], -1, p)
        for r in range(col + 1, k):
            if m[r][col]:
                f = m[r][col] * inv % p
                m[r] = [(v - f * w) % p for v, w in zip(m[r], m[col])]
    return det % p


def inv_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Inverse mod p by Gauss-Jordan; raises NotInvertible on singular input."""
    m = [[int(v) % p for v in row] for row in a.tolist()]
    k = len(m)
    aug = [row + [1 if i == j else 0 for j in range(k)] for i, row in enumerate(m)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if aug[r][col]), None)
        if pivot is None:
            raise NotInvertible(f"matrix is singular mod {p}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [v * inv % p for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(v - f * w) % p for v, w in zip(aug[r], aug[col])]
    return np.array([row[k:] for row in aug], dtype=np.int64)


def charpoly(a: np.ndarray, p: int) -> tuple[int, ...]:
    """Monic characteristic polynomial det(xI - A); coefficients returned
    descending from x^(k-1) down to x^0 (the leading 1 is omitted).

    Computed by evaluating at k+1 points and Lagrange interpolation, which
    needs p > k; the package never sees k > 6 and p >= 5.
    """
    k = a.shape[0]
    if p <= k:
        raise ValueError("modulus too small for interpolation")
    xs = list(range(k + 1))
    ys = []
    for x in xs:
        m = (x * identity(k) - a) % p
        ys.append(det_mod(m, p))
    # Lagrange interpolation to full coefficient vector (degree k).
    coeffs = [0] * (k + 1)
    for idx, xi in enumerate(xs):
        # numerator poly prod_{j != idx} (X - xj), times yi / prod (xi - xj)
        num = [1]
        denom = 1
        for jdx, xj in enumerate(xs):
            if jdx == idx:
                continue
            num = [
                ((num[t] if t < len(num) else 0) * (-xj) + (num[t - 1] if t >= 1 else 0)) % p
                for t in range(len(num) + 1)
            ]
            denom = denom * (xi - xj) % p
        scale = ys[idx] * pow(denom, -1, p) % p
        for t, cv in enumerate(num):
            coeffs[t] = (coeffs[t] + scale * cv) % p
    # coeffs[t] multiplies X^t; leading coefficient must be 1
    assert coeffs[k] == 1 % p, "interpolation produced a non-monic polynomial"
    return tuple(coeffs[k - 1 :: -1])
