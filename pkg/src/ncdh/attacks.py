"""Cryptanalysis toolkit.

Three routes:

* conjugation_table_attack — the table attack on the noncommutative
  platform: tabulate X^1..X^n, then scan torus candidates T and probe
  T Y T^-1 against the table. ``naive`` scans every (x, y) with
  x^2 != y^2 (O(q^2) candidates); ``normalized`` exploits that scalars are
  central, so only T_{1,m} (m != +-1) and T_{0,1} matter (O(q) candidates).
  Any hit (k0, T0) with T0 Y_A T0^-1 = X^{k0} yields the honest shared key
  as T0^-1 (Y_B)^{k0} T0, because torus elements commute.

* determinant_reduction / eigenvalue_attack — the classical break of
  commutative 2x2 platforms: determinants give a congruence on the secret
  exponent; eigenvalues (possibly in F_p^2) give the exponent itself up to
  pairing ambiguity, after which the conjugator is a 2-unknown linear solve
  over the torus.

* power_determinant_scan — samples witnesses that the noncommutative
  determinant does NOT propagate through powers (nc_det(X^2) != nc_det(X)^2),
  i.e. the determinant reduction has no noncommutative analogue.

Cost accounting: building the table costs n-1 multiplications and each
scanned valid candidate costs one conjugation unit, so
ops <= n + #candidates. Counters are exposed in the report and asserted
machine-independently by the test suite.
"""

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend, _fpmat
from .errors import (
    Exhausted,
    NoTorusSolution,
    NotInvertible,
    RepeatedEigenvalue,
    ResourceCap,
    ScalarX,
    Uninformative,
)
from .field import FieldElement, Fp2, QuadExtElement, legendre
from .ncmatrix import SquareMatrix, nc_determinant
from .platform import (
    CONV,
    PlatformMatrix,
    TorusElement,
    fp_matrix_order,
    is_invertible,
)
from .primes import factorize
from .protocol import PublicParams
from .s3 import GroupAlgebra
from .s3 import is_invertible as algebra_is_invertible

DEFAULT_MAX_TABLE = 1 << 18
DEFAULT_MAX_NAIVE_P = 1 << 11
DEFAULT_MAX_NORMALIZED_P = 1 << 20


@dataclass(frozen=True)
class AttackReport:
    mode: str
    recovered_a: int | None
    recovered_torus: tuple[int, int] | None  # (x, y) of the recovered conjugator
    recovered_key: object | None  # PlatformMatrix, or 2x2 array for field platforms
    candidates_tested: int
    table_size: int
    ops: int
    elapsed_s: float


@dataclass(frozen=True)
class Congruence:
    residue: int
    modulus: int


@dataclass(frozen=True)
class ScanResult:
    differs: int
    trials: int


def report_to_dict(report: AttackReport) -> dict:
    d = {
        "mode": report.mode,
        "recovered_a": format(report.recovered_a, "x") if report.recovered_a is not None else None,
        "T": None,
        "ops": report.ops,
        "table_size": report.table_size,
        "candidates_tested": report.candidates_tested,
        "elapsed_ms": round(report.elapsed_s * 1000.0, 3),
    }
    if report.recovered_torus is not None:
        d["T"] = [format(v, "x") for v in report.recovered_torus]
    key = report.recovered_key
    if isinstance(key, PlatformMatrix):
        d["recovered_k"] = key.to_hex_list()
    elif key is not None:
        d["recovered_k"] = [format(int(v), "x") for v in np.asarray(key).reshape(-1)]
    return d


def report_from_dict(d: dict, p: int | None = None) -> AttackReport:
    """Read a report document back (the key matrix needs the modulus p)."""
    torus = tuple(int(v, 16) for v in d["T"]) if d.get("T") else None
    key = None
    if d.get("recovered_k") is not None:
        if p is None:
            raise ValueError("reading the recovered key needs the modulus p")
        raw = d["recovered_k"]
        if len(raw) == 24:
            key = PlatformMatrix.from_hex_list(raw, p)
        else:
            key = np.array([int(v, 16) for v in raw], dtype=np.int64).reshape(2, 2)
    return AttackReport(
        mode=d["mode"],
        recovered_a=int(d["recovered_a"], 16) if d.get("recovered_a") is not None else None,
        recovered_torus=torus,
        recovered_key=key,
        candidates_tested=int(d["candidates_tested"]),
        table_size=int(d["table_size"]),
        ops=int(d["ops"]),
        elapsed_s=float(d["elapsed_ms"]) / 1000.0,
    )


# ---------------------------------------------------------------------------
# discrete logarithms
# ---------------------------------------------------------------------------

def bsgs_dlog(g, h, order: int):
    """Least x >= 0 with g^x = h, or None; g must satisfy g^order = 1.

    Works for any hashable group element with * and ** (field or quadratic
    extension elements). O(sqrt(order)) time and space.
    """
    if order < 1:
        raise ValueError("order must be positive")
    one = g ** 0
    if h == one:
        return 0
    m = math.isqrt(order - 1) + 1
    baby = {}
    cur = one
    for j in range(m):
        if cur not in baby:
            baby[cur] = j
        cur = cur * g
    giant = g ** ((-m) % order)
    cur = h
    for i in range(m + 1):
        j = baby.get(cur)
        if j is not None:
            return i * m + j
        cur = cur * giant
    return None


def crt_pair(r1: int, m1: int, r2: int, m2: int):
    """Combine x = r1 (mod m1), x = r2 (mod m2); None when inconsistent."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    l = math.lcm(m1, m2)
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g)
    return (r1 + m1 * t) % l, l


# ---------------------------------------------------------------------------
# the table attack on the noncommutative platform
# ---------------------------------------------------------------------------

def _split_ranges(lo: int, hi: int, parts: int):
    span = hi - lo
    parts = max(1, min(parts, span)) if span > 0 else 1
    step = (span + parts - 1) // parts
    out = []
    start = lo
    while start < hi:
        out.append((start, min(start + step, hi)))
        start += step
    return out or [(lo, hi)]


def conjugation_table_attack(
    params: PublicParams,
    token_a: PlatformMatrix,
    token_b: PlatformMatrix,
    mode: str = "normalized",
    threads: int | None = None,
    max_table: int = DEFAULT_MAX_TABLE,
    max_naive_p: int = DEFAULT_MAX_NAIVE_P,
    max_normalized_p: int = DEFAULT_MAX_NORMALIZED_P,
) -> AttackReport:
    """Recover (a, T) from a transcript and reconstruct the shared key.

    Step 1 tabulates X^k for k = 1..n under a sorted 64-bit hash index.
    Step 2 scans torus candidates T and probes T Y_A T^-1 against the table.
    Step 3, on a hit (k0, T0), returns a = k0, T = T0^-1 and the key
    T0^-1 (Y_B)^{k0} T0. Raises Exhausted when no candidate matches and
    ResourceCap when n or p exceeds the desk-scale limits.
    """
    if mode not in ("naive", "normalized"):
        raise ValueError("mode must be 'naive' or 'normalized'")
    p = params.p
    n = params.n
    if p >= _fpmat.FAST_MODULUS_LIMIT:
        raise ResourceCap(f"modulus {p} exceeds the kernel bound {_fpmat.FAST_MODULUS_LIMIT}")
    if n > max_table:
        raise ResourceCap(f"table of {n} powers exceeds the cap {max_table}")
    if mode == "naive" and p > max_naive_p:
        raise ResourceCap(f"naive scan over p={p} exceeds the cap {max_naive_p}")
    if mode == "normalized" and p > max_normalized_p:
        raise ResourceCap(f"normalized scan over p={p} exceeds the cap {max_normalized_p}")
    for name, token in (("A", token_a), ("B", token_b)):
        if token.p != p:
            raise ValueError(f"token {name} has modulus {token.p}, params have {p}")
        if not is_invertible(token):
            raise NotInvertible(f"token {name} is not invertible")

    start = time.perf_counter()
    table, hashes = _backend.build_table(params.X.arr, n, p, CONV)
    order = np.argsort(hashes, kind="stable").astype(np.int64)
    hsorted = hashes[order]
    table_ops = n - 1

    nthreads = _backend.thread_count(threads)
    ya = token_a.arr
    if mode == "naive":
        ranges = _split_ranges(0, p, nthreads)
        jobs = [
            (_backend.scan_naive, (ya, p, lo, hi, table, hsorted, order))
            for lo, hi in ranges
        ]
    else:
        ranges = _split_ranges(0, p, nthreads)
        jobs = [
            (
                _backend.scan_normalized,
                (ya, p, lo, hi, hi == p, table, hsorted, order),
            )
            for lo, hi in ranges
        ]

    if len(jobs) == 1:
        results = [fn(*args) for fn, args in jobs]
    else:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            futures = [pool.submit(fn, *args) for fn, args in jobs]
            results = [f.result() for f in futures]

    tested = sum(r[5] for r in results)
    hits = [r for r in results if r[0]]
    if not hits:
        raise Exhausted(
            f"scanned {tested} candidates without a table hit; not a protocol transcript"
        )
    found = min(hits, key=lambda r: r[1])
    _, _, k0, x0, y0, _ = found
    t0 = TorusElement(int(x0), int(y0), p)
    t_rec = t0.inverse()
    key = t_rec.conjugate(token_b.pow(int(k0)))
    elapsed = time.perf_counter() - start
    return AttackReport(
        mode=mode,
        recovered_a=int(k0),
        recovered_torus=(t_rec.x, t_rec.y),
        recovered_key=key,
        candidates_tested=int(tested),
        table_size=int(n),
        ops=int(table_ops + tested),
        elapsed_s=elapsed,
    )


# ---------------------------------------------------------------------------
# commutative 2x2 platforms: determinant and eigenvalue reductions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutativeInstance:
    """A transcript over GL2(F_p): public X and the two exchanged tokens."""

    p: int
    x: np.ndarray
    token_a: np.ndarray
    token_b: np.ndarray

    @classmethod
    def build(cls, p, x, token_a, token_b):
        def arr(m):
            a = np.asarray(m, dtype=np.int64) % p
            if a.shape != (2, 2):
                raise ValueError("instance matrices are 2x2")
            return a
        inst = cls(p=p, x=arr(x), token_a=arr(token_a), token_b=arr(token_b))
        for name, m in (("x", inst.x), ("token_a", inst.token_a), ("token_b", inst.token_b)):
            if _fpmat.det_mod(m, p) == 0:
                raise NotInvertible(f"instance matrix {name} is singular")
        return inst


def charpoly2(m, p: int) -> tuple[int, int]:
    """(trace, det) of a 2x2 matrix mod p: x^2 - tr*x + det."""
    a = np.asarray(m, dtype=np.int64) % p
    tr = int((a[0, 0] + a[1, 1]) % p)
    det = int((a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]) % p)
    return tr, det


def _fp_order(v: int, p: int) -> int:
    """Multiplicative order of v in F_p*, from the factored group order."""
    if v % p == 0:
        raise NotInvertible("0 has no multiplicative order")
    order = 1
    full = p - 1
    for q, e in factorize(p - 1).items():
        b = pow(v, full // q**e, p)
        d = 0
        while b != 1:
            b = pow(b, q, p)
            d += 1
        order *= q**d
    return order


def _fp2_order(v: QuadExtElement, p: int) -> int:
    """Multiplicative order in F_p^2*, from the factored p^2 - 1."""
    order = 1
    full = p * p - 1
    for q, e in factorize(full).items():
        b = v ** (full // q**e)
        d = 0
        while not b.is_one():
            b = b**q
            d += 1
        order *= q**d
    return order


def determinant_reduction(inst: CommutativeInstance) -> Congruence:
    """a = dlog_{det X}(det Y_A) (mod ord(det X)); conjugation preserves
    determinants, so the token stands in for X^a. Uninformative iff det X = 1."""
    p = inst.p
    det_x = _fpmat.det_mod(inst.x, p)
    if det_x == 1:
        raise Uninformative("det X = 1: the determinant congruence is trivial")
    m = _fp_order(det_x, p)
    det_y = _fpmat.det_mod(inst.token_a, p)
    g = FieldElement(det_x, p)
    h = FieldElement(det_y, p)
    r = bsgs_dlog(g, h, m)
    if r is None:
        raise Exhausted("token determinant lies outside the cyclic group of det X")
    return Congruence(residue=r, modulus=m)


def _is_scalar(m: np.ndarray, p: int) -> bool:
    return m[0, 1] % p == 0 and m[1, 0] % p == 0 and (m[0, 0] - m[1, 1]) % p == 0


def _eigenvalues(m: np.ndarray, p: int, ext: Fp2) -> tuple[QuadExtElement, QuadExtElement]:
    """Both eigenvalues, in F_p^2 (embedding the split case)."""
    tr, det = charpoly2(m, p)
    disc = (tr * tr - 4 * det) % p
    root = ext.sqrt_of_base(disc)
    half = pow(2, -1, p)
    lam1 = (ext.embed(tr) + root) * ext.embed(half)
    lam2 = (ext.embed(tr) - root) * ext.embed(half)
    return lam1, lam2


def solve_torus_conjugator(a: np.ndarray, b: np.ndarray, p: int):
    """Solve T a = b T over T = [[x, y], [y, x]] with x^2 != y^2.

    The four entries give a homogeneous 4x2 linear system; a valid T exists
    iff the kernel contains a vector off the lines x = +-y (scaling is free:
    scalars are central). Returns (x, y) or None.
    """
    rows = [
        [int(a[0, 0] - b[0, 0]) % p, int(a[1, 0] - b[0, 1]) % p],
        [int(a[0, 1] - b[0, 1]) % p, int(a[1, 1] - b[0, 0]) % p],
        [int(a[1, 0] - b[1, 0]) % p, int(a[0, 0] - b[1, 1]) % p],
        [int(a[1, 1] - b[1, 1]) % p, int(a[0, 1] - b[1, 0]) % p],
    ]
    # Gaussian elimination on a 4x2 system.
    pivot_row = None
    for r in rows:
        if r[0] % p:
            pivot_row = r
            break
    if pivot_row is None:
        # x is free; eliminate using any row with a y coefficient
        nz = [r for r in rows if r[1] % p]
        if nz:
            # y must vanish: solution (1, 0)
            candidate = (1, 0)
        else:
            candidate = (1, 0)  # the zero system: T = identity works
        x, y = candidate
    else:
        inv = pow(pivot_row[0], -1, p)
        slope = (-pivot_row[1] * inv) % p  # x = slope * y
        # consistency of the remaining rows on the line (x, y) = (slope*t, t)
        for r in rows:
            if (r[0] * slope + r[1]) % p:
                # remaining constraint forces t = 0: only the zero solution
                return None
        x, y = slope, 1
    if (x * x - y * y) % p == 0:
        return None
    # exactness guard: T a = b T must hold
    t = np.array([[x, y], [y, x]], dtype=np.int64)
    if not np.array_equal(_fpmat.matmul(t, a, p), _fpmat.matmul(b, t, p)):
        return None
    return x, y


def eigenvalue_attack(inst: CommutativeInstance) -> AttackReport:
    """Recover the exponent through eigenvalue discrete logs, then the
    conjugator by a linear solve, then the shared key.

    Eigenvalues may live in F_p^2; the pairing ambiguity and the modulus
    ambiguity (the exponent is known only mod each eigenvalue order) are
    resolved by candidate enumeration with characteristic-polynomial
    verification, and each surviving candidate must admit a torus conjugator.
    """
    start = time.perf_counter()
    p = inst.p
    x = inst.x
    if _is_scalar(x, p):
        raise ScalarX("X is scalar: conjugation-invariant, the transcript is uninformative")
    tr, det = charpoly2(x, p)
    if (tr * tr - 4 * det) % p == 0:
        raise RepeatedEigenvalue("X has a repeated eigenvalue")
    ext = Fp2(p)
    lam1, lam2 = _eigenvalues(x, p, ext)
    mu1, mu2 = _eigenvalues(inst.token_a, p, ext)
    m1 = _fp2_order(lam1, p)
    m2 = _fp2_order(lam2, p)
    n = math.lcm(m1, m2)

    candidates = []
    for mu_first, mu_second in ((mu1, mu2), (mu2, mu1)):
        r1 = bsgs_dlog(lam1, mu_first, m1)
        if r1 is None:
            continue
        r2 = bsgs_dlog(lam2, mu_second, m2)
        if r2 is None:
            continue
        combined = crt_pair(r1, m1, r2, m2)
        if combined is None:
            continue
        k = combined[0] % n
        if k not in candidates:
            candidates.append(k)

    tested = 0
    ya_poly = charpoly2(inst.token_a, p)
    for k in candidates:
        tested += 1
        xk = _fpmat.matpow(inst.x, k, p)
        if charpoly2(xk, p) != ya_poly:
            continue
        sol = solve_torus_conjugator(xk, inst.token_a, p)
        if sol is None:
            continue
        tx, ty = sol
        t = np.array([[tx, ty], [ty, tx]], dtype=np.int64)
        tinv = _fpmat.inv_mod(t, p)
        ybk = _fpmat.matpow(inst.token_b, k, p)
        key = _fpmat.matmul(_fpmat.matmul(t, ybk, p), tinv, p)
        elapsed = time.perf_counter() - start
        return AttackReport(
            mode="eigen",
            recovered_a=k,
            recovered_torus=(int(tx), int(ty)),
            recovered_key=key,
            candidates_tested=tested,
            table_size=math.isqrt(m1) + math.isqrt(m2) + 2,
            ops=tested,
            elapsed_s=elapsed,
        )
    raise NoTorusSolution("no exponent candidate admits a torus conjugator")


# ---------------------------------------------------------------------------
# instance generation for the commutative attacks
# ---------------------------------------------------------------------------

def _random_torus_fp(rng: random.Random, x: np.ndarray, p: int) -> np.ndarray:
    for _ in range(100000):
        tx, ty = rng.randrange(p), rng.randrange(p)
        if (tx * tx - ty * ty) % p == 0:
            continue
        t = np.array([[tx, ty], [ty, tx]], dtype=np.int64)
        if np.array_equal(_fpmat.matmul(t, x, p), _fpmat.matmul(x, t, p)):
            continue
        return t
    raise RuntimeError("torus sampling failed to terminate")


def random_commutative_instance(
    rng: random.Random, p: int, nonsplit: bool | None = None
):
    """A seeded honest transcript over GL2(F_p), plus its secrets and key.

    nonsplit=True forces eigenvalues in F_p^2 \\ F_p; False forces split;
    None leaves it to chance. Returns (instance, a, b, honest_key).
    """
    while True:
        x = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)], dtype=np.int64)
        if _fpmat.det_mod(x, p) == 0 or _is_scalar(x, p):
            continue
        # torus-shaped X commutes with every torus element: unusable
        if x[0, 1] == x[1, 0] and x[0, 0] == x[1, 1]:
            continue
        tr, det = charpoly2(x, p)
        disc = (tr * tr - 4 * det) % p
        if disc == 0:
            continue
        split = legendre(disc, p) == 1
        if nonsplit is True and split:
            continue
        if nonsplit is False and not split:
            continue
        n = fp_matrix_order(x, p)
        if n < 3:
            continue
        a = rng.randrange(2, n)
        b = rng.randrange(2, n)
        t_a = _random_torus_fp(rng, x, p)
        t_b = _random_torus_fp(rng, x, p)
        xa = _fpmat.matpow(x, a, p)
        xb = _fpmat.matpow(x, b, p)
        token_a = _fpmat.matmul(_fpmat.matmul(t_a, xa, p), _fpmat.inv_mod(t_a, p), p)
        token_b = _fpmat.matmul(_fpmat.matmul(t_b, xb, p), _fpmat.inv_mod(t_b, p), p)
        inst = CommutativeInstance.build(p, x, token_a, token_b)
        ybk = _fpmat.matpow(token_b, a, p)
        honest = _fpmat.matmul(_fpmat.matmul(t_a, ybk, p), _fpmat.inv_mod(t_a, p), p)
        return inst, a, b, honest


# ---------------------------------------------------------------------------
# non-reduction witness scan
# ---------------------------------------------------------------------------

def power_determinant_scan(p: int, trials: int, rng: random.Random) -> ScanResult:
    """Sample invertible 2x2 matrices over F_p[S3] whose noncommutative
    determinant is defined for X and X^2; count nc_det(X^2) != nc_det(X)^2."""
    ga = GroupAlgebra(p)
    differs = 0
    done = 0
    while done < trials:
        entries = [ga.random_element(rng) for _ in range(3)]
        entries.append(ga.random_invertible(rng))
        sm = SquareMatrix(
            ((entries[0], entries[1]), (entries[2], entries[3])), ga
        )
        pm = PlatformMatrix.from_square_matrix(sm)
        if not is_invertible(pm):
            continue
        sq = sm * sm
        if not algebra_is_invertible(sq[1, 1]):
            continue
        d1 = nc_determinant(sm)
        d2 = nc_determinant(sq)
        if d2 != d1 * d1:
            differs += 1
        done += 1
    return ScanResult(differs=differs, trials=trials)
