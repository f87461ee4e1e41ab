"""Hot kernels for 2x2 matrices over F_p[S3], in two interchangeable builds.

The numba build JIT-compiles the inner loops; the pure-numpy build vectorizes
them. Selection:

    NCDH_BACKEND=auto   (default) numba when importable, else numpy
    NCDH_BACKEND=numba  require numba
    NCDH_BACKEND=numpy  force the vectorized fallback

Both builds require the modulus to sit below FAST_MODULUS_LIMIT so that
accumulated int64 products cannot overflow; callers route bigger moduli
through the exact Python-integer path.

Matrices are int64 arrays of shape (2, 2, 6): entry (i, j) is the 6-vector
of group-algebra coefficients. Flattened rows (24,) are C-order, i.e. entry
(i, j) coefficient g lands at index 12*i + 6*j + g.
"""

import os

import numpy as np

from ._fpmat import FAST_MODULUS_LIMIT

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _resolve_backend() -> str:
    choice = os.environ.get("NCDH_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"NCDH_BACKEND must be auto, numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError("NCDH_BACKEND=numba but numba is not importable") from None
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


def thread_count(override=None) -> int:
    if override is not None:
        return max(1, int(override))
    return max(1, int(os.environ.get("NCDH_THREADS", "1")))


# ---------------------------------------------------------------------------
# pure-numpy build
# ---------------------------------------------------------------------------


def _pm_mul_np(a, b, p, conv):
    # gather b along the convolution index: bg[k, j, h, g] = b[k, j, conv[h, g]]
    bg = b[:, :, conv]
    return np.einsum("ikh,kjhg->ijg", a, bg) % p


def _hash_rows_np(rows):
    h = np.full(rows.shape[0], _FNV_OFFSET, dtype=np.uint64)
    prime = np.uint64(_FNV_PRIME)
    for t in range(rows.shape[1]):
        h = (h ^ rows[:, t].astype(np.uint64)) * prime
    return h


def _powmod_vec_np(base, e, p):
    result = np.ones_like(base)
    b = base % p
    while e:
        if e & 1:
            result = result * b % p
        b = b * b % p
        e >>= 1
    return result


def _build_table_np(x, n, p, conv):
    table = np.empty((n, 24), dtype=np.int64)
    cur = x % p
    for k in range(n):
        table[k] = cur.reshape(24)
        if k + 1 < n:
            cur = _pm_mul_np(cur, x, p, conv)
    return table, _hash_rows_np(table)


def _conj_rows_np(y, p, xs, ys):
    """Torus conjugations T_{x,y} Y T_{x,y}^-1 for candidate vectors xs, ys.

    Returns (m, 24) flattened rows in scan layout.
    """
    s = (xs * xs - ys * ys) % p
    sinv = _powmod_vec_np(s, p - 2, p)
    a = y[0, 0][None, :]
    b = y[0, 1][None, :]
    c = y[1, 0][None, :]
    d = y[1, 1][None, :]
    xc = xs[:, None]
    yc = ys[:, None]
    t00 = (xc * a + yc * c) % p
    t01 = (xc * b + yc * d) % p
    t10 = (yc * a + xc * c) % p
    t11 = (yc * b + xc * d) % p
    out = np.empty((xs.shape[0], 24), dtype=np.int64)
    sc = sinv[:, None]
    out[:, 0:6] = (t00 * xc - t01 * yc) % p * sc % p
    out[:, 6:12] = (t01 * xc - t00 * yc) % p * sc % p
    out[:, 12:18] = (t10 * xc - t11 * yc) % p * sc % p
    out[:, 18:24] = (t11 * xc - t10 * yc) % p * sc % p
    return out


def _torus_conj_np(y, x_val, y_val, p):
    xs = np.array([x_val], dtype=np.int64)
    ys = np.array([y_val], dtype=np.int64)
    return _conj_rows_np(y, p, xs, ys)[0].reshape(2, 2, 6)


def _probe_chunk_np(rows, cand_idx, table, hsorted, horder):
    """First verified table hit in one candidate chunk.

    Returns (position_in_chunk, table_row) or None. cand_idx ascends, so the
    first verified element of the chunk is the overall chunk minimum.
    """
    n = hsorted.shape[0]
    h = _hash_rows_np(rows)
    pos = np.searchsorted(hsorted, h)
    clipped = np.minimum(pos, n - 1)
    maybe = (pos < n) & (hsorted[clipped] == h)
    for ii in np.nonzero(maybe)[0]:
        q = int(pos[ii])
        target = h[ii]
        while q < n and hsorted[q] == target:
            row = int(horder[q])
            if np.array_equal(table[row], rows[ii]):
                return int(ii), row
            q += 1
    return None


def _scan_np(y, p, cands, table, hsorted, horder, chunk=65536):
    """Shared scan driver: cands yields (xs, ys, idx) blocks in scan order."""
    tested = 0
    for xs, ys, idx in cands(chunk):
        rows = _conj_rows_np(y, p, xs, ys)
        hit = _probe_chunk_np(rows, idx, table, hsorted, horder)
        if hit is not None:
            ii, row = hit
            tested += ii + 1
            return 1, int(idx[ii]), row + 1, int(xs[ii]), int(ys[ii]), tested
        tested += xs.shape[0]
    return 0, -1, -1, -1, -1, tested


def _naive_cand_blocks(p, x_lo, x_hi):
    def gen(chunk):
        rows_per_block = max(1, chunk // p)
        x = x_lo
        while x < x_hi:
            stop = min(x + rows_per_block, x_hi)
            xs = np.repeat(np.arange(x, stop, dtype=np.int64), p)
            ys = np.tile(np.arange(p, dtype=np.int64), stop - x)
            idx = xs * p + ys
            valid = (xs * xs - ys * ys) % p != 0
            yield xs[valid], ys[valid], idx[valid]
            x = stop
    return gen


def _normalized_cand_blocks(p, m_lo, m_hi, include_antidiag):
    def gen(chunk):
        m = m_lo
        while m < m_hi:
            stop = min(m + chunk, m_hi)
            ms = np.arange(m, stop, dtype=np.int64)
            keep = (ms != 1) & (ms != p - 1)
            ms = ms[keep]
            yield np.ones_like(ms), ms, ms
            m = stop
        if include_antidiag:
            yield (
                np.zeros(1, dtype=np.int64),
                np.ones(1, dtype=np.int64),
                np.full(1, p, dtype=np.int64),
            )
    return gen


def _scan_naive_np(y, p, x_lo, x_hi, table, hsorted, horder):
    return _scan_np(y, p, _naive_cand_blocks(p, x_lo, x_hi), table, hsorted, horder)


def _scan_normalized_np(y, p, m_lo, m_hi, include_antidiag, table, hsorted, horder):
    return _scan_np(
        y, p, _normalized_cand_blocks(p, m_lo, m_hi, include_antidiag), table, hsorted, horder
    )


# ---------------------------------------------------------------------------
# numba build
# ---------------------------------------------------------------------------

if BACKEND == "numba":
    from numba import njit

    @njit(cache=True, nogil=True)
    def _powmod_nb(b, e, p):
        r = 1
        b %= p
        while e > 0:
            if e & 1:
                r = r * b % p
            b = b * b % p
            e >>= 1
        return r

    @njit(cache=True, nogil=True)
    def _pm_mul_nb(a, b, p, conv):
        c = np.zeros((2, 2, 6), dtype=np.int64)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for h in range(6):
                        ah = a[i, k, h]
                        if ah:
                            for g in range(6):
                                c[i, j, g] = (c[i, j, g] + ah * b[k, j, conv[h, g]]) % p
        return c

    @njit(cache=True, nogil=True)
    def _hash_row_nb(row):
        h = np.uint64(_FNV_OFFSET)
        prime = np.uint64(_FNV_PRIME)
        for t in range(row.shape[0]):
            h = (h ^ np.uint64(row[t])) * prime
        return h

    @njit(cache=True, nogil=True)
    def _build_table_nb(x, n, p, conv):
        table = np.empty((n, 24), dtype=np.int64)
        hashes = np.empty(n, dtype=np.uint64)
        cur = x % p
        for k in range(n):
            flat = cur.reshape(24)
            table[k] = flat
            hashes[k] = _hash_row_nb(flat)
            if k + 1 < n:
                cur = _pm_mul_nb(cur, x, p, conv)
        return table, hashes

    @njit(cache=True, nogil=True)
    def _conj_into_nb(y, p, x, yy, sinv, buf):
        for g in range(6):
            a = y[0, 0, g]
            b = y[0, 1, g]
            c = y[1, 0, g]
            d = y[1, 1, g]
            t00 = (x * a + yy * c) % p
            t01 = (x * b + yy * d) % p
            t10 = (yy * a + x * c) % p
            t11 = (yy * b + x * d) % p
            buf[g] = (t00 * x - t01 * yy) % p * sinv % p
            buf[6 + g] = (t01 * x - t00 * yy) % p * sinv % p
            buf[12 + g] = (t10 * x - t11 * yy) % p * sinv % p
            buf[18 + g] = (t11 * x - t10 * yy) % p * sinv % p

    @njit(cache=True, nogil=True)
    def _probe_nb(buf, table, hsorted, horder):
        n = hsorted.shape[0]
        h = _hash_row_nb(buf)
        q = np.searchsorted(hsorted, h)
        while q < n and hsorted[q] == h:
            row = horder[q]
            match = True
            for t in range(24):
                if table[row, t] != buf[t]:
                    match = False
                    break
            if match:
                return row
            q += 1
        return -1

    @njit(cache=True, nogil=True)
    def _torus_conj_nb(y, x_val, y_val, p):
        s = (x_val * x_val - y_val * y_val) % p
        sinv = _powmod_nb(s, p - 2, p)
        buf = np.empty(24, dtype=np.int64)
        _conj_into_nb(y, p, x_val, y_val, sinv, buf)
        return buf.reshape(2, 2, 6).copy()

    @njit(cache=True, nogil=True)
    def _scan_naive_nb(y, p, x_lo, x_hi, table, hsorted, horder):
        buf = np.empty(24, dtype=np.int64)
        tested = 0
        for x in range(x_lo, x_hi):
            xx = x * x % p
            for yy in range(p):
                if (xx - yy * yy) % p == 0:
                    continue
                tested += 1
                s = (xx - yy * yy) % p
                sinv = _powmod_nb(s, p - 2, p)
                _conj_into_nb(y, p, x, yy, sinv, buf)
                row = _probe_nb(buf, table, hsorted, horder)
                if row >= 0:
                    return 1, x * p + yy, row + 1, x, yy, tested
        return 0, -1, -1, -1, -1, tested

    @njit(cache=True, nogil=True)
    def _scan_normalized_nb(y, p, m_lo, m_hi, include_antidiag, table, hsorted, horder):
        buf = np.empty(24, dtype=np.int64)
        tested = 0
        for m in range(m_lo, m_hi):
            if m == 1 or m == p - 1:
                continue
            tested += 1
            s = (1 - m * m) % p
            sinv = _powmod_nb(s, p - 2, p)
            _conj_into_nb(y, p, 1, m, sinv, buf)
            row = _probe_nb(buf, table, hsorted, horder)
            if row >= 0:
                return 1, m, row + 1, 1, m, tested
        if include_antidiag:
            tested += 1
            sinv = _powmod_nb(p - 1, p - 2, p)
            _conj_into_nb(y, p, 0, 1, sinv, buf)
            row = _probe_nb(buf, table, hsorted, horder)
            if row >= 0:
                return 1, p, row + 1, 0, 1, tested
        return 0, -1, -1, -1, -1, tested

    pm_mul = _pm_mul_nb
    build_table = _build_table_nb
    torus_conj = _torus_conj_nb
    scan_naive = _scan_naive_nb
    scan_normalized = _scan_normalized_nb
else:
    pm_mul = _pm_mul_np
    build_table = _build_table_np
    torus_conj = _torus_conj_np
    scan_naive = _scan_naive_np
    scan_normalized = _scan_normalized_np


def warmup(conv) -> None:
    """Trigger JIT compilation (no-op cost on the numpy build)."""
    p = 5
    x = np.zeros((2, 2, 6), dtype=np.int64)
    x[0, 0, 0] = 1
    x[1, 1, 0] = 2
    pm_mul(x, x, p, conv)
    torus_conj(x, 1, 2, p)
    table, hashes = build_table(x, 4, p, conv)
    order = np.argsort(hashes, kind="stable").astype(np.int64)
    hsorted = hashes[order]
    scan_naive(x, p, 0, p, table, hsorted, order)
    scan_normalized(x, p, 0, p, True, table, hsorted, order)
