"""Square matrices over an exact, possibly noncommutative ring.

Entries are ring elements with operator arithmetic (FieldElement or
AlgebraElement); the ring adapter supplies zero, one, inversion and a
commutativity flag. Positions are 0-based throughout.

The quasideterminant at (i, j) is a_ij - r (A^ij)^-1 c, where A^ij deletes
row i and column j, r is row i without column j and c is column j without
row i. An ordered product of nested quasideterminants along a pair of
orderings gives the noncommutative determinant; evaluation is strictly
left-to-right, no re-association.
"""

from .errors import MinorNotInvertible, ModulusMismatch, NotInvertible

#: quasideterminants over noncommutative rings are supported up to this size
MAX_NC_SIZE = 4


class SquareMatrix:
    """Immutable n x n matrix over a ring adapter."""

    __slots__ = ("n", "ring", "rows")

    def __init__(self, rows, ring):
        rows = tuple(tuple(row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("entries must form a nonempty square grid")
        self.n = n
        self.ring = ring
        self.rows = rows

    @classmethod
    def identity(cls, ring, n: int) -> "SquareMatrix":
        z, o = ring.zero, ring.one
        return cls(
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), ring
        )

    def __getitem__(self, pos):
        i, j = pos
        return self.rows[i][j]

    def _check(self, other: "SquareMatrix"):
        if self.ring != other.ring:
            raise ModulusMismatch("matrices live over different rings")
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return SquareMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
            self.ring,
        )

    def __sub__(self, other):
        self._check(other)
        return SquareMatrix(
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
            self.ring,
        )

    def __neg__(self):
        return SquareMatrix(
            tuple(tuple(-a for a in row) for row in self.rows), self.ring
        )

    def __mul__(self, other):
        """Ring product; factor order preserved (safe over noncommutative rings)."""
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        self._check(other)
        n = self.n
        cols = tuple(zip(*other.rows))
        out = []
        for i in range(n):
            row = self.rows[i]
            out_row = []
            for j in range(n):
                col = cols[j]
                acc = row[0] * col[0]
                for k in range(1, n):
                    acc = acc + row[k] * col[k]
                out_row.append(acc)
            out.append(tuple(out_row))
        return SquareMatrix(tuple(out), self.ring)

    def pow(self, e: int) -> "SquareMatrix":
        """Square-and-multiply; e may be any nonnegative integer (A^0 = I)."""
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        result = SquareMatrix.identity(self.ring, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    __pow__ = pow

    def minor(self, i: int, j: int) -> "SquareMatrix":
        """Delete row i and column j."""
        rows = tuple(
            tuple(v for cj, v in enumerate(row) if cj != j)
            for ri, row in enumerate(self.rows)
            if ri != i
        )
        return SquareMatrix(rows, self.ring)

    def row_without(self, i: int, j: int) -> tuple:
        return tuple(v for cj, v in enumerate(self.rows[i]) if cj != j)

    def col_without(self, i: int, j: int) -> tuple:
        return tuple(row[j] for ri, row in enumerate(self.rows) if ri != i)

    def is_identity(self) -> bool:
        return self == SquareMatrix.identity(self.ring, self.n)

    def __eq__(self, other):
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash((self.ring, self.rows))

    def __repr__(self):
        return f"SquareMatrix({self.rows!r})"


def _check_nc_size(a: SquareMatrix):
    if not a.ring.commutative and a.n > MAX_NC_SIZE:
        raise ValueError(
            f"quasideterminants over a noncommutative ring are supported up to size {MAX_NC_SIZE}"
        )


def quasideterminant(a: SquareMatrix, i: int, j: int):
    """|A|_ij = a_ij - r_i^j (A^ij)^-1 c_i^j.

    Exists iff the minor A^ij is invertible; the base case n = 1 is the bare
    entry. The minor inverse is the quasideterminant-based one, so a failure
    anywhere in the recursion raises MinorNotInvertible(i, j).
    """
    n = a.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"position ({i}, {j}) out of range for size {n}")
    _check_nc_size(a)
    if n == 1:
        return a[0, 0]
    minor = a.minor(i, j)
    try:
        minor_inv = qd_inverse(minor)
    except NotInvertible as exc:
        raise MinorNotInvertible(i, j) from exc
    r = a.row_without(i, j)
    c = a.col_without(i, j)
    m = n - 1
    acc = None
    for s in range(m):
        # (r * minor_inv)_s
        term = r[0] * minor_inv[0, s]
        for k in range(1, m):
            term = term + r[k] * minor_inv[k, s]
        part = term * c[s]
        acc = part if acc is None else acc + part
    return a[i, j] - acc


def qd_inverse(a: SquareMatrix) -> SquareMatrix:
    """Entrywise inverse (A^-1)_ji = (|A|_ij)^-1; exact two-sided inverse.

    Positions whose quasideterminant does not exist (singular minor) get a
    zero entry: over a field that is exactly right (the cofactor vanishes),
    over the group algebra it is only generically right, so the assembled
    candidate is verified against the identity and a failure is reported,
    never papered over. A quasideterminant that exists but is not invertible
    always means failure. Guaranteed inversion over the algebra goes through
    the semisimple components instead.
    """
    n = a.n
    _check_nc_size(a)
    if n == 1:
        try:
            return SquareMatrix(((a.ring.inv(a[0, 0]),),), a.ring)
        except NotInvertible as exc:
            raise NotInvertible("1x1 matrix entry is not invertible", position=(0, 0)) from exc
    out = [[None] * n for _ in range(n)]
    undefined = None
    for i in range(n):
        for j in range(n):
            try:
                q = quasideterminant(a, i, j)
            except NotInvertible:
                out[j][i] = a.ring.zero
                if undefined is None:
                    undefined = (i, j)
                continue
            try:
                out[j][i] = a.ring.inv(q)
            except NotInvertible as exc:
                raise NotInvertible(
                    f"quasideterminant at ({i}, {j}) is not invertible", position=(i, j)
                ) from exc
    candidate = SquareMatrix(tuple(tuple(row) for row in out), a.ring)
    ident = SquareMatrix.identity(a.ring, n)
    if candidate * a != ident or a * candidate != ident:
        raise NotInvertible(
            "quasideterminant inversion failed verification"
            + (f" (quasideterminant at {undefined} does not exist)" if undefined else ""),
            position=undefined,
        )
    return candidate


def _validate_ordering(order, n: int):
    if sorted(order) != list(range(n)):
        raise ValueError(f"ordering must be a permutation of 0..{n - 1}, got {order!r}")


def nc_determinant(a: SquareMatrix, row_order=None, col_order=None):
    """Ordered product of nested quasideterminants along the two orderings.

    Defaults to the natural orderings (0, 1, ..., n-1). Propagates
    MinorNotInvertible from any nested quasideterminant.
    """
    n = a.n
    row_order = tuple(row_order) if row_order is not None else tuple(range(n))
    col_order = tuple(col_order) if col_order is not None else tuple(range(n))
    _validate_ordering(row_order, n)
    _validate_ordering(col_order, n)
    _check_nc_size(a)

    remaining_rows = list(range(n))
    remaining_cols = list(range(n))
    current = a
    product = None
    for i_orig, j_orig in zip(row_order, col_order):
        li = remaining_rows.index(i_orig)
        lj = remaining_cols.index(j_orig)
        factor = quasideterminant(current, li, lj)
        product = factor if product is None else product * factor
        if current.n == 1:
            break
        current = current.minor(li, lj)
        remaining_rows.pop(li)
        remaining_cols.pop(lj)
    return product


def structured_invertible(kind: str, *, a=None, b=None, c=None, u=None, ring=None):
    """Build one of the three guaranteed-invertible 2x2 shapes with its
    closed-form inverse, verifying X * Xinv = Xinv * X = I on construction.

    upper: [[a, c], [0, b]]       a, b invertible, c free
    lower: [[a, 0], [c, b]]       a, b invertible, c free
    schur: [[u, b], [c, 1 + c u^-1 b]]   u invertible, b, c free
    """
    if ring is None:
        raise ValueError("ring adapter is required")
    zero, one = ring.zero, ring.one
    if kind in ("upper", "lower"):
        if a is None or b is None:
            raise ValueError(f"kind {kind!r} requires parts a and b")
        c = c if c is not None else zero
        ai = ring.inv(a)
        bi = ring.inv(b)
        if kind == "upper":
            x = SquareMatrix(((a, c), (zero, b)), ring)
            xinv = SquareMatrix(((ai, -(ai * c * bi)), (zero, bi)), ring)
        else:
            x = SquareMatrix(((a, zero), (c, b)), ring)
            xinv = SquareMatrix(((ai, zero), (-(bi * c * ai), bi)), ring)
    elif kind == "schur":
        if u is None:
            raise ValueError("kind 'schur' requires part u")
        b = b if b is not None else zero
        c = c if c is not None else zero
        ui = ring.inv(u)
        x = SquareMatrix(((u, b), (c, one + c * ui * b)), ring)
        xinv = SquareMatrix(((ui + ui * b * c * ui, -(ui * b)), (-(c * ui), one)), ring)
    else:
        raise ValueError(f"unknown kind {kind!r}; expected upper, lower or schur")

    ident = SquareMatrix.identity(ring, 2)
    if x * xinv != ident or xinv * x != ident:
        raise AssertionError("closed-form inverse failed its construction check")
    return x, xinv
