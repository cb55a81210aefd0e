"""Sparse matrices over the rationals, plus the few dense solvers the tests need."""

from fractions import Fraction


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class SparseMatrix:
    """Square or rectangular matrix stored as {(row, col): Fraction}, zeros dropped.

    Treated as immutable once built.
    """

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows, ncols, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i},{j}) outside {nrows}x{ncols}")
            v = _frac(v)
            if v:
                clean[(i, j)] = v
        self.entries = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, n, m=None):
        return cls(n, n if m is None else m)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        return cls(n, m, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r)})

    @classmethod
    def from_triples(cls, n, m, triples):
        acc = {}
        for i, j, v in triples:
            acc[(i, j)] = acc.get((i, j), 0) + _frac(v)
        return cls(n, m, acc)

    # -- access -------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def get(self, i, j):
        return self.entries.get((i, j), Fraction(0))

    def to_dense(self):
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def triples(self):
        return sorted((i, j, v) for (i, j), v in self.entries.items())

    def column(self, j):
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def is_zero(self):
        return not self.entries

    def first_nonzero(self):
        """Smallest (row, col) with a nonzero entry, or None."""
        return min(self.entries) if self.entries else None

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        self._same_shape(other)
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc.get(k, 0) + v
        return SparseMatrix(self.nrows, self.ncols, acc)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SparseMatrix(self.nrows, self.ncols, {k: -v for k, v in self.entries.items()})

    def scale(self, c):
        c = _frac(c)
        return SparseMatrix(self.nrows, self.ncols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        acc = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + a * b
        return SparseMatrix(self.nrows, other.ncols, acc)

    @property
    def T(self):
        return SparseMatrix(self.ncols, self.nrows, {(j, i): v for (i, j), v in self.entries.items()})

    def apply(self, vec):
        """Matrix times sparse vector {index: Fraction}."""
        out = {}
        for (i, j), v in self.entries.items():
            x = vec.get(j)
            if x:
                out[i] = out.get(i, 0) + v * x
        return {i: v for i, v in out.items() if v}

    def __eq__(self, other):
        return isinstance(other, SparseMatrix) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, frozenset(self.entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}, {self.ncols}, {self.entries!r})"

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


def commutator(a, b, sign=1):
    """a*b - sign*b*a; pass sign=-1 for the anticommutator."""
    return a @ b - (b @ a).scale(sign)


def mat_power(m, k):
    out = SparseMatrix.identity(m.nrows)
    for _ in range(k):
        out = out @ m
    return out


# -- dense exact elimination -------------------------------------------

def rref(rows):
    """Reduced row echelon form of a dense Fraction matrix; returns (rows, pivot_cols)."""
    a = [[_frac(x) for x in r] for r in rows]
    if not a:
        return a, []
    n, m = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return a, pivots


def nullspace(rows, ncols=None):
    """Basis of {x : rows @ x = 0} as a list of dense vectors."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m = len(rows[0])
    red, piv = rref(rows)
    free = [c for c in range(m) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * m
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][f]
        basis.append(v)
    return basis


def inverse(m):
    """Inverse of a square SparseMatrix; raises ValueError when singular."""
    n = m.nrows
    dense = m.to_dense()
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(dense)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return SparseMatrix.from_dense([r[n:] for r in red])


def vec_add(x, y, c=1):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}
