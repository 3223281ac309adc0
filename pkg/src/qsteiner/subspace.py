"""Subspaces of F_q^n in canonical reduced-row-echelon form.

A :class:`Subspace` is an immutable value whose basis is the RREF of its row
space, so two subspaces are equal as sets of vectors exactly when their
bases are identical.  Vectors are tuples of field labels; the literal syntax
used in files and on the command line is a string of ``n`` base-q digits,
leftmost digit = coordinate 1.
"""
from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, DimensionError, FieldError, FormatError
from .gf import FieldSpec, field_new

MAX_AMBIENT = 16
ENUMERATION_LIMIT = 1_000_000

Vector = tuple[int, ...]


def rref(rows: Iterable[Sequence[int]], field: FieldSpec, n: int):
    """Row-reduce ``rows``; return (canonical nonzero rows, pivot columns)."""
    A = [list(r) for r in rows]
    if not A:
        return (), ()
    M, addt, negt, invt = field.mul_table, field.add_table, field.neg_table, field.inv_table
    pivots = []
    r = 0
    nrows = len(A)
    for c in range(n):
        piv = None
        for i in range(r, nrows):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        lead = A[r][c]
        if lead != 1:
            s = M[invt[lead]]
            A[r] = [s[x] for x in A[r]]
        row = A[r]
        for i in range(nrows):
            if i != r:
                a = A[i][c]
                if a:
                    mrow = M[negt[a]]
                    A[i] = [addt[x][mrow[y]] for x, y in zip(A[i], row)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(x) for x in A[:r]), tuple(pivots)


class Subspace:
    """A k-dimensional subspace of F_q^n held as its canonical RREF basis."""

    __slots__ = ("field", "n", "rows", "_hash")

    def __init__(self, field: FieldSpec, n: int, rows: tuple[Vector, ...]):
        # trusted constructor: ``rows`` must already be canonical; use span()
        self.field = field
        self.n = n
        self.rows = rows
        self._hash = hash((field.q, n, rows))

    # -- value semantics -------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self._hash == other._hash
            and self.rows == other.rows
            and self.n == other.n
            and self.field.q == other.field.q
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.n, self.rows) < (other.n, other.rows)

    def __reduce__(self):
        return (_rebuild, (self.field.q, self.n, self.rows))

    def __repr__(self):
        return f"Subspace(q={self.field.q}, n={self.n}, {self.key})"

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def key(self) -> str:
        """Compact text key: comma-separated basis rows, ``-`` for the 0-subspace."""
        if not self.rows:
            return "-"
        return ",".join(format_vector(r) for r in self.rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(r) if x) for r in self.rows)

    # -- lattice operations ----------------------------------------------
    def _check_compatible(self, other: "Subspace"):
        if self.n != other.n or self.field.q != other.field.q:
            raise DimensionError(
                f"ambient mismatch: F_{self.field.q}^{self.n} vs F_{other.field.q}^{other.n}"
            )

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.n:
            raise DimensionError(f"vector of length {len(v)} in F_q^{self.n}")
        # reduce v against the RREF basis; v is inside iff it reduces to zero
        f = self.field
        w = list(v)
        for row, c in zip(self.rows, self.pivots):
            a = w[c]
            if a:
                mrow = f.mul_table[f.neg_table[a]]
                w = [f.add_table[x][mrow[y]] for x, y in zip(w, row)]
        return not any(w)

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check_compatible(other)
        return other.dim <= self.dim and all(self.contains(r) for r in other.rows)

    __contains__ = contains

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_compatible(other)
        return _span(self.rows + other.rows, self.field, self.n)

    __add__ = sum

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: reduce [s|s] over [t|0]; zero-left rows give S ∩ T."""
        self._check_compatible(other)
        n = self.n
        zero = (0,) * n
        block = [r + r for r in self.rows] + [r + zero for r in other.rows]
        rows, _ = rref(block, self.field, 2 * n)
        inter = [r[n:] for r in rows if not any(r[:n])]
        return _span(inter, self.field, n)

    __and__ = intersect

    # -- misc --------------------------------------------------------------
    def vectors(self) -> Iterator[Vector]:
        """All q^k vectors of the subspace (oracle helper, small k only)."""
        f = self.field
        n = self.n
        for coeffs in product(range(f.q), repeat=self.dim):
            v = [0] * n
            for c, row in zip(coeffs, self.rows):
                if c:
                    mrow = f.mul_table[c]
                    v = [f.add_table[x][mrow[y]] for x, y in zip(v, row)]
            yield tuple(v)

    def transform(self, matrix: Sequence[Sequence[int]]) -> "Subspace":
        """Image under v -> v·matrix (matrix is n x n')."""
        f = self.field
        n_out = len(matrix[0]) if matrix else 0
        out = []
        for row in self.rows:
            v = [0] * n_out
            for a, mrow_ in zip(row, matrix):
                if a:
                    s = f.mul_table[a]
                    v = [f.add_table[x][s[y]] for x, y in zip(v, mrow_)]
            out.append(v)
        return _span(out, f, n_out)

    def subspaces(self, t: int) -> list["Subspace"]:
        """All t-dimensional subspaces of this subspace, in lexicographic order."""
        k = self.dim
        if not 0 <= t <= k:
            return []
        f = self.field
        out = []
        for coeff in grassmannian(k, t, f.q):
            rows = []
            for crow in coeff.rows:
                v = [0] * self.n
                for a, brow in zip(crow, self.rows):
                    if a:
                        s = f.mul_table[a]
                        v = [f.add_table[x][s[y]] for x, y in zip(v, brow)]
                rows.append(v)
            out.append(_span(rows, f, self.n))
        out.sort()
        return out


def _span(vectors, field, n):
    # unchecked fast path for internal callers
    return Subspace(field, n, rref(vectors, field, n)[0])


def _rebuild(q, n, rows):
    return Subspace(field_new(q), n, rows)


def _as_field(field) -> FieldSpec:
    return field if isinstance(field, FieldSpec) else field_new(field)


def _check_n(n):
    if not isinstance(n, int) or not 0 <= n <= MAX_AMBIENT:
        raise DimensionError(f"ambient dimension {n} outside 0..{MAX_AMBIENT}")


def span(vectors: Iterable[Sequence[int]], field, n: int) -> Subspace:
    """Canonical subspace spanned by ``vectors`` (rows of length n)."""
    field = _as_field(field)
    _check_n(n)
    vecs = [tuple(v) for v in vectors]
    for v in vecs:
        if len(v) != n:
            raise DimensionError(f"vector of length {len(v)} in F_q^{n}")
        for x in v:
            field.check_element(x)
    rows, _ = rref(vecs, field, n)
    return Subspace(field, n, rows)


def from_rows(rows: Sequence[Sequence[int]], field, n: int) -> Subspace:
    """Subspace from rows that must already be in canonical RREF."""
    S = span(rows, field, n)
    if S.rows != tuple(tuple(r) for r in rows):
        raise FormatError("rows are not a canonical RREF basis")
    return S


def zero_space(field, n: int) -> Subspace:
    field = _as_field(field)
    _check_n(n)
    return Subspace(field, n, ())


def whole_space(field, n: int) -> Subspace:
    field = _as_field(field)
    _check_n(n)
    return Subspace(field, n, tuple(unit_vector(n, i) for i in range(1, n + 1)))


def unit_vector(n: int, i: int) -> Vector:
    """The unity vector with a one in coordinate ``i`` (1-based)."""
    if not 1 <= i <= n:
        raise DimensionError(f"coordinate {i} outside 1..{n}")
    return tuple(1 if c == i - 1 else 0 for c in range(n))


def coordinate_space(field, n: int, coords: Iterable[int]) -> Subspace:
    """Span of the unity vectors at the given 1-based coordinates."""
    return span([unit_vector(n, i) for i in coords], field, n)


def parse_vector(text: str, field) -> Vector:
    field = _as_field(field)
    try:
        v = tuple(int(ch) for ch in text)
    except ValueError:
        raise FieldError(f"bad vector literal {text!r}") from None
    for x in v:
        if x >= field.q:
            raise FieldError(f"digit {x} in {text!r} is not an element of F_{field.q}")
    return v


def format_vector(v: Sequence[int]) -> str:
    return "".join(str(x) for x in v)


def subspace_from_key(key: str, field, n: int) -> Subspace:
    """Inverse of :attr:`Subspace.key`; rejects non-canonical rows."""
    field = _as_field(field)
    if key == "-":
        return zero_space(field, n)
    rows = [parse_vector(tok, field) for tok in key.split(",")]
    if any(len(r) != n for r in rows):
        raise FormatError(f"key {key!r} has rows not of length {n}")
    return from_rows(rows, field, n)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """The q-ary Gaussian coefficient [n k]_q (0 when k < 0 or k > n)."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _rref_bases(n, k, field):
    q = field.q
    for piv in combinations(range(n), k):
        pivset = set(piv)
        free = [(i, c) for i, p in enumerate(piv) for c in range(p + 1, n) if c not in pivset]
        for vals in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(piv):
                rows[i][p] = 1
            for (i, c), a in zip(free, vals):
                rows[i][c] = a
            yield tuple(tuple(r) for r in rows)


@lru_cache(maxsize=64)
def grassmannian(n: int, k: int, q: int, limit: int = ENUMERATION_LIMIT) -> tuple[Subspace, ...]:
    """All k-subspaces of F_q^n, sorted lexicographically by canonical basis."""
    field = field_new(q)
    _check_n(n)
    if not 0 <= k <= n:
        return ()
    size = gaussian_binomial(n, k, q)
    if size > limit:
        raise CapacityError(f"G_{q}({n},{k}) has {size} elements, above the limit {limit}")
    out = [Subspace(field, n, rows) for rows in _rref_bases(n, k, field)]
    out.sort()
    return tuple(out)


def enumerate_grassmannian(n: int, k: int, field, limit: int = ENUMERATION_LIMIT) -> Iterator[Subspace]:
    """Stream every k-subspace of F_q^n once, in lexicographic order of canonical bases."""
    field = _as_field(field)
    yield from grassmannian(n, k, field.q, limit)


def random_subspace(field, n: int, k: int, rng: random.Random) -> Subspace:
    """Uniform-ish random k-subspace (rejection on rank)."""
    field = _as_field(field)
    if not 0 <= k <= n:
        raise DimensionError(f"cannot pick a {k}-subspace of F_q^{n}")
    while True:
        S = span([[rng.randrange(field.q) for _ in range(n)] for _ in range(k)], field, n)
        if S.dim == k:
            return S
