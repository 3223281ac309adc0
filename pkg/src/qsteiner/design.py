"""Design containers, Steiner verification, derived designs, spreads and parallelisms."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

from .errors import CapacityError, DesignError, DimensionError
from .exact_cover import exact_covers
from .gf import FieldSpec, field_new
from .puncture import puncture
from .subspace import (
    ENUMERATION_LIMIT,
    Subspace,
    gaussian_binomial,
    grassmannian,
    rref,
    span,
)

COVER_LIMIT = 5_000_000


class DesignMultiset:
    """A multiset of subspaces of a common F_q^n, keyed by canonical basis.

    Blocks may be given as ``Subspace`` values (multiplicity 1 each, repeats
    merge) or as ``(Subspace, multiplicity)`` pairs.
    """

    __slots__ = ("field", "n", "_items", "_index")

    def __init__(self, field, n: int, blocks: Iterable = ()):
        self.field = field if isinstance(field, FieldSpec) else field_new(field)
        self.n = n
        counts: Counter = Counter()
        for b in blocks:
            S, m = (b, 1) if isinstance(b, Subspace) else b
            if S.n != n or S.field.q != self.field.q:
                raise DimensionError(
                    f"block {S.key} lives in F_{S.field.q}^{S.n}, design is F_{self.field.q}^{n}"
                )
            if not isinstance(m, int) or m < 1:
                raise DesignError(f"multiplicity {m!r} of block {S.key} is not a positive integer")
            counts[S] += m
        self._items = tuple(sorted(counts.items(), key=lambda kv: kv[0].rows))
        self._index = dict(self._items)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def blocks(self) -> tuple[tuple[Subspace, int], ...]:
        """(block, multiplicity) pairs in lexicographic order of canonical basis."""
        return self._items

    @property
    def total_size(self) -> int:
        return sum(m for _, m in self._items)

    def __len__(self):
        return self.total_size

    def __iter__(self) -> Iterator[Subspace]:
        for S, _ in self._items:
            yield S

    def __contains__(self, S):
        return S in self._index

    def multiplicity(self, S: Subspace) -> int:
        return self._index.get(S, 0)

    def expanded(self) -> Iterator[Subspace]:
        """Every block repeated by its multiplicity."""
        for S, m in self._items:
            for _ in range(m):
                yield S

    def __eq__(self, other):
        return (
            isinstance(other, DesignMultiset)
            and self.q == other.q
            and self.n == other.n
            and self._items == other._items
        )

    def __hash__(self):
        return hash((self.q, self.n, self._items))

    def __repr__(self):
        return f"DesignMultiset(q={self.q}, n={self.n}, distinct={len(self._items)}, size={self.total_size})"

    def dims(self) -> Counter:
        """Total multiplicity per block dimension."""
        c: Counter = Counter()
        for S, m in self._items:
            c[S.dim] += m
        return c

    def map_blocks(self, fn, n: int | None = None) -> "DesignMultiset":
        out = [(fn(S), m) for S, m in self._items]
        if n is None:
            n = out[0][0].n if out else self.n
        return DesignMultiset(self.field, n, out)

    def with_blocks(self, blocks: Iterable) -> "DesignMultiset":
        return DesignMultiset(self.field, self.n, list(self._items) + list(blocks))

    def without(self, S: Subspace, count: int = 1) -> "DesignMultiset":
        m = self.multiplicity(S)
        if m < count:
            raise DesignError(f"block {S.key} occurs {m} times, cannot remove {count}")
        items = [(B, k - count if B == S else k) for B, k in self._items]
        return DesignMultiset(self.field, self.n, [(B, k) for B, k in items if k])


@dataclass
class CoverageReport:
    t: int
    k: int
    mode: str
    verdict: str  # "exact-design" | "packing" | "violation"
    uncovered: list = dc_field(default_factory=list)
    multiply_covered: list = dc_field(default_factory=list)  # (subspace, count)
    dimension_violations: list = dc_field(default_factory=list)
    repeated_blocks: list = dc_field(default_factory=list)  # (block, multiplicity)
    num_blocks: int = 0

    @property
    def ok(self) -> bool:
        if self.mode == "exact":
            return self.verdict == "exact-design"
        return self.verdict != "violation"

    def to_dict(self, max_items: int = 50) -> dict:
        return {
            "t": self.t,
            "k": self.k,
            "mode": self.mode,
            "verdict": self.verdict,
            "ok": self.ok,
            "num_blocks": self.num_blocks,
            "num_uncovered": len(self.uncovered),
            "num_multiply_covered": len(self.multiply_covered),
            "uncovered": [S.key for S in self.uncovered[:max_items]],
            "multiply_covered": [[S.key, c] for S, c in self.multiply_covered[:max_items]],
            "dimension_violations": [S.key for S in self.dimension_violations[:max_items]],
            "repeated_blocks": [[S.key, m] for S, m in self.repeated_blocks[:max_items]],
        }


def cover_count_map(D: DesignMultiset, t: int, limit: int = COVER_LIMIT) -> dict[Subspace, int]:
    """How many blocks (with multiplicity) contain each covered t-subspace."""
    work = sum(gaussian_binomial(S.dim, t, D.q) for S, _ in D.blocks)
    if work > limit:
        raise CapacityError(f"coverage map needs {work} subspace visits, above {limit}")
    counts: Counter = Counter()
    for S, m in D.blocks:
        for T in S.subspaces(t):
            counts[T] += m
    return dict(counts)


def verify_steiner(D: DesignMultiset, t: int, k: int, mode: str = "exact",
                   limit: int = ENUMERATION_LIMIT) -> CoverageReport:
    """Check that every t-subspace lies in exactly one (exact) or at most one (packing) block."""
    if mode not in ("exact", "packing"):
        raise ValueError(f"mode must be 'exact' or 'packing', not {mode!r}")
    if not 0 <= t <= k <= D.n:
        raise DimensionError(f"need 0 <= t <= k <= n, got t={t}, k={k}, n={D.n}")
    counts = cover_count_map(D, t)
    uncovered = [T for T in grassmannian(D.n, t, D.q, limit) if T not in counts]
    multi = sorted(((T, c) for T, c in counts.items() if c > 1), key=lambda tc: tc[0].rows)
    bad_dim = [S for S in D if S.dim != k]
    repeated = [(S, m) for S, m in D.blocks if m > 1]
    if multi or bad_dim:
        verdict = "violation"
    elif not uncovered and not repeated:
        verdict = "exact-design"
    else:
        verdict = "packing"
    return CoverageReport(t, k, mode, verdict, uncovered, multi, bad_dim, repeated, D.total_size)


def admissible(t: int, k: int, n: int, q: int) -> tuple[bool, list[Fraction]]:
    """Divisibility conditions [n-i, t-i]_q / [k-i, t-i]_q for 0 <= i < t."""
    if not 0 < t <= k <= n:
        raise DimensionError(f"need 0 < t <= k <= n, got t={t}, k={k}, n={n}")
    ratios = [
        Fraction(gaussian_binomial(n - i, t - i, q), gaussian_binomial(k - i, t - i, q))
        for i in range(t)
    ]
    return all(r.denominator == 1 for r in ratios), ratios


def _invert(matrix, field):
    n = len(matrix)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(matrix)]
    rows, piv = rref(aug, field, 2 * n)
    if len(rows) < n or piv[n - 1] != n - 1:
        raise DesignError("matrix is singular")
    return [list(r[n:]) for r in rows]


def point_to_last_matrix(P: Subspace) -> list[list[int]]:
    """Invertible M with v·M = e_n for the canonical generator v of the point P."""
    if P.dim != 1:
        raise DimensionError(f"expected a 1-subspace, got dimension {P.dim}")
    n = P.n
    v = P.rows[0]
    j = P.pivots[0]
    basis = [[1 if c == i else 0 for c in range(n)] for i in range(n) if i != j]
    basis.append(list(v))
    return _invert(basis, P.field)


def derived_design(D: DesignMultiset, t: int, k: int, P: Subspace, check: bool = False) -> DesignMultiset:
    """Blocks through the point P, taken modulo P.

    P is moved to the last unity vector by an explicit invertible substitution
    and the last coordinate is then punctured.  With ``check=True`` the input
    is verified as S_q(t,k,n) first and DesignError is raised otherwise;
    without it a defective input simply yields a defective output.
    """
    if t < 2:
        raise DesignError("derived designs need t >= 2")
    if P.n != D.n or P.q != D.q:
        raise DimensionError("point and design live in different ambient spaces")
    if P.dim != 1:
        raise DimensionError(f"expected a 1-subspace, got dimension {P.dim}")
    if check:
        report = verify_steiner(D, t, k)
        if not report.ok:
            raise DesignError(f"input is not an S_{D.q}({t},{k},{D.n}): {report.verdict}")
    M = point_to_last_matrix(P)
    v = P.rows[0]
    out = []
    for S, m in D.blocks:
        if S.contains(v):
            out.append((puncture(S.transform(M), D.n), m))
    return DesignMultiset(D.field, D.n - 1, out)


# -- spreads -----------------------------------------------------------------

def _poly_rem(a, b, field):
    a = list(a)
    db = len(b) - 1
    inv_lead = field.inv(b[-1])
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        c = field.mul(a[-1], inv_lead)
        shift = len(a) - 1 - db
        for i, x in enumerate(b):
            a[shift + i] = field.sub(a[shift + i], field.mul(c, x))
        a.pop()
    return a


def irreducible_poly(field: FieldSpec, degree: int) -> tuple[int, ...]:
    """First monic irreducible polynomial of the given degree (low-to-high coefficients)."""
    q = field.q
    for low in product(range(q), repeat=degree):
        f = tuple(reversed(low))  # enumerate constant term slowest
        f = f + (1,)
        reducible = False
        for d in range(1, degree // 2 + 1):
            for g_low in product(range(q), repeat=d):
                if not any(_poly_rem(f, g_low + (1,), field)):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return f
    raise DesignError(f"no irreducible polynomial of degree {degree} over F_{q}")


def spread_field_reduction(q: int, k: int, n: int) -> DesignMultiset:
    """The Desarguesian spread: points of PG(n/k - 1, q^k) read as k-subspaces of F_q^n.

    F_{q^k} is realized as F_q[x]/(f) with f from :func:`irreducible_poly`;
    an element's coordinates are its coefficients on 1, x, ..., x^{k-1}.
    """
    if k < 1 or n % k:
        raise DimensionError(f"spreads need k | n, got k={k}, n={n}")
    field = field_new(q)
    if k == 1:
        return DesignMultiset(field, n, grassmannian(n, 1, q))
    f = irreducible_poly(field, k)

    def times_x(block):
        # multiply one F_{q^k} coordinate by x modulo f
        top = block[-1]
        shifted = (0,) + tuple(block[:-1])
        return tuple(field.sub(s, field.mul(top, c)) for s, c in zip(shifted, f[:-1]))

    blocks = set()
    for v in product(range(q), repeat=n):
        if not any(v):
            continue
        gens = [v]
        cur = v
        for _ in range(k - 1):
            cur = tuple(x for i in range(0, n, k) for x in times_x(cur[i:i + k]))
            gens.append(cur)
        blocks.add(span(gens, field, n))
    D = DesignMultiset(field, n, blocks)
    assert D.total_size == (q**n - 1) // (q**k - 1)
    return D


def _spreads_avoiding(q, lines, banned):
    """Every spread of PG(3,q) (as sorted line-index tuples) using no banned line."""
    points = grassmannian(4, 1, q)
    pidx = {P: i for i, P in enumerate(points)}
    rows = {}
    for i, L in enumerate(lines):
        if i not in banned:
            rows[i] = [pidx[P] for P in L.subspaces(1)]
    return [tuple(s) for s in exact_covers(range(len(points)), rows)]


PARALLELISM_QS = (2, 3)


def parallelism_pg3(q: int) -> list[DesignMultiset]:
    """Partition the 2-subspaces of F_q^4 into q^2+q+1 spreads of size q^2+1.

    The first spread is :func:`spread_field_reduction`; the others are the
    first solution of a lexicographic exact-cover search over the spreads
    disjoint from it.
    """
    if q not in PARALLELISM_QS:
        raise CapacityError(f"parallelism search supports q in {PARALLELISM_QS}, not {q}")
    field = field_new(q)
    lines = grassmannian(4, 2, q)
    lidx = {L: i for i, L in enumerate(lines)}
    first = spread_field_reduction(q, 2, 4)
    first_ids = {lidx[L] for L in first}
    spreads = _spreads_avoiding(q, lines, first_ids)
    rest = [i for i in range(len(lines)) if i not in first_ids]
    rows = dict(enumerate(spreads))
    try:
        solution = next(exact_covers(rest, rows))
    except StopIteration:
        raise DesignError(f"no parallelism of PG(3,{q}) extends the field spread") from None
    out = [first]
    for r in solution:
        out.append(DesignMultiset(field, 4, [lines[i] for i in spreads[r]]))
    return out


def check_parallelism(q: int, spreads: list[DesignMultiset]) -> list[str]:
    """Problems with a claimed parallelism of PG(3,q); empty list means valid."""
    problems = []
    if len(spreads) != q * q + q + 1:
        problems.append(f"expected {q * q + q + 1} spreads, got {len(spreads)}")
    seen: Counter = Counter()
    for i, S in enumerate(spreads):
        if S.q != q or S.n != 4:
            problems.append(f"spread {i} is not over F_{q}^4")
            continue
        if not verify_steiner(S, 1, 2).ok:
            problems.append(f"spread {i} is not an S_{q}(1,2,4)")
        for L, m in S.blocks:
            seen[L] += m
    lines = grassmannian(4, 2, q)
    missing = [L for L in lines if L not in seen]
    twice = [L for L, c in seen.items() if c > 1]
    if missing:
        problems.append(f"{len(missing)} lines in no spread")
    if twice:
        problems.append(f"{len(twice)} lines in more than one spread")
    return problems
