"""Table-driven arithmetic in the small finite fields F_q, q in {2,3,4,5,7,8,9}.

Elements are the integers ``0..q-1``.  For a prime field the label is the
residue.  For q = p^e with e > 1 the label ``a`` encodes the polynomial
``sum(d_i x^i)`` where ``d_i`` is the i-th base-p digit of ``a``, reduced
modulo a fixed irreducible polynomial:

    F_4 : x^2 + x + 1
    F_8 : x^3 + x + 1
    F_9 : x^2 + 2x + 2

These choices are part of the public contract: every canonical form in the
package is deterministic relative to them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import FieldError

SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 8, 9)

# (p, e, reduction polynomial as low-to-high coefficients, monic)
_FIELD_PARAMS = {
    2: (2, 1, None),
    3: (3, 1, None),
    4: (2, 2, (1, 1, 1)),
    5: (5, 1, None),
    7: (7, 1, None),
    8: (2, 3, (1, 1, 0, 1)),
    9: (3, 2, (2, 2, 1)),
}


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """Immutable addition/multiplication tables for F_q."""

    q: int
    p: int
    e: int
    modulus: tuple[int, ...] | None
    add_table: tuple[tuple[int, ...], ...]
    mul_table: tuple[tuple[int, ...], ...]
    neg_table: tuple[int, ...]
    inv_table: tuple[int | None, ...]

    def __repr__(self):
        return f"FieldSpec(q={self.q})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self):
        return hash(("FieldSpec", self.q))

    def __reduce__(self):
        return (field_new, (self.q,))

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.q)
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_table[a][self.inv(b)]

    def pow(self, a: int, k: int) -> int:
        r = 1
        for _ in range(k):
            r = self.mul_table[r][a]
        return r

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def nonzero(self) -> range:
        return range(1, self.q)

    def check_element(self, a) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise FieldError(f"{a!r} is not an element of F_{self.q}")
        return a

    def check_axioms(self) -> None:
        """Exhaustively verify the field axioms; raises AssertionError."""
        q, A, M = self.q, self.add_table, self.mul_table
        els = range(q)
        for a, b in product(els, els):
            assert A[a][b] == A[b][a] and M[a][b] == M[b][a]
        for a, b, c in product(els, els, els):
            assert A[A[a][b]][c] == A[a][A[b][c]]
            assert M[M[a][b]][c] == M[a][M[b][c]]
            assert M[a][A[b][c]] == A[M[a][b]][M[a][c]]
        for a in els:
            assert A[a][0] == a and M[a][1] == a and M[a][0] == 0
            assert A[a][self.neg_table[a]] == 0
            assert sum(1 for b in els if A[a][b] == 0) == 1
        for a in range(1, q):
            assert M[a][self.inv_table[a]] == 1
            assert sum(1 for b in els if M[a][b] == 1) == 1


def _digits(a, p, e):
    out = []
    for _ in range(e):
        out.append(a % p)
        a //= p
    return out


def _label(digits, p):
    return sum(d * p**i for i, d in enumerate(digits))


def _poly_mulmod(x, y, modulus, p):
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                prod[i + j] = (prod[i + j] + a * b) % p
    # modulus is monic; eliminate from the top degree down
    for deg in range(len(prod) - 1, e - 1, -1):
        c = prod[deg]
        if c:
            for i, m in enumerate(modulus):
                prod[deg - e + i] = (prod[deg - e + i] - c * m) % p
    return prod[:e]


@lru_cache(maxsize=None)
def field_new(q: int) -> FieldSpec:
    """Build (and cache) the field of order ``q``."""
    if q not in _FIELD_PARAMS:
        raise FieldError(
            f"unsupported field order q={q}; supported orders are {SUPPORTED_ORDERS}"
        )
    p, e, modulus = _FIELD_PARAMS[q]
    els = range(q)
    if e == 1:
        add = tuple(tuple((a + b) % p for b in els) for a in els)
        mul = tuple(tuple((a * b) % p for b in els) for a in els)
    else:
        dig = [_digits(a, p, e) for a in els]
        add = tuple(
            tuple(_label([(x + y) % p for x, y in zip(dig[a], dig[b])], p) for b in els)
            for a in els
        )
        mul = tuple(
            tuple(_label(_poly_mulmod(dig[a], dig[b], modulus, p), p) for b in els)
            for a in els
        )
    neg = tuple(next(b for b in els if add[a][b] == 0) for a in els)
    inv = (None,) + tuple(next(b for b in els if mul[a][b] == 1) for a in range(1, q))
    return FieldSpec(q, p, e, modulus, add, mul, neg, inv)


def add(a: int, b: int, field: FieldSpec) -> int:
    return field.add(a, b)


def mul(a: int, b: int, field: FieldSpec) -> int:
    return field.mul(a, b)


def neg(a: int, field: FieldSpec) -> int:
    return field.neg(a)


def inv(a: int, field: FieldSpec) -> int:
    return field.inv(a)
