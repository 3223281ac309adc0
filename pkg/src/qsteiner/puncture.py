"""Puncturing, extension, and column operations on subspaces and designs.

Puncturing deletes a coordinate from every vector of a subspace; it may
remove any coordinate.  Extension is its inverse and always appends the new
coordinate at the end.  A t-subspace of F_q^n has exactly q^t extensions of
the same dimension and exactly one extension of dimension t+1.

Multi-step extensions are returned as subspaces, not as chains of
intermediate subspaces: puncturing the last coordinate of a result recovers
the previous step, so every chain is determined by its final subspace.
"""
from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import DimensionError
from .subspace import Subspace, rref, unit_vector


def _check_coords(coords: Iterable[int], n: int) -> tuple[int, ...]:
    coords = tuple(coords)
    if len(set(coords)) != len(coords):
        raise DimensionError(f"repeated coordinate in {coords}")
    for i in coords:
        if not isinstance(i, int) or not 1 <= i <= n:
            raise DimensionError(f"coordinate {i} outside 1..{n}")
    return coords


def puncture(S: Subspace, i: int) -> Subspace:
    """Delete coordinate ``i`` (1-based) from every vector of S."""
    return puncture_multi(S, (i,))


def puncture_multi(S: Subspace, coords: Iterable[int]) -> Subspace:
    """Delete every coordinate in ``coords``; the result is order independent."""
    coords = _check_coords(coords, S.n)
    drop = {c - 1 for c in coords}
    keep = [c for c in range(S.n) if c not in drop]
    rows, _ = rref([[r[c] for c in keep] for r in S.rows], S.field, len(keep))
    return Subspace(S.field, len(keep), rows)


def puncture_tail(S: Subspace, p: int) -> Subspace:
    """Delete the last ``p`` coordinates."""
    return puncture_multi(S, range(S.n - p + 1, S.n + 1))


def extensions_same_dim(S: Subspace) -> list[Subspace]:
    """The q^t t-subspaces of F_q^{n+1} that puncture back to S at coordinate n+1."""
    f = S.field
    out = []
    # appending a non-pivot column keeps the basis in RREF
    for tail in product(range(f.q), repeat=S.dim):
        rows = tuple(r + (a,) for r, a in zip(S.rows, tail))
        out.append(Subspace(f, S.n + 1, rows))
    return out


def extension_up_dim(S: Subspace) -> Subspace:
    """The unique (t+1)-subspace of F_q^{n+1} puncturing to S: S ⊕ <e_{n+1}>."""
    rows = tuple(r + (0,) for r in S.rows) + (unit_vector(S.n + 1, S.n + 1),)
    return Subspace(S.field, S.n + 1, rows)


def iter_p_extensions(X: Subspace, p: int, target_dim: int) -> Iterator[Subspace]:
    """Lazily yield the target_dim-subspaces of F_q^{m+p} whose last-p puncture is X.

    Order: at each step the same-dimension extensions (tail values in
    product order) come before the dimension-raising one.
    """
    d = X.dim
    if p < 0 or not max(0, target_dim - p) <= d <= target_dim:
        raise DimensionError(
            f"no {target_dim}-dimensional {p}-fold extension of a {d}-subspace"
        )
    yield from _extend(X, p, target_dim)


def _extend(X, p, t):
    if p == 0:
        yield X
        return
    d = X.dim
    if t - d <= p - 1:
        for Y in extensions_same_dim(X):
            yield from _extend(Y, p - 1, t)
    if d < t:
        yield from _extend(extension_up_dim(X), p - 1, t)


def enumerate_p_extensions(X: Subspace, p: int, target_dim: int) -> list[Subspace]:
    """All target_dim-subspaces of F_q^{m+p} whose last-p-coordinate puncture equals X."""
    out = list(iter_p_extensions(X, p, target_dim))
    out.sort()
    return out


def count_p_extensions(dim: int, p: int, target_dim: int, q: int) -> int:
    """Size of the extension fiber, counted over chains (no enumeration)."""
    if p == 0:
        return 1 if dim == target_dim else 0
    total = 0
    if target_dim - dim <= p - 1:
        total += q**dim * count_p_extensions(dim, p - 1, target_dim, q)
    if dim < target_dim:
        total += count_p_extensions(dim + 1, p - 1, target_dim, q)
    return total


def column_matrix(n: int, j: int, coeffs: Sequence[int], field) -> list[list[int]]:
    """Matrix M with v·M replacing coordinate j by sum(coeffs[c] * v[c])."""
    if not 1 <= j <= n:
        raise DimensionError(f"column {j} outside 1..{n}")
    if len(coeffs) != n:
        raise DimensionError(f"need {n} coefficients, got {len(coeffs)}")
    for a in coeffs:
        field.check_element(a)
    if coeffs[j - 1] == 0:
        raise DimensionError(f"coefficient of column {j} must be nonzero")
    M = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for r in range(n):
        M[r][j - 1] = coeffs[r]
    return M


def inverse_column_coeffs(j: int, coeffs: Sequence[int], field) -> list[int]:
    """Coefficients of the column operation undoing ``column_transform(., j, coeffs)``."""
    a = field.inv(coeffs[j - 1])
    out = [field.neg(field.mul(a, c)) for c in coeffs]
    out[j - 1] = a
    return out


def _apply(target, fn):
    if isinstance(target, Subspace):
        return fn(target)
    return target.map_blocks(fn)


def _ambient(target):
    return target.n


def column_transform(target, j: int, coeffs: Sequence[int]):
    """Replace column j of every basis by a combination of columns, then re-canonicalize.

    ``target`` is a Subspace or a DesignMultiset.  The coefficient of column j
    itself must be nonzero, so the substitution is invertible.
    """
    n = _ambient(target)
    M = column_matrix(n, j, list(coeffs), target.field)
    return _apply(target, lambda S: S.transform(M))


def column_swap(target, i: int, j: int):
    """Exchange coordinates i and j of every vector."""
    n = _ambient(target)
    _check_coords({i, j}, n)
    perm = list(range(n))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    M = [[1 if perm[c] == r else 0 for c in range(n)] for r in range(n)]
    return _apply(target, lambda S: S.transform(M))


def linear_substitution(target, matrix: Sequence[Sequence[int]]):
    """Apply v -> v·matrix to every basis vector (matrix must be invertible)."""
    return _apply(target, lambda S: S.transform(matrix))
