"""Deterministic Algorithm X over dict-of-sets (Knuth's exact cover search).

Columns are chosen by fewest remaining rows, ties broken by the column's
position in ``columns``; rows are tried in ascending order.  The solution
sequence is therefore reproducible.
"""
from __future__ import annotations

from typing import Hashable, Iterator, Mapping, Sequence

from .errors import CapacityError


def exact_covers(
    columns: Sequence[Hashable],
    rows: Mapping[int, Sequence[Hashable]],
    max_nodes: int | None = None,
) -> Iterator[list[int]]:
    """Yield every set of rows covering each column exactly once (sorted row ids)."""
    order = {c: i for i, c in enumerate(columns)}
    X = {c: set() for c in columns}
    Y = {}
    for r in sorted(rows):
        cols = list(rows[r])
        Y[r] = cols
        for c in cols:
            if c not in X:
                raise KeyError(f"row {r} uses unknown column {c!r}")
            X[c].add(r)
    nodes = [0]
    yield from (sorted(s) for s in _solve(X, Y, [], order, nodes, max_nodes))


def _solve(X, Y, partial, order, nodes, max_nodes):
    if not X:
        yield list(partial)
        return
    nodes[0] += 1
    if max_nodes is not None and nodes[0] > max_nodes:
        raise CapacityError(f"exact cover search exceeded {max_nodes} nodes")
    c = min(X, key=lambda col: (len(X[col]), order[col]))
    for r in sorted(X[c]):
        partial.append(r)
        removed = _select(X, Y, r)
        yield from _solve(X, Y, partial, order, nodes, max_nodes)
        _deselect(X, Y, r, removed)
        partial.pop()


def _select(X, Y, r):
    removed = []
    for j in Y[r]:
        for i in X[j]:
            for k in Y[i]:
                if k != j:
                    X[k].remove(i)
        removed.append(X.pop(j))
    return removed


def _deselect(X, Y, r, removed):
    for j in reversed(Y[r]):
        X[j] = removed.pop()
        for i in X[j]:
            for k in Y[i]:
                if k != j:
                    X[k].add(i)
