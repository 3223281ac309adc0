"""Text formats: QSD1 designs and JSON parallelism files.

QSD1::

    QSD1 q=<q> n=<n>
    B <multiplicity> <row_1> ... <row_k>     # canonical RREF rows
    B <multiplicity> -                       # the 0-subspace

``#`` starts a comment, blank lines are ignored, and non-canonical rows are
rejected with the offending line number.
"""
from __future__ import annotations

import json
import re
from typing import IO, Iterable

from .design import DesignMultiset
from .errors import FormatError, QSDError
from .gf import field_new
from .subspace import format_vector, parse_vector, from_rows, subspace_from_key

_HEADER = re.compile(r"^QSD1\s+q=(\d+)\s+n=(\d+)$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def format_qsd(D: DesignMultiset, comments: Iterable[str] = ()) -> str:
    out = [f"QSD1 q={D.q} n={D.n}"]
    out.extend(f"# {c}" for c in comments)
    for S, m in D.blocks:
        rows = " ".join(format_vector(r) for r in S.rows) if S.rows else "-"
        out.append(f"B {m} {rows}")
    return "\n".join(out) + "\n"


def write_qsd(D: DesignMultiset, path_or_file, comments: Iterable[str] = ()) -> None:
    text = format_qsd(D, comments)
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)


def parse_qsd(text: str) -> DesignMultiset:
    header = None
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise FormatError("expected header 'QSD1 q=<q> n=<n>'", lineno)
            q, n = int(m.group(1)), int(m.group(2))
            try:
                field = field_new(q)
            except QSDError as exc:
                raise FormatError(str(exc), lineno) from None
            header = (field, n)
            continue
        field, n = header
        parts = line.split()
        if parts[0] != "B" or len(parts) < 3:
            raise FormatError(f"expected 'B <multiplicity> <rows...>', got {line!r}", lineno)
        try:
            mult = int(parts[1])
        except ValueError:
            raise FormatError(f"bad multiplicity {parts[1]!r}", lineno) from None
        if mult < 1:
            raise FormatError(f"multiplicity must be positive, got {mult}", lineno)
        try:
            if parts[2:] == ["-"]:
                rows = []
            else:
                rows = [parse_vector(tok, field) for tok in parts[2:]]
            if any(len(r) != n for r in rows):
                raise FormatError(f"rows must have length {n}", lineno)
            S = from_rows(rows, field, n)
        except FormatError as exc:
            if exc.line is None:
                raise FormatError(str(exc), lineno) from None
            raise
        except QSDError as exc:
            raise FormatError(str(exc), lineno) from None
        blocks.append((S, mult))
    if header is None:
        raise FormatError("empty file: missing QSD1 header")
    return DesignMultiset(header[0], header[1], blocks)


def read_qsd(path_or_file) -> DesignMultiset:
    if hasattr(path_or_file, "read"):
        return parse_qsd(path_or_file.read())
    with open(path_or_file) as fh:
        return parse_qsd(fh.read())


# -- parallelisms ------------------------------------------------------------

def parallelism_to_json(q: int, spreads: list[DesignMultiset]) -> dict:
    return {
        "schema": "qsd-parallelism-1",
        "q": q,
        "n": 4,
        "spreads": [[S.key for S in spread] for spread in spreads],
    }


def parallelism_from_json(doc: dict) -> tuple[int, list[DesignMultiset]]:
    if doc.get("schema") != "qsd-parallelism-1":
        raise FormatError("not a qsd-parallelism-1 document")
    q, n = doc["q"], doc.get("n", 4)
    field = field_new(q)
    spreads = []
    for keys in doc["spreads"]:
        spreads.append(DesignMultiset(field, n, [subspace_from_key(k, field, n) for k in keys]))
    return q, spreads


def write_parallelism(q: int, spreads, path) -> None:
    with open(path, "w") as fh:
        json.dump(parallelism_to_json(q, spreads), fh, indent=1)
        fh.write("\n")


def read_parallelism(path) -> tuple[int, list[DesignMultiset]]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
    return parallelism_from_json(doc)
