"""Forced blocks, gauge normalizations and counting audits for S_q(2,3,7).

Throughout, the ambient space is F_q^7 and

* Z1 = <e5, e6, e7>  (first four columns zero),
* Z2 = <e1, e2, e3>  (last four columns zero),
* Z3 = <e3, e4, e7>  (columns 1, 2, 5, 6 zero).

A block is in class A when it is not Z1 and contains a nonzero vector of Z1
(four leading zeroes); in class B when it is not Z2 and meets Z2.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field

from .design import CoverageReport, DesignMultiset, verify_steiner
from .errors import DesignError, DimensionError
from .gf import field_new
from .puncture import column_swap, column_transform, puncture, puncture_tail
from .subspace import Subspace, coordinate_space, grassmannian, unit_vector

N = 7


def z1(q: int) -> Subspace:
    return coordinate_space(field_new(q), N, (5, 6, 7))


def z2(q: int) -> Subspace:
    return coordinate_space(field_new(q), N, (1, 2, 3))


def z3(q: int) -> Subspace:
    return coordinate_space(field_new(q), N, (3, 4, 7))


@dataclass(frozen=True)
class ForcedBlocks:
    Z1: Subspace
    Z2: Subspace
    Z3: Subspace

    @classmethod
    def for_q(cls, q: int) -> "ForcedBlocks":
        return cls(z1(q), z2(q), z3(q))


@dataclass(frozen=True)
class StructureAudit:
    q: int
    sizeA: int
    sizeB: int
    sizeAB: int
    sizeAonly: int
    residual: int
    total: int

    @property
    def identity_holds(self) -> bool:
        return 2 * self.sizeAonly + self.sizeAB + 2 + self.residual == self.total

    def as_tuple(self) -> tuple[int, ...]:
        return (self.sizeA, self.sizeB, self.sizeAB, self.sizeAonly, self.residual, self.total)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "sizeA": self.sizeA,
            "sizeB": self.sizeB,
            "sizeAB": self.sizeAB,
            "sizeAonly": self.sizeAonly,
            "residual": self.residual,
            "total": self.total,
            "identity_holds": self.identity_holds,
        }


def audit_formulas(q: int) -> StructureAudit:
    """Closed-form class sizes of a hypothetical S_q(2,3,7) with Z1, Z2 forced."""
    r = q * q + q + 1
    size_a = q * q * (q * q + 1) * r
    total = (q**6 + q**5 + q**4 + q**3 + q**2 + q + 1) * (q * q - q + 1)
    return StructureAudit(
        q=q,
        sizeA=size_a,
        sizeB=size_a,
        sizeAB=r * r,
        sizeAonly=r * (q**4 - q - 1),
        residual=q * (q**7 - q**5 - q**4 - 2 * q**3 + q**2 + 2 * q + 2),
        total=total,
    )


def _require_f7(D: DesignMultiset):
    if D.n != N:
        raise DimensionError(f"expected a design over F_q^7, got ambient dimension {D.n}")


def _meet_dims(S: Subspace, q: int) -> tuple[int, int]:
    return (S & z1(q)).dim, (S & z2(q)).dim


@dataclass
class BlockClasses:
    z_blocks: list = dc_field(default_factory=list)
    a_only: list = dc_field(default_factory=list)
    b_only: list = dc_field(default_factory=list)
    a_and_b: list = dc_field(default_factory=list)
    rest: list = dc_field(default_factory=list)

    def sizes(self) -> dict:
        return {
            name: sum(m for _, m in getattr(self, name))
            for name in ("z_blocks", "a_only", "b_only", "a_and_b", "rest")
        }


def classify_blocks(D: DesignMultiset) -> BlockClasses:
    """Partition the (block, multiplicity) pairs into Z, A∖B, B∖A, A∩B and the rest."""
    _require_f7(D)
    Z1, Z2 = z1(D.q), z2(D.q)
    out = BlockClasses()
    for S, m in D.blocks:
        if S.dim != 3:
            raise DimensionError(f"block {S.key} is not a 3-subspace")
        if S == Z1 or S == Z2:
            out.z_blocks.append((S, m))
            continue
        da, db = _meet_dims(S, D.q)
        if da and db:
            out.a_and_b.append((S, m))
        elif da:
            out.a_only.append((S, m))
        elif db:
            out.b_only.append((S, m))
        else:
            out.rest.append((S, m))
    return out


def no_double_special(D: DesignMultiset) -> list[tuple[Subspace, str]]:
    """Blocks other than Z1 (Z2) holding two independent leading- (trailing-) zero vectors."""
    _require_f7(D)
    Z1, Z2 = z1(D.q), z2(D.q)
    bad = []
    for S in D:
        da, db = _meet_dims(S, D.q)
        if S != Z1 and da >= 2:
            bad.append((S, "leading"))
        if S != Z2 and db >= 2:
            bad.append((S, "trailing"))
    return bad


def count_zero_column_blocks(D: DesignMultiset, min_zero: int = 4) -> list[tuple[Subspace, frozenset]]:
    """Blocks with at least ``min_zero`` all-zero columns, with those columns (1-based)."""
    out = []
    for S in D:
        zeros = frozenset(c + 1 for c in range(S.n) if all(r[c] == 0 for r in S.rows))
        if len(zeros) >= min_zero:
            out.append((S, zeros))
    return out


# -- normalizations ------------------------------------------------------------

def find_z2_witness(D: DesignMultiset) -> Subspace | None:
    """Least block whose projection on columns 1-4 is <e1, e2, e3>."""
    target = coordinate_space(D.field, 4, (1, 2, 3))
    cands = [S for S in D if S.dim == 3 and puncture_tail(S, 3) == target]
    return min(cands) if cands else None


def normalize_z1_z2(D: DesignMultiset) -> DesignMultiset:
    """Column-combine so that a witness block becomes Z2 while Z1 stays put.

    Columns 5, 6, 7 are each replaced by themselves minus the combination of
    columns 1-3 that vanishes on the witness.  Z1 has zero columns 1-3, so it
    is fixed; coverage multiplicities of t-subspaces are permuted, not changed.
    """
    _require_f7(D)
    f = D.field
    if z1(D.q) not in D:
        raise DesignError("normalize_z1_z2 needs Z1 in the design")
    X = find_z2_witness(D)
    if X is None:
        raise DesignError("no block projects onto <e1,e2,e3> in columns 1-4")
    out = D
    for c in (5, 6, 7):
        coeffs = [0] * N
        coeffs[c - 1] = 1
        for i in range(3):
            coeffs[i] = f.neg(X.rows[i][c - 1])
        if any(coeffs[:3]):
            out = column_transform(out, c, coeffs)
    assert z1(D.q) in out and z2(D.q) in out
    return out


def find_z3_witness(D: DesignMultiset) -> Subspace | None:
    """Z3 if present, else the least block whose projection on columns 1-4 is <e3, e4>."""
    if D.n == N and z3(D.q) in D:
        return z3(D.q)
    target = coordinate_space(D.field, 4, (3, 4))
    cands = [S for S in D if S.dim == 3 and puncture_tail(S, 3) == target]
    return min(cands) if cands else None


def normalize_z1_z3(D: DesignMultiset) -> DesignMultiset:
    """Column operations turning a witness block into Z3 while fixing Z1.

    Steps: make the witness's leading-zero vector nonzero in column 7 (swap
    7 with 5 or 6 if needed), clear its columns 5 and 6 with column 7, then
    clear columns 5 and 6 of the remaining basis rows using columns 3 and 4.
    """
    _require_f7(D)
    f = D.field
    Z1 = z1(D.q)
    if Z1 not in D:
        raise DesignError("normalize_z1_z3 needs Z1 in the design")
    Y = find_z3_witness(D)
    if Y is None:
        raise DesignError("no block projects onto <e3,e4> in columns 1-4")
    out = D

    def apply(op, *args):
        nonlocal out, Y
        out = op(out, *args)
        Y = op(Y, *args)

    # RREF pivots of Y are 3, 4 and one column beyond 4, so rows[2] is the
    # vector with four leading zeroes
    v = Y.rows[2]
    if v[6] == 0:
        apply(column_swap, 7, 5 if v[4] else 6)
    for c in (5, 6):
        v = Y.rows[2]
        if v[c - 1]:
            coeffs = [0] * N
            coeffs[c - 1] = 1
            coeffs[6] = f.neg(f.div(v[c - 1], v[6]))
            apply(column_transform, c, coeffs)
    u3, u4 = Y.rows[0], Y.rows[1]
    for c in (5, 6):
        if u3[c - 1] or u4[c - 1]:
            coeffs = [0] * N
            coeffs[c - 1] = 1
            coeffs[2] = f.neg(u3[c - 1])
            coeffs[3] = f.neg(u4[c - 1])
            apply(column_transform, c, coeffs)
    assert Y == z3(D.q) and Z1 in out
    return out


# -- local checks ----------------------------------------------------------------

def spread_through_point_check(D: DesignMultiset, i: int, mode: str = "exact") -> CoverageReport:
    """Blocks through <e_i>, punctured at i, checked as a spread S_q(1, k-1, n-1)."""
    e = unit_vector(D.n, i)
    through = [(puncture(S, i), m) for S, m in D.blocks if S.contains(e)]
    k = max((S.dim for S in D), default=3)
    sub = DesignMultiset(D.field, D.n - 1, through)
    return verify_steiner(sub, 1, k - 1, mode)


@dataclass
class PrefixReport:
    q: int
    target: int
    per_point: list = dc_field(default_factory=list)

    @property
    def complete(self) -> bool:
        return all(p["complete"] for p in self.per_point)

    @property
    def within_bound(self) -> bool:
        return all(p["max_tally"] <= self.target for p in self.per_point)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "target_tally": self.target,
            "complete": self.complete,
            "within_bound": self.within_bound,
            "points": self.per_point,
        }


def prefix_distribution_check(D: DesignMultiset) -> PrefixReport:
    """Tally prefix directions in the 3-fold punctures of blocks through each point of Z1.

    In a full S_q(2,3,7) every point of Z1 lies on q^2(q^2+1) further blocks
    and every nonzero direction of F_q^4 occurs exactly q^2 times among their
    punctures.
    """
    _require_f7(D)
    q = D.q
    Z1 = z1(q)
    if Z1 not in D:
        raise DesignError("prefix distribution needs Z1 in the design")
    target = q * q
    need_blocks = q * q * (q * q + 1)
    dirs = grassmannian(4, 1, q)
    report = PrefixReport(q, target)
    for P in Z1.subspaces(1):
        v = P.rows[0]
        tally: Counter = Counter()
        nblocks = 0
        for S, m in D.blocks:
            if S == Z1 or not S.contains(v):
                continue
            nblocks += m
            for d in puncture_tail(S, 3).subspaces(1):
                tally[d] += m
        counts = [tally.get(d, 0) for d in dirs]
        report.per_point.append({
            "point": P.key,
            "blocks": nblocks,
            "max_tally": max(counts),
            "min_tally": min(counts),
            "over_bound": [d.key for d in dirs if tally.get(d, 0) > target],
            "complete": nblocks == need_blocks and all(c == target for c in counts),
        })
    return report
