"""Random partial packings over F_q^7 used by several test modules."""
import random

from qsteiner.design import DesignMultiset, cover_count_map
from qsteiner.gf import field_new
from qsteiner.structure import z1
from qsteiner.subspace import random_subspace, span


def _combo(rng, f, rows):
    """Random vector in the span of ``rows``."""
    out = [0] * 7
    for r in rows:
        c = rng.randrange(f.q)
        out = [f.add(a, f.mul(c, b)) for a, b in zip(out, r)]
    return out


def _unit(i):
    return [1 if c == i - 1 else 0 for c in range(7)]


def _plus(f, u, v):
    return [f.add(a, b) for a, b in zip(u, v)]


def z2_witness(rng, q):
    """3-subspace whose puncture to columns 1-4 is <e1,e2,e3>."""
    f = field_new(q)
    tail = [_unit(5), _unit(6), _unit(7)]
    return span([_plus(f, _unit(i), _combo(rng, f, tail)) for i in (1, 2, 3)], f, 7)


def z3_witness(rng, q):
    """3-subspace projecting onto <e3,e4> with a nonzero vector of Z1."""
    f = field_new(q)
    tail = [_unit(5), _unit(6), _unit(7)]
    while True:
        w = _combo(rng, f, tail)
        if any(w):
            break
    return span([_plus(f, _unit(3), _combo(rng, f, tail)),
                 _plus(f, _unit(4), _combo(rng, f, tail)), w], f, 7)


def random_packing(rng, q, witness, extra=12, tries=200):
    """{Z1, witness} plus up to ``extra`` random 3-subspaces, keeping the packing property."""
    f = field_new(q)
    blocks = [z1(q), witness]
    covered = set(cover_count_map(DesignMultiset(f, 7, blocks), 2))
    if len(covered) != sum(1 for B in blocks for _ in B.subspaces(2)):
        raise AssertionError("witness shares a line with Z1")
    for _ in range(tries):
        if len(blocks) >= extra + 2:
            break
        B = random_subspace(f, 7, 3, rng)
        lines = B.subspaces(2)
        if any(L in covered for L in lines):
            continue
        blocks.append(B)
        covered.update(lines)
    return DesignMultiset(f, 7, blocks)


def packings(kind, count, q=2, seed=0):
    rng = random.Random(seed)
    make = z2_witness if kind == "z2" else z3_witness
    return [random_packing(rng, q, make(rng, q), extra=rng.randrange(0, 15)) for _ in range(count)]
