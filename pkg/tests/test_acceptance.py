"""One test per acceptance criterion, each at its stated tolerance and time limit."""
import random
import time
from collections import Counter

from qsteiner.design import DesignMultiset, parallelism_pg3, check_parallelism, verify_steiner
from qsteiner.gf import field_new
from qsteiner.puncture import enumerate_p_extensions, extension_up_dim, extensions_same_dim, puncture
from qsteiner.punctured import (
    PuncturedParams,
    build_equation_system,
    check_solution,
    construct_s237_5,
    extension_profile_consistent,
    fano_uniform_solution,
    s237_5_composition,
    verify_punctured,
)
from qsteiner.search import PackingState, build_ab_candidates, extend_packing
from qsteiner.qsd_io import format_qsd
from qsteiner.structure import audit_formulas, classify_blocks, normalize_z1_z2, normalize_z1_z3, z1, z2, z3
from qsteiner.subspace import enumerate_grassmannian, gaussian_binomial, grassmannian, random_subspace, zero_space

from synth import packings


def test_c01_counting(criterion):
    t0 = time.perf_counter()
    ok = gaussian_binomial(7, 2, 2) == 2667 and gaussian_binomial(3, 2, 2) == 7
    ok &= gaussian_binomial(7, 2, 2) // gaussian_binomial(3, 2, 2) == 381
    ok &= gaussian_binomial(7, 2, 2) % gaussian_binomial(3, 2, 2) == 0
    mismatches = []
    for q, nmax in [(2, 7), (3, 5)]:
        f = field_new(q)
        for n in range(nmax + 1):
            for k in range(n + 1):
                c = sum(1 for _ in enumerate_grassmannian(n, k, f))
                if c != gaussian_binomial(n, k, q):
                    mismatches.append((q, n, k, c))
    dt = time.perf_counter() - t0
    ok &= not mismatches and dt < 120
    assert criterion(1, ok, f"[7 2]_2=2667, 381 blocks, enumeration matches formula ({dt:.1f}s)"), mismatches


def test_c02_extension_counts(criterion):
    rng = random.Random(2024)
    bad = 0
    for i in range(500):
        q = (2, 3, 4)[i % 3]
        f = field_new(q)
        n = rng.randrange(1, 7)
        S = random_subspace(f, n, rng.randrange(n + 1), rng)
        same = extensions_same_dim(S)
        if len(set(same)) != q**S.dim or any(puncture(E, n + 1) != S or E.dim != S.dim for E in same):
            bad += 1
        up = extension_up_dim(S)
        if up.dim != S.dim + 1 or puncture(up, n + 1) != S:
            bad += 1
    # exhaustive: the puncture fibers of F_q^{n+1} are exactly these extensions
    for q in (2, 3, 4):
        for n in range(1, 5):
            fib = {}
            for k in range(n + 2):
                for E in grassmannian(n + 1, k, q):
                    fib.setdefault(puncture(E, n + 1), Counter())[E.dim] += 1
            for k in range(n + 1):
                for S in grassmannian(n, k, q):
                    if fib[S] != Counter({k: q**k, k + 1: 1}):
                        bad += 1
    assert criterion(2, bad == 0, f"500 random + exhaustive n<=4 over q in 2,3,4; {bad} violations")


def test_c03_fiber_partition(criterion):
    t0 = time.perf_counter()
    seen = Counter()
    zero_fiber = None
    for d in range(3):
        for X in grassmannian(4, d, 2):
            fib = enumerate_p_extensions(X, 3, 2)
            seen.update(fib)
            if X == zero_space(2, 4):
                zero_fiber = len(fib)
    dt = time.perf_counter() - t0
    ok = len(seen) == 2667 and set(seen.values()) == {1} and zero_fiber == 7 and dt < 60
    assert criterion(3, ok, f"2667 lines partitioned, zero fiber {zero_fiber} ({dt:.1f}s)")


def test_c04_equation_system(criterion):
    t0 = time.perf_counter()
    P = PuncturedParams(2, 2, 7, 3)
    S = build_equation_system(P)
    shape = (len(S.equations), len(S.variables))
    well_defined = all(
        extension_profile_consistent(Y, P) for r in P.variable_dims() for Y in grassmannian(P.m, r, 2)
    )
    u2 = fano_uniform_solution(2)
    u3 = fano_uniform_solution(3)
    ok2 = u2.values == (1, 0, 4, 16) and check_solution(S, u2).consistent
    ok3 = check_solution(build_equation_system(PuncturedParams(3, 2, 7, 3)), u3).consistent
    dt = time.perf_counter() - t0
    ok = shape == (51, 66) and well_defined and ok2 and ok3 and dt < 300
    assert criterion(4, ok, f"{shape[0]} equations, {shape[1]} variables, uniform q=2,3 consistent ({dt:.1f}s)")


def test_c05_construction(criterion):
    t0 = time.perf_counter()
    par = parallelism_pg3(2)
    P2 = PuncturedParams(2, 2, 7, 2)
    D = construct_s237_5(2, par)
    comp = s237_5_composition(D)
    ok = D.total_size == 381 and comp == {
        "three_same_dim": 240, "three_from_lines": 80, "two_same_dim": 60, "zero_block": 1}
    splits = [(0, 1, 2, 3), (3, 4, 5, 6), (0, 2, 4, 6), (1, 3, 5, 6)]
    ok &= all(verify_punctured(construct_s237_5(2, par, a), P2).consistent for a in splits)
    q2_time = time.perf_counter() - t0
    D3 = construct_s237_5(3)
    ok &= D3.total_size == 7651
    ok &= verify_punctured(D3, PuncturedParams(3, 2, 7, 2)).consistent
    dt = time.perf_counter() - t0
    ok &= q2_time < 600 and dt < 3600
    assert criterion(5, ok, f"381 = 240+80+60+1, {len(splits)} A/B splits; q=3 7651 full check ({dt:.1f}s)")


def test_c06_parallelism(criterion):
    results = []
    for q, limit in [(2, 1.0), (3, 600.0)]:
        t0 = time.perf_counter()
        spreads = parallelism_pg3(q)
        dt = time.perf_counter() - t0
        shape = (len(spreads), {s.total_size for s in spreads})
        results.append(shape == (q * q + q + 1, {q * q + 1}) and not check_parallelism(q, spreads) and dt < limit)
        union = Counter(L for s in spreads for L in s)
        results.append(len(union) == gaussian_binomial(4, 2, q) and set(union.values()) == {1})
    assert criterion(6, all(results), "q=2: 7 x 5, q=3: 13 x 10, exact partitions")


def test_c07_audit(criterion):
    ok = audit_formulas(2).as_tuple() == (140, 140, 49, 91, 148, 381)
    ok &= all(audit_formulas(q).identity_holds for q in range(2, 10))
    assert criterion(7, ok, "(140, 140, 49, 91, 148, 381); identity for q=2..9")


def test_c08_normalization(criterion):
    bad = 0
    for kind, fn, target in [("z2", normalize_z1_z2, z2), ("z3", normalize_z1_z3, z3)]:
        for D in packings(kind, 50, seed=99):
            before = verify_steiner(D, 2, 3, "packing").verdict
            N = fn(D)
            if z1(2) not in N or target(2) not in N:
                bad += 1
            if verify_steiner(N, 2, 3, "packing").verdict != before:
                bad += 1
            if fn(N) != N:
                bad += 1
    assert criterion(8, bad == 0, f"50 + 50 synthesized packings, {bad} violations")


def test_c09_search_regression(criterion):
    greedy = extend_packing(PackingState.with_z1_z2(2), 10**6, "greedy")
    greedy_again = extend_packing(PackingState.with_z1_z2(2), 10**6, "greedy", threads=2)
    runs = [extend_packing(PackingState.with_z1_z2(2), 2000, "dlx-first", threads=t) for t in (1, 1, 3)]
    same = format_qsd(greedy.design()) == format_qsd(greedy_again.design())
    same &= len({format_qsd(r.design()) for r in runs}) == 1
    _, rep = build_ab_candidates(2, 10**5)
    ok = same and len(greedy.blocks) >= 200 and rep["size"] <= 231
    detail = (f"greedy {len(greedy.blocks)} >= 200, dlx-first {len(runs[0].blocks)} identical over threads, "
              f"A∪B {rep['size']}/231")
    assert criterion(9, ok, detail)


def test_c10_no_full_system_claimed(criterion):
    # partial systems stay partial and stay under the full-system targets
    greedy = extend_packing(PackingState.with_z1_z2(2), 10**6, "greedy")
    rep = verify_steiner(greedy.design(), 2, 3, "exact")
    classes = classify_blocks(greedy.design()).sizes()
    audit = audit_formulas(2)
    ok = rep.verdict == "packing" and len(greedy.blocks) < audit.total
    ok &= classes["a_and_b"] <= audit.sizeAB
    assert criterion(10, ok, f"best packing {len(greedy.blocks)} < 381 reported as packing; |A∩B| {classes['a_and_b']} <= 49")
