"""Packing search for partial S_q(2,3,7) and the integer search over punctured systems.

Runs are reproducible: budgets count search nodes, candidate order is a
seeded permutation, and the branching line is the uncovered 2-subspace with
the fewest live candidate blocks (ties broken by lexicographic index).
Backtracking strategies shard the root branches, give every shard a fixed
share of the node budget, and reduce by (size, lexicographic block list), so
the result does not depend on the number of worker processes.
"""
from __future__ import annotations

import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

from .design import DesignMultiset, cover_count_map
from .errors import CapacityError, DesignError, DimensionError, SearchInvariantError
from .gf import field_new
from .punctured import EquationSystem, PuncturedParams, build_equation_system, check_solution
from .structure import (
    audit_formulas,
    classify_blocks,
    count_zero_column_blocks,  # noqa: F401  re-exported for search studies
    no_double_special,
    z1,
    z2,
)
from .subspace import Subspace, gaussian_binomial, grassmannian

N = 7
STRATEGIES = ("greedy", "dlx-first", "dlx-best")
UNIVERSE_LIMIT = 200_000


@dataclass
class SearchStats:
    nodes: int = 0
    best_size: int = 0
    wall_time: float = 0.0
    budget_nodes: int = 0
    strategy: str = ""
    complete: bool = False  # an exact cover of all 2-subspaces was reached
    exhausted: bool = False  # the search space was fully explored within budget
    shards: int = 1

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PackingState:
    """A partial packing of 3-subspaces of F_q^7 (every 2-subspace covered at most once)."""

    q: int
    blocks: tuple = ()
    forced: tuple = ()
    pool: tuple | None = None  # None: every 3-subspace is a candidate
    seed: int = 0
    stats: SearchStats = dc_field(default_factory=SearchStats)

    def __post_init__(self):
        self.blocks = tuple(sorted(set(self.blocks) | set(self.forced)))
        self.forced = tuple(sorted(set(self.forced)))

    @classmethod
    def with_z1_z2(cls, q: int, seed: int = 0, pool=None) -> "PackingState":
        return cls(q, forced=(z1(q), z2(q)), pool=pool, seed=seed)

    def design(self) -> DesignMultiset:
        return DesignMultiset(field_new(self.q), N, self.blocks)

    def coverage(self) -> dict:
        return cover_count_map(self.design(), 2)

    def check(self) -> None:
        """Raise SearchInvariantError unless the state is a valid packing."""
        D = self.design()
        if D.total_size != len(self.blocks):
            raise SearchInvariantError("duplicate blocks in packing state")
        bad = [S for S in self.blocks if S.dim != 3 or S.n != N]
        if bad:
            raise SearchInvariantError(f"not 3-subspaces of F_q^7: {[S.key for S in bad]}")
        twice = [T for T, c in cover_count_map(D, 2).items() if c > 1]
        if twice:
            raise SearchInvariantError(f"{len(twice)} 2-subspaces covered more than once")
        if z1(self.q) in self.forced and z2(self.q) in self.forced and no_double_special(D):
            raise SearchInvariantError("block with two independent special vectors")


class _Universe:
    """Index tables for the 2- and 3-subspaces of F_q^7."""

    def __init__(self, q: int):
        size = gaussian_binomial(N, 3, q)
        if size > UNIVERSE_LIMIT:
            raise CapacityError(
                f"G_{q}(7,3) has {size} blocks; packing search is limited to {UNIVERSE_LIMIT}"
            )
        self.q = q
        self.lines = grassmannian(N, 2, q)
        self.line_index = {L: i for i, L in enumerate(self.lines)}
        self.blocks = grassmannian(N, 3, q)
        self.block_index = {B: i for i, B in enumerate(self.blocks)}
        self.block_lines = [
            tuple(sorted(self.line_index[L] for L in B.subspaces(2))) for B in self.blocks
        ]
        self.line_blocks = [[] for _ in self.lines]
        for b, ls in enumerate(self.block_lines):
            for l in ls:
                self.line_blocks[l].append(b)
        self.lines_per_block = len(self.block_lines[0])


@lru_cache(maxsize=4)
def universe(q: int) -> _Universe:
    return _Universe(q)


class _Budget(Exception):
    pass


class _Packer:
    """Mutable search state over block/line indices with exact undo."""

    def __init__(self, U: _Universe, chosen, allowed, seed, cap=None, line_priority=None,
                 check_every=None):
        self.U = U
        nb, nl = len(U.blocks), len(U.lines)
        rng = random.Random(seed)
        self.rank = list(range(nb))
        rng.shuffle(self.rank)
        self.alive = bytearray(nb)
        self.count = [0] * nl
        self.covered = bytearray(nl)
        self.dead = bytearray(nl)
        self.chosen = []
        self.cap = cap
        self.priority = line_priority or [0] * nl
        self.check_every = check_every
        self.nodes = 0
        for b in allowed:
            if not self.alive[b]:
                self.alive[b] = 1
                for l in U.block_lines[b]:
                    self.count[l] += 1
        for b in chosen:
            if any(self.covered[l] for l in U.block_lines[b]):
                raise SearchInvariantError(f"initial block {U.blocks[b].key} overlaps the packing")
            if not self.alive[b]:
                self.alive[b] = 1
                for l in U.block_lines[b]:
                    self.count[l] += 1
            self.select(b)
        self.best = tuple(sorted(self.chosen))

    # -- primitive moves ---------------------------------------------------
    def _kill(self, b, killed):
        self.alive[b] = 0
        killed.append(b)
        for l in self.U.block_lines[b]:
            self.count[l] -= 1

    def select(self, b):
        killed = []
        lb = self.U.line_blocks
        for l in self.U.block_lines[b]:
            self.covered[l] = 1
            for c in lb[l]:
                if self.alive[c]:
                    self._kill(c, killed)
        self.chosen.append(b)
        return killed

    def unselect(self, b, killed):
        self.chosen.pop()
        for l in self.U.block_lines[b]:
            self.covered[l] = 0
        self._revive(killed)

    def abandon(self, l):
        """Forbid covering line l: kill every live block through it."""
        killed = []
        for c in self.U.line_blocks[l]:
            if self.alive[c]:
                self._kill(c, killed)
        self.dead[l] = 1
        return killed

    def unabandon(self, l, killed):
        self.dead[l] = 0
        self._revive(killed)

    def _revive(self, killed):
        for c in reversed(killed):
            self.alive[c] = 1
            for l in self.U.block_lines[c]:
                self.count[l] += 1

    # -- queries -----------------------------------------------------------
    def branch_line(self, allow_empty=False):
        """Uncovered line with fewest live candidates (None if nothing left)."""
        best = None
        best_key = None
        cov, dead, cnt, pri = self.covered, self.dead, self.count, self.priority
        for l in range(len(cnt)):
            if cov[l] or dead[l]:
                continue
            c = cnt[l]
            if c == 0 and not allow_empty:
                continue
            key = (pri[l], c)
            if best_key is None or key < best_key:
                best, best_key = l, key
        return best

    def candidates(self, l):
        """Live blocks through l, fewest conflicts first, then seeded rank."""
        live = [c for c in self.U.line_blocks[l] if self.alive[c]]
        return sorted(live, key=lambda c: (self.conflicts(c), self.rank[c]))

    def conflicts(self, b):
        return sum(self.count[l] for l in self.U.block_lines[b])

    def record(self):
        cur = tuple(sorted(self.chosen))
        if (len(cur), _neg_key(cur)) > (len(self.best), _neg_key(self.best)):
            self.best = cur

    def full(self):
        return self.cap is not None and len(self.chosen) >= self.cap

    def tick(self, budget):
        if self.nodes >= budget:
            raise _Budget
        self.nodes += 1
        if self.check_every and self.nodes % self.check_every == 0:
            self.recount()

    def recount(self):
        U = self.U
        cov = bytearray(len(U.lines))
        for b in self.chosen:
            for l in U.block_lines[b]:
                if cov[l]:
                    raise SearchInvariantError(f"line {U.lines[l].key} covered twice")
                cov[l] = 1
        if cov != self.covered:
            raise SearchInvariantError("coverage map disagrees with recount")
        cnt = [0] * len(U.lines)
        for b in range(len(U.blocks)):
            if self.alive[b]:
                for l in U.block_lines[b]:
                    cnt[l] += 1
        if cnt != self.count:
            raise SearchInvariantError("candidate counts disagree with recount")

    # -- strategies ----------------------------------------------------------
    def greedy(self, budget):
        while not self.full():
            l = self.branch_line()
            if l is None:
                break
            try:
                self.tick(budget)
            except _Budget:
                break
            self.select(self.candidates(l)[0])
        self.record()
        return self.branch_line() is None

    def dfs(self, budget, best_mode):
        """Returns 'complete' when every line is covered (exact design)."""
        self.tick(budget)
        self.record()
        if self.full():
            return None
        if all(self.covered):
            return "complete"
        if best_mode:
            l = self.branch_line()
            if l is None:
                return None
            live = sum(1 for x in range(len(self.count))
                       if not self.covered[x] and not self.dead[x] and self.count[x])
            if len(self.chosen) + live // self.U.lines_per_block <= len(self.best):
                return None
        else:
            l = self.branch_line(allow_empty=True)
            if l is None or self.count[l] == 0:
                return None
        for b in self.candidates(l):
            killed = self.select(b)
            try:
                res = self.dfs(budget, best_mode)
            finally:
                self.unselect(b, killed)
            if res == "complete":
                return res
        if best_mode:
            killed = self.abandon(l)
            try:
                self.dfs(budget, best_mode)
            finally:
                self.unabandon(l, killed)
        return None


def _neg_key(ids):
    # larger is better: prefer the lexicographically smaller block list
    return tuple(-i for i in ids)


def _prepare(state: PackingState):
    U = universe(state.q)
    try:
        chosen = [U.block_index[B] for B in state.blocks]
    except KeyError as exc:
        raise SearchInvariantError(f"block {exc.args[0]} is not a 3-subspace of F_{state.q}^7") from None
    if state.pool is None:
        allowed = range(len(U.blocks))
    else:
        allowed = sorted({U.block_index[B] for B in state.pool} | set(chosen))
    return U, chosen, list(allowed)


def _run_shard(args):
    q, chosen, allowed, seed, cap, priority, root, budget, best_mode, check_every = args
    U = universe(q)
    P = _Packer(U, chosen, allowed, seed, cap, priority, check_every)
    status = None
    if root[0] == "select":
        P.select(root[1])
    else:
        P.abandon(root[1])
    sys_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(sys_limit, 10_000))
    try:
        status = P.dfs(budget, best_mode)
        exhausted = True
    except _Budget:
        exhausted = False
    finally:
        sys.setrecursionlimit(sys_limit)
    return P.best, P.nodes, status == "complete", exhausted


def extend_packing(state: PackingState, budget: int, strategy: str = "greedy", threads: int = 1,
                   cap: int | None = None, line_priority: Sequence[int] | None = None,
                   check_every: int | None = 4096) -> PackingState:
    """Monotonically extend a packing within ``budget`` search nodes."""
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, not {strategy!r}")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    t0 = time.perf_counter()
    state.check()
    U, chosen, allowed = _prepare(state)
    stats = SearchStats(budget_nodes=budget, strategy=strategy)
    priority = list(line_priority) if line_priority is not None else None
    P = _Packer(U, chosen, allowed, state.seed, cap, priority, check_every)

    if strategy == "greedy":
        stats.exhausted = P.greedy(budget)
        best, stats.nodes = P.best, P.nodes
        stats.complete = all(P.covered)
    else:
        best_mode = strategy == "dlx-best"
        roots = []
        l = P.branch_line(allow_empty=not best_mode)
        if budget and l is not None and not P.full() and (best_mode or P.count[l]):
            roots = [("select", b) for b in P.candidates(l)]
            if best_mode:
                roots.append(("abandon", l))
        best = P.best
        stats.exhausted = not roots
        stats.complete = all(P.covered)
        if roots:
            share, extra = divmod(max(budget - 1, 0), len(roots))
            jobs = [
                (state.q, tuple(chosen), tuple(allowed), state.seed, cap, priority, root,
                 share + (1 if i < extra else 0), best_mode, check_every)
                for i, root in enumerate(roots)
            ]
            if threads > 1:
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    results = list(pool.map(_run_shard, jobs))
            else:
                results = [_run_shard(j) for j in jobs]
            stats.shards = len(jobs)
            stats.nodes = 1 + sum(r[1] for r in results)
            stats.complete = any(r[2] for r in results)
            stats.exhausted = all(r[3] for r in results)
            for r in results:
                if (len(r[0]), _neg_key(r[0])) > (len(best), _neg_key(best)):
                    best = r[0]
    out = PackingState(
        state.q,
        blocks=tuple(U.blocks[b] for b in best),
        forced=state.forced,
        pool=state.pool,
        seed=state.seed,
        stats=stats,
    )
    stats.best_size = len(out.blocks)
    stats.wall_time = time.perf_counter() - t0
    out.check()
    return out


# -- the A ∪ B family ----------------------------------------------------------

def ab_target(q: int) -> int:
    """|A ∪ B| = 2 (q^2+q+1)(q^4-q-1) + (q^2+q+1)^2 in a full system (231 at q = 2)."""
    a = audit_formulas(q)
    return 2 * a.sizeAonly + a.sizeAB


def ab_pool(q: int) -> tuple[Subspace, ...]:
    """3-subspaces other than Z1, Z2 that meet Z1 or Z2 in exactly a point."""
    U = universe(q)
    Z1, Z2 = z1(q), z2(q)
    line_in = lambda Z: {U.line_index[L] for L in Z.subspaces(2)}  # noqa: E731
    z_lines = line_in(Z1) | line_in(Z2)
    pts1, pts2 = Z1.subspaces(1), Z2.subspaces(1)
    out = []
    for B in U.blocks:
        if B == Z1 or B == Z2:
            continue
        if any(l in z_lines for l in U.block_lines[U.block_index[B]]):
            continue  # meets Z1 or Z2 in a line
        if any(B.contains(P.rows[0]) for P in pts1) or any(B.contains(P.rows[0]) for P in pts2):
            out.append(B)
    return tuple(out)


def build_ab_candidates(q: int, budget: int, seed: int = 0, strategy: str = "greedy",
                        threads: int = 1) -> tuple[PackingState, dict]:
    """Search a packing of A∪B-type blocks together with Z1 and Z2, capped at the target size."""
    target = ab_target(q)
    U = universe(q)
    Z1, Z2 = z1(q), z2(q)
    # branch first on lines joining Z1 to Z2, then on other lines through
    # a point of Z1 or Z2; lines missing both are never targets
    p1 = [P.rows[0] for P in Z1.subspaces(1)]
    p2 = [P.rows[0] for P in Z2.subspaces(1)]
    priority = []
    for L in U.lines:
        a = any(L.contains(u) for u in p1)
        b = any(L.contains(w) for w in p2)
        priority.append(0 if a and b else 1 if a or b else 2)
    state = PackingState.with_z1_z2(q, seed=seed, pool=ab_pool(q))
    result = extend_packing(state, budget, strategy, threads=threads, cap=target + 2,
                            line_priority=priority)
    classes = classify_blocks(result.design()).sizes()
    audit = audit_formulas(q)
    size = len(result.blocks) - 2
    report = {
        "q": q,
        "size": size,
        "target": target,
        "reached_target": size == target,
        "ab_class_size": classes["a_and_b"],
        "ab_class_target": audit.sizeAB,
        "reached_ab_class": classes["a_and_b"] == audit.sizeAB,
        "classes": classes,
        "stats": result.stats.to_dict(),
    }
    return result, report


# -- integer search over punctured equation systems ---------------------------------

class _IntSearch:
    def __init__(self, system: EquationSystem, seed: int):
        self.system = system
        self.vars = list(system.variables)
        vidx = {Y: i for i, Y in enumerate(self.vars)}
        self.eq_terms = []
        self.var_eqs = [[] for _ in self.vars]
        self.resid = []
        for e, eq in enumerate(system.equations):
            terms = [(vidx[Y], c) for Y, c in eq.terms if c]
            self.eq_terms.append(terms)
            for v, c in terms:
                self.var_eqs[v].append((e, c))
            self.resid.append(eq.rhs)
        self.free = [len(t) for t in self.eq_terms]
        self.val = [None] * len(self.vars)
        rng = random.Random(seed)
        self.rank = list(range(len(self.vars)))
        rng.shuffle(self.rank)
        self.nodes = 0
        self.best_satisfied = -1
        self.best_assignment = {}
        self.trail = []

    def assign(self, v, x):
        self.val[v] = x
        self.trail.append(v)
        touched = []
        for e, c in self.var_eqs[v]:
            self.resid[e] -= c * x
            self.free[e] -= 1
            touched.append(e)
        return touched

    def undo_to(self, mark):
        while len(self.trail) > mark:
            v = self.trail.pop()
            x = self.val[v]
            for e, c in self.var_eqs[v]:
                self.resid[e] += c * x
                self.free[e] += 1
            self.val[v] = None

    def propagate(self, queue):
        while queue:
            e = queue.pop()
            r = self.resid[e]
            if r < 0 or (self.free[e] == 0 and r != 0):
                return False
            if self.free[e] == 0:
                continue
            if sum(c * self.upper(v) for v, c in self.eq_terms[e] if self.val[v] is None) < r:
                return False
            if r == 0:
                for v, _ in self.eq_terms[e]:
                    if self.val[v] is None:
                        queue.extend(self.assign(v, 0))
            elif self.free[e] == 1:
                v, c = next((v, c) for v, c in self.eq_terms[e] if self.val[v] is None)
                if r % c:
                    return False
                queue.extend(self.assign(v, r // c))
        return True

    def upper(self, v):
        return min(self.resid[e] // c for e, c in self.var_eqs[v])

    def satisfied(self):
        return sum(1 for e in range(len(self.resid)) if self.resid[e] == 0 and self.free[e] == 0)

    def record(self):
        s = self.satisfied()
        if s > self.best_satisfied:
            self.best_satisfied = s
            self.best_assignment = {v: x for v, x in enumerate(self.val) if x}

    def dfs(self, budget):
        if self.nodes >= budget:
            raise _Budget
        self.nodes += 1
        self.record()
        open_eqs = [e for e in range(len(self.resid)) if self.resid[e] > 0]
        if not open_eqs:
            # every equation met; unassigned variables are zero
            return True
        e = min(open_eqs, key=lambda e: (self.free[e], e))
        free = [(v, c) for v, c in self.eq_terms[e] if self.val[v] is None]
        v, c = min(free, key=lambda vc: (-vc[1], self.rank[vc[0]]))
        # try values nearest to an even share of the residual first
        share = self.resid[e] // sum(c for _, c in free)
        ub = self.upper(v)
        share = min(share, ub)
        order = sorted(range(ub + 1), key=lambda x: (abs(x - share), -x))
        for x in order:
            mark = len(self.trail)
            if self.propagate(self.assign(v, x)) and self.dfs(budget):
                return True
            self.undo_to(mark)
        return False


def solve_equation_system(system: EquationSystem, budget: int, seed: int = 0, fixed=None) -> dict:
    """Depth-first non-negative integer search with propagation; best effort within budget.

    ``fixed`` maps variables (subspaces) to values assigned before the search.
    """
    t0 = time.perf_counter()
    S = _IntSearch(system, seed)
    vidx = {Y: i for i, Y in enumerate(S.vars)}
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    found = False
    exhausted = True
    try:
        for Y, x in (fixed or {}).items():
            if Y not in vidx:
                raise DimensionError(f"{Y.key} is not a variable of this system")
            if x < 0:
                raise ValueError("fixed values must be non-negative")
            S.assign(vidx[Y], x)
        ok = S.propagate([e for e in range(len(S.resid))])
        found = ok and S.dfs(budget)
    except _Budget:
        exhausted = False
    finally:
        sys.setrecursionlimit(limit)
    if found:
        S.record()
    P = system.params
    design = DesignMultiset(
        field_new(P.q), P.m, [(S.vars[v], x) for v, x in S.best_assignment.items()]
    )
    if found:
        assert check_solution(system, design).consistent
    return {
        "found": found,
        "exhausted": exhausted and not found,
        "nodes": S.nodes,
        "best_satisfied_equations": max(S.best_satisfied, 0),
        "equations": len(system.equations),
        "best_assignment": design,
        "wall_time": time.perf_counter() - t0,
    }


def search_punctured_6(q: int = 2, budget: int = 100_000, seed: int = 0) -> dict:
    """Experimental: integer search for a 1-punctured S_q(2,3,7;6)."""
    if q != 2:
        raise CapacityError("search_punctured_6 is only supported for q = 2")
    system = build_equation_system(PuncturedParams(q, 2, N, 1))
    res = solve_equation_system(system, budget, seed)
    res["system"] = system.counts()
    return res


__all__ = [
    "PackingState",
    "SearchStats",
    "STRATEGIES",
    "ab_pool",
    "ab_target",
    "build_ab_candidates",
    "count_zero_column_blocks",
    "extend_packing",
    "search_punctured_6",
    "solve_equation_system",
    "universe",
]
