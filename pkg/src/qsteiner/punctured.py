"""p-punctured q-Steiner systems S_q(t, t+1, n; m): coverage equations and constructions.

A p-punctured system lives in F_q^m with m = n - p.  Every s-subspace X of
F_q^m (max(0, t-p) <= s <= min(t, m)) gives one equation: the t-subspaces of
F_q^n whose last-p puncture is X must each be produced exactly once by the
blocks Y ⊇ X of the punctured system.  The coefficient of block Y in the
equation of X is the number of t-subspaces of a k-dimensional p-fold
extension K of Y that puncture to X.  It is computed by brute force on one
canonical K; :func:`coefficient_well_defined` audits that any other choice
of K gives the same number.

Satisfying every equation is a necessary condition only, so reports say
"consistent", never "is a punctured system".
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

from .design import DesignMultiset, check_parallelism, parallelism_pg3
from .errors import DesignError, DimensionError, FormatError
from .gf import field_new
from .puncture import (
    count_p_extensions,
    extension_up_dim,
    extensions_same_dim,
    iter_p_extensions,
    puncture_tail,
)
from .subspace import (
    Subspace,
    gaussian_binomial,
    grassmannian,
    subspace_from_key,
    zero_space,
)


@dataclass(frozen=True)
class PuncturedParams:
    q: int
    t: int
    n: int
    p: int

    def __post_init__(self):
        field_new(self.q)
        if not 1 <= self.p <= self.n - 1:
            raise DimensionError(f"need 1 <= p <= n-1, got p={self.p}, n={self.n}")
        if not 0 <= self.t < self.k <= self.n:
            raise DimensionError(f"need t < t+1 <= n, got t={self.t}, n={self.n}")

    @property
    def k(self) -> int:
        return self.t + 1

    @property
    def m(self) -> int:
        return self.n - self.p

    def s_range(self) -> range:
        """Dimensions of the equation subspaces X."""
        return range(max(0, self.t - self.p), min(self.t, self.m) + 1)

    def r_range(self, s: int) -> range:
        """Dimensions of blocks Y that appear in the equation of an s-subspace."""
        lo = max(s, max(0, self.k - self.p))
        return range(lo, min(s + 1, self.m) + 1)

    def variable_dims(self) -> list[int]:
        return sorted({r for s in self.s_range() for r in self.r_range(s)})


@dataclass(frozen=True)
class Equation:
    X: Subspace
    rhs: int
    terms: tuple[tuple[Subspace, int], ...]


@dataclass
class EquationSystem:
    params: PuncturedParams
    equations: list[Equation]
    variables: list[Subspace]

    def counts(self) -> dict:
        by_s = Counter(e.X.dim for e in self.equations)
        by_r = Counter(Y.dim for Y in self.variables)
        return {
            "equations": len(self.equations),
            "variables": len(self.variables),
            "equations_by_dim": dict(sorted(by_s.items())),
            "variables_by_dim": dict(sorted(by_r.items())),
        }


@dataclass
class UniformSolution:
    """Multiplicity X_{r,m} of every r-subspace of F_q^m, indexed by r."""

    m: int
    values: tuple[int, ...]

    def __post_init__(self):
        self.values = tuple(self.values)
        if any((not isinstance(v, int)) or v < 0 for v in self.values):
            raise DesignError(f"uniform entries must be non-negative integers: {self.values}")

    def multiplicity(self, dim: int) -> int:
        return self.values[dim] if 0 <= dim < len(self.values) else 0

    def to_design(self, q: int) -> DesignMultiset:
        """Materialize as a multiset over F_q^m."""
        blocks = []
        for r, x in enumerate(self.values):
            if x:
                blocks.extend((Y, x) for Y in grassmannian(self.m, r, q))
        return DesignMultiset(field_new(q), self.m, blocks)


@dataclass
class SolutionReport:
    consistent: bool
    num_equations: int
    violations: list = dc_field(default_factory=list)  # (X, lhs, rhs)
    extraneous: list = dc_field(default_factory=list)  # (block, multiplicity) not a variable

    def to_dict(self, max_items: int = 50) -> dict:
        return {
            "verdict": "consistent" if self.consistent else "inconsistent",
            "num_equations": self.num_equations,
            "num_violations": len(self.violations),
            "violations": [
                {"X": X.key, "lhs": lhs, "rhs": rhs} for X, lhs, rhs in self.violations[:max_items]
            ],
            "extraneous_blocks": [[S.key, m] for S, m in self.extraneous[:max_items]],
        }


# -- coefficients ------------------------------------------------------------

def canonical_extension(Y: Subspace, params: PuncturedParams) -> Subspace:
    """The first k-dimensional p-fold extension of Y in generation order."""
    return next(iter_p_extensions(Y, params.p, params.k))


def _fiber_counts(K: Subspace, params: PuncturedParams) -> Counter:
    return Counter(puncture_tail(T, params.p) for T in K.subspaces(params.t))


def _check_pair(X, Y, params):
    if X.n != params.m or Y.n != params.m or X.q != params.q or Y.q != params.q:
        raise DimensionError(f"X and Y must be subspaces of F_{params.q}^{params.m}")
    if not Y.contains_subspace(X):
        raise DesignError(f"{X.key} is not contained in {Y.key}")
    if not max(0, params.k - params.p) <= Y.dim <= params.k:
        raise DimensionError(
            f"a {Y.dim}-subspace has no {params.k}-dimensional {params.p}-fold extension"
        )


def coefficient(X: Subspace, Y: Subspace, params: PuncturedParams) -> int:
    """t-subspaces of an extension K of Y whose last-p puncture equals X."""
    _check_pair(X, Y, params)
    K = canonical_extension(Y, params)
    return sum(1 for T in K.subspaces(params.t) if puncture_tail(T, params.p) == X)


def coefficient_well_defined(X: Subspace, Y: Subspace, params: PuncturedParams) -> bool:
    """True iff every k-dimensional p-fold extension K of Y gives the same coefficient."""
    _check_pair(X, Y, params)
    values = set()
    for K in iter_p_extensions(Y, params.p, params.k):
        values.add(sum(1 for T in K.subspaces(params.t) if puncture_tail(T, params.p) == X))
        if len(values) > 1:
            return False
    return True


def extension_profile_consistent(Y: Subspace, params: PuncturedParams) -> bool:
    """Well-definedness of coefficient(X, Y) for every X at once, over all extensions K."""
    ref = None
    for K in iter_p_extensions(Y, params.p, params.k):
        prof = _fiber_counts(K, params)
        if ref is None:
            ref = prof
        elif prof != ref:
            return False
    return True


# -- the system ----------------------------------------------------------------

@lru_cache(maxsize=16)
def build_equation_system(params: PuncturedParams) -> EquationSystem:
    """All coverage equations, in lexicographic order of (dim, canonical basis)."""
    q, m, p, t = params.q, params.m, params.p, params.t
    variables = [Y for r in params.variable_dims() for Y in grassmannian(m, r, q)]
    terms: dict[Subspace, list] = {}
    for Y in variables:
        fiber = _fiber_counts(canonical_extension(Y, params), params)
        for s in params.s_range():
            if Y.dim in params.r_range(s):
                for X in Y.subspaces(s):
                    terms.setdefault(X, []).append((Y, fiber.get(X, 0)))
    equations = []
    for s in params.s_range():
        rhs = count_p_extensions(s, p, t, q)
        for X in grassmannian(m, s, q):
            eq_terms = sorted(terms.get(X, []), key=lambda yc: (yc[0].dim, yc[0].rows))
            equations.append(Equation(X, rhs, tuple(eq_terms)))
    return EquationSystem(params, equations, variables)


def check_solution(system: EquationSystem, assignment) -> SolutionReport:
    """Evaluate every equation for a DesignMultiset or UniformSolution over F_q^m."""
    params = system.params
    extraneous = []
    if isinstance(assignment, UniformSolution):
        if assignment.m != params.m:
            raise DimensionError(f"uniform solution is for m={assignment.m}, system has m={params.m}")
        value = lambda Y: assignment.multiplicity(Y.dim)  # noqa: E731
    else:
        if assignment.n != params.m or assignment.q != params.q:
            raise DimensionError(
                f"design is over F_{assignment.q}^{assignment.n}, system needs F_{params.q}^{params.m}"
            )
        value = assignment.multiplicity
        var_dims = set(params.variable_dims())
        extraneous = [(S, mult) for S, mult in assignment.blocks if S.dim not in var_dims]
    violations = []
    for eq in system.equations:
        lhs = sum(c * value(Y) for Y, c in eq.terms)
        if lhs != eq.rhs:
            violations.append((eq.X, lhs, eq.rhs))
    return SolutionReport(not violations and not extraneous, len(system.equations), violations, extraneous)


def verify_punctured(D: DesignMultiset, params: PuncturedParams) -> SolutionReport:
    return check_solution(build_equation_system(params), D)


def uniform_total(params: PuncturedParams, u: UniformSolution) -> int:
    """Number of blocks of a uniform design: sum of X_{r,m} * [m r]_q."""
    return sum(x * gaussian_binomial(params.m, r, params.q) for r, x in enumerate(u.values))


def fano_uniform_solution(q: int) -> UniformSolution:
    """(X_{0,4}, X_{1,4}, X_{2,4}, X_{3,4}) = (1, 0, q^2, q^4 (q-1)) for S_q(2,3,7;4)."""
    return UniformSolution(4, (1, 0, q * q, q**4 * (q - 1)))


def fano_block_count(q: int) -> int:
    return (q**6 + q**5 + q**4 + q**3 + q**2 + q + 1) * (q * q - q + 1)


# -- the 2-punctured construction ----------------------------------------------

def construct_s237_5(q: int, parallelism: Sequence[DesignMultiset] | None = None,
                     a_indices: Sequence[int] | None = None) -> DesignMultiset:
    """Extend the uniform S_q(2,3,7;4) by one coordinate to a multiset over F_q^5.

    * every 3-subspace of F_q^4: each of its q^3 same-dimension extensions,
      q(q-1) times;
    * every line of a spread indexed by ``a_indices`` (q^2 spreads): its
      dimension-raising extension, q^2 times;
    * every line of the other q+1 spreads: each of its q^2 same-dimension
      extensions once;
    * the 0-subspace: its dimension-raising extension <e_5>, once.
    """
    field = field_new(q)
    if parallelism is None:
        parallelism = parallelism_pg3(q)
    problems = check_parallelism(q, list(parallelism))
    if problems:
        raise DesignError("invalid parallelism: " + "; ".join(problems))
    if a_indices is None:
        a_indices = range(q * q)
    a_set = set(a_indices)
    if len(a_set) != q * q or len(a_set) != len(list(a_indices)):
        raise DesignError(f"A must name {q * q} distinct spreads, got {sorted(a_set)}")
    if not a_set <= set(range(len(parallelism))):
        raise DesignError(f"spread indices {sorted(a_set)} outside 0..{len(parallelism) - 1}")

    blocks = []
    for S in grassmannian(4, 3, q):
        blocks.extend((E, q * (q - 1)) for E in extensions_same_dim(S))
    for i, spread in enumerate(parallelism):
        for L in spread:
            if i in a_set:
                blocks.append((extension_up_dim(L), q * q))
            else:
                blocks.extend((E, 1) for E in extensions_same_dim(L))
    blocks.append((extension_up_dim(zero_space(field, 4)), 1))
    return DesignMultiset(field, 5, blocks)


def s237_5_composition(D: DesignMultiset) -> dict:
    """Split a multiset over F_q^5 by how its blocks extend subspaces of F_q^4."""
    comp = Counter()
    for S, m in D.blocks:
        shadow = puncture_tail(S, 1).dim
        if S.dim == 3 and shadow == 3:
            comp["three_same_dim"] += m
        elif S.dim == 3:
            comp["three_from_lines"] += m
        elif S.dim == 2 and shadow == 2:
            comp["two_same_dim"] += m
        elif S.dim == 1 and shadow == 0:
            comp["zero_block"] += m
        else:
            comp["other"] += m
    return dict(comp)


# -- export ---------------------------------------------------------------------

_SYS_HEADER = re.compile(r"^QSE1\s+q=(\d+)\s+n=(\d+)\s+p=(\d+)\s+t=(\d+)$")


def format_system(system: EquationSystem) -> str:
    """Machine-readable rows ``E <X-key> <rhs> (<Y-key>:<coef>)*``."""
    P = system.params
    lines = [f"QSE1 q={P.q} n={P.n} p={P.p} t={P.t}"]
    c = system.counts()
    lines.append(f"# {c['equations']} equations, {c['variables']} variables")
    for eq in system.equations:
        terms = " ".join(f"{Y.key}:{coef}" for Y, coef in eq.terms)
        lines.append(f"E {eq.X.key} {eq.rhs} {terms}".rstrip())
    return "\n".join(lines) + "\n"


def parse_system(text: str) -> EquationSystem:
    params = None
    equations = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if params is None:
            mt = _SYS_HEADER.match(line)
            if not mt:
                raise FormatError("expected header 'QSE1 q= n= p= t='", lineno)
            q, n, p, t = map(int, mt.groups())
            params = PuncturedParams(q, t, n, p)
            field = field_new(q)
            continue
        parts = line.split()
        if parts[0] != "E" or len(parts) < 3:
            raise FormatError(f"expected 'E <X> <rhs> <Y:coef>...', got {line!r}", lineno)
        try:
            X = subspace_from_key(parts[1], field, params.m)
            rhs = int(parts[2])
            terms = []
            for tok in parts[3:]:
                key, coef = tok.rsplit(":", 1)
                terms.append((subspace_from_key(key, field, params.m), int(coef)))
        except (ValueError, FormatError) as exc:
            raise FormatError(str(exc), lineno) from None
        equations.append(Equation(X, rhs, tuple(terms)))
    if params is None:
        raise FormatError("empty equation-system file")
    variables = [Y for r in params.variable_dims() for Y in grassmannian(params.m, r, params.q)]
    return EquationSystem(params, equations, variables)


def format_lp(system: EquationSystem) -> str:
    """CPLEX-LP style listing for external ILP solvers (feasibility problem)."""
    P = system.params
    index = {Y: i for i, Y in enumerate(system.variables)}
    out = [
        f"\\ punctured system q={P.q} n={P.n} p={P.p} t={P.t} (m={P.m})",
        "\\ variable x<i> = multiplicity of subspace:",
    ]
    out.extend(f"\\   x{i} = {Y.key}" for Y, i in index.items())
    out += ["Minimize", " obj: 0 x0", "Subject To"]
    for j, eq in enumerate(system.equations):
        lhs = " + ".join(f"{c} x{index[Y]}" for Y, c in eq.terms if c) or "0 x0"
        out.append(f" e{j}: {lhs} = {eq.rhs}")
    out.append("General")
    out.extend(f" x{i}" for i in range(len(system.variables)))
    out.append("End")
    return "\n".join(out) + "\n"
