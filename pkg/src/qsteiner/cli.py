"""``qsd`` command-line front end.

Exit codes: 0 success, 1 a verification found a problem, 2 usage or input
error, 3 capacity guard hit.  ``--format json`` prints one report object
with ``"schema": "qsd-report-1"``; errors then go to stderr as JSON too.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import design as _design
from . import punctured as _punct
from . import search as _search
from . import structure as _struct
from .errors import CapacityError, QSDError, SearchInvariantError
from .gf import SUPPORTED_ORDERS, field_new
from .qsd_io import read_parallelism, read_qsd, write_parallelism, write_qsd
from .subspace import enumerate_grassmannian, gaussian_binomial, parse_vector, span

SCHEMA = "qsd-report-1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Result:
    """What a command produced: a JSON-able report, its text rendering, an exit code."""

    def __init__(self, report: dict, text: str | None = None, code: int = EXIT_OK):
        self.report = report
        self.text = text if text is not None else _render_text(report)
        self.code = code


def _render_text(report: dict) -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


# -- argument types -----------------------------------------------------------

def _q(text: str) -> int:
    try:
        q = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if q not in SUPPORTED_ORDERS:
        raise argparse.ArgumentTypeError(f"q must be one of {SUPPORTED_ORDERS}")
    return q


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


# -- commands -----------------------------------------------------------------

def cmd_gauss(a) -> Result:
    if a.k > a.n:
        raise UsageError("need k <= n")
    if a.q < 2:
        raise UsageError("need q >= 2")
    value = gaussian_binomial(a.n, a.k, a.q)
    return Result({"n": a.n, "k": a.k, "q": a.q, "value": value}, str(value))


def cmd_enum(a, out) -> int:
    # streams one subspace key per line (text) or a JSON document written incrementally
    if a.k > a.n:
        raise UsageError("need k <= n")
    it = enumerate_grassmannian(a.n, a.k, field_new(a.q))
    count = 0
    if a.format == "json":
        out.write(json.dumps({"schema": SCHEMA, "command": "enum", "n": a.n, "k": a.k, "q": a.q})[:-1])
        out.write(', "subspaces": [')
        for S in it:
            out.write(("" if count == 0 else ", ") + json.dumps(S.key))
            count += 1
        out.write(f'], "count": {count}}}\n')
    else:
        for S in it:
            out.write(S.key + "\n")
            count += 1
    return EXIT_OK


def cmd_admissible(a) -> Result:
    ok, ratios = _design.admissible(a.t, a.k, a.n, a.q)
    report = {"t": a.t, "k": a.k, "n": a.n, "q": a.q, "admissible": ok,
              "ratios": [str(r) for r in ratios]}
    text = ("admissible" if ok else "not admissible") + ": " + " ".join(str(r) for r in ratios)
    return Result(report, text, EXIT_OK if ok else EXIT_FAIL)


def cmd_spread(a) -> Result:
    D = _design.spread_field_reduction(a.q, a.k, a.n)
    rep = _design.verify_steiner(D, 1, a.k, "exact")
    if a.out:
        write_qsd(D, a.out)
    report = {"q": a.q, "k": a.k, "n": a.n, "blocks": D.total_size, "verdict": rep.verdict,
              "out": a.out}
    return Result(report, f"{D.total_size} blocks, {rep.verdict}", EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_parallelism(a) -> Result:
    spreads = _design.parallelism_pg3(a.q)
    problems = _design.check_parallelism(a.q, spreads)
    if a.out:
        write_parallelism(a.q, spreads, a.out)
    report = {"q": a.q, "spreads": len(spreads), "lines_per_spread": spreads[0].total_size,
              "valid": not problems, "problems": problems, "out": a.out}
    text = f"{len(spreads)} spreads x {spreads[0].total_size} lines, " + ("valid" if not problems else "INVALID")
    return Result(report, text, EXIT_FAIL if problems else EXIT_OK)


def cmd_verify(a) -> Result:
    D = read_qsd(a.file)
    rep = _design.verify_steiner(D, a.t, a.k, a.mode)
    report = {"file": a.file, "q": D.q, "n": D.n, **rep.to_dict()}
    text = f"{rep.verdict}: {rep.num_blocks} blocks, {len(rep.uncovered)} uncovered, " \
           f"{len(rep.multiply_covered)} multiply covered"
    return Result(report, text, EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_derive(a) -> Result:
    D = read_qsd(a.file)
    v = parse_vector(a.point, D.field)
    if len(v) != D.n:
        raise UsageError(f"point must have length {D.n}")
    P = span([v], D.field, D.n)
    k = a.k if a.k is not None else max((S.dim for S in D), default=0)
    derived = _design.derived_design(D, a.t, k, P, check=a.check)
    rep = _design.verify_steiner(derived, a.t - 1, k - 1, a.mode)
    if a.out:
        write_qsd(derived, a.out)
    report = {"file": a.file, "point": P.key, "derived_blocks": derived.total_size,
              "out": a.out, **rep.to_dict()}
    text = f"derived design: {derived.total_size} blocks over F_{D.q}^{derived.n}, {rep.verdict}"
    return Result(report, text, EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_build_eq(a, out) -> int:
    system = _punct.build_equation_system(_punct.PuncturedParams(a.q, a.t, a.n, a.p))
    text = _punct.format_lp(system) if a.lp else _punct.format_system(system)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
        _emit(Result({"command": "punctured build-eq", "out": a.out, **system.counts()}), a, out)
    else:
        out.write(text)
    return EXIT_OK


def cmd_check(a) -> Result:
    with open(a.system) as fh:
        system = _punct.parse_system(fh.read())
    if a.design:
        assignment = read_qsd(a.design)
    else:
        assignment = _punct.UniformSolution(system.params.m, a.uniform)
    rep = _punct.check_solution(system, assignment)
    report = {"system": a.system, "design": a.design, "uniform": a.uniform, **rep.to_dict()}
    text = ("consistent" if rep.consistent else "inconsistent") + \
        f": {rep.num_equations} equations, {len(rep.violations)} violated, " \
        f"{len(rep.extraneous)} extraneous blocks"
    return Result(report, text, EXIT_OK if rep.consistent else EXIT_FAIL)


def cmd_construct(a) -> Result:
    par = None
    if a.parallelism:
        q, par = read_parallelism(a.parallelism)
        if q != a.q:
            raise UsageError(f"parallelism file is over q={q}, not q={a.q}")
    D = _punct.construct_s237_5(a.q, par, a.a_indices)
    write_qsd(D, a.out)
    report = {"q": a.q, "out": a.out, "blocks": D.total_size,
              "expected_blocks": _punct.fano_block_count(a.q),
              "composition": _punct.s237_5_composition(D)}
    return Result(report, f"{D.total_size} blocks written to {a.out}")


def cmd_audit(a) -> Result:
    au = _struct.audit_formulas(a.q)
    return Result(au.to_dict(), code=EXIT_OK if au.identity_holds else EXIT_FAIL)


def cmd_classify(a) -> Result:
    D = read_qsd(a.file)
    cls = _struct.classify_blocks(D)
    doubles = _struct.no_double_special(D)
    zeros = _struct.count_zero_column_blocks(D)
    report = {
        "file": a.file,
        "classes": cls.sizes(),
        "double_special": [[S.key, kind] for S, kind in doubles],
        "zero_column_blocks": [[S.key, sorted(cols)] for S, cols in zeros],
    }
    return Result(report)


def cmd_normalize(a) -> Result:
    D = read_qsd(a.file)
    before = _design.verify_steiner(D, 2, 3, "packing")
    fn = _struct.normalize_z1_z2 if a.target == "z2" else _struct.normalize_z1_z3
    N = fn(D)
    after = _design.verify_steiner(N, 2, 3, "packing")
    write_qsd(N, a.out)
    report = {"file": a.file, "target": a.target, "out": a.out,
              "verdict_before": before.verdict, "verdict_after": after.verdict}
    code = EXIT_OK if before.verdict == after.verdict else EXIT_FAIL
    return Result(report, f"normalized to Z1, {a.target.upper()}; written to {a.out}", code)


def _checkpoint(a, design, extra: dict):
    write_qsd(design, a.out, comments=[f"seed={a.seed} nodes={extra.get('nodes')} strategy={a.strategy}"])
    side = {"schema": "qsd-checkpoint-1", "command": f"search {a.kind}", "q": a.q,
            "seed": a.seed, "budget_nodes": a.budget_nodes, "strategy": a.strategy, **extra}
    with open(a.out + ".json", "w") as fh:
        json.dump(side, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_search(a) -> Result:
    if a.kind == "pack":
        state = _search.PackingState(a.q, seed=a.seed) if a.from_empty \
            else _search.PackingState.with_z1_z2(a.q, seed=a.seed)
        res = _search.extend_packing(state, a.budget_nodes, a.strategy, threads=a.threads)
        report = {"kind": "pack", "q": a.q, "seed": a.seed, "size": len(res.blocks),
                  "stats": res.stats.to_dict()}
        design = res.design()
        text = f"packing of {len(res.blocks)} blocks after {res.stats.nodes} nodes"
    elif a.kind == "ab":
        res, report = _search.build_ab_candidates(a.q, a.budget_nodes, a.seed, a.strategy, a.threads)
        report = {"kind": "ab", "seed": a.seed, **report}
        design = res.design()
        text = f"A∪B family of {report['size']} blocks (target {report['target']}), " \
               f"A∩B class {report['ab_class_size']}/{report['ab_class_target']}"
    else:
        res = _search.search_punctured_6(a.q, a.budget_nodes, a.seed)
        design = res.pop("best_assignment")
        report = {"kind": "p6", "seed": a.seed, **res}
        text = f"found={res['found']} best={res['best_satisfied_equations']}/{res['equations']} " \
               f"equations after {res['nodes']} nodes"
    if a.out:
        stats = report.get("stats", report)
        _checkpoint(a, design, {"nodes": stats.get("nodes"), "size": design.total_size})
        report["out"] = a.out
    return Result(report, text)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS,
                        help="output format (default text)")

    p = _Parser(prog="qsd", description="q-Steiner system toolkit", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn: Callable, help_: str, parent=sub):
        sp = parent.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    sp = add("gauss", cmd_gauss, "Gaussian binomial [n k]_q")
    sp.add_argument("--n", type=_nonneg, required=True)
    sp.add_argument("--k", type=_nonneg, required=True)
    sp.add_argument("--q", type=_nonneg, required=True)

    sp = add("enum", cmd_enum, "list the k-subspaces of F_q^n")
    sp.add_argument("--n", type=_nonneg, required=True)
    sp.add_argument("--k", type=_nonneg, required=True)
    sp.add_argument("--q", type=_q, required=True)

    sp = add("admissible", cmd_admissible, "divisibility conditions for S_q(t,k,n)")
    for f in ("--t", "--k", "--n"):
        sp.add_argument(f, type=_nonneg, required=True)
    sp.add_argument("--q", type=_q, required=True)

    sp = add("spread", cmd_spread, "Desarguesian spread S_q(1,k,n)")
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--k", type=_nonneg, required=True)
    sp.add_argument("--n", type=_nonneg, required=True)
    sp.add_argument("--out")

    sp = add("parallelism", cmd_parallelism, "parallelism of PG(3,q)")
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--out")

    sp = add("verify", cmd_verify, "check a QSD1 design as S_q(t,k,n) or packing")
    sp.add_argument("--file", required=True)
    sp.add_argument("--t", type=_nonneg, required=True)
    sp.add_argument("--k", type=_nonneg, required=True)
    sp.add_argument("--mode", choices=("exact", "packing"), default="exact")

    sp = add("derive", cmd_derive, "derived design at a point")
    sp.add_argument("--file", required=True)
    sp.add_argument("--point", required=True, help="vector such as 0000001")
    sp.add_argument("--t", type=_nonneg, default=2)
    sp.add_argument("--k", type=_nonneg, default=None, help="block dimension (default: largest)")
    sp.add_argument("--mode", choices=("exact", "packing"), default="exact")
    sp.add_argument("--check", action="store_true", help="verify the input design first")
    sp.add_argument("--out")

    pp = add("punctured", None, "punctured equation systems")
    psub = pp.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    sp = add("build-eq", cmd_build_eq, "write the equation system", psub)
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--n", type=_nonneg, required=True)
    sp.add_argument("--p", type=_nonneg, required=True)
    sp.add_argument("--t", type=_nonneg, default=2)
    sp.add_argument("--lp", action="store_true", help="CPLEX LP format instead of QSE1")
    sp.add_argument("--out")
    sp = add("check", cmd_check, "check a design or uniform vector against a system", psub)
    sp.add_argument("--system", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--design")
    g.add_argument("--uniform", type=_int_list, help="comma-separated X_r values, r = 0, 1, ...")

    cp = add("construct", None, "explicit constructions")
    csub = cp.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    sp = add("s237-5", cmd_construct, "multiset over F_q^5 from a parallelism", csub)
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--parallelism")
    sp.add_argument("--a-indices", type=_int_list, default=None)
    sp.add_argument("--out", required=True)

    sp = add("audit", cmd_audit, "closed-form class sizes")
    sp.add_argument("--q", type=_nonneg, required=True)

    sp = add("classify", cmd_classify, "block classes of a design over F_q^7")
    sp.add_argument("--file", required=True)

    sp = add("normalize", cmd_normalize, "move a witness block to Z2 or Z3")
    sp.add_argument("--file", required=True)
    sp.add_argument("--target", choices=("z2", "z3"), required=True)
    sp.add_argument("--out", required=True)

    sp = add("search", cmd_search, "budgeted searches")
    sp.add_argument("kind", choices=("pack", "ab", "p6"))
    sp.add_argument("--q", type=_q, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget-nodes", type=_nonneg, default=100_000)
    sp.add_argument("--strategy", choices=_search.STRATEGIES, default="greedy")
    sp.add_argument("--threads", type=_nonneg, default=1)
    sp.add_argument("--from-empty", action="store_true", help="pack: start without Z1, Z2")
    sp.add_argument("--out", help="QSD1 checkpoint; a JSON sidecar goes to <out>.json")
    return p


_STREAMING = {cmd_enum, cmd_build_eq}


def _emit(res: Result, a, out) -> None:
    if a.format == "json":
        name = a.command + (f" {a.subcommand}" if getattr(a, "subcommand", None) else "")
        doc = {"schema": SCHEMA, "command": name, **res.report}
        out.write(json.dumps(doc, sort_keys=False) + "\n")
    else:
        out.write(res.text + "\n")


def _error(fmt: str, kind: str, message: str, code: int, err) -> int:
    if fmt == "json":
        err.write(json.dumps({"schema": SCHEMA, "error": kind, "message": message, "exit_code": code}) + "\n")
    else:
        err.write(f"qsd: {kind}: {message}\n")
    return code


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = "json" if any(x == "--format=json" for x in argv) or \
        any(x == "--format" and y == "json" for x, y in zip(argv, argv[1:])) else "text"
    try:
        a = build_parser().parse_args(argv)
    except UsageError as exc:
        return _error(fmt, "usage", str(exc), EXIT_USAGE, err)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if not hasattr(a, "format"):
        a.format = "text"
    try:
        if a.fn in _STREAMING:
            return a.fn(a, out)
        res = a.fn(a)
    except UsageError as exc:
        return _error(a.format, "usage", str(exc), EXIT_USAGE, err)
    except CapacityError as exc:
        return _error(a.format, "capacity", str(exc), EXIT_CAPACITY, err)
    except SearchInvariantError as exc:
        return _error(a.format, "invariant", str(exc), EXIT_FAIL, err)
    except (QSDError, ValueError, OSError) as exc:
        return _error(a.format, type(exc).__name__, str(exc), EXIT_USAGE, err)
    _emit(res, a, out)
    return res.code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
