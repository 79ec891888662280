"""Command-line driver.

    hodefunc INPUT [--output-format native|smtlib2] [--solve] ...
    hodefunc oracle INPUT --check {solve,lemma4,diagram,lfp} ...

Exit codes: 0 success, 1 unreadable input or parse error, 2 sort error,
3 solver error, 4 failed oracle check, 5 oracle enumeration too large.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .defunc import build_target, prune_unused
from .emit import emit_native, emit_smtlib
from .errors import Explosion, NonFirstOrder, ParseError, SortError, HodefuncError
from .frontend import parse_problem, print_problem
from .preprocess import FreshNamer, preprocess
from .solver import DEFAULT_TIMEOUT_MS, ERROR, SOLVER_ENV_VAR, resolve_solver_path, solve
from .sortcheck import check_problem

EXIT_OK, EXIT_PARSE, EXIT_SORT, EXIT_SOLVER, EXIT_CHECK, EXIT_EXPLOSION = 0, 1, 2, 3, 4, 5
CHECKS = ("solve", "lemma4", "diagram", "lfp")


@dataclass
class RunConfig:
    input: str
    output_format: str = "native"
    solve: bool = False
    solver_path: Optional[str] = None
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    prune: bool = True
    dump_stages: bool = False
    split_disjuncts: bool = False


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _load(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"cannot read {path}: {exc.strerror or exc}")
    try:
        p = parse_problem(text)
    except ParseError as exc:
        raise _Fail(EXIT_PARSE, f"{path}:{exc}")
    try:
        check_problem(p)
    except SortError as exc:
        raise _Fail(EXIT_SORT, f"{path}:{exc}")
    return p


def _dump(stage: str, p, err):
    print(f"# stage: {stage}", file=err)
    print(print_problem(p), file=err)


def pipeline(p, prune: bool = True, on_stage=None):
    """Preprocess and defunctionalize a checked source problem."""
    namer = FreshNamer.for_problem(p)
    pre = preprocess(p, namer, on_stage)
    arts = build_target(pre, namer)
    if on_stage is not None:
        on_stage("defunc", arts.to_problem())
    if prune:
        arts = prune_unused(arts)
        if on_stage is not None:
            on_stage("prune", arts.to_problem())
    return pre, arts.to_problem()


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        p = _load(cfg.input)
        on_stage = (lambda s, q: _dump(s, q, err)) if cfg.dump_stages else None
        if on_stage:
            on_stage("input", p)
        _, target = pipeline(p, cfg.prune, on_stage)
        try:
            check_problem(target)
        except SortError as exc:
            raise _Fail(EXIT_SORT, f"target problem is ill-sorted: {exc}")
        if cfg.solve:
            path = resolve_solver_path(cfg.solver_path)
            if not path:
                raise _Fail(EXIT_SOLVER, f"no solver configured (use --solver-path or ${SOLVER_ENV_VAR})")
            # split bodies: logically the same, and much friendlier to spacer
            verdict = solve(emit_smtlib(target, split_disjuncts=True), path, cfg.timeout_ms)
            if verdict.kind == ERROR:
                raise _Fail(EXIT_SOLVER, f"solver error: {verdict.text}")
            print(verdict.kind, file=out)
            return EXIT_OK
        if cfg.output_format == "smtlib2":
            out.write(emit_smtlib(target, split_disjuncts=cfg.split_disjuncts).text())
        else:
            out.write(emit_native(target))
        return EXIT_OK
    except _Fail as exc:
        print(f"hodefunc: {exc.message}", file=err)
        return exc.code
    except NonFirstOrder as exc:
        print(f"hodefunc: cannot encode target: {exc}", file=err)
        return EXIT_SORT


def _run_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hodefunc", description="Defunctionalize a higher-order CHC problem.",
                                 epilog="Use 'hodefunc oracle INPUT --check ...' for finite-domain checks.")
    ap.add_argument("input")
    ap.add_argument("--output-format", choices=("native", "smtlib2"), default="native")
    ap.add_argument("--solve", action="store_true", help="run a CHC solver on the SMT-LIB2 encoding")
    ap.add_argument("--solver-path", help=f"solver executable (default: ${SOLVER_ENV_VAR})")
    ap.add_argument("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, metavar="MS")
    ap.add_argument("--no-prune", dest="prune", action="store_false", help="keep unused Apply/IOMatch relations")
    ap.add_argument("--dump-stages", action="store_true", help="print the problem after each stage to stderr")
    ap.add_argument("--split-disjuncts", action="store_true", help="one SMT-LIB clause per disjunct")
    return ap


def _oracle_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hodefunc oracle", description="Finite-domain checks of the transformation.")
    ap.add_argument("input")
    ap.add_argument("--int-range", default="0..2", help="int carrier a..b (default 0..2)")
    ap.add_argument("--closure-depth", type=int, default=1,
                    help="closure depth d0 for the lemma4 and diagram checks (default 1)")
    ap.add_argument("--check", choices=CHECKS, default="solve")
    return ap


def oracle_main(argv: Sequence[str], out=None, err=None) -> int:
    from . import oracle as O

    out = out or sys.stdout
    err = err or sys.stderr
    args = _oracle_parser().parse_args(argv)
    try:
        u = O.Universe.from_range(args.int_range)
    except ValueError as exc:
        print(f"hodefunc: {exc}", file=err)
        return EXIT_PARSE
    try:
        p = _load(args.input)
        if "closr" in p.signature.base_sorts:
            raise _Fail(EXIT_PARSE, "oracle checks expect a source problem")
        pre, target = pipeline(p)
        ok = True
        if args.check == "solve":
            s, t = O.is_solvable(pre, u), O.is_solvable(target, u)
            print(f"source: {'solvable' if s else 'unsolvable'}", file=out)
            print(f"target: {'solvable' if t else 'unsolvable'}", file=out)
            ok = s == t
        elif args.check == "lemma4":
            r = O.bridge_check(pre, u, args.closure_depth)
            print(f"lemma4: {r.checked} subterm instances, {len(r.failures)} failures", file=out)
            for f in r.failures:
                print(f"  {f}", file=out)
            ok = r.ok
        elif args.check == "diagram":
            sem = O.semantics_for(pre, u)
            gamma = sem.bottom_valuation(pre.env)
            compared = literal_bad = 0
            for step in range(sem.lattice_height(pre.env) + 1):
                r = O.diagram_check(pre, gamma, u, args.closure_depth)
                compared += r.compared
                if not r.ok:
                    print(f"diagram: mismatch at Kleene iterate {step}: {r.mismatches[:3]}", file=out)
                    ok = False
                literal_bad += len(O.diagram_check(pre, gamma, u, args.closure_depth, literal=True).mismatches)
                nxt = sem.one_step(pre.program, pre.env, gamma)
                if nxt == gamma:
                    break
                gamma = nxt
            print(f"diagram: {compared} entries compared over {step + 1} iterates, "
                  f"{'all equal' if ok else 'MISMATCH'}", file=out)
            print(f"diagram (arguments expanded under the stepped valuation): {literal_bad} differing entries",
                  file=out)
        else:
            sem = O.Semantics(u, sparse=False)
            v, steps = sem.lfp(pre.program, pre.env)
            height = sem.lattice_height(pre.env)
            print(f"lfp: {steps} iterations, lattice height {height}", file=out)
            ok = steps <= height
            try:
                least = O.least_prefixed_point(pre, u)
                same = least == v
                print(f"lfp: {'equals' if same else 'DIFFERS FROM'} the least prefixed point", file=out)
                ok = ok and same
            except Explosion as exc:
                print(f"lfp: prefixed-point enumeration skipped ({exc})", file=out)
        return EXIT_OK if ok else EXIT_CHECK
    except _Fail as exc:
        print(f"hodefunc: {exc.message}", file=err)
        return exc.code
    except Explosion as exc:
        print(f"hodefunc: enumeration too large: {exc}", file=err)
        return EXIT_EXPLOSION


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "oracle":
        return oracle_main(argv[1:])
    a = _run_parser().parse_args(argv)
    cfg = RunConfig(a.input, a.output_format, a.solve, a.solver_path, a.timeout, a.prune,
                    a.dump_stages, a.split_disjuncts)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
