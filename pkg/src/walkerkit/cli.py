"""Command-line driver and report emitter.

Exit codes: 0 when every check in the requested suite passed, 1 when at
least one failed, 2 on usage errors. The JSON rendering carries no
wall-clock timing, so two runs with identical flags and seed are
byte-identical; the text rendering appends elapsed time at the end.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import catalog
from .expr import (
    NONZERO, is_zero, is_zero_symbolic, num, parse, probe_zero, render,
    sub, substitute,
)
from .geometry import (
    EINSTEIN_LABELS, build_metric, einstein_verdicts, equivalence_probe,
    metric_latex, metric_matrix_strings, ricci,
)
from .jets import symmetry_check, system2
from .liealg import (
    BASIS, DIM, NotClosed, adjoint_matrix, bracket, decompose,
    parse_generator, proof_case_replays, render_generator, sc,
    subalgebra_closed,
)
from .pis import (
    ansatz_substitute, defect, invariant_check, invariant_rank,
    reducibility_scan,
)

REPORT_SCHEMA = "walker-report/1"
GENERIC_FLOOR = 1e-4


@dataclass
class Check:
    id: str
    verdict: str
    witness: str = ""


@dataclass
class Report:
    command: str
    seed: int
    samples: int
    tol: float
    mode: str = "auto"
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def add(self, cid: str, ok: bool, witness: str = "") -> None:
        self.checks.append(Check(cid, "pass" if ok else "fail", witness))

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.verdict == "fail"]

    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def to_json(self) -> str:
        ordered = sorted(self.checks, key=lambda c: c.id)
        doc = {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "seed": self.seed,
            "samples": self.samples,
            "tol": self.tol,
            "mode": self.mode,
            "checks": [{"id": c.id, "verdict": c.verdict,
                        "witness": c.witness} for c in ordered],
            "summary": {"pass": len(self.checks) - len(self.failures),
                        "fail": len(self.failures),
                        "total": len(self.checks)},
            "details": self.details,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = []
        for key, value in self.details.items():
            lines.append(f"# {key}")
            if isinstance(value, list):
                for row in value:
                    lines.append("  " + (" | ".join(row)
                                         if isinstance(row, list) else
                                         str(row)))
            elif isinstance(value, dict):
                for k in value:
                    lines.append(f"  {k}: {value[k]}")
            else:
                lines.append(f"  {value}")
        for c in sorted(self.checks, key=lambda c: c.id):
            line = f"{c.verdict.upper()} {c.id}"
            if c.witness:
                line += f"  [{c.witness}]"
            lines.append(line)
        npass = len(self.checks) - len(self.failures)
        lines.append(f"{len(self.checks)} checks: {npass} pass, "
                     f"{len(self.failures)} fail ({self.seconds:.1f}s)")
        return "\n".join(lines)


def _zero_note(e, ctx) -> tuple:
    """(ok, note) under the requested mode."""
    if ctx.mode == "symbolic":
        ok = is_zero_symbolic(e)
        return ok, ("zero_symbolic" if ok else "no symbolic cancellation")
    if ctx.mode == "numeric":
        res = probe_zero(e, samples=ctx.samples, tol=ctx.tol, seed=ctx.seed)
    else:
        res = is_zero(e, samples=ctx.samples, tol=ctx.tol, seed=ctx.seed)
    return bool(res), res.describe()


# --- subcommands -------------------------------------------------------------

def cmd_brackets(args, rep: Report) -> None:
    table = sc()
    grid = []
    for i in range(DIM):
        row = []
        for j in range(DIM):
            coeffs = tuple(num(q) for q in table.c[i][j])
            text = render_generator(coeffs)
            row.append(text if text else "0")
        grid.append(row)
    rep.details["table"] = grid
    ok = True
    for i in range(DIM):
        for j in range(DIM):
            try:
                decompose(bracket(BASIS[i], BASIS[j]))
            except NotClosed:
                ok = False
    rep.add("brackets.decomposition", ok, "49 ordered pairs")
    rep.add("brackets.antisymmetry", table.antisymmetric())
    rep.add("brackets.jacobi", table.jacobi_holds(), "35 triples")


def cmd_adjoint(args, rep: Report) -> None:
    try:
        s = num(Fraction(args.s))
        exact = True
    except ValueError:
        s = float(args.s)
        exact = False
    mat = adjoint_matrix(args.gen, s)
    if exact:
        rows = [[render(e) for e in row] for row in mat]
    else:
        rows = [[repr(v) for v in row] for row in mat]
    rep.details["matrix"] = rows
    rep.details["generator"] = f"X{args.gen}"
    rep.details["s"] = args.s


def cmd_subalgebra(args, rep: Report) -> None:
    texts = [t.strip() for t in args.gens.replace(";", ",").split(",")
             if t.strip()]
    vectors = [parse_generator(t) for t in texts]
    rep.details["generators"] = [render_generator(v) for v in vectors]
    if args.check_closed:
        closure = subalgebra_closed(vectors, seed=args.seed)
        for n, case in enumerate(closure.cases, start=1):
            witness = ""
            if case.assignment:
                witness = " ".join(f"{k}={v}"
                                   for k, v in sorted(case.assignment.items()))
            if case.closed:
                witness += f" lambda={case.lam} mu={case.mu}"
            elif case.reason:
                witness += f" {case.reason}"
            rep.add(f"subalgebra.case{n}", case.closed, witness.strip())
        rep.add("subalgebra.closed", closure.closed,
                "symbolic" if closure.symbolic else "")


def cmd_symmetries(args, rep: Report) -> None:
    sys2 = system2()
    residuals = {}
    for i in range(DIM):
        label = f"X{i + 1}"
        srep = symmetry_check(BASIS[i], sys2, samples=args.samples,
                              tol=args.tol, seed=args.seed, label=label)
        residuals[label] = [f"{c.max_residual:.3e}" for c in srep.cells]
        rep.add(f"symmetries.{label}", srep.passed,
                f"max residual {srep.max_residual:.3e} over "
                f"{len(srep.cells)} equations")
    rep.details["per_equation_residuals"] = residuals


def _entry_or_die(parser, entry_id):
    entry = catalog.builtin_map().get(entry_id)
    if entry is None:
        parser.error(f"unknown catalog entry {entry_id!r}")
    return entry


def cmd_einstein(args, rep: Report, parser) -> None:
    if args.entry:
        entry = _entry_or_die(parser, args.entry)
        if not entry.solutions:
            parser.error(f"entry {args.entry!r} carries no solutions")
        triple = entry.triples()[0]
        a, b, c = triple.a, triple.b, triple.c
    elif args.a is not None and args.b is not None and args.c is not None:
        a, b, c = parse(args.a), parse(args.b), parse(args.c)
    else:
        parser.error("provide --entry ID or all of --a --b --c")
        return
    verdicts = einstein_verdicts(a, b, c, samples=args.samples,
                                 tol=args.tol, seed=args.seed)
    for label, res in zip(EINSTEIN_LABELS, verdicts):
        rep.add(f"einstein.{label}", bool(res), res.describe())
    bundle = ricci(build_metric(a, b, c))
    ricci_zero = all(
        is_zero(bundle.ricci[i][j], samples=min(args.samples, 16),
                tol=args.tol, seed=args.seed)
        for i in range(4) for j in range(i, 4))
    rep.details["ricci_zero"] = "yes" if ricci_zero else "no"
    rep.details["einstein"] = (
        "yes" if all(bool(r) for r in verdicts) else "no")


def _check_closure(entry, ctx, rep: Report) -> None:
    closure = subalgebra_closed(list(entry.coeff_vectors()), seed=ctx.seed)
    if len(entry.generators) == 1:
        rep.add(f"{entry.id}.closure", closure.closed, "single generator")
        return
    ok = closure.closed and closure.symbolic
    cases = len(closure.cases)
    witness = (f"{cases} case(s), symbolic" if ok else
               "; ".join(c.reason for c in closure.cases if c.reason)
               or "numeric only")
    rep.add(f"{entry.id}.closure", ok, witness)


def _check_invariants(entry, ctx, rep: Report) -> None:
    inv = entry.invariant_set()
    gens = entry.coeff_vectors()
    irep = invariant_check(list(gens), inv, seed=ctx.seed)
    rep.add(f"{entry.id}.invariants", irep.passed,
            f"jacobian rank {irep.jacobian_rank}, "
            f"{len(irep.annihilation)} annihilation checks")
    rank, delta = invariant_rank(inv, seed=ctx.seed)
    arbitrary = entry.pis_ansatz().arbitrary
    ok = delta == len(arbitrary) if arbitrary else rank <= 3
    rep.add(f"{entry.id}.rank", ok, f"rank={rank} delta={delta}")


def _check_reduction(entry, ctx, rep: Report) -> None:
    computed = ansatz_substitute(entry.pis_ansatz(), system2())
    shipped = entry.reduced_exprs()
    ok = len(computed) == len(shipped) and all(
        is_zero_symbolic(sub(c, s)) for c, s in zip(computed, shipped))
    rep.add(f"{entry.id}.reduction", ok,
            f"{len(shipped)} reduced residuals, exact")


def _check_profile_family(entry, ctx, rep: Report) -> None:
    idx = int(entry.id.rsplit("family", 1)[1])
    bindings = {k: parse(v)
                for k, v in catalog.RATIO_PROFILE_FAMILIES[idx - 1].items()}
    shipped = entry.reduced_exprs()
    consistency = tuple(entry.parse_expr(s)
                        for s in catalog.RATIO_CONSISTENCY)
    notes = []
    ok = True
    symbolic = 0
    for k, r in enumerate(tuple(shipped) + consistency, start=1):
        good, note = _zero_note(substitute(r, bindings), ctx)
        if note == "zero_symbolic" or "exact" in note:
            symbolic += 1
        if not good:
            ok = False
            notes.append(f"residual {k}: {note}")
    for q in catalog.RATIO_INEQUATIONS:
        res = is_zero(substitute(entry.parse_expr(q), bindings),
                      samples=ctx.samples, tol=ctx.tol, seed=ctx.seed)
        if res.verdict != NONZERO:
            ok = False
            notes.append(f"inequation {q!r} degenerated")
    witness = (f"{len(shipped) + len(consistency)} residuals zero "
               f"({symbolic} exact), inequations generic"
               if ok else "; ".join(notes))
    rep.add(f"{entry.id}.profile", ok, witness)


def _check_solutions(entry, ctx, rep: Report) -> None:
    sys2 = system2()
    for n, triple in enumerate(entry.triples(), start=1):
        suffix = f".solution{n}" if len(entry.solutions) > 1 else ".solution"
        ok = True
        symbolic = 0
        notes = []
        for k, res in enumerate(sys2.residuals, start=1):
            good, note = _zero_note(substitute(res, triple.bindings()), ctx)
            if note == "zero_symbolic":
                symbolic += 1
            if not good:
                ok = False
                notes.append(f"equation {k}: {note}")
        witness = (f"6 residuals zero ({symbolic} exact)" if ok
                   else "; ".join(notes))
        rep.add(f"{entry.id}{suffix}", ok, witness)


def _check_defect(entry, ctx, rep: Report, expect=None) -> None:
    gens = list(entry.coeff_vectors())
    for n, triple in enumerate(entry.triples(), start=1):
        suffix = f".defect{n}" if len(entry.solutions) > 1 else ".defect"
        d = defect(gens, triple, seed=ctx.seed)
        ok = d == expect if expect is not None else True
        rep.add(f"{entry.id}{suffix}", ok, f"delta={d}")


def _check_reducibility(entry, ctx, rep: Report) -> None:
    gens = list(entry.coeff_vectors())
    for n, triple in enumerate(entry.triples(), start=1):
        suffix = (f".reducibility{n}" if len(entry.solutions) > 1
                  else ".reducibility")
        scan = reducibility_scan(gens, triple, seed=ctx.seed)
        if scan.directions:
            dirs = ", ".join(f"({d['alpha']}:{d['beta']})"
                             for d in scan.directions)
            witness = (f"invariant directions {dirs}; "
                       + "; ".join(scan.notes)
                       + "; flagged: conflicts with the non-reducibility"
                       " claim")
        else:
            witness = "no invariant direction in the pencil"
        rep.add(f"{entry.id}{suffix}", True, witness)


def _check_einstein_entry(entry, ctx, rep: Report) -> None:
    triple = entry.triples()[0]
    verdicts = einstein_verdicts(triple.a, triple.b, triple.c,
                                 samples=ctx.samples, tol=ctx.tol,
                                 seed=ctx.seed)
    ok = all(bool(r) for r in verdicts)
    worst = max(verdicts, key=lambda r: r.max_residual)
    rep.add(f"{entry.id}.einstein", ok,
            f"10 components, worst residual {worst.max_residual:.3e}")


def _verify_entry(entry, ctx, rep: Report) -> None:
    _check_closure(entry, ctx, rep)
    if entry.invariants:
        _check_invariants(entry, ctx, rep)
    if entry.reduced:
        _check_reduction(entry, ctx, rep)
    if entry.id.startswith("eq25."):
        _check_profile_family(entry, ctx, rep)
    if entry.solutions:
        _check_solutions(entry, ctx, rep)
    if entry.id.startswith("eq25."):
        _check_defect(entry, ctx, rep, expect=1)
        _check_reducibility(entry, ctx, rep)
    if entry.id == "eq27":
        _check_einstein_entry(entry, ctx, rep)


def _verify_suite(ctx, rep: Report) -> None:
    table = sc()
    ok = True
    for i in range(DIM):
        for j in range(DIM):
            try:
                decompose(bracket(BASIS[i], BASIS[j]))
            except NotClosed:
                ok = False
    rep.add("algebra.brackets", ok, "49 ordered pairs decompose")
    rep.add("algebra.antisymmetry", table.antisymmetric())
    rep.add("algebra.jacobi", table.jacobi_holds(), "35 triples")

    rng = random.Random(ctx.seed)
    worst = 0.0
    for i in range(1, DIM + 1):
        for _ in range(10):
            s, t = rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)
            ms = adjoint_matrix(i, s)
            mt = adjoint_matrix(i, t)
            mst = adjoint_matrix(i, s + t)
            for a in range(DIM):
                for b in range(DIM):
                    got = sum(ms[a][k] * mt[k][b] for k in range(DIM))
                    worst = max(worst, abs(got - mst[a][b]))
    rep.add("algebra.group_law", worst < 1e-10,
            f"70 (s,s') pairs, max deviation {worst:.3e}")

    replays = proof_case_replays(seed=ctx.seed)
    rep.add("algebra.replays", all(r.ok for r in replays),
            f"{len(replays)} normalization cases")

    sys2 = system2()
    for i in range(DIM):
        label = f"X{i + 1}"
        srep = symmetry_check(BASIS[i], sys2, samples=ctx.samples,
                              tol=1e-8, seed=ctx.seed, label=label)
        rep.add(f"symmetries.{label}", srep.passed,
                f"max residual {srep.max_residual:.3e}")

    probe = equivalence_probe(samples=ctx.samples, tol=ctx.tol,
                              seed=ctx.seed)
    rep.add("equivalence.on_shell", probe.on_shell_max < ctx.tol,
            f"max scaled component {probe.on_shell_max:.3e}")
    rep.add("equivalence.generic", probe.generic_min > GENERIC_FLOOR,
            f"min generic violation {probe.generic_min:.3e}")
    corr_ok = (all(probe.correspondence.values())
               and all(v > GENERIC_FLOOR
                       for v in probe.single_violation_max.values()))
    rep.add("equivalence.correspondence", corr_ok,
            "; ".join(f"{k} moves {len(v)} components"
                      for k, v in probe.correspondence.items()))


def cmd_verify(args, rep: Report, parser) -> None:
    if args.all:
        _verify_suite(args, rep)
        for entry in catalog.builtin():
            _verify_entry(entry, args, rep)
    else:
        entry = _entry_or_die(parser, args.entry)
        _verify_entry(entry, args, rep)


def cmd_defect_cmd(args, rep: Report, parser) -> None:
    entry = _entry_or_die(parser, args.entry)
    if not entry.solutions:
        parser.error(f"entry {args.entry!r} carries no solutions")
    if len(entry.generators) < 2:
        parser.error(f"entry {args.entry!r} is not a two-generator span")
    _check_defect(entry, args, rep)


def cmd_reducibility(args, rep: Report, parser) -> None:
    entry = _entry_or_die(parser, args.entry)
    if not entry.solutions:
        parser.error(f"entry {args.entry!r} carries no solutions")
    if len(entry.generators) != 2:
        parser.error(f"entry {args.entry!r} is not a two-generator span")
    _check_reducibility(entry, args, rep)


def cmd_equivalence_probe(args, rep: Report) -> None:
    probe = equivalence_probe(samples=args.samples, tol=args.tol,
                              seed=args.seed)
    rep.add("equivalence.on_shell", probe.on_shell_max < args.tol,
            f"max scaled component {probe.on_shell_max:.3e}")
    rep.add("equivalence.generic", probe.generic_min > GENERIC_FLOOR,
            f"min generic violation {probe.generic_min:.3e}")
    corr_ok = (all(probe.correspondence.values())
               and all(v > GENERIC_FLOOR
                       for v in probe.single_violation_max.values()))
    rep.add("equivalence.correspondence", corr_ok)
    rep.details["correspondence"] = {
        k: list(v) for k, v in probe.correspondence.items()}


def cmd_emit_metric(args, parser) -> int:
    entry = _entry_or_die(parser, args.entry)
    if not entry.solutions:
        parser.error(f"entry {args.entry!r} carries no solutions")
    triple = entry.triples()[0]
    if args.format == "latex":
        print(metric_latex(triple.a, triple.b, triple.c))
    else:
        doc = {
            "entry": entry.id,
            "line_element": metric_latex(triple.a, triple.b, triple.c),
            "matrix": metric_matrix_strings(triple.a, triple.b, triple.c),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


# --- argument plumbing -------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--report", choices=("json", "text"),
                        default="text")

    parser = argparse.ArgumentParser(
        prog="walker-kit",
        description="verification toolkit for a family of null-parallel"
                    " 4D metrics and their symmetry algebra")
    subs = parser.add_subparsers(dest="command", required=True)

    subs.add_parser("brackets", parents=[common])

    p = subs.add_parser("adjoint", parents=[common])
    p.add_argument("--gen", type=int, required=True, metavar="I",
                   help="generator index 1..7")
    p.add_argument("--s", required=True, metavar="V",
                   help="flow parameter, rational or float")

    p = subs.add_parser("subalgebra", parents=[common])
    p.add_argument("--gens", required=True,
                   help="generator expressions separated by ';' or ','")
    p.add_argument("--check-closed", action="store_true")

    subs.add_parser("symmetries", parents=[common])

    p = subs.add_parser("einstein", parents=[common])
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.add_argument("--entry")

    p = subs.add_parser("verify", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--entry")
    g.add_argument("--all", action="store_true")
    p.add_argument("--mode", choices=("symbolic", "numeric", "auto"),
                   default="auto")

    p = subs.add_parser("defect", parents=[common])
    p.add_argument("--entry", required=True)

    p = subs.add_parser("reducibility", parents=[common])
    p.add_argument("--entry", required=True)

    subs.add_parser("equivalence-probe", parents=[common])

    p = subs.add_parser("emit-metric", parents=[common])
    p.add_argument("--entry", required=True)
    p.add_argument("--format", choices=("latex", "json"), default="latex")
    return parser


_TOL_DEFAULTS = {"symmetries": 1e-8}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.tol is None:
        args.tol = _TOL_DEFAULTS.get(args.command, 1e-9)
    if not hasattr(args, "mode"):
        args.mode = "auto"

    if args.command == "emit-metric":
        return cmd_emit_metric(args, parser)

    rep = Report(command=args.command, seed=args.seed,
                 samples=args.samples, tol=args.tol, mode=args.mode)
    start = time.monotonic()
    if args.command == "brackets":
        cmd_brackets(args, rep)
    elif args.command == "adjoint":
        if not 1 <= args.gen <= DIM:
            parser.error(f"--gen must be 1..{DIM}")
        cmd_adjoint(args, rep)
    elif args.command == "subalgebra":
        cmd_subalgebra(args, rep)
    elif args.command == "symmetries":
        cmd_symmetries(args, rep)
    elif args.command == "einstein":
        cmd_einstein(args, rep, parser)
    elif args.command == "verify":
        cmd_verify(args, rep, parser)
    elif args.command == "defect":
        cmd_defect_cmd(args, rep, parser)
    elif args.command == "reducibility":
        cmd_reducibility(args, rep, parser)
    elif args.command == "equivalence-probe":
        cmd_equivalence_probe(args, rep)
    rep.seconds = time.monotonic() - start

    print(rep.to_json() if args.report == "json" else rep.to_text())
    return rep.exit_code()


if __name__ == "__main__":
    sys.exit(main())
