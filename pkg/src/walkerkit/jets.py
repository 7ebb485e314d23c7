"""Second-order jet layer over the plane, with the fiber (a, b, c).

Jet coordinates are the function symbols themselves: a_1 is the first
x-derivative atom, a_12 the mixed one, so total derivatives are plain
diff() calls. Prolongation follows the total-derivative recursion
phi^{J,i} = D_i phi^J - sum_k (D_i xi^k) u^{J,k}.

Symmetry verification is numeric on designated-solve points: the six
residuals are solved for one leading derivative each, every other jet
coordinate is sampled, and the prolonged action is required to vanish
relative to the size of its own terms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .expr import (
    ALL_DEPS, EvalGuard, Expr, ExprError, PLANE_DEPS, Sum, atom_name,
    coord, diff, add, eval_expr, free_atoms, funcsym, mul, neg, parse,
    partial, INDEX_COORD,
)
from .liealg import VectorField

FIBER = ("a", "b", "c")

PIVOT_GUARD = 1e-3
RESIDUAL_TOL = 1e-12
MAX_TRIES = 100


@dataclass(frozen=True)
class PDESystem:
    """Residual expressions plus the designated-solve recipe."""

    name: str
    residuals: tuple
    deps: tuple
    designated: tuple  # ((atom name, residual index), ...) in solve order

    @property
    def funcs(self) -> dict:
        return {f: self.deps for f in FIBER}

    def atom_names(self) -> list:
        names = set()
        for r in self.residuals:
            for a in free_atoms(r):
                names.add(atom_name(a))
        return sorted(names)

    def jet_names(self) -> list:
        """Every coordinate of the full 2-jet space over these deps."""
        names = [INDEX_COORD[i] for i in self.deps]
        for f in FIBER:
            names.append(f)
            names.extend(atom_name(funcsym(f, (i,), self.deps))
                         for i in self.deps)
            names.extend(atom_name(funcsym(f, (i, j), self.deps))
                         for i in self.deps for j in self.deps if i <= j)
        return sorted(names)


_SYS2_TEXT = (
    "a_11 - b_22",
    "b_12 + c_11",
    "a_12 + c_22",
    "a_1*c_2 + a_2*b_2 - a_2*c_1 - c_2^2 + 2*c*a_12 + b*a_22 - a*c_12",
    "a_2*b_1 - c_1*c_2 + c*a_11 - a*c_11 - c*c_12 - b*c_22",
    "a_1*b_1 - b_1*c_2 + b_2*c_1 - c_1^2 + a*b_11 + 2*c*b_12 - b*c_12",
)

_SYS4_EXTRA = {
    3: " - 2*a_24 + 2*c_23",
    4: " - a_14 - b_23 + c_13 + c_24",
    5: " - 2*b_13 + 2*c_14",
}


def system2() -> PDESystem:
    funcs = {f: PLANE_DEPS for f in FIBER}
    residuals = tuple(parse(s, functions=funcs) for s in _SYS2_TEXT)
    designated = (("a_11", 0), ("c_11", 1), ("c_22", 2),
                  ("c_12", 4), ("a_22", 3), ("b_11", 5))
    return PDESystem("plane", residuals, PLANE_DEPS, designated)


def system_a7() -> PDESystem:
    funcs = {f: ALL_DEPS for f in FIBER}
    residuals = tuple(
        parse(s + _SYS4_EXTRA.get(i, ""), functions=funcs)
        for i, s in enumerate(_SYS2_TEXT))
    designated = (("a_11", 0), ("c_11", 1), ("c_22", 2),
                  ("a_24", 3), ("a_14", 4), ("b_13", 5))
    return PDESystem("full", residuals, ALL_DEPS, designated)


@dataclass(frozen=True)
class JetPoint:
    values: dict  # atom name -> float

    def residuals(self, sys: PDESystem) -> list:
        return [eval_expr(r, self.values) for r in sys.residuals]

    def scaled_residuals(self, sys: PDESystem) -> list:
        out = []
        for r in sys.residuals:
            out.append(abs(eval_expr(r, self.values)) / _scale(r, self.values))
        return out


def _scale(e: Expr, point: dict) -> float:
    if isinstance(e, Sum):
        return max(1.0, max(abs(eval_expr(t, point)) for t in e.terms))
    return 1.0


def _parse_atom(name: str, deps: tuple):
    base, _, idx = name.partition("_")
    return funcsym(base, tuple(int(ch) for ch in idx), deps)


def on_shell_sample(seed: int, sys: PDESystem | None = None,
                    rng: random.Random | None = None,
                    targets: dict | None = None) -> JetPoint:
    """One random jet satisfying every residual of the system.

    Free coordinates are uniform on [0.5, 2.0]; each designated leading
    derivative is solved from its residual, which is linear in it. Small
    pivots trigger a full resample. ``targets`` maps a residual index to
    a prescribed value instead of zero; the designated solve order is
    triangular, so later residuals stay exact.
    """
    sys = sys or system2()
    rng = rng or random.Random(seed)
    targets = targets or {}
    names = sys.jet_names()
    solved = [n for n, _ in sys.designated]
    frees = [n for n in names if n not in solved]
    for _ in range(MAX_TRIES):
        values = {n: rng.uniform(0.5, 2.0) for n in frees}
        ok = True
        for name, k in sys.designated:
            atom = _parse_atom(name, sys.deps)
            r = sys.residuals[k]
            coeff_e = partial(r, atom)
            values[name] = 0.0
            try:
                coeff = eval_expr(coeff_e, values)
                base = eval_expr(r, values)
            except EvalGuard:
                ok = False
                break
            if abs(coeff) < PIVOT_GUARD:
                ok = False
                break
            values[name] = (targets.get(k, 0.0) - base) / coeff
        if not ok:
            continue
        point = JetPoint(values)
        hit = all(
            abs(res - targets.get(k, 0.0)) / _scale(sys.residuals[k],
                                                    values) <= RESIDUAL_TOL
            for k, res in enumerate(point.residuals(sys)))
        if hit:
            return point
    raise ExprError("could not draw an on-shell jet within the retry budget")


def on_shell_points(n: int, seed: int,
                    sys: PDESystem | None = None) -> list:
    sys = sys or system2()
    rng = random.Random(seed)
    return [on_shell_sample(0, sys, rng) for _ in range(n)]


# --- prolongation -----------------------------------------------------------

@dataclass(frozen=True)
class Prolongation:
    """xi: base coefficients on (x, t); phi: (func, index tuple) -> Expr."""

    xi: tuple
    phi: dict


def _step(phi_j: Expr, xi: tuple, fname: str, j: tuple, i: int,
          deps: tuple) -> Expr:
    v = INDEX_COORD[i]
    terms = [diff(phi_j, v)]
    for k in (1, 2):
        dxi = diff(xi[k - 1], v)
        u = funcsym(fname, tuple(sorted(j + (k,))), deps)
        terms.append(neg(mul(dxi, u)))
    return add(*terms)


def prolong2(v: VectorField, deps: tuple = PLANE_DEPS) -> Prolongation:
    xi = (v.coeffs[0], v.coeffs[1])
    phi = {}
    for pos, fname in enumerate(FIBER):
        phi[(fname, ())] = v.coeffs[2 + pos]
        for i in (1, 2):
            phi[(fname, (i,))] = _step(phi[(fname, ())], xi, fname, (), i,
                                       deps)
        for j in ((1,), (2,)):
            for i in (1, 2):
                jj = tuple(sorted(j + (i,)))
                if (fname, jj) in phi:
                    continue
                phi[(fname, jj)] = _step(phi[(fname, j)], xi, fname, j, i,
                                         deps)
    return Prolongation(xi, phi)


def prolonged_action(pro: Prolongation, residual: Expr,
                     deps: tuple = PLANE_DEPS) -> Expr:
    """pr v applied to a residual, as one expression over jet atoms."""
    terms = [mul(pro.xi[0], partial(residual, coord("x"))),
             mul(pro.xi[1], partial(residual, coord("t")))]
    for (fname, j), ph in pro.phi.items():
        slot = partial(residual, funcsym(fname, j, deps))
        terms.append(mul(ph, slot))
    return add(*terms)


# --- on-shell symmetry verification ----------------------------------------

@dataclass
class SymmetryCell:
    generator: str
    equation: int
    max_residual: float
    passed: bool
    witness: dict | None = None


@dataclass
class SymmetryReport:
    generator: str
    cells: list
    samples: int
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def max_residual(self) -> float:
        return max(c.max_residual for c in self.cells)


def symmetry_check(v: VectorField, sys: PDESystem | None = None,
                   samples: int = 100, tol: float = 1e-8,
                   seed: int = 42, label: str = "") -> SymmetryReport:
    """Evaluate the prolonged action of v on every residual at seeded
    on-shell jets; each cell passes when the worst scaled residual stays
    under tol."""
    sys = sys or system2()
    points = on_shell_points(samples, seed, sys)
    pro = prolong2(v, sys.deps)
    cells = []
    for k, r in enumerate(sys.residuals):
        action = prolonged_action(pro, r, sys.deps)
        worst = 0.0
        witness = None
        for p in points:
            val = abs(eval_expr(action, p.values)) / _scale(action, p.values)
            if val > worst:
                worst = val
                witness = p.values
        ok = worst < tol
        cells.append(SymmetryCell(label, k, worst, ok,
                                  None if ok else witness))
    return SymmetryReport(label, cells, samples, tol)
