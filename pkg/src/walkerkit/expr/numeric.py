"""Guarded floating-point evaluation and the three-valued zero test.

Verdicts: ``zero_symbolic`` when the expansion cancels exactly,
``zero_numeric`` when random probes stay below tolerance, ``nonzero``
with a witness point otherwise. Samples are drawn from [0.5, 2.0] so the
positive-domain conventions for roots and logarithms hold; sign symbols
are drawn from their value sets.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .expand import is_zero_symbolic
from .nodes import (
    Atan, Coord, ExpF, Expr, ExprError, Func, Ln, Num, Param, Pow, Prod,
    SIGN_PARAMS, Sum, TERNARY_PARAMS, atom_name, free_atoms,
)

DENOM_GUARD = 1e-6
EXP_GUARD = 300.0
MAX_RESAMPLES = 50

ZERO_SYMBOLIC = "zero_symbolic"
ZERO_NUMERIC = "zero_numeric"
NONZERO = "nonzero"


class EvalGuard(ArithmeticError):
    """Sample point hit a domain guard; resample."""


class EvalError(ExprError):
    """Evaluation impossible (missing value, guards exhausted)."""


def eval_expr(e: Expr, point: dict) -> float:
    """Evaluate at ``point`` (atom name -> float). Raises EvalGuard near
    singularities and outside real-root domains."""
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, (Coord, Param, Func)):
        name = atom_name(e)
        try:
            return point[name]
        except KeyError:
            raise EvalError(f"no value for {name!r}") from None
    if isinstance(e, Sum):
        return sum(eval_expr(t, point) for t in e.terms)
    if isinstance(e, Prod):
        v = float(e.coeff)
        for f in e.factors:
            v *= eval_expr(f, point)
        return v
    if isinstance(e, Pow):
        base = eval_expr(e.base, point)
        exp = e.exp
        if exp < 0 and abs(base) < DENOM_GUARD:
            raise EvalGuard("denominator too small")
        if exp.denominator == 1:
            return base ** exp.numerator
        if base < 0:
            if exp.denominator % 2 == 1:
                r = -((-base) ** (1.0 / exp.denominator))
                return r ** exp.numerator
            raise EvalGuard("even root of a negative value")
        return base ** float(exp)
    if isinstance(e, Ln):
        arg = eval_expr(e.arg, point)
        if arg < DENOM_GUARD:
            raise EvalGuard("log argument not positive")
        return math.log(arg)
    if isinstance(e, ExpF):
        arg = eval_expr(e.arg, point)
        if arg > EXP_GUARD:
            raise EvalGuard("exponential overflow")
        return math.exp(arg)
    if isinstance(e, Atan):
        return math.atan(eval_expr(e.arg, point))
    raise ExprError(f"cannot evaluate {e!r}")


def sample_point(atoms, rng: random.Random, overrides: dict | None = None) -> dict:
    """Random positive sample for every atom; sign symbols from their sets."""
    point = {}
    for a in sorted(atoms, key=lambda s: s.key()):
        name = atom_name(a)
        if isinstance(a, Param) and a.name in SIGN_PARAMS:
            point[name] = rng.choice((-1.0, 1.0))
        elif isinstance(a, Param) and a.name in TERNARY_PARAMS:
            point[name] = rng.choice((-1.0, 0.0, 1.0))
        else:
            point[name] = rng.uniform(0.5, 2.0)
    if overrides:
        point.update(overrides)
    return point


def _term_scale(e: Expr, point: dict) -> float:
    """max(1, largest |term|): relative scale for sums, absolute else."""
    if isinstance(e, Sum):
        m = max(abs(eval_expr(t, point)) for t in e.terms)
        return max(1.0, m)
    return 1.0


@dataclass
class ZeroResult:
    verdict: str
    max_residual: float = 0.0
    witness: dict | None = None
    samples: int = 0

    def __bool__(self) -> bool:
        return self.verdict in (ZERO_SYMBOLIC, ZERO_NUMERIC)

    def describe(self) -> str:
        if self.verdict == ZERO_SYMBOLIC:
            return "zero (exact cancellation)"
        if self.verdict == ZERO_NUMERIC:
            return (f"zero (numeric, {self.samples} samples, "
                    f"max residual {self.max_residual:.3e})")
        return f"nonzero (residual {self.max_residual:.3e} at {self.witness})"


def probe_zero(e: Expr, samples: int = 64, tol: float = 1e-9,
               seed: int = 0, overrides: dict | None = None) -> ZeroResult:
    """Numeric-only zero test; scaled residual per sample."""
    atoms = free_atoms(e)
    rng = random.Random(seed)
    worst = 0.0
    done = 0
    for _ in range(samples):
        point = None
        value = None
        for _ in range(MAX_RESAMPLES):
            cand = sample_point(atoms, rng, overrides)
            try:
                value = eval_expr(e, cand)
                scale = _term_scale(e, cand)
            except EvalGuard:
                continue
            point = cand
            break
        if point is None:
            raise EvalError("could not find an admissible sample point")
        resid = abs(value) / scale
        done += 1
        if resid > worst:
            worst = resid
        if resid > tol:
            return ZeroResult(NONZERO, max_residual=resid,
                              witness=point, samples=done)
    return ZeroResult(ZERO_NUMERIC, max_residual=worst, samples=done)


def is_zero(e: Expr, samples: int = 64, tol: float = 1e-9,
            seed: int = 0, overrides: dict | None = None) -> ZeroResult:
    """Three-valued zero test: symbolic cancellation first, probes second."""
    if isinstance(e, Num):
        if e.value == 0:
            return ZeroResult(ZERO_SYMBOLIC)
        return ZeroResult(NONZERO, max_residual=abs(float(e.value)),
                          witness={})
    if is_zero_symbolic(e):
        return ZeroResult(ZERO_SYMBOLIC)
    return probe_zero(e, samples=samples, tol=tol, seed=seed,
                      overrides=overrides)
