"""Monomial expansion and denominator clearing for the symbolic zero test.

An expression is flattened into a list of monomials: a rational
coefficient times a power product of multiplicative atoms. Atoms are the
leaves (coordinates, parameters, function symbols), transcendental
kernels taken opaquely, and sum bases that cannot be multiplied out
(negative or fractional exponents, or degree past the expansion cap).

Sums raised to small positive integer powers are multiplied out. Sign
symbols squaring to one have their exponents reduced mod 2. Sum bases are
sign-normalized so that u and -u share one atom.

``clear_denominators`` repeatedly multiplies the monomial list by the
positive powers needed to cancel every sum-base denominator, re-expanding
as it goes. Together with the merge this decides zero for the rational
normal forms that actually occur here; what survives goes to the numeric
probe.
"""

from __future__ import annotations

from fractions import Fraction

from .nodes import (
    Atan, Coord, ExpF, Expr, ExprError, Func, Ln, Num, Param, Pow, Prod,
    SIGN_PARAMS, Sum, _coeff_factors, add, mul, pow_,
)

POW_EXPAND_LIMIT = 8
CLEAR_ROUNDS = 6


class Monomial:
    """coeff * prod(atom^exp). ``powers`` maps atom key -> (atom, exp)."""

    __slots__ = ("coeff", "powers")

    def __init__(self, coeff: Fraction, powers: dict):
        self.coeff = coeff
        self.powers = powers

    def merge_key(self):
        return tuple(sorted((k, (e.numerator, e.denominator))
                            for k, (_, e) in self.powers.items()))

    def times(self, other: "Monomial") -> "Monomial":
        powers = dict(self.powers)
        for k, (atom, e) in other.powers.items():
            hit = powers.get(k)
            if hit is None:
                powers[k] = (atom, e)
            else:
                powers[k] = (atom, hit[1] + e)
        powers = {k: v for k, v in powers.items() if v[1] != 0}
        return Monomial(self.coeff * other.coeff, powers)


def _sign_normalized(s: Sum):
    """Return (sign, sum) with the leading term coefficient positive."""
    cf, _ = _coeff_factors(s.terms[0])
    if cf < 0:
        flipped = add(*[mul(-1, t) for t in s.terms])
        return -1, flipped
    return 1, s


def _atom(atom: Expr, e: Fraction) -> list:
    return [Monomial(Fraction(1), {atom.key(): (atom, e)})]


def _mul_lists(a: list, b: list) -> list:
    return _merge([x.times(y) for x in a for y in b])


def _pow_list(base: list, n: int) -> list:
    out = [Monomial(Fraction(1), {})]
    acc = base
    k = n
    while k:
        if k & 1:
            out = _mul_lists(out, acc)
        k >>= 1
        if k:
            acc = _mul_lists(acc, acc)
    return out


def _expand(e: Expr) -> list:
    if isinstance(e, Num):
        if e.value == 0:
            return []
        return [Monomial(e.value, {})]
    if isinstance(e, (Coord, Param, Func, Ln, ExpF, Atan)):
        return _atom(e, Fraction(1))
    if isinstance(e, Sum):
        out = []
        for t in e.terms:
            out.extend(_expand(t))
        return _merge(out)
    if isinstance(e, Prod):
        out = [Monomial(e.coeff, {})]
        for f in e.factors:
            out = _mul_lists(out, _expand(f))
        return out
    if isinstance(e, Pow):
        return _expand_pow(e.base, e.exp)
    raise ExprError(f"cannot expand {e!r}")


def _expand_pow(base: Expr, exp: Fraction) -> list:
    if isinstance(base, Sum):
        if exp.denominator != 1:
            # irrational power of a sum stays one opaque atom
            return _atom(pow_(base, exp), Fraction(1))
        sign, primitive = _sign_normalized(base)
        n = exp.numerator
        adjust = Fraction(1) if (sign == 1 or n % 2 == 0) else Fraction(-1)
        if 0 < n <= POW_EXPAND_LIMIT:
            out = _pow_list(_expand(primitive), n)
            if adjust != 1:
                out = [Monomial(-m.coeff, m.powers) for m in out]
            return out
        out = _atom(primitive, Fraction(n))
        out[0].coeff *= adjust
        return out
    # non-sum bases are leaves or kernels after normalization
    return [Monomial(Fraction(1), {base.key(): (base, exp)})]


def _merge(monos: list) -> list:
    buckets: dict = {}
    for m in monos:
        powers = {}
        coeff = m.coeff
        for k, (atom, e) in m.powers.items():
            if isinstance(atom, Param) and atom.name in SIGN_PARAMS \
                    and e.denominator == 1:
                e = Fraction(e.numerator % 2)
                if e == 0:
                    continue
            powers[k] = (atom, e)
        mk = tuple(sorted((k, (e.numerator, e.denominator))
                          for k, (_, e) in powers.items()))
        hit = buckets.get(mk)
        if hit is None:
            buckets[mk] = Monomial(coeff, powers)
        else:
            hit.coeff += coeff
    return [m for m in buckets.values() if m.coeff != 0]


def expand_monomials(e: Expr) -> list:
    return _merge(_expand(e))


def _denominator_atoms(monos: list) -> dict:
    """Sum atoms with negative integer exponents -> power needed."""
    need: dict = {}
    for m in monos:
        for k, (atom, e) in m.powers.items():
            if isinstance(atom, Sum) and e.denominator == 1 and e < 0:
                need[k] = (atom, max(need.get(k, (atom, 0))[1], -e.numerator))
    return need


def clear_denominators(monos: list, rounds: int = CLEAR_ROUNDS):
    """Multiply through by sum denominators until none remain.

    Returns (monomials, cleared) where ``cleared`` is False when
    denominators survive the round cap; the result is then unusable for a
    symbolic zero verdict.
    """
    for _ in range(rounds):
        need = _denominator_atoms(monos)
        if not need:
            return monos, True
        for k, (atom, m) in need.items():
            atom_expansion = _merge(_expand(atom))
            lifted = []
            for mono in monos:
                e = mono.powers.get(k, (atom, Fraction(0)))[1]
                new_e = e + m
                powers = dict(mono.powers)
                powers.pop(k, None)
                base = [Monomial(mono.coeff, powers)]
                if new_e != 0:
                    if new_e.denominator == 1 and new_e > 0:
                        base = _mul_lists(
                            base, _pow_list(atom_expansion, new_e.numerator))
                    else:
                        base = _mul_lists(base, _atom(atom, new_e))
                lifted.extend(base)
            monos = _merge(lifted)
    return monos, not _denominator_atoms(monos)


def is_zero_symbolic(e: Expr) -> bool:
    """True when expansion plus denominator clearing cancels every term."""
    monos = expand_monomials(e)
    if not monos:
        return True
    monos, cleared = clear_denominators(monos)
    return cleared and not monos
