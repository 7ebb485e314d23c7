"""Immutable symbolic expression trees over exact rational arithmetic.

Every expression is kept in a canonical normal form at construction time:
sums and products are flattened and sorted under a fixed total order, like
terms are merged, rational constants are folded, nested powers collapse,
and power exponents are rational numbers. Two expressions built from the
same term multiset compare structurally equal, so ``==`` is mathematical
equality of normal forms.

Transcendental kernels (ln, exp, atan) stay opaque: their arguments are
normalized but no identities between distinct kernels are applied. The
zero test that needs more than the constructive normal form lives in
``expand``/``numeric``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

COORD_NAMES = ("x", "t", "y", "z")
COORD_INDEX = {"x": 1, "t": 2, "y": 3, "z": 4}
INDEX_COORD = {1: "x", 2: "t", 3: "y", 4: "z"}
ALL_DEPS = (1, 2, 3, 4)
PLANE_DEPS = (1, 2)

# Sign-valued parameters square to one; the ternary one is -1, 0 or +1.
SIGN_PARAMS = frozenset({"eps", "epsp"})
TERNARY_PARAMS = frozenset({"epz"})

_POW_EXPAND_LIMIT = 8


class ExprError(ValueError):
    """Invalid construction: 0^0, exact division by zero, bad indices."""


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise ExprError(f"not a rational value: {v!r}")


class Expr:
    """Base node. Instances are immutable; identity is the normal form."""

    __slots__ = ("_key", "_hash")

    def _seal(self, key) -> None:
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def key(self):
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._key == other._key

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return f"<expr {render(self)}>"

    # Arithmetic sugar. Everything routes through the normalizing builders.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(-1, other))

    def __rsub__(self, other):
        return add(other, mul(-1, self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(-1, self)

    def __pow__(self, e):
        return pow_(self, e)


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        v = _frac(value)
        object.__setattr__(self, "value", v)
        self._seal((0, (v.numerator, v.denominator)))


class Coord(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in COORD_NAMES:
            raise ExprError(f"unknown coordinate {name!r}")
        object.__setattr__(self, "name", name)
        self._seal((1, name))


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._seal((2, name))


class Func(Expr):
    """Dependent-function symbol with a (sorted) derivative multi-index.

    ``deps`` lists the coordinate indices the function may depend on;
    differentiation along any other coordinate gives zero.
    """

    __slots__ = ("name", "idx", "deps")

    def __init__(self, name: str, idx: tuple = (), deps: tuple = ALL_DEPS):
        idx = tuple(idx)
        deps = tuple(deps)
        if any(i not in (1, 2, 3, 4) for i in idx):
            raise ExprError(f"derivative index outside 1..4 on {name!r}: {idx}")
        if any(i not in deps for i in idx):
            raise ExprError(f"{name!r} does not depend on coordinate index {idx}")
        if tuple(sorted(idx)) != idx:
            raise ExprError(f"derivative index not sorted on {name!r}: {idx}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "idx", idx)
        object.__setattr__(self, "deps", deps)
        self._seal((3, name, idx, deps))


class Ln(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)
        self._seal((4, arg._key))


class ExpF(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)
        self._seal((5, arg._key))


class Atan(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)
        self._seal((6, arg._key))


class Pow(Expr):
    """base^exp with a rational exponent. Never exp 0 or 1, never Num^int."""

    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Fraction):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", exp)
        self._seal((7, base._key, (exp.numerator, exp.denominator)))


class Prod(Expr):
    """coeff * f1 * f2 * ... with distinct non-numeric factors, sorted."""

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff: Fraction, factors: tuple):
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "factors", factors)
        self._seal((8, (coeff.numerator, coeff.denominator),
                    tuple(f._key for f in factors)))


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", terms)
        self._seal((9, tuple(t._key for t in terms)))


ZERO = Num(0)
ONE = Num(1)


def to_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Num(v)
    raise ExprError(f"cannot coerce {v!r} to an expression")


def num(v) -> Num:
    return Num(_frac(v))


def coord(name: str) -> Coord:
    return Coord(name)


def param(name: str) -> Param:
    return Param(name)


def funcsym(name: str, idx=(), deps=ALL_DEPS) -> Func:
    return Func(name, tuple(sorted(idx)), tuple(deps))


def _coeff_factors(e: Expr):
    """Split a normalized term into (rational coefficient, factor tuple)."""
    if isinstance(e, Num):
        return e.value, ()
    if isinstance(e, Prod):
        return e.coeff, e.factors
    return Fraction(1), (e,)


def _remake_term(coeff: Fraction, factors: tuple) -> Expr:
    if not factors:
        return Num(coeff)
    if coeff == 1 and len(factors) == 1:
        return factors[0]
    return Prod(coeff, factors)


def add(*terms) -> Expr:
    flat = []
    for term in terms:
        term = to_expr(term)
        if isinstance(term, Sum):
            flat.extend(term.terms)
        else:
            flat.append(term)
    buckets: dict = {}
    for term in flat:
        cf, factors = _coeff_factors(term)
        k = tuple(f._key for f in factors)
        hit = buckets.get(k)
        if hit is None:
            buckets[k] = [cf, factors]
        else:
            hit[0] += cf
    out = []
    for cf, factors in buckets.values():
        if cf == 0:
            continue
        out.append(_remake_term(cf, factors))
    if not out:
        return ZERO
    out.sort(key=lambda e: e._key)
    if len(out) == 1:
        return out[0]
    return Sum(tuple(out))


def mul(*factors) -> Expr:
    coeff = Fraction(1)
    pending = [to_expr(f) for f in factors]
    powers: dict = {}
    order: list = []

    def put(base: Expr, e: Fraction):
        k = base._key
        hit = powers.get(k)
        if hit is None:
            powers[k] = [base, e]
            order.append(k)
        else:
            hit[1] += e

    while pending:
        f = pending.pop()
        if isinstance(f, Num):
            coeff *= f.value
        elif isinstance(f, Prod):
            coeff *= f.coeff
            pending.extend(f.factors)
        elif isinstance(f, Pow):
            put(f.base, f.exp)
        else:
            put(f, Fraction(1))
    if coeff == 0:
        return ZERO

    out = []
    redo = []
    for k in order:
        base, e = powers[k]
        if e == 0:
            continue
        p = pow_(base, e)
        if isinstance(p, Num):
            coeff *= p.value
        elif isinstance(p, Prod):
            redo.append(p)
        else:
            out.append(p)
    if redo:
        return mul(Num(coeff), *out, *redo)
    if coeff == 0:
        return ZERO
    if not out:
        return Num(coeff)
    out.sort(key=lambda e: e._key)
    if coeff == 1 and len(out) == 1:
        return out[0]
    return Prod(coeff, tuple(out))


def _nth_root(n: int, k: int):
    """Exact integer k-th root of n >= 0, or None."""
    if n == 0:
        return 0
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _exact_pow(v: Fraction, e: Fraction):
    """v^e as an exact Fraction, or None when irrational."""
    if e.denominator == 1:
        return v ** e.numerator
    neg = v < 0
    if neg and e.denominator % 2 == 0:
        return None
    av = abs(v)
    rn = _nth_root(av.numerator, e.denominator)
    rd = _nth_root(av.denominator, e.denominator)
    if rn is None or rd is None:
        return None
    root = Fraction(rn, rd)
    if neg:
        root = -root
    return root ** e.numerator


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(gcd(a.numerator, b.numerator),
                    (a.denominator * b.denominator) // gcd(a.denominator, b.denominator))


def sum_content(s: Sum) -> Fraction:
    """Positive rational content of a sum's term coefficients."""
    c = Fraction(0)
    for term in s.terms:
        cf, _ = _coeff_factors(term)
        c = _fraction_gcd(c, abs(cf)) if c else abs(cf)
    return c if c else Fraction(1)


def scale_sum(s: Sum, factor: Fraction) -> Expr:
    return add(*[mul(Num(factor), t) for t in s.terms])


def pow_(base, e) -> Expr:
    e = _frac(e)
    base = to_expr(base)
    if e == 0:
        if isinstance(base, Num) and base.value == 0:
            raise ExprError("0^0 is undefined")
        return ONE
    if e == 1:
        return base
    if isinstance(base, Num):
        if base.value == 0:
            if e < 0:
                raise ExprError("division by exact zero")
            return ZERO
        exact = _exact_pow(base.value, e)
        if exact is not None:
            return Num(exact)
        if base.value < 0 and e.denominator % 2 == 0:
            raise ExprError(f"even root of negative rational {base.value}")
        return Pow(base, e)
    if isinstance(base, Pow):
        return pow_(base.base, base.exp * e)
    if isinstance(base, Prod):
        parts = [pow_(f, e) for f in base.factors]
        if base.coeff != 1:
            parts.append(pow_(Num(base.coeff), e))
        return mul(*parts)
    if isinstance(base, Sum):
        content = sum_content(base)
        if content != 1:
            primitive = scale_sum(base, 1 / content)
            return mul(pow_(Num(content), e), pow_(primitive, e))
        return Pow(base, e)
    return Pow(base, e)


def div(a, b) -> Expr:
    return mul(a, pow_(b, -1))


def neg(a) -> Expr:
    return mul(-1, a)


def sub(a, b) -> Expr:
    return add(a, mul(-1, b))


def ln(arg) -> Expr:
    return Ln(to_expr(arg))


def exp_(arg) -> Expr:
    return ExpF(to_expr(arg))


def atan(arg) -> Expr:
    return Atan(to_expr(arg))


def sqrt(arg) -> Expr:
    return pow_(arg, Fraction(1, 2))


def diff(e: Expr, v: str) -> Expr:
    """Derivative along coordinate ``v`` chaining through function symbols.

    A function symbol picks up the coordinate index (kept sorted, so mixed
    partials commute by construction); symbols that do not depend on ``v``
    differentiate to zero.
    """
    i = COORD_INDEX.get(v)
    if i is None:
        raise ExprError(f"unknown coordinate {v!r}")
    return _diff(e, v, i)


def _diff(e: Expr, v: str, i: int) -> Expr:
    if isinstance(e, (Num, Param)):
        return ZERO
    if isinstance(e, Coord):
        return ONE if e.name == v else ZERO
    if isinstance(e, Func):
        if i not in e.deps:
            return ZERO
        return Func(e.name, tuple(sorted(e.idx + (i,))), e.deps)
    if isinstance(e, Sum):
        return add(*[_diff(t, v, i) for t in e.terms])
    if isinstance(e, Prod):
        terms = []
        fl = e.factors
        for k, fk in enumerate(fl):
            dk = _diff(fk, v, i)
            if dk is ZERO or (isinstance(dk, Num) and dk.value == 0):
                continue
            terms.append(mul(Num(e.coeff), dk, *fl[:k], *fl[k + 1:]))
        return add(*terms)
    if isinstance(e, Pow):
        db = _diff(e.base, v, i)
        if isinstance(db, Num) and db.value == 0:
            return ZERO
        return mul(Num(e.exp), pow_(e.base, e.exp - 1), db)
    if isinstance(e, Ln):
        return mul(_diff(e.arg, v, i), pow_(e.arg, -1))
    if isinstance(e, ExpF):
        return mul(_diff(e.arg, v, i), e)
    if isinstance(e, Atan):
        return mul(_diff(e.arg, v, i), pow_(add(ONE, pow_(e.arg, 2)), -1))
    raise ExprError(f"cannot differentiate {e!r}")


def partial(e: Expr, atom: Expr) -> Expr:
    """Formal partial derivative treating every other atom as constant.

    Unlike ``diff`` this does not chain a function symbol to a new
    derivative index: the atom (coordinate, parameter or function symbol)
    is an independent variable here. Used for jet-space partials and for
    vector fields on the full (x, t, a, b, c) space.
    """
    if e == atom:
        return ONE
    if isinstance(e, (Num, Coord, Param, Func)):
        return ZERO
    if isinstance(e, Sum):
        return add(*[partial(t, atom) for t in e.terms])
    if isinstance(e, Prod):
        terms = []
        fl = e.factors
        for k, fk in enumerate(fl):
            dk = partial(fk, atom)
            if isinstance(dk, Num) and dk.value == 0:
                continue
            terms.append(mul(Num(e.coeff), dk, *fl[:k], *fl[k + 1:]))
        return add(*terms)
    if isinstance(e, Pow):
        db = partial(e.base, atom)
        if isinstance(db, Num) and db.value == 0:
            return ZERO
        return mul(Num(e.exp), pow_(e.base, e.exp - 1), db)
    if isinstance(e, Ln):
        return mul(partial(e.arg, atom), pow_(e.arg, -1))
    if isinstance(e, ExpF):
        return mul(partial(e.arg, atom), e)
    if isinstance(e, Atan):
        return mul(partial(e.arg, atom), pow_(add(ONE, pow_(e.arg, 2)), -1))
    raise ExprError(f"cannot differentiate {e!r}")


def _norm_bindings(bindings: dict):
    fmap: dict = {}
    pmap: dict = {}
    for k, v in bindings.items():
        v = to_expr(v)
        if isinstance(k, Func):
            if k.idx:
                raise ExprError("bind the base function symbol, not a derivative")
            fmap[k.name] = v
        elif isinstance(k, Param):
            pmap[k.name] = v
        elif isinstance(k, str):
            # Bare names: function names a,b,c,f,g,h bind functions,
            # anything else binds a parameter.
            if k in ("a", "b", "c", "f", "g", "h"):
                fmap[k] = v
            else:
                pmap[k] = v
        else:
            raise ExprError(f"bad binding key {k!r}")
    return fmap, pmap


def substitute(e: Expr, bindings: dict) -> Expr:
    """Replace function symbols and parameters, closing under derivatives.

    A derivative symbol of a bound function rewrites to the corresponding
    derivative of the bound expression, so a binding like b -> a*f carries
    b_2 to a_2*f + a*f_2 automatically. Differentiating a binding along a
    coordinate it does not involve yields zero rather than an error.
    """
    fmap, pmap = _norm_bindings(bindings)
    return _subst(e, fmap, pmap)


def _subst(e: Expr, fmap: dict, pmap: dict) -> Expr:
    if isinstance(e, Num):
        return e
    if isinstance(e, Coord):
        return e
    if isinstance(e, Param):
        return pmap.get(e.name, e)
    if isinstance(e, Func):
        hit = fmap.get(e.name)
        if hit is None:
            return e
        out = hit
        for i in e.idx:
            out = diff(out, INDEX_COORD[i])
        return out
    if isinstance(e, Sum):
        return add(*[_subst(t, fmap, pmap) for t in e.terms])
    if isinstance(e, Prod):
        return mul(Num(e.coeff), *[_subst(f, fmap, pmap) for f in e.factors])
    if isinstance(e, Pow):
        return pow_(_subst(e.base, fmap, pmap), e.exp)
    if isinstance(e, Ln):
        return ln(_subst(e.arg, fmap, pmap))
    if isinstance(e, ExpF):
        return exp_(_subst(e.arg, fmap, pmap))
    if isinstance(e, Atan):
        return atan(_subst(e.arg, fmap, pmap))
    raise ExprError(f"cannot substitute into {e!r}")


def free_atoms(e: Expr) -> set:
    """All coordinate, parameter and function-symbol leaves."""
    out: set = set()
    _collect_atoms(e, out)
    return out


def _collect_atoms(e: Expr, out: set) -> None:
    if isinstance(e, (Coord, Param, Func)):
        out.add(e)
    elif isinstance(e, Num):
        pass
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect_atoms(t, out)
    elif isinstance(e, Prod):
        for f in e.factors:
            _collect_atoms(f, out)
    elif isinstance(e, Pow):
        _collect_atoms(e.base, out)
    elif isinstance(e, (Ln, ExpF, Atan)):
        _collect_atoms(e.arg, out)
    else:
        raise ExprError(f"unexpected node {e!r}")


def atom_name(a: Expr) -> str:
    """Stable string key for a leaf atom, used by numeric points."""
    if isinstance(a, (Coord, Param)):
        return a.name
    if isinstance(a, Func):
        if a.idx:
            return a.name + "_" + "".join(str(i) for i in a.idx)
        return a.name
    raise ExprError(f"not an atom: {a!r}")


# --- rendering ------------------------------------------------------------

def _frac_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _pow_text(e: Pow) -> str:
    if e.exp == Fraction(1, 2):
        return f"sqrt({render(e.base)})"
    base = render(e.base)
    if isinstance(e.base, (Sum, Prod)) or (
            isinstance(e.base, Num) and (e.base.value < 0 or e.base.value.denominator != 1)):
        base = f"({base})"
    if e.exp.denominator == 1 and e.exp >= 0:
        return f"{base}^{e.exp.numerator}"
    return f"{base}^({_frac_text(e.exp)})"


def _factor_text(f: Expr) -> str:
    s = render(f)
    if isinstance(f, Sum):
        return f"({s})"
    return s


def render(e: Expr) -> str:
    """Canonical text form; parse(render(e)) == e."""
    if isinstance(e, Num):
        return _frac_text(e.value)
    if isinstance(e, (Coord, Param)):
        return e.name
    if isinstance(e, Func):
        return atom_name(e)
    if isinstance(e, Ln):
        return f"ln({render(e.arg)})"
    if isinstance(e, ExpF):
        return f"exp({render(e.arg)})"
    if isinstance(e, Atan):
        return f"atan({render(e.arg)})"
    if isinstance(e, Pow):
        return _pow_text(e)
    if isinstance(e, Prod):
        parts = [_factor_text(f) for f in e.factors]
        if e.coeff == 1:
            return "*".join(parts)
        if e.coeff == -1:
            return "-" + "*".join(parts)
        return "*".join([_frac_text(e.coeff)] + parts)
    if isinstance(e, Sum):
        out = render(e.terms[0])
        for term in e.terms[1:]:
            cf, factors = _coeff_factors(term)
            if cf < 0:
                out += " - " + render(_remake_term(-cf, factors))
            else:
                out += " + " + render(term)
        return out
    raise ExprError(f"cannot render {e!r}")
