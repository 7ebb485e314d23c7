"""Grammar round-trip: parse(render(e)) == e on random trees and on the
expression shapes the catalog actually uses."""

import random
from fractions import Fraction

import pytest

from walkerkit.expr import (
    ParseError, add, atan, coord, exp_, free_atoms, funcsym, ln, mul, num,
    param, parse, parse_fraction, pow_, render,
)

LEAVES = [
    lambda: coord("x"),
    lambda: coord("t"),
    lambda: param("c1"),
    lambda: param("c2"),
    lambda: param("alpha"),
    lambda: param("eps"),
    lambda: funcsym("a", (), (1, 2)),
    lambda: funcsym("b", (1,), (1, 2)),
    lambda: funcsym("c", (1, 2), (1, 2)),
    lambda: funcsym("f", (2,), (2,)),
    lambda: num(3),
    lambda: num(Fraction(1, 2)),
    lambda: num(-2),
]


def random_tree(rng, depth):
    if depth == 0:
        return rng.choice(LEAVES)()
    op = rng.randrange(8)
    if op <= 1:
        return add(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    if op <= 3:
        return mul(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    if op == 4:
        e = rng.choice([2, 3, -1, -2, Fraction(1, 2), Fraction(1, 3),
                        Fraction(-1, 2), Fraction(2, 3)])
        base = random_tree(rng, depth - 1)
        try:
            return pow_(base, e)
        except Exception:
            return base
    if op == 5:
        return ln(random_tree(rng, depth - 1))
    if op == 6:
        return atan(random_tree(rng, depth - 1))
    return exp_(random_tree(rng, depth - 1))


def test_round_trip_random_trees():
    rng = random.Random(20260817)
    for _ in range(1000):
        e = random_tree(rng, rng.randrange(1, 5))
        s = render(e)
        assert parse(s) == e, s


@pytest.mark.parametrize("text", [
    "4*(t + c1)/(c2*x + c3)^2",
    "4*c2^2*(t + c1)^3/(c2*x + c3)^4",
    "(c1*c3^2*t + c5)/(c1*t + c2)",
    "c3 + c1*c4/(c1*t + c2)",
    "sqrt(3)*atan(2*t/sqrt(3) - 1/sqrt(3))",
    "ln((t + (c1/c2)^(1/3))^2)",
    "a_1*c_2 + a_2*b_2 - a_2*c_1 - c_2^2",
    "exp(2*t)*f",
    "-x^2",
    "1 - x^2",
    "eps*b_12 + epsp*a_22",
])
def test_round_trip_catalog_shapes(text):
    e = parse(text)
    assert parse(render(e)) == e


def test_derivative_index_sorted_on_input():
    assert parse("a_21") == parse("a_12")


def test_unary_minus_binds_below_power():
    assert parse("-x^2") == mul(-1, pow_(coord("x"), 2))


def test_power_right_associative():
    assert parse("x^2^3") == pow_(coord("x"), 8)


def test_fraction_exponent():
    e = parse("x^(2/3)")
    assert e == pow_(coord("x"), Fraction(2, 3))


def test_division_folds():
    assert parse("x/2") == mul(Fraction(1, 2), coord("x"))
    assert parse("6/4") == num(Fraction(3, 2))


def test_unknown_symbol_reports_offset():
    with pytest.raises(ParseError) as err:
        parse("x + qq*t")
    assert err.value.offset == 4


def test_decimal_rejected():
    with pytest.raises(ParseError):
        parse("0.5*x")


def test_nonconstant_exponent_rejected():
    with pytest.raises(ParseError):
        parse("x^t")


def test_derivative_on_param_rejected():
    with pytest.raises(ParseError):
        parse("c1_2")


def test_bad_dependency_rejected():
    with pytest.raises(ParseError):
        parse("f_1")


def test_division_by_zero_rejected():
    with pytest.raises(ParseError):
        parse("x/(t - t)")


def test_extra_params_and_custom_functions():
    e = parse("X1*lam + a_3",
              functions={"a": (1, 2, 3, 4)},
              extra_params={"X1", "lam"})
    atoms = free_atoms(e)
    assert param("X1") in atoms
    assert funcsym("a", (3,), (1, 2, 3, 4)) in atoms


def test_parse_fraction():
    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse_fraction("-2") == -2
