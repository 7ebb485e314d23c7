"""Curvature layer.

The independent oracle here contracts the full Riemann tensor
R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l}G^l_{n s}
            - G^r_{n l}G^l_{m s},  Ric_{s n} = sum_r R^r_{s r n},
which shares only the Christoffel input with the production path.
"""

import random
from fractions import Fraction

import pytest

from walkerkit.expr import (
    ALL_DEPS, NONZERO, ZERO, ZERO_SYMBOLIC, add, coord, diff, eval_expr,
    funcsym, is_zero, is_zero_symbolic, mul, neg, num, parse,
)
from walkerkit import geometry as geo
from walkerkit import jets


def riemann_ricci_oracle(g):
    n = geo.N
    bundle = geo.ricci(g)
    gam = bundle.gamma

    def d(i, e):
        return diff(e, geo.COORDS[i])

    ric = [[None] * n for _ in range(n)]
    for s in range(n):
        for m in range(n):
            terms = []
            for r in range(n):
                terms.append(d(r, gam[r][m][s]))
                terms.append(neg(d(m, gam[r][r][s])))
                for l in range(n):
                    terms.append(mul(gam[r][r][l], gam[l][m][s]))
                    terms.append(neg(mul(gam[r][m][l], gam[l][r][s])))
            ric[s][m] = add(*terms)
    return ric


def test_metric_layout():
    a, b, c = geo.abstract_functions()
    g = geo.build_metric(a, b, c)
    assert g.is_symmetric()
    assert g.rows[0][2] == num(1)
    assert g.rows[1][3] == num(1)
    assert g.rows[2][2] == a
    assert g.rows[3][3] == b
    assert g.rows[2][3] == c
    assert g.rows[0][0] == ZERO


def test_inverse_is_exact():
    a, b, c = geo.abstract_functions()
    g = geo.build_metric(a, b, c)
    inv = geo.inverse_metric(g)
    for i in range(4):
        for j in range(4):
            dot = add(*[mul(g.rows[i][k], inv.rows[k][j]) for k in range(4)])
            want = num(1 if i == j else 0)
            assert is_zero_symbolic(add(dot, neg(want))), (i, j)


def test_inverse_numeric():
    rng = random.Random(5)
    vals = {"a": rng.uniform(0.5, 2), "b": rng.uniform(0.5, 2),
            "c": rng.uniform(0.5, 2)}
    a, b, c = geo.abstract_functions()
    g = geo.build_metric(a, b, c)
    inv = geo.inverse_metric(g)
    for i in range(4):
        for j in range(4):
            got = sum(eval_expr(g.rows[i][k], vals)
                      * eval_expr(inv.rows[k][j], vals) for k in range(4))
            assert abs(got - (1.0 if i == j else 0.0)) < 1e-14


def test_determinant_is_one():
    a, b, c = geo.abstract_functions()
    assert geo.metric_det_is_one(geo.build_metric(a, b, c))


def test_flat_metric_curvature_vanishes():
    g = geo.build_metric(ZERO, ZERO, ZERO)
    bundle = geo.ricci(g)
    assert all(e == ZERO for row in bundle.ricci for e in row)
    assert bundle.tau == ZERO
    assert all(e == ZERO for e in geo.einstein_residual(g))


def test_constant_coefficients_flat():
    g = geo.build_metric(num(3), num(Fraction(1, 2)), num(-1))
    bundle = geo.ricci(g)
    for row in bundle.gamma:
        for line in row:
            for e in line:
                assert e == ZERO
    assert all(is_zero(e).verdict == ZERO_SYMBOLIC
               for e in geo.einstein_residual(g))


def test_christoffel_symmetry_and_ricci_symmetry():
    a, b, c = geo.abstract_functions()
    bundle = geo.ricci(geo.build_metric(a, b, c))
    for k in range(4):
        for i in range(4):
            for j in range(4):
                assert bundle.gamma[k][i][j] == bundle.gamma[k][j][i]
    for i in range(4):
        for j in range(4):
            assert is_zero_symbolic(add(bundle.ricci[i][j],
                                        neg(bundle.ricci[j][i]))), (i, j)


def test_ricci_matches_riemann_contraction():
    a, b, c = geo.abstract_functions()
    g = geo.build_metric(a, b, c)
    bundle = geo.ricci(g)
    oracle = riemann_ricci_oracle(g)
    for i in range(4):
        for j in range(4):
            assert is_zero_symbolic(add(bundle.ricci[i][j],
                                        neg(oracle[i][j]))), (i, j)


def test_einstein_components_polynomial():
    # closed-form inverse keeps everything denominator-free
    from walkerkit.expr import Pow, Prod, Sum

    def no_negative_powers(e):
        if isinstance(e, Pow):
            return e.exp >= 0 and no_negative_powers(e.base)
        if isinstance(e, Prod):
            return all(no_negative_powers(f) for f in e.factors)
        if isinstance(e, Sum):
            return all(no_negative_powers(t) for t in e.terms)
        return True

    a, b, c = geo.abstract_functions()
    for e in geo.einstein_residual(geo.build_metric(a, b, c)):
        assert no_negative_powers(e)


def test_plane_solution_triple_is_einstein():
    # rational triple: a = 4(t+k1)/(k2 x+k3)^2, b = a^3 k2^2 (t+k1)^2 ...
    f = {}
    a = parse("4*(t + c1)/(c2*x + c3)^2", functions=f)
    b = parse("4*c2^2*(t + c1)^3/(c2*x + c3)^4", functions=f)
    c = parse("4*c2*(t + c1)^2/(c2*x + c3)^3", functions=f)
    verdicts = geo.einstein_verdicts(a, b, c, samples=40, tol=1e-9, seed=3)
    assert all(v for v in verdicts), [v.verdict for v in verdicts]


def test_negative_control_not_einstein():
    x, t = coord("x"), coord("t")
    a = mul(x, x)
    b = t
    c = ZERO
    verdicts = geo.einstein_verdicts(a, b, c, samples=30, seed=9)
    assert any(v.verdict == NONZERO for v in verdicts)


def test_einstein_zero_on_full_on_shell_jets():
    a, b, c = geo.abstract_functions()
    comps = geo.einstein_residual(geo.build_metric(a, b, c))
    sys = jets.system_a7()
    rng = random.Random(31)
    for _ in range(10):
        p = jets.on_shell_sample(0, sys, rng)
        vals = geo._eval_components(comps, p.values)
        assert max(abs(v) for v in vals) < 1e-9


def test_equivalence_probe_report():
    rep = geo.equivalence_probe(samples=30, tol=1e-9, seed=42)
    assert rep.passed, (rep.on_shell_max, rep.generic_min)
    assert rep.on_shell_max < 1e-9
    assert rep.generic_min > 1e-4
    assert set(rep.correspondence) == {f"residual_{k}" for k in range(1, 7)}
    for label, moved in rep.correspondence.items():
        assert moved, label


def test_metric_latex_and_matrix():
    a = parse("c1", functions={})
    txt = geo.metric_latex(a, ZERO, ZERO)
    assert "dy^2" in txt and "dz^2" not in txt
    mat = geo.metric_matrix_strings(a, ZERO, ZERO)
    assert mat[0][2] == "1"
    assert mat[2][2] == "c1"
