import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewspecial.dickson import dickson_at
from skewspecial.numerics import GaussianRational, ToleranceContext
from skewspecial.parser import parse_map, parse_poly
from skewspecial.poly import BiPoly, Poly, compose
from skewspecial.ritt import DegreeMismatch
from skewspecial.skewdyn import (
    DegreeCapExceeded,
    NotPeriodic,
    SkewProduct,
    base_iterate,
    base_periodic_points,
    fiber_iterate,
    fiber_periodic_points,
    is_regular,
    multiplier_pair,
    periodic_point_count,
    verify_semiconjugacy,
)

FLOAT = ToleranceContext(mode="float")


def skew(text):
    return SkewProduct.from_map(parse_map(text))


def c(x):
    return complex(x)


def test_regularity_examples():
    assert is_regular(skew("(z^2, w^2 - 2*z)"))
    assert not is_regular(skew("(z^2, w^2 + z^3)"))
    assert not is_regular(skew("(z^2, z*w^2 + w^2)"))


def test_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        skew("(z^2, w^3)")
    with pytest.raises(DegreeMismatch):
        skew("(z, w)")


def test_fiber_iterate_examples():
    f = skew("(z^2, w^2 - 2*z)")
    assert fiber_iterate(f, 1, 1) == parse_poly("w^2 - 2")
    assert fiber_iterate(f, 0, 2) == parse_poly("w^4")
    assert fiber_iterate(skew("(z^2, w^2)"), 3, 2) == parse_poly("w^4")


def test_fiber_iterate_is_dickson_for_power_model():
    # Q_z^n = D_{d^n}(w, phi(z)) when phi(p(z)) = phi(z)^d
    f = skew("(z^2, w^2 - 2*z)")
    for z0 in (2, Fraction(1, 3), GaussianRational(1, 1)):
        for n in (1, 2, 3):
            assert fiber_iterate(f, z0, n) == dickson_at(2**n, Poly([z0], "z")).specialize(z0)


def test_multiplier_examples():
    f = skew("(z^2, w^2 - 2*z)")
    assert multiplier_pair(f, 1, 2, 1) == (2, 4)
    assert multiplier_pair(skew("(z^2, w^2)"), 0, 0, 1) == (0, 0)
    with pytest.raises(NotPeriodic):
        multiplier_pair(f, 1, 1, 1)


small = st.integers(-3, 3).map(lambda k: Fraction(k, 2))


@given(small, small, st.integers(1, 3))
def test_chain_rule_matches_formal_derivative(a, b, n):
    # base point 0 of z^2 + a*z is fixed; fiber points are roots of Q - w
    f = SkewProduct(parse_poly(f"z^2 + {float(a)}*z"), parse_map(f"(z^2, w^2 + {float(a)}*z*w + {float(b)})").second)
    with FLOAT.working():
        pts = fiber_periodic_points(f, 0, FLOAT, n=n)
        Q = fiber_iterate(f, 0, n, FLOAT)
        dQ = Q.derivative()
        for pt in pts:
            if pt.multiplicity > 1:
                continue
            _, w0 = pt.location
            bm, fm = multiplier_pair(f, 0, w0, n, FLOAT)
            ref = dQ(w0)
            assert abs(fm - ref) <= 1e-30 * max(1, abs(ref))


def test_multiplier_cocycle():
    f = skew("(z^2 - 1, w^2 + z*w)")
    z0, w0 = 0, 0
    # (0,0) -> (-1,0) -> (0,0)
    b2, f2 = multiplier_pair(f, z0, w0, 2)
    b4, f4 = multiplier_pair(f, z0, w0, 4)
    assert b4 == b2**2 and f4 == f2**2


def test_base_periodic_points_examples():
    f = skew("(z^2, w^2 - 2*z)")
    with FLOAT.working():
        fixed = base_periodic_points(f, 1, FLOAT)
        assert sorted(round(c(p.location).real, 12) for p in fixed) == [0, 1]
        two = base_periodic_points(f, 2, FLOAT)
        assert len(two) == 2
        for p in two:
            assert abs(p.location**3 - 1) < 1e-60
            assert abs(p.multipliers[0] - 4) < 1e-60
        three = base_periodic_points(f, 3, FLOAT)
        assert len(three) == 6
        assert all(abs(p.multipliers[0] - 8) < 1e-60 for p in three)
        cheb = base_periodic_points(skew("(z^2 - 2, w^2)"), 1, FLOAT)
        assert sorted(round(c(p.multipliers[0]).real, 9) for p in cheb) == [-2, 4]


def test_fiber_periodic_points_example():
    f = skew("(z^2, w^2 - 2*z)")
    with FLOAT.working():
        base = [p for p in base_periodic_points(f, 1, FLOAT) if abs(p.location - 1) < 1e-9][0]
        pts = fiber_periodic_points(f, base, FLOAT)
        got = sorted((round(c(p.location[1]).real, 9), round(c(p.multipliers[1]).real, 9)) for p in pts)
    assert got == [(-1, -2), (2, 4)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counts(n):
    assert periodic_point_count(skew("(z^2 + 0.25*z, w^2)"), n) == 2**n


def test_degree_cap():
    ctx = ToleranceContext(degree_cap=8)
    with pytest.raises(DegreeCapExceeded):
        base_periodic_points(skew("(z^2, w^2)"), 4, ctx)


def test_regular_implies_degree_bounds():
    rng = random.Random(3)
    for _ in range(40):
        d = rng.randint(2, 4)
        terms = {(d, 0): 1}
        for j in range(d):
            for k in range(0, d - j + 1):
                if rng.random() < 0.4:
                    terms[(j, k)] = rng.randint(-3, 3)
        q = BiPoly.from_dict({(k, j): v for (j, k), v in terms.items()}, "w", "z")
        f = SkewProduct(Poly.monomial(d, 1, "z"), q)
        if f.regular:
            assert q.coeff_w(d - 1).degree <= 1
            assert q.coeff_w(d - 2).degree <= 2


def test_base_iterate():
    f = skew("(z^2 + 1, w^2)")
    assert base_iterate(f, 2) == compose(parse_poly("z^2 + 1"), parse_poly("z^2 + 1"))


def test_semiconjugacy_examples():
    f = parse_map("(z^2, w^2 - 2*z)")
    Pi = parse_map("(u^2, u*v)", variables=("u", "v"))
    g = parse_map("(u^2, v^2 - 2)", variables=("u", "v"))
    assert verify_semiconjugacy(f, Pi, g).holds
    bad = verify_semiconjugacy(f, Pi, parse_map("(u^2, v^2)", variables=("u", "v")))
    assert not bad.holds
    assert bad.difference.second == BiPoly.lift(parse_poly("-2*u^2", variables=("u",)), "v", "u")
    assert verify_semiconjugacy(f, Pi, g, N=2).holds
    h = parse_map("(z^2, w^2)")
    assert verify_semiconjugacy(h, parse_map("(z, w)"), h).holds
