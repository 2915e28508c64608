import logging
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewspecial.dickson import (
    check_degree_bound,
    chebyshev,
    dickson,
    dickson_at,
    dickson_specialize,
    identity_suite,
    pm_chebyshev_normal_form,
)
from skewspecial.numerics import GaussianRational, ToleranceContext, roots_of_unity
from skewspecial.parser import parse_poly
from skewspecial.poly import BiPoly, Poly, conjugate_affine

FLOAT = ToleranceContext(mode="float")


def closed_form(d: int) -> BiPoly:
    """Explicit sum formula, independent of the recurrence."""
    if d == 0:
        return BiPoly([2], "x", "a")
    terms = {}
    for k in range(d // 2 + 1):
        c = Fraction(d, d - k) * comb(d - k, k) * (-1) ** k
        terms[(k, d - 2 * k)] = int(c)
    return BiPoly.from_dict(terms, "x", "a")


@pytest.mark.parametrize("d", range(0, 17))
def test_recurrence_matches_closed_form(d):
    assert dickson(d) == closed_form(d)


def test_small_examples():
    xa = ("a", "x")
    assert dickson(2) == parse_poly("x^2 - 2*a", variables=xa)
    assert dickson(3) == parse_poly("x^3 - 3*a*x", variables=xa)
    assert dickson(4) == parse_poly("x^4 - 4*a*x^2 + 2*a^2", variables=xa)
    assert chebyshev(2) == parse_poly("x^2 - 2")
    assert chebyshev(1) == parse_poly("x")
    assert chebyshev(4) == parse_poly("x^4 - 4*x^2 + 2")


def test_dickson_at_examples():
    z = Poly([0, 1], "z")
    assert dickson_at(2, z) == parse_poly("w^2 - 2*z")
    assert dickson_at(2, Poly((), "z")) == parse_poly("w^2 + 0*z")
    assert dickson_at(3, z**2) == parse_poly("w^3 - 3*z^2*w")


def test_degree_bound_examples(caplog):
    z = Poly([0, 1], "z")
    assert check_degree_bound(4, z)
    assert not check_degree_bound(4, z**3)
    with caplog.at_level(logging.WARNING):
        assert not check_degree_bound(2, z**5)
    assert not caplog.records


@given(st.integers(2, 8), st.integers(1, 7))
def test_degree_bound_agrees_with_criterion(d, m):
    phi = Poly.monomial(m, 1, "z")
    assert check_degree_bound(d, phi) == (m <= 2)


def test_normal_form_examples():
    f = pm_chebyshev_normal_form(parse_poly("x^2 - 2"))
    assert f.sigma == 1 and f.zeta == 1
    g = pm_chebyshev_normal_form(parse_poly("x^3 + 3*x"))
    assert g.zeta == -1 and g.lam**2 == -1
    assert conjugate_affine(parse_poly("x^3 + 3*x"), g.conjugation) == chebyshev(3).scale(g.sigma)
    assert pm_chebyshev_normal_form(parse_poly("x^2 - 4")) is None


@pytest.mark.parametrize("d", range(2, 9))
def test_normal_form_on_unit_roots(d):
    for zeta in roots_of_unity(d - 1, FLOAT):
        with FLOAT.working():
            form = pm_chebyshev_normal_form(dickson_specialize(d, zeta), FLOAT)
        assert form is not None
        assert form.residual <= 1e-30


@given(st.integers(2, 6), st.integers(-3, 3), st.integers(-3, 3))
def test_normal_form_rejects_off_locus(d, re, im):
    zeta = GaussianRational(Fraction(re, 2), Fraction(im, 2))
    expected = zeta ** (d - 1) == 1
    form = pm_chebyshev_normal_form(dickson_specialize(d, zeta))
    assert (form is not None) == expected


def test_normal_form_rejects_perturbation():
    P = dickson_specialize(4, 1) + Poly([Fraction(1, 100)], "x")
    assert pm_chebyshev_normal_form(P) is None


def test_normal_form_preconditions():
    with pytest.raises(ValueError):
        pm_chebyshev_normal_form(parse_poly("2*x^2 - 2"))
    with pytest.raises(ValueError):
        pm_chebyshev_normal_form(parse_poly("x^2 + x"))


def test_identity_suite_passes():
    checks = identity_suite(8, max_product=24, laurent_max=8)
    assert checks and all(c.ok for c in checks)
