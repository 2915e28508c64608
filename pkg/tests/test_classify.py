import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus
from skewspecial.classify import (
    AffineTriangular,
    apply_chain,
    classify_one_var,
    classify_skew,
    converse_fiber_test,
    multiplier_rationality_report,
)
from skewspecial.numerics import GaussianRational, ToleranceContext
from skewspecial.parser import parse_map, parse_poly
from skewspecial.poly import AffineMap1, conjugate_affine, max_deviation
from skewspecial.skewdyn import SkewProduct

FLOAT = ToleranceContext(mode="float")


def skew(text, ctx=ToleranceContext()):
    return SkewProduct.from_map(parse_map(text, ctx))


def signature(r):
    return (r.kind, r.base_form, r.fiber_form, r.m)


def witness_ok(f, r):
    g = apply_chain(f, r.conjugation_chain)
    if r.mode == "exact":
        return g.as_map() == r.normal_form.as_map()
    with FLOAT.working():
        a, b = g.as_map(), r.normal_form.as_map()
        dev = max(max_deviation(a.first, b.first, FLOAT), max_deviation(a.second, b.second, FLOAT))
    return dev <= 1e-30


# one variable ---------------------------------------------------------------


def test_one_var_examples():
    assert classify_one_var(parse_poly("z^2")).kind == "power"
    assert classify_one_var(parse_poly("z^2 + 2*z")).kind == "power"
    assert classify_one_var(parse_poly("z^2 - 2")).kind == "chebyshev_plus"
    minus = classify_one_var(parse_poly("z^3 + 3*z"))
    assert minus.kind == "chebyshev_minus" and minus.zeta == -1
    assert not classify_one_var(parse_poly("z^2 + z")).special
    assert not classify_one_var(parse_poly("z^2 + 1")).special


def test_one_var_witness():
    P = parse_poly("z^2 + 2*z")
    form = classify_one_var(P)
    assert conjugate_affine(P, form.conjugation) == parse_poly("z^2")


@given(st.sampled_from(["z^2", "z^2 - 2", "z^3", "z^3 - 3*z", "-z^3 + 3*z"]), st.integers(1, 5), st.integers(-4, 4))
def test_one_var_conjugation_invariance(text, a, b):
    P = parse_poly(text)
    A = AffineMap1(Fraction(a, 2), b)
    assert classify_one_var(conjugate_affine(P, A)).kind == classify_one_var(P).kind


# skew products: worked examples ------------------------------------------


def test_examples():
    r = classify_skew(skew("(z^2, w^2 - 2*z)"))
    assert (r.special, r.kind, r.zeta, r.m) == (True, "dagger2", 1, 1)
    r = classify_skew(skew("(z^2 - 2, w^2 - 2)"))
    assert (r.kind, r.base_form, r.fiber_form) == ("dagger1", "chebyshev_plus", "chebyshev_plus")
    r = classify_skew(skew("(z^2, w^2 + z)"))
    assert not r.special and r.failing_step == "functional_equation"
    r = classify_skew(skew("(z^2, w^2 + z^3)"))
    assert not r.regular and r.failing_step == "regular"


@pytest.mark.parametrize("d,base,fiber", corpus.dagger1_cases())
def test_dagger1_normal_forms(d, base, fiber):
    f = corpus.dagger1(d, base, fiber)
    r = classify_skew(f)
    assert r.kind == "dagger1"
    assert r.base_form == corpus.expected_form(d, base)
    assert r.fiber_form == corpus.expected_form(d, fiber)
    assert witness_ok(f, r)


@pytest.mark.parametrize("d,m,zeta", corpus.dagger2_cases())
def test_dagger2_normal_forms(d, m, zeta):
    f = corpus.dagger2(d, m, zeta)
    r = classify_skew(f)
    assert (r.kind, r.m, r.zeta) == ("dagger2", m, zeta)
    assert witness_ok(f, r)


@pytest.mark.parametrize("m", [1, 2])
def test_dagger2_complex_zeta_float(m):
    from skewspecial.dickson import dickson_at
    from skewspecial.numerics import roots_of_unity
    from skewspecial.poly import Poly

    for zeta in roots_of_unity(3, FLOAT):
        with FLOAT.working():
            f = SkewProduct(Poly.monomial(4, FLOAT.coerce(1), "z"), dickson_at(4, Poly.monomial(m, zeta, "z")))
        r = classify_skew(f, FLOAT)
        assert (r.kind, r.m, r.mode) == ("dagger2", m, "float")
        assert witness_ok(f, r)


CASES = corpus.special_corpus()


@settings(max_examples=40)
@given(st.integers(0, len(CASES) - 1), st.integers(0, 2**32))
def test_conjugation_invariance(idx, seed):
    _, f = CASES[idx]
    T = corpus.random_triangular(random.Random(seed))
    g = T.conjugate(f)
    r = classify_skew(g)
    assert signature(r) == signature(classify_skew(f))
    assert witness_ok(g, r)


@pytest.mark.parametrize("name,f", CASES[::3])
def test_root_choice_invariance(name, f):
    rng = random.Random(name)
    g = corpus.random_triangular(rng).conjugate(f)
    r = classify_skew(g, exhaustive=True)
    assert not r.ambiguous
    assert r.diagnostics[-1]["step"] == "exhaustive"


def test_perturbations_fail_with_step():
    rng = random.Random(5)
    for _ in range(30):
        _, f = rng.choice(CASES)
        g, _ = corpus.perturb(f, rng)
        r = classify_skew(g)
        assert g.regular and not r.special
        assert r.failing_step in {"base", "monic", "center", "phi", "dickson", "functional_equation", "pattern"}


def test_brute_force_soundness():
    # small integer maps of degree 2: whenever the classifier says special,
    # the fiber identity must hold on periods <= 2 and multipliers must be rational
    values = (-2, 0, 1)
    specials = 0
    for a, b, c, e, g in itertools.product(values, repeat=5):
        f = skew(f"(z^2 + {a}*z, w^2 + ({b}*z + {c})*w + {e}*z^2 + {g}*z)")
        r = classify_skew(f)
        if not r.special:
            continue
        specials += 1
        assert converse_fiber_test(f, 2, classification=r).passed
        assert multiplier_rationality_report(f, 2, denominator_bound=16).all_rational
    assert specials > 0


# converse and rationality -----------------------------------------------------


@pytest.mark.parametrize("text", ["(z^2, w^2 - 2*z)", "(z^3, w^3 - 3*z*w)"])
def test_converse_examples(text):
    rep = converse_fiber_test(skew(text), 3)
    assert rep.passed and rep.max_residual <= 1e-25
    assert all(p["phi_power_is_one"] in (True, None) for p in rep.points)


def test_converse_needs_special():
    with pytest.raises(ValueError):
        converse_fiber_test(skew("(z^2, w^2 + z)"), 1)


def test_rationality_heuristic():
    rep = multiplier_rationality_report(skew("(z^2, w^2 - 2*z)"), 2, denominator_bound=16)
    assert rep.heuristic and rep.all_rational
    rep = multiplier_rationality_report(skew("(z^2, w^2 + z)"), 2, denominator_bound=16)
    assert not rep.all_rational
    assert any(e["rational"] is None for e in rep.entries)


def test_gaussian_conjugate_exact():
    f = corpus.dagger2(3, 1, -1)
    T = AffineTriangular(GaussianRational(1, 1), 2, GaussianRational(0, 3), Fraction(1, 2), -1)
    r = classify_skew(T.conjugate(f))
    assert (r.kind, r.zeta, r.m, r.mode) == ("dagger2", -1, 1, "exact")
