import random
from fractions import Fraction

import pytest

from skewspecial.classify import classify_one_var
from skewspecial.numerics import GaussianRational
from skewspecial.parser import parse_poly
from skewspecial.poly import AffineMap1, Poly, compose
from skewspecial.ritt import (
    ChainError,
    DegreeMismatch,
    DicksonChainData,
    compose_chain,
    compose_special_chain,
    decompose_special_chain,
    solve_affine_chain,
    solve_affine_pair,
)

P = parse_poly


def test_solve_chain_example():
    maps = solve_affine_chain([P("x^2 - 1"), P("(x + 1)^2")], [P("x^2"), P("x^2")])
    assert maps == [AffineMap1(1, 1)]


def test_solve_chain_identity():
    maps = solve_affine_chain([P("x^2"), P("x^3")], [P("x^2"), P("x^3")])
    assert maps == [AffineMap1(1, 0)]


def test_solve_chain_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        solve_affine_chain([P("x^2"), P("x^2")], [P("x^3"), P("x^2")])


def test_solve_chain_different_compositions():
    assert solve_affine_chain([P("x^2"), P("x^2")], [P("x^2 + 1"), P("x^2")]) is None


def test_solve_pair_rejects_linear_factors():
    with pytest.raises(DegreeMismatch):
        solve_affine_pair(P("x + 1"), P("x^2"), P("x + 1"), P("x^2"))


def test_solve_pair():
    A = AffineMap1(3, -2)
    c, d = P("x^2 + x"), P("x^3 - 1")
    a = compose(c, A.as_poly())
    b = compose(A.inverse().as_poly(), d)
    assert solve_affine_pair(a, b, c, d) == A


def test_decompose_examples():
    data = decompose_special_chain([P("x^2 - 2"), P("x^2 - 2")])
    assert data.case == "chebyshev" and data.c == (0, 0) and data.l == (1, 1)
    data = decompose_special_chain([P("x^3"), P("x^3")])
    assert data.case == "power" and data.l == (0, 0)
    assert decompose_special_chain([P("x^2 + 1"), P("x^2")]) is None


def test_decompose_preconditions():
    with pytest.raises(ChainError):
        decompose_special_chain([P("2*x^2"), P("x^2")])
    with pytest.raises(ChainError):
        decompose_special_chain([P("x + 1")])


def test_compose_examples():
    assert compose_special_chain(DicksonChainData((0, 0), (0, 0), "power"), 2) == [P("x^2"), P("x^2")]
    F = compose_special_chain(DicksonChainData((1, 0), (0, 0), "power"), 2)
    assert F == [P("(x - 1)^2"), P("x^2 + 1")]
    assert compose_chain(F) == compose(P("x^4"), P("x - 1")) + 1
    assert compose_special_chain(DicksonChainData((0, 0), (1, 1), "chebyshev"), 2) == [P("x^2 - 2")] * 2


def test_compose_rejects_bad_parameters():
    with pytest.raises(ChainError):
        compose_special_chain(DicksonChainData((0, 0), (1, 2), "chebyshev"), 2)


def _random_chain(rng, d, n):
    c = tuple(GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), rng.randint(-3, 3)) for _ in range(n))
    ell0 = rng.choice([0, 1, -1]) if (d**n - 1) % 2 == 0 else rng.choice([0, 1])
    ells = [ell0]
    for _ in range(n - 1):
        ells.append(ells[-1] ** d)
    case = "power" if ell0 == 0 else "chebyshev"
    return DicksonChainData(c, tuple(ells), case)


def test_round_trip_and_specialness():
    rng = random.Random(7)
    for _ in range(30):
        d, n = rng.randint(2, 3), rng.randint(1, 3)
        data = _random_chain(rng, d, n)
        if data.l[0] != 0 and data.l[-1] ** d != data.l[0]:
            continue
        F = compose_special_chain(data, d)
        back = decompose_special_chain(F)
        assert back is not None
        assert back.c == data.c and back.l == data.l and back.case == data.case
        assert classify_one_var(compose_chain(F)).special
