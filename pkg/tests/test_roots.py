import cmath

import pytest

from skewspecial.numerics import ToleranceContext
from skewspecial.roots import RootFindingError, find_roots, residual

CTX = ToleranceContext(mode="float")


def expand(roots):
    coeffs = [1]
    for r in roots:
        nxt = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= r * c
        coeffs = nxt
    return coeffs


def test_simple_roots_sorted():
    roots = find_roots(expand([3, -1, 2]), CTX)
    assert [complex(r.value) for r in roots] == pytest.approx([-1, 2, 3])
    assert all(r.multiplicity == 1 for r in roots)


def test_multiplicities():
    roots = find_roots(expand([1, 1, 1, -2, -2, 0]), CTX)
    found = {round(complex(r.value).real): r.multiplicity for r in roots}
    assert found == {-2: 2, 0: 1, 1: 3}
    with CTX.working():
        assert abs(roots[-1].value - 1) < 1e-60


def test_roots_of_unity_high_precision():
    n = 12
    coeffs = [-1] + [0] * (n - 1) + [1]
    roots = find_roots(coeffs, CTX)
    assert len(roots) == n
    with CTX.working():
        for r in roots:
            assert abs(r.value**n - 1) < 1e-70
            assert r.residual <= CTX.eps_root


def test_complex_coefficients():
    roots = find_roots(expand([1j, -1j, 2 + 1j]), CTX)
    assert sorted((round(complex(r.value).real, 9), round(complex(r.value).imag, 9)) for r in roots) == [
        (0.0, -1.0),
        (0.0, 1.0),
        (2.0, 1.0),
    ]


def test_degree_256():
    coeffs = [-2] + [0] * 255 + [1]
    roots = find_roots(coeffs, CTX)
    assert sum(r.multiplicity for r in roots) == 256


def test_constant_rejected():
    with pytest.raises(ValueError):
        find_roots([5], CTX)


def test_unresolved_cluster_reports_failure():
    # two roots closer than the clustering radius but far apart at 256 bits
    from fractions import Fraction

    with pytest.raises(RootFindingError) as err:
        find_roots(expand([1, 1 + Fraction(1, 2**40)]), CTX)
    assert err.value.residuals


def test_residual_is_relative():
    assert residual([-1, 1], 1) == 0
    assert residual([-1, 1], 2) == pytest.approx(1 / 3)
    assert cmath.isclose(residual([1, 0, 1], 1j), 0)
