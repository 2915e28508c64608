from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from skewspecial.numerics import GaussianRational
from skewspecial.poly import Poly

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_fraction = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
gaussian = st.builds(GaussianRational, small_fraction, small_fraction)
nonzero_gaussian = gaussian.filter(lambda g: g != 0)


def polys(var="x", max_degree=4, coeffs=gaussian):
    return st.lists(coeffs, min_size=1, max_size=max_degree + 1).map(lambda cs: Poly(cs, var))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
