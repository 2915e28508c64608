"""Normal forms and random perturbations shared by the classifier tests."""

from __future__ import annotations

import random
from fractions import Fraction

from skewspecial.classify import AffineTriangular
from skewspecial.dickson import chebyshev, dickson_at
from skewspecial.numerics import GaussianRational
from skewspecial.poly import BiPoly, Poly
from skewspecial.skewdyn import SkewProduct

FORMS = ("power", "chebyshev_plus", "chebyshev_minus")


def one_var(d: int, form: str, var: str) -> Poly:
    if form == "power":
        return Poly.monomial(d, 1, var)
    T = chebyshev(d, var)
    return T if form == "chebyshev_plus" else T.scale(-1)


def expected_form(d: int, form: str) -> str:
    # -T_d is conjugate to T_d through x -> -x when d is even
    if form == "chebyshev_minus" and d % 2 == 0:
        return "chebyshev_plus"
    return form


def dagger1(d: int, base: str, fiber: str) -> SkewProduct:
    return SkewProduct(one_var(d, base, "z"), BiPoly.lift(one_var(d, fiber, "w"), "w", "z"))


def admissible_zetas(d: int) -> list:
    # exact roots of unity of order dividing d - 1 for d in {2, 3}
    return [1] if d == 2 else [1, -1]


def dagger2(d: int, m: int, zeta) -> SkewProduct:
    return SkewProduct(Poly.monomial(d, 1, "z"), dickson_at(d, Poly.monomial(m, zeta, "z")))


def dagger1_cases():
    return [(d, b, f) for d in (2, 3) for b in FORMS for f in FORMS]


def dagger2_cases():
    return [(d, m, z) for d in (2, 3) for m in (1, 2) for z in admissible_zetas(d)]


def special_corpus() -> list[tuple[str, SkewProduct]]:
    out = [(f"dagger1 d={d} {b}/{f}", dagger1(d, b, f)) for d, b, f in dagger1_cases()]
    out += [(f"dagger2 d={d} m={m} zeta={z}", dagger2(d, m, z)) for d, m, z in dagger2_cases()]
    return out


def _small(rng: random.Random):
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def random_triangular(rng: random.Random, gaussian: bool = True) -> AffineTriangular:
    def val():
        if gaussian and rng.random() < 0.5:
            return GaussianRational(_small(rng), _small(rng))
        return _small(rng)

    def nonzero():
        v = val()
        while v == 0:
            v = val()
        return v

    return AffineTriangular(nonzero(), val(), nonzero(), val(), val())


def perturb(f: SkewProduct, rng: random.Random, size=Fraction(1, 100)) -> tuple[SkewProduct, str]:
    """Add ``size`` to one coefficient of ``p`` or ``q``, keeping the map regular."""
    d = f.d
    slots = [("p", 0, k) for k in range(d)]
    slots += [("q", j, k) for j in range(d) for k in range(d - j + 1)]
    which, j, k = rng.choice(slots)
    z = Poly.monomial(k, size, "z")
    if which == "p":
        return SkewProduct(f.p + z, f.q), f"p: z^{k}"
    bump = BiPoly.lift(z, "w", "z") * BiPoly.lift(Poly.monomial(j, 1, "w"), "w", "z")
    return SkewProduct(f.p, f.q + bump), f"q: w^{j} z^{k}"
