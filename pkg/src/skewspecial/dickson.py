"""Dickson and Chebyshev polynomials.

``dickson(d)`` is the integer polynomial ``D_d(x, a)`` with
``D_d(t + a/t, a) = t^d + a^d / t^d``, built from ``D_0 = 2``, ``D_1 = x`` and
``D_{d+1} = x D_d - a D_{d-1}``.  Setting ``a = 1`` gives the Chebyshev
polynomial ``T_d``; ``a = 0`` gives ``x^d``.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction

from .numerics import EXACT, ToleranceContext, context_for
from .poly import AffineMap1, BiPoly, Poly, conjugate_affine, max_deviation, poly_close

__all__ = [
    "dickson",
    "chebyshev",
    "dickson_specialize",
    "dickson_at",
    "check_degree_bound",
    "ChebyshevNormalForm",
    "pm_chebyshev_normal_form",
    "IdentityCheck",
    "identity_suite",
]

log = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def dickson(d: int) -> BiPoly:
    """``D_d(x, a)`` as a BiPoly in ``x`` over ``a`` with integer coefficients."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    x = BiPoly([0, 1], "x", "a")
    a = BiPoly([Poly([0, 1], "a")], "x", "a")
    prev, cur = BiPoly([2], "x", "a"), x
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, x * cur - a * prev
    return cur


def dickson_specialize(d: int, a, var: str = "x") -> Poly:
    """``D_d(x, a0)`` for a scalar ``a0`` (floats keep their own precision)."""
    with context_for(a).working():
        return Poly([row(a) for row in dickson(d).coeffs], var)


def chebyshev(d: int, var: str = "x") -> Poly:
    """``T_d = D_d(., 1)``."""
    return dickson_specialize(d, 1, var)


def dickson_at(d: int, phi: Poly, fiber: str = "w") -> BiPoly:
    """``D_d(w, phi(z))`` as a BiPoly in ``w`` over ``phi``'s variable.

    The total degree is available as ``.total_degree()`` on the result.
    """
    if d < 2:
        raise ValueError("dickson_at needs d >= 2")
    base = phi.var if isinstance(phi, Poly) else "z"
    scalars = phi.coeffs if isinstance(phi, Poly) else (phi,)
    rows = []
    with context_for(*scalars).working():
        for row in dickson(d).coeffs:
            v = row(phi)
            rows.append(v if isinstance(v, Poly) else Poly([v], base))
    return BiPoly(rows, fiber, base)


def check_degree_bound(d: int, phi: Poly) -> bool:
    """Whether ``D_d(w, phi(z))`` has total degree exactly ``d``.

    The direct total-degree computation is returned.  It is compared against
    the criterion ``deg phi <= 2``; a disagreement is logged as a warning.
    """
    if d < 2:
        raise ValueError("check_degree_bound needs d >= 2")
    if phi.is_zero():
        raise ValueError("phi must be nonzero")
    direct = dickson_at(d, phi).total_degree() == d
    criterion = phi.degree <= 2
    if direct != criterion:
        log.warning(
            "degree bound disagreement: d=%d, deg phi=%d, total degree test %s",
            d, phi.degree, direct,
        )
    return direct


@dataclass(frozen=True)
class ChebyshevNormalForm:
    sigma: int
    lam: object
    zeta: object
    conjugation: AffineMap1
    residual: float = 0.0


def pm_chebyshev_normal_form(P: Poly, ctx: ToleranceContext = EXACT) -> ChebyshevNormalForm | None:
    """Detect ``P = D_d(x, zeta)`` with ``zeta^(d-1) = 1``.

    ``P`` must be monic and centered.  On success returns ``sigma`` and
    ``lam`` with ``lam^2 = zeta`` and ``lam^(d-1) = sigma``; the conjugation
    ``x -> lam*x`` takes ``P`` to ``sigma*T_d``.  In exact mode an irrational
    ``lam`` is computed in floating point at the context's precision.
    """
    d = P.degree
    if d < 2:
        raise ValueError("degree must be at least 2")
    with ctx.working():
        if not ctx.eq(P.leading(), 1):
            raise ValueError("polynomial must be monic")
        if not ctx.is_zero(P.coeff(d - 1)):
            raise ValueError("polynomial must be centered")
        zeta = -P.coeff(d - 2) * Fraction(1, d)
        if not poly_close(P, dickson_specialize(d, zeta, P.var), ctx):
            return None
        if not ctx.eq(zeta ** (d - 1), ctx.coerce(1)):
            return None
        wctx = ctx
        lam = ctx.sqrt(zeta)
        if lam is None:
            wctx = ctx.as_float()
            lam = wctx.sqrt(wctx.coerce(zeta))
    with wctx.working():
        s = lam ** (d - 1)
        sigma = 1 if wctx.eq(s, wctx.coerce(1)) else -1
        if sigma == -1 and not wctx.eq(s, wctx.coerce(-1)):
            return None
        A = AffineMap1(lam, wctx.coerce(0))
        Pw = P if wctx is ctx else P.map_coeffs(wctx.coerce)
        image = conjugate_affine(Pw, A)
        target = chebyshev(d, P.var).scale(sigma)
        residual = max_deviation(image, target, wctx)
        if not poly_close(image, target, wctx):
            return None
    return ChebyshevNormalForm(sigma, lam, zeta, A, residual)


# identity suite -----------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    params: tuple
    ok: bool


def _classic_chebyshev_monic(d: int, var: str = "x") -> Poly:
    """``2*C_d(x/2)`` from the classical recurrence ``C_{k+1} = 2x C_k - C_{k-1}``."""
    prev, cur = Poly([1], var), Poly([0, 1], var)
    if d == 0:
        cs = [1]
    else:
        for _ in range(d - 1):
            prev, cur = cur, Poly([0, 2], var) * cur - prev
        cs = cur.coeffs
    return Poly([2 * c * Fraction(1, 2**k) for k, c in enumerate(cs)], var)


def _shape_ok(d: int) -> bool:
    D = dickson(d)
    a = Poly([0, 1], "a")
    if d >= 1 and D.coeff(d) != 1:
        return False
    if d >= 2 and (D.coeff(d - 1) != 0 or D.coeff(d - 2) != a * (-d)):
        return False
    if d < 2:
        return True
    R = D - BiPoly.lift(Poly.monomial(d, 1, "x"), "x", "a") + BiPoly([0] * (d - 2) + [a * d], "x", "a")
    return R.is_zero() or R.degree <= d - 4


def _laurent_ok(d: int) -> bool:
    """``t^d * D_d(t + a/t, a) = t^(2d) + a^d`` as a polynomial identity."""
    D = dickson(d)
    t2a = BiPoly([Poly([0, 1], "a"), 0, 1], "t", "a")
    acc = BiPoly((), "t", "a")
    for k, row in enumerate(D.coeffs):
        if row.is_zero():
            continue
        acc = acc + BiPoly([row], "t", "a") * t2a**k * BiPoly.lift(Poly.monomial(d - k, 1, "t"), "t", "a")
    target = BiPoly.lift(Poly.monomial(2 * d, 1, "t"), "t", "a") + BiPoly([Poly.monomial(d, 1, "a")], "t", "a")
    return acc == target


def _scaling_ok(d: int) -> bool:
    """``D_d(l*x, l^2*a) = l^d * D_d(x, a)`` with ``l`` symbolic."""
    D = dickson(d)
    zero = BiPoly((), "x", "a")
    x = BiPoly([0, 1], "x", "a")
    a = BiPoly([Poly([0, 1], "a")], "x", "a")
    lx = Poly([zero, x], "l")
    la = Poly([zero, zero, a], "l")
    lhs = D.evaluate(la, lx)
    rhs = Poly([zero] * d + [D], "l")
    return isinstance(lhs, Poly) and (lhs - rhs).is_zero()


def _composition_ok(d: int, m: int) -> bool:
    a_d = BiPoly([Poly.monomial(d, 1, "a")], "x", "a")
    lhs = dickson(m).evaluate(a_d, dickson(d))
    return BiPoly.lift(lhs, "x", "a") == dickson(m * d)


def identity_suite(max_degree: int = 12, max_product: int = 36, laurent_max: int = 10) -> list[IdentityCheck]:
    """Exact checks of the basic Dickson identities for ``d, m <= max_degree``.

    ``D_d(x, 0) = x^d`` is checked for ``d >= 1`` (``D_0 = 2``).
    """
    out = []
    x = "x"
    for d in range(max_degree + 1):
        if d >= 1:
            out.append(IdentityCheck("power", (d,), dickson_specialize(d, 0, x) == Poly.monomial(d, 1, x)))
        out.append(IdentityCheck("chebyshev", (d,), chebyshev(d, x) == _classic_chebyshev_monic(d, x)))
        out.append(IdentityCheck("shape", (d,), _shape_ok(d)))
        out.append(IdentityCheck("scaling", (d,), _scaling_ok(d)))
        if d <= laurent_max:
            out.append(IdentityCheck("laurent", (d,), _laurent_ok(d)))
        for m in range(max_degree + 1):
            if m * d <= max_product:
                out.append(IdentityCheck("composition", (d, m), _composition_ok(d, m)))
    return out
