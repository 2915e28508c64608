"""Equal-degree decompositions of polynomial compositions.

``solve_affine_chain`` recovers the affine maps linking two factorizations of
the same polynomial.  ``decompose_special_chain`` and
``compose_special_chain`` convert between a chain of monic factors whose
composition is a power or Chebyshev map and its shift/parameter data
``f_j(x) = D_d(x - c_j, l_j) + c_{j+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dickson import dickson_specialize
from .numerics import EXACT, ToleranceContext
from .poly import AffineMap1, Poly, compose, exact_div, max_deviation, poly_close

__all__ = [
    "DegreeMismatch",
    "ChainError",
    "DicksonChainData",
    "compose_chain",
    "solve_affine_pair",
    "solve_affine_chain",
    "decompose_special_chain",
    "compose_special_chain",
]


class DegreeMismatch(ValueError):
    pass


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class DicksonChainData:
    """Shifts ``c`` and parameters ``l`` of a special chain."""

    c: tuple
    l: tuple
    case: str  # "power" | "chebyshev"
    residual: float = 0.0

    @property
    def n(self) -> int:
        return len(self.c)


def compose_chain(factors: Sequence[Poly]) -> Poly:
    """``f_{n-1} o ... o f_0`` (factors listed bottom-up)."""
    out = Poly.identity(factors[0].var)
    for f in factors:
        out = compose(f, out)
    return out


def _affine_between(src: Poly, dst: Poly, ctx: ToleranceContext) -> AffineMap1 | None:
    """The affine ``A`` with ``dst = A o src``, or None if there is none."""
    with ctx.working():
        if src.degree != dst.degree or src.degree < 1:
            return None
        slope = exact_div(dst.leading(), src.leading())
        intercept = dst.coeff(0) - slope * src.coeff(0)
        A = AffineMap1(slope, intercept)
        if not poly_close(A.as_poly(src.var).compose(src), dst, ctx):
            return None
        return A


def solve_affine_pair(a: Poly, b: Poly, c: Poly, d: Poly, ctx: ToleranceContext = EXACT) -> AffineMap1 | None:
    """Given ``a o b = c o d`` with ``deg a = deg c``, find ``A`` with
    ``a = c o A`` and ``b = A^{-1} o d``."""
    if a.degree != c.degree or b.degree != d.degree:
        raise DegreeMismatch("paired factors must have equal degrees")
    if min(a.degree, b.degree) < 2:
        raise DegreeMismatch("factors of degree below 2 are rejected")
    A = _affine_between(b, d, ctx)
    if A is None:
        return None
    with ctx.working():
        if not poly_close(a, compose(c, A.as_poly(a.var)), ctx):
            return None
    return A


def solve_affine_chain(
    F: Sequence[Poly], G: Sequence[Poly], ctx: ToleranceContext = EXACT
) -> list[AffineMap1] | None:
    """Affine maps ``A_1..A_{n-1}`` linking two factorizations.

    On success ``F_0 = A_1^{-1} o G_0``, ``F_j = A_{j+1}^{-1} o G_j o A_j`` and
    ``F_{n-1} = G_{n-1} o A_{n-1}``.  Each ``A_{j+1}`` is read from the
    leading and constant coefficients of the partial compositions
    ``G_j o ... o G_0 = A_{j+1} o F_j o ... o F_0`` and every equation is then
    checked.  Returns None when the full compositions differ.
    """
    if len(F) != len(G) or not F:
        raise DegreeMismatch("chains must be nonempty and of equal length")
    for j, (f, g) in enumerate(zip(F, G)):
        if f.degree != g.degree:
            raise DegreeMismatch(f"factor {j}: degree {f.degree} vs {g.degree}")
        if f.degree < 1:
            raise DegreeMismatch(f"factor {j} is constant")
    n = len(F)
    with ctx.working():
        if not poly_close(compose_chain(F), compose_chain(G), ctx):
            return None
        maps = []
        HF = Poly.identity(F[0].var)
        HG = Poly.identity(G[0].var)
        for j in range(n - 1):
            HF = compose(F[j], HF)
            HG = compose(G[j], HG)
            A = _affine_between(HF, HG, ctx)
            if A is None:
                return None
            maps.append(A)
        if not _check_chain_equations(F, G, maps, ctx):
            return None
    return maps


def _check_chain_equations(F, G, maps, ctx) -> bool:
    n = len(F)
    if n == 1:
        return poly_close(F[0], G[0], ctx)
    var = F[0].var
    polys = [A.as_poly(var) for A in maps]
    inverses = [A.inverse().as_poly(var) for A in maps]
    if not poly_close(F[0], compose(inverses[0], G[0]), ctx):
        return False
    for j in range(1, n - 1):
        rhs = compose(inverses[j], compose(G[j], polys[j - 1]))
        if not poly_close(F[j], rhs, ctx):
            return False
    return poly_close(F[n - 1], compose(G[n - 1], polys[n - 2]), ctx)


def _check_factors(F: Sequence[Poly], ctx: ToleranceContext) -> int:
    if not F:
        raise ChainError("empty chain")
    d = F[0].degree
    if d < 2:
        raise ChainError("factors must have degree at least 2")
    for j, f in enumerate(F):
        if f.degree != d:
            raise DegreeMismatch(f"factor {j} has degree {f.degree}, expected {d}")
        if not ctx.eq(f.leading(), 1):
            raise ChainError(f"factor {j} is not monic")
    return d


def decompose_special_chain(F: Sequence[Poly], ctx: ToleranceContext = EXACT) -> DicksonChainData | None:
    """Shift/parameter data of a chain whose composition is special.

    ``c_j = -[x^{d-1}] f_j / d``; after recentering ``g_j(y) = f_j(y + c_j) -
    c_{j+1}`` the parameter is ``l_j = -[y^{d-2}] g_j / d``.  Both are
    uniquely determined by monic factors.  The factor identities, the
    relation ``l_{j+1} = l_j^d`` and the cycle condition (``l_0 = 0`` or
    ``l_0^(d^n - 1) = 1``) are all verified, as is the full composition.
    Returns None when any check fails.
    """
    d = _check_factors(F, ctx)
    n = len(F)
    var = F[0].var
    inv_d = Fraction(1, d)
    with ctx.working():
        c = [-f.coeff(d - 1) * inv_d for f in F]
        ells = []
        residual = 0.0
        for j, f in enumerate(F):
            shifted = compose(f, Poly([c[j], 1], var)) - c[(j + 1) % n]
            ell = -shifted.coeff(d - 2) * inv_d
            target = dickson_specialize(d, ell, var)
            residual = max(residual, max_deviation(shifted, target, ctx))
            if not poly_close(shifted, target, ctx):
                return None
            ells.append(ell)
        for j in range(n):
            if not ctx.eq(ells[(j + 1) % n], ells[j] ** d):
                return None
        if ctx.is_zero(ells[0]):
            case = "power"
        elif ctx.eq(ells[0] ** (d**n - 1), _one(ctx)):
            case = "chebyshev"
        else:
            return None
        expected = _conjugated_dickson(d**n, c[0], ells[0], var)
        total = compose_chain(F)
        residual = max(residual, max_deviation(total, expected, ctx))
        if not poly_close(total, expected, ctx):
            return None
    return DicksonChainData(tuple(c), tuple(ells), case, residual)


def _one(ctx: ToleranceContext):
    return ctx.coerce(1)


def _conjugated_dickson(N: int, c0, ell0, var: str) -> Poly:
    """``tau_{c0} o D_N(., l0) o tau_{-c0}``."""
    D = dickson_specialize(N, ell0, var)
    return compose(D, Poly([-c0, 1], var)) + c0


def compose_special_chain(
    data: DicksonChainData, d: int, n: int | None = None, ctx: ToleranceContext = EXACT, var: str = "x"
) -> list[Poly]:
    """Factors ``f_j = D_d(x - c_j, l_j) + c_{j+1}`` (indices mod n).

    Raises :class:`ChainError` if ``l_{j+1} != l_j^d`` or if the composition
    fails to match ``tau_{c_0} o D_{d^n}(., l_0) o tau_{-c_0}``.
    """
    n = data.n if n is None else n
    if len(data.c) != n or len(data.l) != n:
        raise ChainError("data length does not match n")
    if d < 2:
        raise ChainError("degree must be at least 2")
    with ctx.working():
        c = [ctx.coerce(x) for x in data.c]
        ells = [ctx.coerce(x) for x in data.l]
        for j in range(n):
            if not ctx.eq(ells[(j + 1) % n], ells[j] ** d):
                raise ChainError(f"l_{(j + 1) % n} != l_{j}^{d}")
        factors = [
            compose(dickson_specialize(d, ells[j], var), Poly([-c[j], 1], var)) + c[(j + 1) % n]
            for j in range(n)
        ]
        expected = _conjugated_dickson(d**n, c[0], ells[0], var)
        if not poly_close(compose_chain(factors), expected, ctx):
            raise ChainError("composition does not match the conjugated Dickson polynomial")
    return factors
