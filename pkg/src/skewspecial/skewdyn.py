"""Polynomial skew products ``f(z, w) = (p(z), q(z, w))`` of the plane.

Fiber iteration ``Q_z^n = q_{p^(n-1)(z)} o ... o q_z``, multipliers, and
periodic points of the base and of periodic fibers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from .numerics import EXACT, ToleranceContext, backend_of
from .poly import BiPoly, PlaneMap, Poly, compose, max_deviation, poly_close
from .ritt import DegreeMismatch
from .roots import find_roots, residual

__all__ = [
    "SkewProduct",
    "PeriodicPoint",
    "NotPeriodic",
    "DegreeCapExceeded",
    "SemiconjugacyResult",
    "is_regular",
    "base_iterate",
    "fiber_iterate",
    "multiplier_pair",
    "base_periodic_points",
    "fiber_periodic_points",
    "periodic_point_count",
    "verify_semiconjugacy",
]

log = logging.getLogger(__name__)


class NotPeriodic(ValueError):
    pass


class DegreeCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class SkewProduct:
    """``(p, q)`` with ``deg p = deg_w q = d >= 2``."""

    p: Poly
    q: BiPoly

    def __post_init__(self):
        if not isinstance(self.q, BiPoly):
            raise TypeError("q must be a BiPoly")
        if self.p.var != self.q.inner:
            p = Poly(self.p.coeffs, self.q.inner) if self.p.degree <= 0 else None
            if p is None:
                raise ValueError(f"p is in {self.p.var!r} but q's base variable is {self.q.inner!r}")
            object.__setattr__(self, "p", p)
        if self.p.degree != self.q.degree:
            raise DegreeMismatch(f"deg p = {self.p.degree} but deg_w q = {self.q.degree}")
        if self.p.degree < 2:
            raise DegreeMismatch("degree must be at least 2")

    @classmethod
    def from_map(cls, m: PlaneMap) -> SkewProduct:
        first = m.first
        if any(not row.is_zero() for row in first.coeffs[1:]):
            raise ValueError("first component depends on the fiber variable")
        p = first.coeff(0) if first.coeffs else Poly((), m.base_var)
        return cls(Poly(p.coeffs, m.base_var), m.second)

    @property
    def d(self) -> int:
        return self.p.degree

    @property
    def base_var(self) -> str:
        return self.q.inner

    @property
    def fiber_var(self) -> str:
        return self.q.var

    @cached_property
    def regular(self) -> bool:
        return is_regular(self)

    def as_map(self) -> PlaneMap:
        return PlaneMap.of(self.p, self.q, self.base_var, self.fiber_var)

    def map_scalars(self, fn) -> SkewProduct:
        return SkewProduct(self.p.map_coeffs(fn), self.q.map_scalars(fn))

    def __call__(self, z, w):
        return self.p(z), self.q.evaluate(z, w)

    def __str__(self):
        return str(self.as_map())


def is_regular(f: SkewProduct) -> bool:
    """``q`` has total degree ``d`` and a nonzero constant ``w^d`` coefficient.

    Cross-checked against the projective criterion: the top forms ``lead*z^d``
    and ``q_d(z, w)`` have no common zero exactly when ``q_d(0, 1) != 0``.
    """
    d = f.d
    top = f.q.coeff_w(d)
    direct = f.q.total_degree() == d and top.degree == 0
    if f.q.total_degree() == d:
        projective = f.q.homogeneous_part(d).evaluate(0, 1) != 0
        if projective != direct:
            log.warning("regularity criteria disagree for %s", f)
    return direct


# orbits -------------------------------------------------------------------


def _ctx_for(ctx: ToleranceContext, *values) -> ToleranceContext:
    if ctx.exact and any(backend_of(v) == "float" for v in values):
        return ctx.as_float()
    return ctx


def _scalars(f: SkewProduct):
    yield from f.p.coeffs
    for row in f.q.coeffs:
        yield from row.coeffs


def _f_ctx(f: SkewProduct, ctx: ToleranceContext, *values) -> ToleranceContext:
    return _ctx_for(ctx, *values, *_scalars(f))


def _lifted(f: SkewProduct, ctx: ToleranceContext) -> SkewProduct:
    """``f`` with its coefficients moved to ``ctx``'s backend when that is float."""
    if ctx.exact or all(backend_of(c) == "float" for c in _scalars(f)):
        return f
    with ctx.working():
        return f.map_scalars(ctx.coerce)


def base_iterate(f: SkewProduct, n: int, ctx: ToleranceContext = EXACT) -> Poly:
    """The composed base polynomial ``p^n``."""
    ctx = _f_ctx(f, ctx)
    f = _lifted(f, ctx)
    with ctx.working():
        out = Poly.identity(f.base_var)
        for _ in range(n):
            out = compose(f.p, out)
    return out


def fiber_iterate(f: SkewProduct, z0, n: int, ctx: ToleranceContext = EXACT) -> Poly:
    """``Q_{z0}^n`` as a polynomial in the fiber variable."""
    if n < 1:
        raise ValueError("n must be at least 1")
    ctx = _f_ctx(f, ctx, z0)
    f = _lifted(f, ctx)
    with ctx.working():
        z = ctx.coerce(z0)
        Q = Poly.identity(f.fiber_var)
        for _ in range(n):
            Q = compose(f.q.specialize(z), Q)
            z = f.p(z)
    return Q


def multiplier_pair(f: SkewProduct, z0, w0, n: int, ctx: ToleranceContext = EXACT):
    """``((p^n)'(z0), d/dw Q_{z0}^n(w0))`` via the chain rule along the orbit.

    Raises :class:`NotPeriodic` unless ``f^n(z0, w0) = (z0, w0)`` (exactly,
    or within ``10*eps_root`` backward residual in float mode).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ctx = _f_ctx(f, ctx, z0, w0)
    f = _lifted(f, ctx)
    dp = f.p.derivative()
    dq = f.q.deriv_w()
    with ctx.working():
        z, w = ctx.coerce(z0), ctx.coerce(w0)
        base_m = ctx.coerce(1)
        fiber_m = ctx.coerce(1)
        for _ in range(n):
            base_m = base_m * dp(z)
            fiber_m = fiber_m * dq.evaluate(z, w)
            z, w = f.p(z), f.q.evaluate(z, w)
        if ctx.exact:
            periodic = z == z0 and w == w0
        else:
            periodic = (
                _residual(base_iterate(f, n, ctx), z0, ctx) <= 10 * ctx.eps_root
                and _residual(fiber_iterate(f, z0, n, ctx), w0, ctx) <= 10 * ctx.eps_root
            )
        if not periodic:
            raise NotPeriodic(f"({z0}, {w0}) is not periodic of period dividing {n}")
    return base_m, fiber_m


def _residual(P: Poly, x, ctx: ToleranceContext) -> float:
    """Backward residual of ``P(x) = x``."""
    with ctx.working():
        coeffs = [ctx.coerce(c) for c in (P - Poly.identity(P.var)).coeffs]
        return residual(coeffs, ctx.coerce(x))


# periodic points ----------------------------------------------------------


@dataclass(frozen=True)
class PeriodicPoint:
    """A periodic point of exact period ``period``.

    ``location`` is ``z`` for base points and ``(z, w)`` for fiber points;
    ``multipliers`` likewise holds one or two values.
    """

    location: object
    period: int
    multipliers: tuple
    residual: float
    multiplicity: int = 1
    ambiguous: bool = False
    divisor_residuals: dict = field(default_factory=dict, compare=False)


def _proper_divisors(n: int) -> list[int]:
    return [m for m in range(1, n) if n % m == 0]


def _check_cap(degree: int, ctx: ToleranceContext):
    if degree > ctx.degree_cap:
        raise DegreeCapExceeded(f"degree {degree} exceeds cap {ctx.degree_cap}")


def periodic_point_count(f: SkewProduct, n: int, ctx: ToleranceContext = EXACT) -> int:
    """Number of roots of ``p^n(z) = z`` counted with multiplicity."""
    _check_cap(f.d**n, ctx)
    fctx = ctx.as_float()
    with fctx.working():
        P = base_iterate(f, n, fctx) - Poly.identity(f.base_var)
    return sum(r.multiplicity for r in find_roots(P.coeffs, fctx))


def base_periodic_points(f: SkewProduct, n: int, ctx: ToleranceContext = EXACT) -> list[PeriodicPoint]:
    """Base points of exact period ``n`` with multipliers ``((p^n)'(z),)``.

    Roots of ``p^n(z) - z`` are rejected when some proper divisor ``m`` of
    ``n`` has ``p^m(z) - z`` residual below ``10*eps_root``.  Points whose
    divisor residual is below ``sqrt(eps_root)`` but above that threshold are
    kept and flagged ``ambiguous``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_cap(f.d**n, ctx)
    fctx = ctx.as_float()
    reject = 10 * fctx.eps_root
    flag = fctx.eps_root**0.5
    out = []
    with fctx.working():
        Pn = base_iterate(f, n, fctx)
        lower = {m: base_iterate(f, m, fctx) for m in _proper_divisors(n)}
        dPn = Pn.derivative()
        roots = find_roots((Pn - Poly.identity(f.base_var)).coeffs, fctx)
        for r in roots:
            divres = {m: _residual(P, r.value, fctx) for m, P in lower.items()}
            if any(v <= reject for v in divres.values()):
                continue
            ambiguous = any(v <= flag for v in divres.values())
            out.append(
                PeriodicPoint(r.value, n, (dPn(r.value),), r.residual, r.multiplicity, ambiguous, divres)
            )
    return out


def fiber_periodic_points(
    f: SkewProduct, point, ctx: ToleranceContext = EXACT, n: int | None = None
) -> list[PeriodicPoint]:
    """Points ``(z0, w)`` with ``Q_{z0}^n(w) = w`` over a base point of exact period ``n``.

    ``point`` is a :class:`PeriodicPoint` from :func:`base_periodic_points`
    or a scalar together with ``n``.  Multipliers are ``((p^n)'(z0), Q'(w))``.
    """
    if isinstance(point, PeriodicPoint):
        z0, n, base_mult = point.location, point.period, point.multipliers[0]
    else:
        if n is None:
            raise ValueError("period n is required for a bare base point")
        z0, base_mult = point, None
    _check_cap(f.d**n, ctx)
    fctx = ctx.as_float()
    with fctx.working():
        z0 = fctx.coerce(z0)
        if base_mult is None:
            base_mult = base_iterate(f, n, fctx).derivative()(z0)
        Q = fiber_iterate(f, z0, n, fctx)
        dQ = Q.derivative()
        roots = find_roots((Q - Poly.identity(f.fiber_var)).coeffs, fctx)
        return [
            PeriodicPoint((z0, r.value), n, (base_mult, dQ(r.value)), r.residual, r.multiplicity)
            for r in roots
        ]


# semiconjugacy ------------------------------------------------------------


@dataclass(frozen=True)
class SemiconjugacyResult:
    holds: bool
    residual: float
    difference: PlaneMap


def _as_plane_map(m) -> PlaneMap:
    return m.as_map() if isinstance(m, SkewProduct) else m


def verify_semiconjugacy(f, Pi, g, N: int = 1, ctx: ToleranceContext = EXACT) -> SemiconjugacyResult:
    """Check ``f^N o Pi = Pi o g^N`` as a polynomial identity.

    The difference is expressed in ``g``'s variables.
    """
    f, Pi, g = (_as_plane_map(m) for m in (f, Pi, g))
    ctx = _ctx_for(ctx, *_sample_scalars(f, Pi, g))
    with ctx.working():
        lhs = Pi
        for _ in range(N):
            lhs = f.compose(lhs)
        gN = g
        for _ in range(N - 1):
            gN = g.compose(gN)
        rhs = Pi.compose(gN)
        z, w = g.base_var, g.fiber_var
        lhs = PlaneMap(BiPoly.lift(lhs.first, w, z), BiPoly.lift(lhs.second, w, z), z, w)
        diff = PlaneMap(lhs.first - rhs.first, lhs.second - rhs.second, z, w)
        res = max(max_deviation(lhs.first, rhs.first, ctx), max_deviation(lhs.second, rhs.second, ctx))
        holds = poly_close(lhs.first, rhs.first, ctx) and poly_close(lhs.second, rhs.second, ctx)
    return SemiconjugacyResult(holds, res, diff)


def _sample_scalars(*maps):
    for m in maps:
        for comp in (m.first, m.second):
            for row in comp.coeffs:
                yield from row.coeffs

