"""Deciding whether a polynomial skew product is special.

The procedure normalizes the base polynomial, makes the fiber monic and
centered, reads the Dickson parameter ``phi(z)`` off the ``u^(d-2)``
coefficient and then checks ``q~(z, u) = D_d(u, phi(z))`` and
``phi(p(z)) = phi(z)^d`` before matching the two families of normal forms

* product type: ``(P, Q)`` with ``P, Q`` each one of ``x^d``, ``T_d``, ``-T_d``;
* twisted type: ``(z^d, D_d(w, zeta*z^m))`` with ``zeta^(d-1) = 1``, ``m`` in {1, 2}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .dickson import chebyshev, dickson_at, dickson_specialize, pm_chebyshev_normal_form
from .numerics import EXACT, ToleranceContext, backend_of, context_for, format_scalar, roots_of_unity
from .poly import (
    AffineMap1,
    BiPoly,
    PlaneMap,
    Poly,
    compose,
    conjugate_affine,
    exact_div,
    max_deviation,
    poly_close,
    to_text,
)
from .skewdyn import (
    SkewProduct,
    base_periodic_points,
    fiber_iterate,
    fiber_periodic_points,
    _check_cap,
)

__all__ = [
    "OneVarSpecialForm",
    "AffineTriangular",
    "Classification",
    "ConverseReport",
    "RationalityReport",
    "classify_one_var",
    "classify_skew",
    "converse_fiber_test",
    "multiplier_rationality_report",
]

log = logging.getLogger(__name__)

POWER, CHEB_PLUS, CHEB_MINUS, NONE = "power", "chebyshev_plus", "chebyshev_minus", "none"


class _NeedFloat(Exception):
    """An exact computation needs an irrational root."""


def _promote_if_float(ctx: ToleranceContext, *values):
    if ctx.exact and any(backend_of(v) == "float" for v in values):
        raise _NeedFloat


def _root(ctx: ToleranceContext, x, k: int):
    r = ctx.root(x, k)
    if r is None:
        raise _NeedFloat
    return r


def _unity(ctx: ToleranceContext, k: int) -> list:
    try:
        return roots_of_unity(k, ctx)
    except ValueError:
        raise _NeedFloat from None


def _trim(P: Poly, ctx: ToleranceContext) -> Poly:
    """Drop trailing coefficients that are zero within tolerance."""
    cs = list(P.coeffs)
    while cs and ctx.is_zero(cs[-1]):
        cs.pop()
    return Poly(cs, P.var)


# one variable -------------------------------------------------------------


@dataclass(frozen=True)
class OneVarSpecialForm:
    """``conjugate_affine(P, conjugation)`` is ``x^d`` or ``sigma*T_d``.

    ``zeta`` is the Dickson parameter of the monic centered form.
    """

    kind: str
    conjugation: AffineMap1 | None
    zeta: object = None
    residual: float = 0.0

    @property
    def special(self) -> bool:
        return self.kind != NONE


def _one_var_normal(d: int, kind: str, var: str) -> Poly:
    if kind == POWER:
        return Poly.monomial(d, 1, var)
    T = chebyshev(d, var)
    return T if kind == CHEB_PLUS else -T


def _classify_one_var(P: Poly, ctx: ToleranceContext, choice: int = 0) -> OneVarSpecialForm:
    d = P.degree
    with ctx.working():
        lead = P.leading()
        beta = -exact_div(P.coeff(d - 1), d * lead) if backend_of(lead) == "exact" else -P.coeff(d - 1) / (d * lead)
        alpha = _root(ctx, exact_div(1, lead) if backend_of(lead) == "exact" else 1 / lead, d - 1)
        if choice:
            alpha = alpha * _unity(ctx, d - 1)[choice % (d - 1)]
        _promote_if_float(ctx, alpha, beta)
        A = AffineMap1(alpha, beta)
        M = conjugate_affine(P, A)
        if not ctx.eq(M.leading(), 1) or not ctx.is_zero(M.coeff(d - 1)):
            # tolerance failure of the normalization itself
            return OneVarSpecialForm(NONE, None, None, max_deviation(M.coeff(d - 1), 0, ctx))
        M = _clean_monic_centered(M, ctx)
        power = Poly.monomial(d, 1, P.var)
        if poly_close(M, power, ctx):
            return OneVarSpecialForm(POWER, A, ctx.coerce(0), max_deviation(M, power, ctx))
        form = pm_chebyshev_normal_form(M, ctx)
        if form is None:
            return OneVarSpecialForm(NONE, None, None, 0.0)
        _promote_if_float(ctx, form.lam)
        lam, sigma = form.lam, form.sigma
        if sigma == -1 and d % 2 == 0:
            # -T_d is conjugate to T_d by x -> -x for even d
            lam, sigma = -lam, 1
        C = A @ AffineMap1(lam, ctx.coerce(0))
        kind = CHEB_PLUS if sigma == 1 else CHEB_MINUS
        target = _one_var_normal(d, kind, P.var)
        residual = max_deviation(conjugate_affine(P, C), target, ctx)
        if not poly_close(conjugate_affine(P, C), target, ctx):
            return OneVarSpecialForm(NONE, None, None, residual)
        return OneVarSpecialForm(kind, C, form.zeta, residual)


def _clean_monic_centered(M: Poly, ctx: ToleranceContext) -> Poly:
    """Set the leading and subleading coefficients to exactly 1 and 0."""
    if ctx.exact:
        return M
    d = M.degree
    cs = list(M.coeffs)
    cs[d] = ctx.coerce(1)
    cs[d - 1] = ctx.coerce(0)
    return Poly(cs, M.var)


def classify_one_var(P: Poly, ctx: ToleranceContext = EXACT) -> OneVarSpecialForm:
    """Affine-conjugacy test against ``x^d``, ``T_d`` and ``-T_d``.

    For even ``d`` the two Chebyshev signs are conjugate and reported as
    ``chebyshev_plus``.  In exact mode an irrational normalizing slope
    switches the computation to floating point.
    """
    if P.degree < 2:
        raise ValueError("degree must be at least 2")
    try:
        return _classify_one_var(P, ctx)
    except _NeedFloat:
        fctx = ctx.as_float()
        with fctx.working():
            return _classify_one_var(P.map_coeffs(fctx.coerce), fctx)


# triangular conjugations --------------------------------------------------


@dataclass(frozen=True)
class AffineTriangular:
    """``T(z, w) = (alpha*z + beta, gamma*w + delta*z + eps)``."""

    alpha: object = 1
    beta: object = 0
    gamma: object = 1
    delta: object = 0
    eps: object = 0

    def __post_init__(self):
        if self.alpha == 0 or self.gamma == 0:
            raise ValueError("triangular map must be invertible")

    @property
    def a(self) -> AffineMap1:
        return AffineMap1(self.alpha, self.beta)

    def as_map(self, base_var: str = "z", fiber_var: str = "w") -> PlaneMap:
        z = Poly([0, 1], base_var)
        first = BiPoly.lift(z * self.alpha + self.beta, fiber_var, base_var)
        second = BiPoly([Poly([self.eps, self.delta], base_var), self.gamma], fiber_var, base_var)
        return PlaneMap(first, second, base_var, fiber_var)

    def inverse(self) -> AffineTriangular:
        ia = exact_div(1, self.alpha)
        ig = exact_div(1, self.gamma)
        return AffineTriangular(
            ia,
            -self.beta * ia,
            ig,
            -self.delta * ia * ig,
            (self.delta * self.beta * ia - self.eps) * ig,
        )

    def __matmul__(self, other: AffineTriangular) -> AffineTriangular:
        """``self o other``."""
        return AffineTriangular(
            self.alpha * other.alpha,
            self.alpha * other.beta + self.beta,
            self.gamma * other.gamma,
            self.gamma * other.delta + self.delta * other.alpha,
            self.gamma * other.eps + self.delta * other.beta + self.eps,
        )

    def conjugate(self, f: SkewProduct, ctx: ToleranceContext = EXACT) -> SkewProduct:
        """``T^{-1} o f o T``."""
        zv, wv = f.base_var, f.fiber_var
        if ctx.exact:
            ctx = context_for(*self._values(), *_skew_scalars(f))
        with ctx.working():
            out = self.inverse().as_map(zv, wv).compose(f.as_map().compose(self.as_map(zv, wv)))
        return SkewProduct.from_map(out)

    def _values(self):
        return (self.alpha, self.beta, self.gamma, self.delta, self.eps)

    def map_scalars(self, fn) -> AffineTriangular:
        return AffineTriangular(*(fn(v) for v in (self.alpha, self.beta, self.gamma, self.delta, self.eps)))

    def to_dict(self) -> dict:
        return {k: format_scalar(getattr(self, k)) for k in ("alpha", "beta", "gamma", "delta", "eps")}


def _skew_scalars(f: SkewProduct):
    yield from f.p.coeffs
    for row in f.q.coeffs:
        yield from row.coeffs


def apply_chain(f: SkewProduct, chain, ctx: ToleranceContext = EXACT) -> SkewProduct:
    """Conjugate successively by each map of ``chain``."""
    for T in chain:
        f = T.conjugate(f, ctx)
    return f


# classification -----------------------------------------------------------


@dataclass
class Classification:
    regular: bool
    special: bool = False
    kind: str = "not_special"
    zeta: object = None
    m: int | None = None
    phi: Poly | None = None
    base_form: str | None = None
    fiber_form: str | None = None
    conjugation_chain: list = field(default_factory=list)
    dickson_form: SkewProduct | None = None
    normal_form: SkewProduct | None = None
    residual: float = 0.0
    failing_step: str | None = None
    ambiguous: bool = False
    mode: str = "exact"
    precision_bits: int | None = None
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "regular": self.regular,
            "special": self.special,
            "kind": self.kind,
            "zeta": None if self.zeta is None else format_scalar(self.zeta),
            "m": self.m,
            "phi": None if self.phi is None else to_text(self.phi),
            "base_form": self.base_form,
            "fiber_form": self.fiber_form,
            "conjugation_chain": [T.to_dict() for T in self.conjugation_chain],
            "normal_form": None if self.normal_form is None else str(self.normal_form),
            "residual": self.residual,
            "failing_step": self.failing_step,
            "ambiguous": self.ambiguous,
            "mode": self.mode,
            "precision_bits": self.precision_bits,
            "diagnostics": self.diagnostics,
        }


class _Run:
    """Bookkeeping for a single pass through the pipeline."""

    def __init__(self, f: SkewProduct, ctx: ToleranceContext):
        self.f = f
        self.ctx = ctx
        self.residual = 0.0
        self.ambiguous = False
        self.diagnostics: list[dict] = []

    def note(self, step: str, status: str, **detail):
        entry = {"step": step, "status": status}
        entry.update({k: v for k, v in detail.items() if v is not None})
        self.diagnostics.append(entry)

    def check(self, step: str, a, b) -> bool:
        """Identity check with residual tracking and borderline flagging."""
        dev = max_deviation(a, b, self.ctx)
        ok = poly_close(a, b, self.ctx)
        if ok:
            self.residual = max(self.residual, dev)
        elif not self.ctx.exact and dev <= math.sqrt(self.ctx.eps_eq):
            self.ambiguous = True
            self.note(step, "ambiguous", deviation=dev)
        return ok

    def result(self, **kw) -> Classification:
        c = Classification(
            regular=True,
            residual=self.residual,
            ambiguous=self.ambiguous,
            mode=self.ctx.mode,
            precision_bits=None if self.ctx.exact else self.ctx.precision_bits,
            diagnostics=self.diagnostics,
            **kw,
        )
        c.special = c.kind != "not_special"
        return c


def _pipeline(f: SkewProduct, ctx: ToleranceContext, base_choice: int = 0, fiber_choice: int = 0) -> Classification:
    run = _Run(f, ctx)
    d = f.d
    zv, wv = f.base_var, f.fiber_var
    inv_d = Fraction(1, d)
    chain: list[AffineTriangular] = []
    with ctx.working():
        # (a) base normalization
        form = _classify_one_var(f.p, ctx, base_choice)
        if form.kind == NONE:
            run.note("base", "fail", detail="base polynomial is not special")
            return run.result(base_form=NONE, failing_step="base")
        A = form.conjugation
        T1 = AffineTriangular(A.slope, A.intercept)
        chain.append(T1)
        g = T1.conjugate(f, ctx)
        p_model = _one_var_normal(d, form.kind, zv)
        if not run.check("base", g.p, p_model):
            run.note("base", "fail", detail="normalized base does not match")
            return run.result(base_form=form.kind, failing_step="base")
        run.note("base", "ok", kind=form.kind)

        # (b) monic fiber
        top = g.q.coeff_w(d)
        if _trim(top, ctx).degree != 0:
            run.note("monic", "fail", detail="w^d coefficient is not a nonzero constant")
            return run.result(base_form=form.kind, failing_step="monic")
        cd = top.coeff(0)
        gamma = _root(ctx, exact_div(1, cd) if backend_of(cd) == "exact" else 1 / cd, d - 1)
        if fiber_choice:
            gamma = gamma * _unity(ctx, d - 1)[fiber_choice % (d - 1)]
        _promote_if_float(ctx, gamma)
        T2 = AffineTriangular(gamma=gamma)
        chain.append(T2)
        g = T2.conjugate(g, ctx)
        run.note("monic", "ok", gamma=format_scalar(gamma))

        # (c) centering w -> w + c(z)
        c = _trim(g.q.coeff_w(d - 1) * (-inv_d), ctx)
        if c.degree > 1:
            run.note("center", "fail", detail=f"deg c = {c.degree} > 1")
            return run.result(base_form=form.kind, failing_step="center")
        T3 = AffineTriangular(delta=c.coeff(1), eps=c.coeff(0))
        chain.append(T3)
        g = T3.conjugate(g, ctx)
        run.note("center", "ok", c=to_text(c))

        # (d) phi extraction
        phi = _trim(g.q.coeff_w(d - 2) * (-inv_d), ctx)
        if phi.degree > 2:
            run.note("phi", "fail", detail=f"deg phi = {phi.degree} > 2")
            return run.result(base_form=form.kind, phi=phi, failing_step="phi")
        run.note("phi", "ok", phi=to_text(phi))

        # (e) Dickson identity
        D = dickson_at(d, Poly(phi.coeffs, zv), wv)
        if not run.check("dickson", g.q, D):
            run.note("dickson", "fail", deviation=max_deviation(g.q, D, ctx))
            return run.result(base_form=form.kind, phi=phi, failing_step="dickson")
        run.note("dickson", "ok")
        dickson_form = SkewProduct(p_model, D)

        # (f) functional equation
        lhs = compose(phi, p_model)
        rhs = phi**d
        if not run.check("functional_equation", lhs, rhs):
            run.note("functional_equation", "fail", deviation=max_deviation(lhs, rhs, ctx))
            return run.result(base_form=form.kind, phi=phi, failing_step="functional_equation")
        run.note("functional_equation", "ok")

        # (g) pattern match
        common = dict(base_form=form.kind, phi=phi)
        if phi.is_zero():
            model = SkewProduct(p_model, D)
            out = run.result(kind="dagger1", fiber_form=POWER, zeta=ctx.coerce(0), **common)
        elif phi.degree == 0:
            zeta = phi.coeff(0)
            fiber = pm_chebyshev_normal_form(Poly([row.coeff(0) for row in D.coeffs], wv), ctx)
            if fiber is None:
                run.note("pattern", "fail", detail="constant phi is not a root of unity")
                return run.result(failing_step="pattern", **common)
            _promote_if_float(ctx, fiber.lam)
            lam, sigma = fiber.lam, fiber.sigma
            if sigma == -1 and d % 2 == 0:
                lam, sigma = -lam, 1
            T4 = AffineTriangular(gamma=lam)
            chain.append(T4)
            fkind = CHEB_PLUS if sigma == 1 else CHEB_MINUS
            model = SkewProduct(p_model, BiPoly.lift(_one_var_normal(d, fkind, wv), wv, zv))
            out = run.result(kind="dagger1", fiber_form=fkind, zeta=zeta, **common)
        else:
            m = phi.degree
            zeta = phi.leading()
            if form.kind != POWER:
                run.note("pattern", "fail", detail="Chebyshev base needs constant phi")
                return run.result(failing_step="pattern", **common)
            monomial = Poly.monomial(m, zeta, zv)
            if not run.check("pattern", phi, monomial) or not ctx.eq(zeta ** (d - 1), ctx.coerce(1)):
                run.note("pattern", "fail", detail="phi is not zeta*z^m with zeta^(d-1) = 1")
                return run.result(failing_step="pattern", **common)
            model = SkewProduct(p_model, dickson_at(d, monomial, wv))
            out = run.result(kind="dagger2", zeta=zeta, m=m, **common)
            run.note("pattern", "ok", zeta_orbit=_zeta_orbit(zeta, m, d, ctx))

        # witness: the chain applied to the input must give the model
        normal = apply_chain(f, chain, ctx)
        ok_p = run.check("witness", normal.p, model.p)
        ok_q = run.check("witness", normal.q, model.q)
        if not (ok_p and ok_q):
            run.note("witness", "fail", detail="conjugation chain does not reproduce the normal form")
            return run.result(failing_step="witness", **common)
        run.note("witness", "ok")
        out.residual = run.residual
        out.ambiguous = run.ambiguous
        out.conjugation_chain = chain
        out.dickson_form = dickson_form
        out.normal_form = model
        return out


def _zeta_orbit(zeta, m: int, d: int, ctx: ToleranceContext) -> list[str]:
    """Parameters reachable by the residual base and fiber rotations."""
    try:
        mu = roots_of_unity(d - 1, ctx)
        octx = ctx
    except ValueError:
        octx = ctx.as_float()
        mu = roots_of_unity(d - 1, octx)
    with octx.working():
        z = octx.coerce(zeta)
        vals = []
        for eta in mu:
            for kappa in mu:
                v = z * eta**m / kappa**2
                if not any(octx.eq(v, u) for u in vals):
                    vals.append(v)
    return sorted(format_scalar(v) for v in vals)


def _lift(f: SkewProduct, ctx: ToleranceContext) -> SkewProduct:
    return f if ctx.exact else f.map_scalars(ctx.coerce)


def classify_skew(f: SkewProduct, ctx: ToleranceContext = EXACT, exhaustive: bool = False) -> Classification:
    """Run the specialness decision procedure on ``f``.

    ``kind`` is ``dagger1`` (product of special maps), ``dagger2`` (twisted
    Dickson family) or ``not_special``; ``failing_step`` names the first
    check that failed.  In exact mode, steps that need an irrational root
    rerun the whole pipeline in floating point.  ``exhaustive`` retries all
    ``(d-1)^2`` choices of normalizing roots and flags disagreement.
    """
    if not f.regular:
        return Classification(
            regular=False,
            failing_step="regular",
            mode=ctx.mode,
            diagnostics=[{"step": "regular", "status": "fail"}],
        )
    try:
        result = _pipeline(f, ctx)
        used = ctx
    except _NeedFloat:
        used = ctx.as_float()
        result = _pipeline(_lift(f, used), used)
        result.diagnostics.insert(0, {"step": "mode", "status": "promoted", "detail": "irrational root; using floats"})
    if exhaustive:
        _exhaustive(f, used, result)
    return result


def _exhaustive(f: SkewProduct, ctx: ToleranceContext, result: Classification):
    d = f.d
    kinds = set()
    try:
        runs = [(i, j, _pipeline(f, ctx, i, j)) for i in range(d - 1) for j in range(d - 1)]
    except _NeedFloat:
        ctx = ctx.as_float()
        g = _lift(f, ctx)
        runs = [(i, j, _pipeline(g, ctx, i, j)) for i in range(d - 1) for j in range(d - 1)]
    for i, j, r in runs:
        kinds.add((r.kind, r.base_form, r.fiber_form, r.m))
    agree = len(kinds) == 1
    result.diagnostics.append({"step": "exhaustive", "status": "ok" if agree else "disagree", "choices": len(runs)})
    if not agree:
        result.ambiguous = True


# converse check -----------------------------------------------------------


@dataclass
class ConverseReport:
    passed: bool
    max_residual: float
    points: list


def converse_fiber_test(
    f: SkewProduct, N: int, ctx: ToleranceContext = EXACT, classification: Classification | None = None
) -> ConverseReport:
    """Check ``Q_{z0}^n = D_{d^n}(w, phi(z0))`` over base cycles of period ``n <= N``.

    Uses the Dickson form reached after centering.  Also checks
    ``phi(z0)^(d^n - 1) = 1`` whenever ``phi(z0) != 0``.
    """
    cls = classification or classify_skew(f, ctx)
    if not cls.special:
        raise ValueError("converse test needs a special map")
    g = cls.dickson_form
    d = f.d
    _check_cap(d**N, ctx)
    fctx = ctx.as_float()
    points = []
    ok = True
    worst = 0.0
    with fctx.working():
        phi = cls.phi.map_coeffs(fctx.coerce)
        for n in range(1, N + 1):
            for pt in base_periodic_points(g, n, fctx):
                z0 = pt.location
                Q = fiber_iterate(g, z0, n, fctx)
                ph = phi(z0) if phi.coeffs else fctx.coerce(0)
                target = dickson_specialize(d**n, ph, g.fiber_var)
                dev = max_deviation(Q, target, fctx)
                close = poly_close(Q, target, fctx)
                if fctx.is_zero(ph):
                    power_ok = None
                else:
                    power_ok = fctx.eq(ph ** (d**n - 1), fctx.coerce(1))
                good = close and power_ok is not False
                ok = ok and good
                worst = max(worst, dev)
                points.append(
                    {
                        "z0": format_scalar(z0),
                        "period": n,
                        "phi": format_scalar(ph),
                        "residual": dev,
                        "identity": close,
                        "phi_power_is_one": power_ok,
                    }
                )
    return ConverseReport(ok, worst, points)


# multiplier rationality ---------------------------------------------------


@dataclass
class RationalityReport:
    """HEURISTIC: bounded-denominator reconstruction, not a certificate."""

    all_rational: bool
    entries: list
    denominator_bound: int
    heuristic: bool = True


def multiplier_rationality_report(
    f: SkewProduct, N: int, ctx: ToleranceContext = EXACT, denominator_bound: int = 10**4
) -> RationalityReport:
    """Try to recognise every base and fiber multiplier of period ``<= N`` as rational.

    A multiplier counts as rational when some fraction with denominator at
    most ``denominator_bound`` lies within ``10*eps_eq`` (relative).
    """
    _check_cap(f.d**N, ctx)
    fctx = ctx.as_float()
    g = f.map_scalars(fctx.coerce)
    entries = []
    with fctx.working():
        for n in range(1, N + 1):
            for pt in base_periodic_points(g, n, fctx):
                entries.append(_rational_entry("base", n, pt.location, pt.multipliers[0], fctx, denominator_bound))
                for fp in fiber_periodic_points(g, pt, fctx):
                    entries.append(
                        _rational_entry("fiber", n, fp.location, fp.multipliers[1], fctx, denominator_bound)
                    )
    return RationalityReport(all(e["rational"] is not None for e in entries), entries, denominator_bound)


def _rational_entry(where: str, n: int, loc, value, ctx: ToleranceContext, bound: int) -> dict:
    q = ctx.reconstruct(value, bound, tol=10 * ctx.eps_eq)
    point = [format_scalar(x) for x in loc] if isinstance(loc, tuple) else format_scalar(loc)
    return {
        "where": where,
        "period": n,
        "point": point,
        "value": format_scalar(value),
        "rational": None if q is None else format_scalar(q),
    }
