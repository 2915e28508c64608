"""Dense polynomials over scalars or over other polynomials.

A :class:`Poly` is univariate with coefficients in ascending order.  The
coefficients may themselves be polynomials in another variable, which is how
:class:`BiPoly` stores ``q(z, w)``: a polynomial in ``w`` whose coefficients
are polynomials in ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .numerics import EXACT, ToleranceContext, format_scalar

__all__ = [
    "Poly",
    "BiPoly",
    "AffineMap1",
    "PlaneMap",
    "compose",
    "conjugate_affine",
    "coeff_w",
    "max_deviation",
    "poly_close",
    "to_text",
]


def _is_zero(c) -> bool:
    # gmpy2.mpc(0) is truthy, so compare against 0 explicitly
    return c == 0


def _depth(c) -> int:
    return c.depth if isinstance(c, Poly) else 0


def exact_div(a, b):
    """``a / b`` that stays rational for integer operands."""
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def _as_poly(x, var: str) -> "Poly":
    return x if isinstance(x, Poly) else Poly([x], var)


class Poly:
    """Univariate polynomial ``sum(coeffs[k] * var**k)``.

    Instances are immutable.  Trailing zero coefficients are stripped, so the
    zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs", "var", "_level")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        cs = list(coeffs)
        level = 1 + max((_depth(c) for c in cs), default=0)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "_level", level)

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    @classmethod
    def monomial(cls, k: int, c=1, var: str = "x") -> Poly:
        return cls([0] * k + [c], var)

    @classmethod
    def identity(cls, var: str = "x") -> Poly:
        return cls([0, 1], var)

    def _new(self, coeffs) -> Poly:
        return Poly(coeffs, self.var)

    @property
    def depth(self) -> int:
        """Nesting level: 1 for scalar coefficients, 2 for a BiPoly, ..."""
        return self._level

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self._zero_coeff()

    def _zero_coeff(self):
        return 0

    def leading(self):
        return self.coeffs[-1] if self.coeffs else self._zero_coeff()

    def map_coeffs(self, fn: Callable) -> Poly:
        return self._new(fn(c) for c in self.coeffs)

    # ring operations --------------------------------------------------

    def _operand(self, other):
        """Coefficient list of ``other`` viewed at this polynomial's level."""
        if isinstance(other, Poly):
            if other.var == self.var:
                if type(other) is not type(self) and isinstance(other, type(self)):
                    return NotImplemented
                return other.coeffs
            if other.depth > self.depth:
                return NotImplemented
            if other.depth == self.depth and other.degree > 0:
                raise ValueError(f"incompatible variables {self.var!r} and {other.var!r}")
            if other.depth == self.depth:
                return [other.coeff(0)] if other.coeffs else []
            return [other]
        return [other]

    def __add__(self, other):
        o = self._operand(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o
        n = max(len(a), len(b))
        return self._new(
            (a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)
        )

    __radd__ = __add__

    def __neg__(self):
        return self._new(-c for c in self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._operand(other)
        if o is NotImplemented:
            return NotImplemented
        return self + self._new(-c for c in o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._operand(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o
        if not a or not b:
            return self._new(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if _is_zero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = self._new([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> Poly:
        return self._new(c * x for x in self.coeffs)

    def derivative(self) -> Poly:
        return self._new(k * c for k, c in enumerate(self.coeffs) if k)

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or another polynomial."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner) -> Poly:
        """``self o inner`` for a polynomial ``inner`` in the same variable."""
        out = self(inner)
        if not isinstance(out, Poly):
            return self._new([out])
        return out

    # comparison and display -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            if other.var != self.var and other.degree > 0 and self.degree > 0:
                return False
            return self.coeffs == other.coeffs or (
                max(self.degree, other.degree) <= 0 and self.coeff(0) == other.coeff(0)
            )
        if self.degree <= 0:
            return self.coeff(0) == other
        return False

    def __hash__(self):
        if self.degree <= 0:
            return hash(self.coeff(0))
        return hash((self.var, self.coeffs))

    def __repr__(self):
        return f"{type(self).__name__}({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


class BiPoly(Poly):
    """Polynomial in an outer (fiber) variable with coefficients in an inner one.

    ``BiPoly([Poly([0, -2], 'z'), 0, 1], var='w', inner='z')`` is ``w^2 - 2*z``.
    """

    __slots__ = ("inner",)

    def __init__(self, coeffs: Iterable = (), var: str = "w", inner: str = "z"):
        wrapped = []
        for c in coeffs:
            if isinstance(c, Poly):
                if c.var != inner:
                    if c.degree > 0:
                        raise ValueError(f"coefficient in {c.var!r}, expected {inner!r}")
                    c = Poly(c.coeffs, inner)
                wrapped.append(c)
            else:
                wrapped.append(Poly([c], inner))
        object.__setattr__(self, "inner", inner)
        super().__init__(wrapped, var)

    def _new(self, coeffs) -> BiPoly:
        return BiPoly(coeffs, self.var, self.inner)

    def _zero_coeff(self):
        return Poly((), self.inner)

    @property
    def depth(self) -> int:
        return 2

    @classmethod
    def from_dict(cls, terms: dict, var: str = "w", inner: str = "z") -> BiPoly:
        """Build from ``{(i, j): c}`` meaning ``c * inner**i * var**j``."""
        if not terms:
            return cls((), var, inner)
        wdeg = max(j for _, j in terms)
        rows = [[] for _ in range(wdeg + 1)]
        for (i, j), c in terms.items():
            row = rows[j]
            row.extend([0] * (i + 1 - len(row)))
            row[i] = row[i] + c
        return cls([Poly(r, inner) for r in rows], var, inner)

    @classmethod
    def lift(cls, x, var: str = "w", inner: str = "z") -> BiPoly:
        """View a scalar or a one-variable polynomial as a BiPoly."""
        if isinstance(x, BiPoly):
            return x
        if isinstance(x, Poly):
            if x.var == inner:
                return cls([x], var, inner)
            if x.var == var or x.degree <= 0:
                return cls(x.coeffs, var, inner)
            raise ValueError(f"cannot lift polynomial in {x.var!r}")
        return cls([x], var, inner)

    def terms(self) -> dict:
        return {
            (i, j): c for j, row in enumerate(self.coeffs) for i, c in enumerate(row.coeffs) if c != 0
        }

    def coeff_w(self, k: int) -> Poly:
        return self.coeff(k)

    def total_degree(self) -> int:
        if not self.coeffs:
            return -1
        return max(j + row.degree for j, row in enumerate(self.coeffs) if not row.is_zero())

    def homogeneous_part(self, k: int) -> BiPoly:
        return BiPoly.from_dict(
            {(i, j): c for (i, j), c in self.terms().items() if i + j == k}, self.var, self.inner
        )

    def deriv_w(self) -> BiPoly:
        return self.derivative()

    def deriv_z(self) -> BiPoly:
        return self._new(row.derivative() for row in self.coeffs)

    def specialize(self, z0) -> Poly:
        """The one-variable polynomial ``q(z0, .)`` in the outer variable."""
        return Poly([row(z0) for row in self.coeffs], self.var)

    def substitute_inner(self, zval) -> BiPoly:
        """``q(zval(z), w)`` for a polynomial ``zval`` in the inner variable."""
        return self._new(_as_poly(row(zval), self.inner) for row in self.coeffs)

    def evaluate(self, zval, wval):
        """``q(zval, wval)`` for scalar or polynomial arguments."""
        acc = 0
        for row in reversed(self.coeffs):
            acc = acc * wval + row(zval)
        return acc

    def map_scalars(self, fn: Callable) -> BiPoly:
        return self._new(row.map_coeffs(fn) for row in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            try:
                other = BiPoly.lift(other, self.var, self.inner)
            except ValueError:
                return False
        if self.coeffs != other.coeffs:
            return False
        return self.total_degree() <= 0 or (self.var, self.inner) == (other.var, other.inner)

    __hash__ = Poly.__hash__


@dataclass(frozen=True)
class AffineMap1:
    """Invertible affine map ``x -> slope*x + intercept``."""

    slope: object
    intercept: object = 0

    def __post_init__(self):
        if _is_zero(self.slope):
            raise ValueError("affine map must be invertible (nonzero slope)")

    @classmethod
    def identity(cls) -> AffineMap1:
        return cls(1, 0)

    @classmethod
    def translation(cls, c) -> AffineMap1:
        return cls(1, c)

    def __call__(self, x):
        return self.slope * x + self.intercept

    def inverse(self) -> AffineMap1:
        inv = exact_div(1, self.slope)
        return AffineMap1(inv, -self.intercept * inv)

    def then(self, other: AffineMap1) -> AffineMap1:
        """``other o self``."""
        return AffineMap1(other.slope * self.slope, other.slope * self.intercept + other.intercept)

    def __matmul__(self, other: AffineMap1) -> AffineMap1:
        """``self o other``."""
        return other.then(self)

    def as_poly(self, var: str = "x") -> Poly:
        return Poly([self.intercept, self.slope], var)

    def map_coeffs(self, fn: Callable) -> AffineMap1:
        return AffineMap1(fn(self.slope), fn(self.intercept))


def compose(outer: Poly, inner: Poly) -> Poly:
    """``outer o inner``, Horner in the outer polynomial."""
    return outer.compose(inner)


def conjugate_affine(P: Poly, A: AffineMap1) -> Poly:
    """``A^{-1} o P o A``."""
    inv = A.inverse()
    return inv.as_poly(P.var).compose(P.compose(A.as_poly(P.var)))


def coeff_w(q: BiPoly, k: int) -> Poly:
    return q.coeff_w(k)


def _flat_coeffs(p) -> Iterator:
    if isinstance(p, Poly):
        for c in p.coeffs:
            yield from _flat_coeffs(c)
    else:
        yield p


def max_deviation(a, b, ctx: ToleranceContext = EXACT) -> float:
    """Largest coefficient deviation between two polynomials (or scalars)."""
    with ctx.working():
        diff = a - b
        if not isinstance(diff, Poly):
            return ctx.distance(diff, 0)
        return max((ctx.distance(c, 0) for c in _flat_coeffs(diff)), default=0.0)


def poly_close(a, b, ctx: ToleranceContext = EXACT) -> bool:
    """Coefficientwise equality under ``ctx`` (structural in exact mode)."""
    if ctx.exact:
        return (a - b) == 0
    with ctx.working():
        return all(ctx.eq(x, y) for x, y in _pair_coeffs(a, b))


def _pair_coeffs(a, b):
    ta = dict(_monomials(a))
    tb = dict(_monomials(b))
    for key in set(ta) | set(tb):
        yield ta.get(key, 0), tb.get(key, 0)


def _monomials(p, suffix: tuple = ()) -> Iterator[tuple[tuple, object]]:
    """Yield ``(((var, exp), ...), coeff)``, outer variable last."""
    if isinstance(p, Poly):
        for k in range(p.degree, -1, -1):
            c = p.coeffs[k]
            if _is_zero(c):
                continue
            yield from _monomials(c, ((p.var, k),) + suffix)
    else:
        yield suffix, p


def _fmt_monomial(vars_: tuple) -> str:
    parts = []
    for name, k in vars_:
        if k == 0:
            continue
        parts.append(name if k == 1 else f"{name}^{k}")
    return "*".join(parts)


def to_text(p) -> str:
    """Canonical text: descending powers, exact rationals, ``i`` suffix."""
    if not isinstance(p, Poly):
        return format_scalar(p)
    pieces = []
    for vars_, c in _monomials(p):
        mono = _fmt_monomial(vars_)
        cs = format_scalar(c)
        complex_coeff = " + " in cs or " - " in cs
        if complex_coeff:
            sign, body = "+", f"({cs})"
        elif cs.startswith("-"):
            sign, body = "-", cs[1:]
        else:
            sign, body = "+", cs
        if mono:
            term = mono if body == "1" else f"{body}*{mono}"
        else:
            term = body
        pieces.append((sign, term))
    if not pieces:
        return "0"
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in pieces[1:]:
        out += f" {sign} {term}"
    return out


@dataclass(frozen=True)
class PlaneMap:
    """Polynomial self-map ``(first, second)`` of the plane in two variables."""

    first: BiPoly
    second: BiPoly
    base_var: str = "z"
    fiber_var: str = "w"

    @classmethod
    def of(cls, first, second, base_var: str = "z", fiber_var: str = "w") -> PlaneMap:
        return cls(
            BiPoly.lift(first, fiber_var, base_var),
            BiPoly.lift(second, fiber_var, base_var),
            base_var,
            fiber_var,
        )

    def compose(self, inner: PlaneMap) -> PlaneMap:
        """``self o inner``, expressed in ``inner``'s variables."""
        zvar, wvar = inner.base_var, inner.fiber_var

        def ev(component: BiPoly) -> BiPoly:
            return BiPoly.lift(component.evaluate(inner.first, inner.second), wvar, zvar)

        return PlaneMap(ev(self.first), ev(self.second), zvar, wvar)

    def __call__(self, z, w):
        return self.first.evaluate(z, w), self.second.evaluate(z, w)

    def map_scalars(self, fn: Callable) -> PlaneMap:
        return PlaneMap(self.first.map_scalars(fn), self.second.map_scalars(fn), self.base_var, self.fiber_var)

    def __str__(self):
        return f"({to_text(self.first)}, {to_text(self.second)})"
