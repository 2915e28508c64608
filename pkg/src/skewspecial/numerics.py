"""Scalar arithmetic with an exact and a floating backend.

Exact scalars are Gaussian rationals (``int``, ``Fraction`` or
:class:`GaussianRational`).  Floating scalars are ``gmpy2.mpc`` values computed
under the precision of a :class:`ToleranceContext`.  The two backends never mix
silently: combining them raises :class:`BackendMismatch`.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Union

import gmpy2
from gmpy2 import mpc, mpfr

__all__ = [
    "BackendMismatch",
    "GaussianRational",
    "I",
    "Scalar",
    "ToleranceContext",
    "EXACT",
    "backend_of",
    "exact_sqrt",
    "exact_root",
    "scalar_eq",
    "roots_of_unity",
    "to_fraction",
    "context_for",
]

DEFAULT_PRECISION = 256
DEFAULT_DEGREE_CAP = 1024


class BackendMismatch(TypeError):
    """An operation combined an exact scalar with a floating one."""


_RATIONAL_TYPES = (int, Fraction)
_MPC_TYPE = type(mpc(0))
_MPFR_TYPE = type(mpfr(0))


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts.

    Fractions are always stored reduced with positive denominator, which the
    ``Fraction`` type guarantees.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | int = 0, im: Rational | int = 0):
        if not isinstance(re, _RATIONAL_TYPES) or not isinstance(im, _RATIONAL_TYPES):
            if isinstance(re, GaussianRational) and im == 0:
                re, im = re.re, re.im
            else:
                raise BackendMismatch(f"cannot build an exact scalar from {re!r}, {im!r}")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _lift(other) -> GaussianRational | None:
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, _RATIONAL_TYPES):
            return GaussianRational(other)
        if isinstance(other, (_MPC_TYPE, _MPFR_TYPE, float, complex)):
            raise BackendMismatch(f"exact scalar combined with floating value {other!r}")
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> GaussianRational:
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATIONAL_TYPES):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


I = GaussianRational(0, 1)

Scalar = Union[int, Fraction, GaussianRational, "mpc"]


def backend_of(x) -> str:
    if isinstance(x, (_MPC_TYPE, _MPFR_TYPE, float, complex)):
        return "float"
    if isinstance(x, (GaussianRational,) + _RATIONAL_TYPES):
        return "exact"
    raise TypeError(f"not a scalar: {x!r}")


def _parts(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, GaussianRational):
        return x.re, x.im
    return Fraction(x), Fraction(0)


def _int_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    r = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(r[0]) if r[1] else None


def _rational_root(q: Fraction, k: int) -> Fraction | None:
    if q < 0:
        if k % 2 == 0:
            return None
        r = _rational_root(-q, k)
        return None if r is None else -r
    num = _int_root(q.numerator, k)
    den = _int_root(q.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def exact_sqrt(x) -> GaussianRational | None:
    """Principal square root of a Gaussian rational, or None if irrational.

    The principal branch has positive real part, or zero real part and
    nonnegative imaginary part.
    """
    a, b = _parts(x)
    modulus = _rational_root(a * a + b * b, 2)
    if modulus is None:
        return None
    re = _rational_root((modulus + a) / 2, 2)
    im = _rational_root((modulus - a) / 2, 2)
    if re is None or im is None:
        return None
    if b < 0:
        im = -im
    root = GaussianRational(re, im)
    if root.re < 0 or (root.re == 0 and root.im < 0):
        root = -root
    return root


def exact_root(x, k: int) -> GaussianRational | None:
    """Some k-th root of a Gaussian rational when one is Gaussian rational.

    Real inputs get their real root when it exists; even k goes through
    repeated square roots.  Returns None when no root is found.
    """
    if k < 1:
        raise ValueError("root index must be positive")
    a, b = _parts(x)
    if k == 1:
        return GaussianRational(a, b)
    if b == 0:
        r = _rational_root(a, k)
        if r is not None:
            return GaussianRational(r)
    if k % 2 == 0:
        s = exact_sqrt(x)
        return None if s is None else exact_root(s, k // 2)
    # odd index, non-real input: search the Gaussian integers of the right
    # norm would be overkill; only the unit cases are handled
    for u in (GaussianRational(1), I, GaussianRational(-1), -I):
        if u**k == GaussianRational(a, b):
            return u
    return None


def to_fraction(x) -> Fraction:
    """Exact binary value of a real floating number."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    num, den = mpfr(x).as_integer_ratio()
    return Fraction(int(num), int(den))


@dataclass(frozen=True)
class ToleranceContext:
    """Backend selection plus equality and root-finding tolerances.

    ``eps_eq`` and ``eps_root`` default to ``2**(-precision_bits/2)``.  They are
    ignored in exact mode, where equality is structural.
    """

    mode: str = "exact"
    precision_bits: int = DEFAULT_PRECISION
    eps_eq: float | None = None
    eps_root: float | None = None
    degree_cap: int = DEFAULT_DEGREE_CAP
    _gmp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.precision_bits < 2:
            raise ValueError("precision_bits must be positive")
        half = self.precision_bits // 2
        default = float(mpfr(2) ** -half) if half < 1000 else 0.0
        if self.eps_eq is None:
            object.__setattr__(self, "eps_eq", default)
        if self.eps_root is None:
            object.__setattr__(self, "eps_root", default)
        if self.mode == "float" and (self.eps_eq <= 0 or self.eps_root <= 0):
            raise ValueError("float mode needs positive eps_eq and eps_root")
        if self.eps_eq < 0 or self.eps_root < 0:
            raise ValueError("tolerances must be nonnegative")
        object.__setattr__(
            self, "_gmp", gmpy2.context(gmpy2.get_context(), precision=self.precision_bits)
        )

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def as_float(self) -> ToleranceContext:
        return self if not self.exact else replace(self, mode="float")

    def as_exact(self) -> ToleranceContext:
        return self if self.exact else replace(self, mode="exact")

    @contextlib.contextmanager
    def working(self) -> Iterator[None]:
        """Run floating arithmetic at this context's precision."""
        if self.exact:
            yield
            return
        with gmpy2.context(self._gmp):
            yield

    # construction -----------------------------------------------------

    def scalar(self, re=0, im=0):
        """Build a scalar of this backend from two real parts."""
        if self.exact:
            return GaussianRational(_exact_real(re), _exact_real(im))
        with self.working():
            v = mpc(_float_real(re), _float_real(im))
        if not gmpy2.is_finite(v):
            raise ValueError("non-finite floating scalar")
        return v

    def coerce(self, x):
        """Convert a scalar to this backend.

        Exact values convert to floats freely; the reverse raises
        :class:`BackendMismatch` (use :meth:`reconstruct` instead).
        """
        if self.exact:
            if isinstance(x, (GaussianRational,) + _RATIONAL_TYPES):
                return x
            raise BackendMismatch(f"floating value {x!r} in exact mode")
        if isinstance(x, _MPC_TYPE):
            v = x
            if x.precision[0] != self.precision_bits:
                with self.working():
                    v = mpc(x)
        elif isinstance(x, GaussianRational):
            return self.scalar(x.re, x.im)
        elif isinstance(x, (complex,)):
            return self.scalar(x.real, x.imag)
        else:
            return self.scalar(x, 0)
        if not gmpy2.is_finite(v):
            raise ValueError("non-finite floating scalar")
        return v

    # comparison -------------------------------------------------------

    def distance(self, a, b) -> float:
        """Largest componentwise distance |a - b|, as a float."""
        if self.exact:
            ar, ai = _parts(a)
            br, bi = _parts(b)
            return float(max(abs(ar - br), abs(ai - bi)))
        with self.working():
            diff = self.coerce(a) - self.coerce(b)
            return float(max(abs(diff.real), abs(diff.imag)))

    def magnitude(self, a) -> float:
        if self.exact:
            ar, ai = _parts(a)
            return float(max(abs(ar), abs(ai)))
        with self.working():
            a = self.coerce(a)
            return float(max(abs(a.real), abs(a.imag)))

    def eq(self, a, b) -> bool:
        """Equality: structural in exact mode, mixed tolerance in float mode.

        Float mode accepts ``dist <= eps_eq * max(1, |a|, |b|)``; exact
        operands are widened to floats first.
        """
        if self.exact:
            if backend_of(a) != "exact" or backend_of(b) != "exact":
                raise BackendMismatch("exact comparison of floating values")
            return a == b
        if backend_of(a) == "exact" and backend_of(b) == "exact":
            return a == b
        # exact values widen to floats; the reverse never happens implicitly
        scale = max(1.0, self.magnitude(a), self.magnitude(b))
        return self.distance(a, b) <= self.eps_eq * scale

    def is_zero(self, a) -> bool:
        if backend_of(a) == "exact":
            return a == 0
        return self.magnitude(a) <= self.eps_eq

    # roots ------------------------------------------------------------

    def sqrt(self, x):
        """Principal square root; None in exact mode when irrational."""
        if self.exact:
            return exact_sqrt(x)
        with self.working():
            return gmpy2.sqrt(self.coerce(x))

    def root(self, x, k: int):
        """A k-th root (principal in float mode); None if not exact."""
        if self.exact:
            return exact_root(x, k)
        with self.working():
            x = self.coerce(x)
            if x == 0:
                return x
            if k == 1:
                return x
            if k == 2:
                return gmpy2.sqrt(x)
            return gmpy2.exp(gmpy2.log(x) / k)

    def roots_of_unity(self, k: int) -> list:
        return roots_of_unity(k, self)

    # rational reconstruction -----------------------------------------

    def reconstruct(self, x, max_denominator: int = 10**6, tol: float | None = None):
        """Nearest Gaussian rational with bounded denominators, or None.

        Each component goes through continued-fraction approximation; the
        candidate is accepted when within ``tol`` (default ``10*eps_eq``,
        relative to ``max(1, |x|)``).
        """
        if backend_of(x) == "exact":
            return GaussianRational(*_parts(x))
        tol = 10 * self.eps_eq if tol is None else tol
        with self.working():
            x = self.coerce(x)
            re = to_fraction(x.real).limit_denominator(max_denominator)
            im = to_fraction(x.imag).limit_denominator(max_denominator)
            cand = GaussianRational(re, im)
            scale = max(1.0, self.magnitude(x))
            if self.distance(x, self.coerce(cand)) <= tol * scale:
                return cand
        return None


EXACT = ToleranceContext()


def _exact_real(v) -> Fraction:
    if isinstance(v, _RATIONAL_TYPES):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise BackendMismatch(f"cannot use {v!r} as an exact real")


def _float_real(v):
    if isinstance(v, str):
        return mpfr(v)
    if isinstance(v, Fraction):
        return gmpy2.mpq(v.numerator, v.denominator)
    return v


def context_for(*values) -> ToleranceContext:
    """Context matching the given scalars: exact, or float at their precision."""
    bits = [v.precision[0] for v in values if isinstance(v, _MPC_TYPE)]
    bits += [v.precision for v in values if isinstance(v, _MPFR_TYPE)]
    if not bits:
        return EXACT
    return ToleranceContext("float", precision_bits=max(bits))


def scalar_eq(a, b, ctx: ToleranceContext = EXACT) -> bool:
    """Backend-aware scalar equality (see :meth:`ToleranceContext.eq`)."""
    if backend_of(a) != backend_of(b):
        raise BackendMismatch("scalar_eq across backends")
    return ctx.eq(a, b)


def roots_of_unity(k: int, ctx: ToleranceContext = EXACT) -> list:
    """All k solutions of z**k == 1, ordered by argument in [0, 2*pi)."""
    if k < 1:
        raise ValueError("k must be positive")
    if ctx.exact:
        table = {
            1: [GaussianRational(1)],
            2: [GaussianRational(1), GaussianRational(-1)],
            4: [GaussianRational(1), I, GaussianRational(-1), -I],
        }
        if k not in table:
            raise ValueError(f"{k}-th roots of unity are not Gaussian rationals")
        return table[k]
    out = []
    with ctx.working():
        two_pi = 2 * gmpy2.const_pi()
        for j in range(k):
            if 4 * j % k == 0:
                # exact values at quarter turns
                out.append(mpc(*{0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}[4 * j // k]))
            else:
                theta = two_pi * j / k
                out.append(mpc(gmpy2.cos(theta), gmpy2.sin(theta)))
    return out


def format_scalar(x) -> str:
    """Canonical text for a scalar: ``3``, ``-1/2``, ``2i``, ``1 - 3/4i``."""
    if backend_of(x) == "exact":
        re, im = _parts(x)
        if im == 0:
            return _fmt_frac(re)
        im_txt = "i" if abs(im) == 1 else _fmt_frac(abs(im)) + "i"
        if re == 0:
            return ("-" if im < 0 else "") + im_txt
        return f"{_fmt_frac(re)} {'-' if im < 0 else '+'} {im_txt}"
    bits = max(x.precision) if isinstance(x, _MPC_TYPE) else _precision_of(x)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        v = mpc(x)
        re, im = v.real, v.imag
        if im == 0:
            return _fmt_mpfr(re)
        im_txt = _fmt_mpfr(abs(im)) + "i"
        if re == 0:
            return ("-" if im < 0 else "") + im_txt
        return f"{_fmt_mpfr(re)} {'-' if im < 0 else '+'} {im_txt}"


def _precision_of(x) -> int:
    if isinstance(x, type(mpfr(0))):
        return x.precision
    return 53


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_mpfr(x) -> str:
    return str(x)
