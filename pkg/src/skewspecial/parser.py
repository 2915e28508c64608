"""Recursive-descent parser for polynomials, maps and scalars.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := ('+' | '-') factor | base ('^' exponent)?
    exponent := integer ('^' exponent)?        # right associative
    base   := number | 'i' | variable | '(' expr ')'
    map    := '(' expr ',' expr ')'

Numbers are ``3``, ``3/4``, ``0.25``, ``1e-3``, optionally followed by ``i``
(``2i``, ``1/2 i``).  Implicit multiplication is rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .numerics import EXACT, GaussianRational, ToleranceContext
from .poly import BiPoly, PlaneMap, Poly

__all__ = [
    "ParseError",
    "VARIABLES",
    "parse_ast",
    "parse_poly",
    "parse_map",
    "parse_scalar",
    "ast_to_json",
]

# base-like variables come first: the earlier of two variables is the inner one
VARIABLES = ("z", "u", "a", "w", "v", "x")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?(?:/\d+)?(?:\s*i(?![A-Za-z0-9_]))?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            got = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, got {got!r}", self.tok.offset)
        return self.take()

    def finish(self):
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.offset)

    def top(self):
        """A map literal ``(e1, e2)`` or a single expression."""
        start = self.i
        if self.tok.text == "(":
            self.take()
            first = self.expr()
            if self.tok.text == ",":
                self.take()
                second = self.expr()
                self.expect(")")
                self.finish()
                return ("map", first, second)
            self.i = start
        node = self.expr()
        self.finish()
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = "add" if self.take().text == "+" else "sub"
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.text == "*":
            self.take()
            node = ("mul", node, self.factor())
        if self.tok.kind in ("num", "name") or self.tok.text == "(":
            raise ParseError("implicit multiplication is not allowed", self.tok.offset)
        return node

    def factor(self):
        if self.tok.text in ("+", "-"):
            sign = self.take().text
            inner = self.factor()
            return inner if sign == "+" else ("neg", inner)
        node = self.base()
        if self.tok.text == "^":
            self.take()
            node = ("pow", node, self.exponent())
        return node

    def exponent(self) -> int:
        t = self.tok
        if t.text == "-":
            raise ParseError("negative exponent", t.offset)
        if t.kind != "num":
            raise ParseError(f"expected integer exponent, got {t.text or 'end of input'!r}", t.offset)
        if not t.text.isdigit():
            raise ParseError(f"non-integer exponent {t.text!r}", t.offset)
        self.take()
        k = int(t.text)
        if self.tok.text == "^":
            self.take()
            k = k ** self.exponent()
        return k

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return ("num", t.text)
        if t.kind == "name":
            self.take()
            if t.text == "i":
                return ("num", "i")
            if t.text not in VARIABLES:
                raise ParseError(f"unknown variable {t.text!r}", t.offset)
            return ("var", t.text)
        if t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.offset)


def parse_ast(text: str):
    """Parse to a nested-tuple AST (``("add", a, b)``, ``("var", "z")``, ...)."""
    return _Parser(text).top()


def ast_to_json(node):
    """JSON-friendly form of an AST."""
    tag = node[0]
    if tag == "num":
        return {"num": node[1]}
    if tag == "var":
        return {"var": node[1]}
    if tag == "pow":
        return {"pow": [ast_to_json(node[1]), node[2]]}
    return {tag: [ast_to_json(c) for c in node[1:]]}


def _literal(text: str, ctx: ToleranceContext):
    body = text.rstrip()
    imag = body.endswith("i")
    if imag:
        body = body[:-1].rstrip()
    if body == "":
        body = "1"
    if ctx.exact:
        if "/" in body:
            num, den = body.split("/")
            value = Fraction(num) / Fraction(den)
        else:
            value = Fraction(body)
        return GaussianRational(0, value) if imag else value
    if "/" in body:
        num, den = body.split("/")
        real = ctx.scalar(Fraction(num) / Fraction(den), 0)
    else:
        real = ctx.scalar(body, 0)
    with ctx.working():
        return real * ctx.scalar(0, 1) if imag else real


def _variables(node, acc: set) -> set:
    if node[0] == "var":
        acc.add(node[1])
    elif node[0] not in ("num",):
        for child in node[1:]:
            if isinstance(child, tuple):
                _variables(child, acc)
    return acc


def _order(names) -> tuple[str, str]:
    ranked = sorted(names, key=VARIABLES.index)
    if len(ranked) > 2:
        raise ValueError(f"at most two variables are supported, got {ranked}")
    return ranked[0], ranked[1]


def _pick_vars(names: set, default: tuple[str, str]) -> tuple[str, str]:
    """(inner, outer) variable names for a bivariate parse."""
    if len(names) == 2:
        return _order(names)
    if len(names) > 2:
        _order(names)
    if len(names) == 1:
        (n,) = names
        if n in default:
            return default
        return (n, default[1]) if VARIABLES.index(n) < 3 else (default[0], n)
    return default


def _lower(node, env: dict, ctx: ToleranceContext):
    tag = node[0]
    if tag == "num":
        return _literal(node[1], ctx)
    if tag == "var":
        return env[node[1]]
    if tag == "neg":
        return -_lower(node[1], env, ctx)
    if tag == "pow":
        base = _lower(node[1], env, ctx)
        return base ** node[2] if isinstance(base, Poly) else _scalar_pow(base, node[2])
    a = _lower(node[1], env, ctx)
    b = _lower(node[2], env, ctx)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    if tag == "mul":
        return a * b
    raise ValueError(f"cannot lower {tag!r} here")


def _scalar_pow(x, k: int):
    out = 1
    for _ in range(k):
        out = out * x
    return out


def _bivariate_env(inner: str, outer: str) -> dict:
    return {
        inner: BiPoly([Poly([0, 1], inner)], outer, inner),
        outer: BiPoly([0, 1], outer, inner),
    }


def parse_poly(text: str, ctx: ToleranceContext = EXACT, variables: tuple[str, ...] | None = None):
    """Parse a polynomial in one or two variables.

    One variable gives a :class:`Poly`; two give a :class:`BiPoly` whose outer
    variable is the later one in ``VARIABLES`` (so ``z`` is inner to ``w``).
    ``variables`` forces the layout: ``("x",)`` or ``(inner, outer)``.
    """
    node = parse_ast(text)
    if node[0] == "map":
        raise ParseError("expected a polynomial, got a map", 0)
    names = _variables(node, set())
    with ctx.working():
        if variables is not None and len(variables) == 2 or (variables is None and len(names) == 2):
            inner, outer = variables if variables is not None else _order(names)
            extra = names - {inner, outer}
            if extra:
                raise ParseError(f"unknown variable {sorted(extra)[0]!r}", 0)
            return BiPoly.lift(_lower(node, _bivariate_env(inner, outer), ctx), outer, inner)
        if len(names) > 2:
            raise ParseError(f"too many variables {sorted(names)}", 0)
        var = variables[0] if variables else (next(iter(names)) if names else "x")
        if names - {var}:
            raise ParseError(f"unknown variable {sorted(names - {var})[0]!r}", 0)
        out = _lower(node, {var: Poly([0, 1], var)}, ctx)
        return out if isinstance(out, Poly) else Poly([out], var)


def parse_map(text: str, ctx: ToleranceContext = EXACT, variables: tuple[str, str] | None = None) -> PlaneMap:
    """Parse ``(e1, e2)`` into a :class:`PlaneMap`.

    The two variables are inferred from both components (default ``z``, ``w``).
    """
    node = parse_ast(text)
    if node[0] != "map":
        raise ParseError("expected a map literal '(expr, expr)'", 0)
    names = _variables(node, set())
    try:
        inner, outer = variables or _pick_vars(names, ("z", "w"))
    except ValueError as exc:
        raise ParseError(str(exc), 0) from None
    extra = names - {inner, outer}
    if extra:
        raise ParseError(f"unknown variable {sorted(extra)[0]!r}", 0)
    env = _bivariate_env(inner, outer)
    with ctx.working():
        first = BiPoly.lift(_lower(node[1], env, ctx), outer, inner)
        second = BiPoly.lift(_lower(node[2], env, ctx), outer, inner)
    return PlaneMap(first, second, inner, outer)


def parse_scalar(text: str, ctx: ToleranceContext = EXACT):
    """Parse a constant such as ``3/4``, ``1 - 2i`` or ``0.5``."""
    node = parse_ast(text)
    if _variables(node, set()) or node[0] == "map":
        raise ParseError("expected a constant", 0)
    with ctx.working():
        return _lower(node, {}, ctx)
