"""Surface syntax for super-elements: parsing and canonical rendering.

Grammar (whitespace between tokens is ignored):

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := rational | var ('^' nat)? | '(' expr ')'
    rational := int ('/' posint)?
    var      := 'x' nat | 'y' posnat | 'e' nat

x0..xn and y1..yk are the even variables; e1..eN name the odd variables,
paired positionally with q_1..q_N (y's first, then x's).  Implicit
multiplication is rejected: "2x0" is a syntax error.  An eta power above 1
is rejected (the square of an odd variable is zero, so allowing it would
silently build 0).

parse(render(a)) == a holds bit-exactly for every element; rendering sorts
terms by the canonical monomial order, largest first.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError, ParseError
from .superalgebra import (
    SuperElement,
    SuperMonomial,
    VariableContext,
    monomial_sort_key,
)


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind, value, line, column):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column

    def __repr__(self):
        return f"_Token({self.kind}, {self.value!r})"


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c in "+-*/^()":
            tokens.append(_Token(c, c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(_Token("nat", int(text[start:i]), line, col))
            col += i - start
            continue
        if c in "xye":
            if i + 1 >= n or not text[i + 1].isdigit():
                raise ParseError(f"variable '{c}' needs a numeric index", line, col)
            start = i + 1
            i += 1
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(_Token("var", (c, int(text[start:i])), line, col))
            col += i - start + 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("end", None, line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: VariableContext):
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.value!r}", tok.line, tok.column)
        return self.advance()

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)

    def parse(self) -> SuperElement:
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.value!r}", tok.line, tok.column)
        return value

    def expr(self) -> SuperElement:
        negate = False
        if self.peek().kind == "-":
            self.advance()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> SuperElement:
        value = self.factor()
        while self.peek().kind == "*":
            self.advance()
            value = value * self.factor()
        return value

    def factor(self) -> SuperElement:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "nat":
            return SuperElement.scalar(self.ctx, self.rational())
        if tok.kind == "-":
            # A sign inside a factor position only makes sense before a number.
            nxt = self.tokens[self.pos + 1]
            if nxt.kind == "nat":
                self.advance()
                return SuperElement.scalar(self.ctx, -self.rational())
            self.fail("unexpected '-'")
        if tok.kind == "var":
            self.advance()
            base = self.variable(tok)
            if self.peek().kind == "^":
                self.advance()
                etok = self.expect("nat")
                exponent = etok.value
                letter, _ = tok.value
                if letter == "e" and exponent > 1:
                    raise ParseError("eta exponent must be 0 or 1", etok.line, etok.column)
                return base ** exponent
            return base
        self.fail(f"expected a factor, found {tok.value!r}")

    def rational(self) -> Fraction:
        num = self.expect("nat").value
        if self.peek().kind == "/":
            self.advance()
            dtok = self.expect("nat")
            if dtok.value == 0:
                raise ParseError("zero denominator", dtok.line, dtok.column)
            return Fraction(num, dtok.value)
        return Fraction(num)

    def variable(self, tok: _Token) -> SuperElement:
        letter, index = tok.value
        ctx = self.ctx
        if letter == "x":
            if index > ctx.n:
                raise ParseError(f"x{index} out of range (max x{ctx.n})", tok.line, tok.column)
            return SuperElement.variable(ctx, ctx.k + 1 + index)
        if letter == "y":
            if not 1 <= index <= ctx.k:
                raise ParseError(f"y{index} out of range (1..{ctx.k})", tok.line, tok.column)
            return SuperElement.variable(ctx, index)
        if not 1 <= index <= ctx.nvars:
            raise ParseError(f"e{index} out of range (1..{ctx.nvars})", tok.line, tok.column)
        return SuperElement.eta(ctx, index)


def parse(text: str, ctx: VariableContext) -> SuperElement:
    """Parse the surface syntax into an exact SuperElement."""
    if not isinstance(text, str):
        raise InputError("expected a string to parse")
    return _Parser(text, ctx).parse()


def _render_monomial(ctx: VariableContext, mono: SuperMonomial) -> str:
    factors = []
    for mu, e in enumerate(mono.qexp, start=1):
        if e == 0:
            continue
        name = ctx.var_name(mu)
        factors.append(name if e == 1 else f"{name}^{e}")
    for mu in mono.eta:
        factors.append(ctx.eta_name(mu))
    return "*".join(factors)


def _render_coefficient(c: Fraction) -> str:
    return str(c)  # Fraction formats as 'p' or 'p/q' with positive q


def render(a: SuperElement) -> str:
    """Canonical text form: terms sorted largest-first, signs folded in.

    The output always re-parses to the same element.
    """
    if a.is_zero():
        return "0"
    ctx = a.ctx
    items = sorted(
        a.terms.items(),
        key=lambda item: monomial_sort_key(ctx, item[0]),
        reverse=True,
    )
    pieces = []
    for position, (mono, coeff) in enumerate(items):
        body = _render_monomial(ctx, mono)
        mag = abs(coeff)
        if body and mag == 1:
            text = body
        elif body:
            text = f"{_render_coefficient(mag)}*{body}"
        else:
            text = _render_coefficient(mag)
        if position == 0:
            pieces.append(text if coeff > 0 else f"-{text}")
        else:
            pieces.append(f" + {text}" if coeff > 0 else f" - {text}")
    return "".join(pieces)
