"""Parser for rational-map shorthand such as ``"z^3 - 3z"`` or ``"(z^2+1)/(z-(0.5+1i))"``.

Grammar::

    ratio  := expr ['/' expr]
    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*
    factor := number | imag | 'z' | '(' expr ')' , each optionally '^' int

Returns coefficient arrays, lowest degree first.
"""
from __future__ import annotations

import re

import numpy as np
from numpy.polynomial import polynomial as P

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)([ij])?|([ij])|(z)|(\^)|(\*)|(/)|(\+)|(-)|(\()|(\)))")


class MapSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise MapSyntaxError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        num, imag_suffix, lone_i, z, *ops = m.groups()
        if num is not None:
            val = complex(0, float(num)) if imag_suffix else complex(float(num))
            out.append(("num", val))
        elif lone_i:
            out.append(("num", 1j))
        elif z:
            out.append(("z", None))
        else:
            sym = next(o for o in ops if o)
            out.append((sym, None))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens):
        self.t = tokens
        self.i = 0

    def peek(self):
        return self.t[self.i][0] if self.i < len(self.t) else None

    def take(self, kind=None):
        if self.i >= len(self.t):
            raise MapSyntaxError("unexpected end of map expression")
        tok = self.t[self.i]
        if kind and tok[0] != kind:
            raise MapSyntaxError(f"expected {kind!r}, found {tok[0]!r}")
        self.i += 1
        return tok

    def expr(self):
        sign = 1.0
        if self.peek() in ("+", "-"):
            sign = -1.0 if self.take()[0] == "-" else 1.0
        acc = sign * self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = P.polyadd(acc, rhs if op == "+" else -rhs)
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() in ("num", "z", "(", "*"):
            if self.peek() == "*":
                self.take()
            acc = P.polymul(acc, self.factor())
        return acc

    def factor(self):
        kind = self.peek()
        if kind == "num":
            base = np.array([self.take()[1]])
        elif kind == "z":
            self.take()
            base = np.array([0, 1], dtype=complex)
        elif kind == "(":
            self.take()
            base = self.expr()
            self.take(")")
        else:
            raise MapSyntaxError(f"unexpected token {kind!r}")
        if self.peek() == "^":
            self.take()
            tok = self.take("num")[1]
            if tok.imag or tok.real != int(tok.real) or tok.real < 0:
                raise MapSyntaxError("exponent must be a non-negative integer")
            base = P.polypow(base, int(tok.real))
        return np.asarray(base, dtype=complex)


def parse_map(text: str) -> tuple:
    """Parse ``text`` into ``(numerator, denominator)`` coefficient arrays."""
    tokens = _tokenize(text)
    if not tokens:
        raise MapSyntaxError("empty map expression")
    p = _Parser(tokens)
    num = p.expr()
    den = np.array([1.0 + 0j])
    if p.peek() == "/":
        p.take()
        den = p.expr()
    if p.peek() is not None:
        raise MapSyntaxError(f"trailing input after position {p.i} in {text!r}")
    return num, den
