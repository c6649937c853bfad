"""Tiny recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("+" | "-") factor | atom (("^" | "**") INT)?
    atom   := INT | NAME | "(" expr ")"

Names are looked up in a mapping of ring elements; arithmetic is performed
with the elements' own operators. Division is only by integer constants and
goes through ``ring.div_int``, so it fails unless the integer is a unit.
"""

from __future__ import annotations

import re

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class ExpressionError(ValueError):
    pass


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionError(f"unexpected character at {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def parse_expression(text: str, names: dict, ring):
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        value = term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term():
        value = factor()
        while peek() in (("op", "*"), ("op", "/")):
            _, op = take()
            rhs = factor()
            if op == "*":
                value = value * rhs
            else:
                if not isinstance(rhs, int):
                    raise ExpressionError("division is only by integer constants")
                value = ring.div_int(ring(value) if isinstance(value, int) else value, rhs)
        return value

    def factor():
        if peek() == ("op", "-"):
            take()
            return -factor()
        if peek() == ("op", "+"):
            take()
            return factor()
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, e = take()
            if kind != "num":
                raise ExpressionError("exponent must be a nonnegative integer")
            base = base ** e
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return val
        if kind == "name":
            if val not in names:
                raise ExpressionError(f"unknown name {val!r}")
            return names[val]
        if (kind, val) == ("op", "("):
            value = expr()
            if take() != ("op", ")"):
                raise ExpressionError("missing ')'")
            return value
        raise ExpressionError(f"unexpected token {val!r}")

    if not tokens:
        raise ExpressionError("empty expression")
    value = expr()
    if pos != len(tokens):
        raise ExpressionError(f"trailing input in {text!r}")
    return value
