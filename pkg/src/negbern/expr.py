"""A tiny recursive-descent parser for CLI function expressions.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          right associative
    atom    := number | var | func '(' expr ')' | '(' expr ')'
    var     := 's' | 's' digits
    func    := exp | log | sqrt | sin | cos

Evaluation is vectorized over (m, n) point arrays, real or complex.
"""

import re

import numpy as np

from .handles import FunctionHandle

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\S))")
FUNCS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt, "sin": np.sin, "cos": np.cos}


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex)
        kind = ("num", "name", "op")[m.lastindex - 1]
        out.append((kind, m.group(m.lastindex), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = set()

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, val, pos = self.take()
        if val != op or kind != "op":
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[1] in "+-" and self.peek()[0] == "op":
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return ("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return ("num", float(val))
        if kind == "name":
            if val in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg)
            m = re.fullmatch(r"s(\d*)", val)
            if m:
                idx = int(m.group(1)) if m.group(1) else 0
                if m.group(1) and idx < 1:
                    raise ParseError(f"variable index must be >= 1 in {val!r}", pos)
                self.vars.add(idx)
                return ("var", idx)
            raise ParseError(f"unknown name {val!r}", pos)
        if (kind, val) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_tree(text):
    p = _Parser(text)
    tree = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    if 0 in p.vars and len(p.vars) > 1:
        raise ParseError("cannot mix 's' with indexed variables", 0)
    arity = max(max(p.vars, default=1), 1)
    return tree, arity


def _eval(node, x):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        return x[:, max(node[1], 1) - 1]
    if tag == "neg":
        return -_eval(node[1], x)
    if tag == "call":
        return FUNCS[node[1]](_eval(node[2], x))
    a, b = _eval(node[1], x), _eval(node[2], x)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    if tag == "/":
        return a / b
    if isinstance(b, float) and b == int(b):
        return a ** int(b)
    return a**b


def parse_expression(text):
    """Handle for a formula in s (one variable) or s1..sn; arity is the highest index."""
    tree, arity = parse_tree(text)

    def run(x):
        with np.errstate(all="ignore"):
            return np.broadcast_to(_eval(tree, x), (x.shape[0],)).copy()

    return FunctionHandle(arity, run, run, {"expr": text})
