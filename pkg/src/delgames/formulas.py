"""LTLK formulas: AST, parser, printer, fragment classification.

Derived operators (``&``, ``->``, ``F``, ``G``, ``false``) are expanded at
construction time, so every evaluator only has to handle the core
constructors below.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class TurnIs(Formula):
    agent: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    sub: Formula


TRUE = Top()
FALSE = Not(TRUE)


def And(left, right):
    return Not(Or(Not(left), Not(right)))


def Implies(left, right):
    return Or(Not(left), right)


def Finally(sub):
    return Until(TRUE, sub)


def Globally(sub):
    return Not(Until(TRUE, Not(sub)))


def conj(parts):
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


class Fragment(enum.IntEnum):
    PROP = 0
    EL = 1
    LTLK_NoX_NoKTemporal = 2
    LTLK = 3


def children(phi):
    if isinstance(phi, (Not, Next)):
        return (phi.sub,)
    if isinstance(phi, Know):
        return (phi.sub,)
    if isinstance(phi, (Or, Until)):
        return (phi.left, phi.right)
    return ()


def subformulas(phi):
    """All subformulas, children before parents."""
    out = []
    seen = set()

    def walk(f):
        if f in seen:
            return
        for c in children(f):
            walk(c)
        seen.add(f)
        out.append(f)

    walk(phi)
    return out


@lru_cache(maxsize=None)
def _flags(phi):
    # (has K, has X, has U, temporal strictly under some K)
    if isinstance(phi, (Top, Atom, TurnIs)):
        return (False, False, False, False)
    if isinstance(phi, Know):
        k, x, u, tk = _flags(phi.sub)
        return (True, x, u, tk or x or u)
    flags = [_flags(c) for c in children(phi)]
    k = any(f[0] for f in flags)
    x = any(f[1] for f in flags) or isinstance(phi, Next)
    u = any(f[2] for f in flags) or isinstance(phi, Until)
    tk = any(f[3] for f in flags)
    return (k, x, u, tk)


def classify(phi: Formula) -> Fragment:
    k, x, u, tk = _flags(phi)
    if not (k or x or u):
        return Fragment.PROP
    if not (x or u):
        return Fragment.EL
    if not x and not tk:
        return Fragment.LTLK_NoX_NoKTemporal
    return Fragment.LTLK


def is_state_formula(phi):
    return classify(phi) <= Fragment.EL


@lru_cache(maxsize=None)
def size(phi: Formula) -> int:
    return 1 + sum(size(c) for c in children(phi))


def atoms(phi):
    return frozenset(f.name for f in subformulas(phi) if isinstance(f, Atom))


def agents_in(phi):
    return frozenset(f.agent for f in subformulas(phi)
                     if isinstance(f, (Know, TurnIs)))


def has_turn_atoms(phi):
    return any(isinstance(f, TurnIs) for f in subformulas(phi))


# ---------------------------------------------------------------- parsing

RESERVED = frozenset({"true", "false", "X", "U", "F", "G", "K", "turn"})

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<arrow>->)
  | (?P<know>K\s*\[\s*(?P<kagent>[A-Za-z][A-Za-z0-9_]*)\s*\])
  | (?P<turn>turn\s*=\s*(?P<tagent>[A-Za-z][A-Za-z0-9_]*))
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>[!&|()])
""", re.VERBOSE)


class FormulaSyntaxError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}",
                                     *_position(text, pos))
        if m.group("know"):
            tokens.append(("K", m.group("kagent"), pos))
        elif m.group("turn"):
            tokens.append(("TURN", m.group("tagent"), pos))
        elif m.group("arrow"):
            tokens.append(("->", "->", pos))
        elif m.group("ident"):
            word = m.group("ident")
            if word in ("X", "U", "F", "G", "true", "false"):
                tokens.append((word, word, pos))
            elif word in ("K", "turn"):
                raise FormulaSyntaxError(f"malformed {word!r} operator",
                                         *_position(text, pos))
            else:
                tokens.append(("ATOM", word, pos))
        elif m.group("sym"):
            tokens.append((m.group("sym"), m.group("sym"), pos))
        pos = m.end()
    tokens.append(("EOF", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, agents):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.agents = None if agents is None else frozenset(agents)

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.tokens[self.i]
        raise FormulaSyntaxError(message, *_position(self.text, tok[2]))

    def expect(self, kind):
        if self.peek() != kind:
            self.fail(f"expected {kind!r}")
        return self.take()

    def check_agent(self, name, tok):
        if self.agents is not None and name not in self.agents:
            self.fail(f"unknown agent {name!r}", tok)

    def parse(self):
        if self.peek() == "EOF":
            self.fail("empty formula")
        phi = self.implication()
        if self.peek() != "EOF":
            self.fail(f"unexpected token {self.tokens[self.i][1]!r}")
        return phi

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.until()
        while self.peek() == "&":
            self.take()
            left = And(left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        return left

    def unary(self):
        kind = self.peek()
        tok = self.tokens[self.i]
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind == "X":
            self.take()
            return Next(self.unary())
        if kind == "F":
            self.take()
            return Finally(self.unary())
        if kind == "G":
            self.take()
            return Globally(self.unary())
        if kind == "K":
            self.take()
            self.check_agent(tok[1], tok)
            return Know(tok[1], self.unary())
        return self.primary()

    def primary(self):
        tok = self.take()
        kind = tok[0]
        if kind == "(":
            phi = self.implication()
            self.expect(")")
            return phi
        if kind == "true":
            return TRUE
        if kind == "false":
            return FALSE
        if kind == "ATOM":
            return Atom(tok[1])
        if kind == "TURN":
            self.check_agent(tok[1], tok)
            return TurnIs(tok[1])
        self.i -= 1
        self.fail("expected a formula" if kind != "EOF" else "unexpected end of input")


def parse_formula(text: str, agents=None) -> Formula:
    """Parse the ASCII syntax. ``agents``, if given, restricts K[..] and turn=.. names."""
    return _Parser(text, agents).parse()


# ---------------------------------------------------------------- printing

def to_text(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, TurnIs):
        return f"turn={phi.agent}"
    if isinstance(phi, Not):
        sub = phi.sub
        if isinstance(sub, Top):
            return "false"
        if (isinstance(sub, Until) and isinstance(sub.left, Top)
                and isinstance(sub.right, Not)):
            return f"G {to_text(sub.right.sub)}"
        if isinstance(sub, Or) and isinstance(sub.left, Not) and isinstance(sub.right, Not):
            return f"({to_text(sub.left.sub)} & {to_text(sub.right.sub)})"
        return f"!{to_text(sub)}"
    if isinstance(phi, Or):
        return f"({to_text(phi.left)} | {to_text(phi.right)})"
    if isinstance(phi, Until):
        if isinstance(phi.left, Top):
            return f"F {to_text(phi.right)}"
        return f"({to_text(phi.left)} U {to_text(phi.right)})"
    if isinstance(phi, Next):
        return f"X {to_text(phi.sub)}"
    if isinstance(phi, Know):
        return f"K[{phi.agent}] {to_text(phi.sub)}"
    raise TypeError(f"not a formula: {phi!r}")
