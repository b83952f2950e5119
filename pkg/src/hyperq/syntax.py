"""Text syntax for all four logics: tokenizer, recursive-descent parser, printer.

Precedence, tightest first: ``! X F G``, ``U`` (right), ``&``, ``|``, ``->``
(right), ``<->`` (left).  Quantifier bodies extend as far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from hyperq.formula import (
    DISTINGUISHED, And, ArithQ, Atom, AxiomPlusTimes, Const, Eq, Eventually, Formula, Globally,
    Iff, Implies, Less, Logic, LogicError, Member, Next, Not, Or, PAtom, Plus, PropQ, SetQ,
    Times, TraceQ, Until, arith_order_of_name,
)


class ParseError(ValueError):
    def __init__(self, kind, msg, line, col):
        super().__init__(f"{line}:{col}: {kind} error: {msg}")
        self.kind = kind
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "op", "eof"
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><->|->|[!&|()\[\].<+*=])
""", re.VERBOSE)

TEMPORAL_WORDS = {"X": Next, "F": Eventually, "G": Globally}
TRACE_QUANT = {"exists": True, "forall": False}
PROP_QUANT = {"existsP": True, "forallP": False}
SET_QUANT = {"existsS": True, "forallS": False}
ARITH_QUANT = {f"{w}{k}": (w == "exists", k) for w in ("exists", "forall") for k in (1, 2, 3)}
KEYWORDS = (set(TRACE_QUANT) | set(PROP_QUANT) | set(SET_QUANT) | set(ARITH_QUANT)
            | {"in", "true", "false", "AXIOM_PLUS_TIMES"})
TEMPORAL_KEYWORDS = {"X", "F", "G", "U"}


def reserved(logic):
    return KEYWORDS | (set() if Logic(logic) == Logic.ARITH else TEMPORAL_KEYWORDS)


def tokenize(text):
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("lexical", f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("id", "op"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text, logic):
        self.logic = Logic(logic)
        self.toks = tokenize(text)
        self.i = 0
        self.scope = {}  # arithmetic variable -> order, for bound variables

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    def err(self, kind, msg, tok=None):
        tok = tok or self.tok
        return ParseError(kind, msg, tok.line, tok.col)

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            raise self.err("syntax", f"expected {text!r}, found {self._desc()}")
        return self.advance()

    def _desc(self):
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def name(self, what):
        t = self.tok
        # temporal letters are fine wherever a name is expected
        if t.kind != "id" or t.text in KEYWORDS:
            raise self.err("syntax", f"expected {what}, found {self._desc()}")
        return self.advance().text

    def allow(self, cls, tok):
        from hyperq.formula import ALLOWED

        if cls not in ALLOWED[self.logic]:
            raise self.err("logic", f"{cls.__name__} is not part of {self.logic.value}", tok)

    # -- grammar
    def parse(self):
        if self.tok.kind == "eof":
            raise self.err("syntax", "empty input")
        start = self.tok
        node = self.formula()
        if self.tok.kind != "eof":
            raise self.err("syntax", f"unexpected {self._desc()}")
        try:
            return Formula(self.logic, node)
        except LogicError as e:
            raise ParseError("logic", str(e), start.line, start.col) from None

    def formula(self):
        left = self.implication()
        while self.tok.text == "<->" and self.tok.kind == "op":
            t = self.advance()
            self.allow(Iff, t)
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.tok.text == "->" and self.tok.kind == "op":
            t = self.advance()
            self.allow(Implies, t)
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.tok.text == "|" and self.tok.kind == "op":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.until()
        while self.tok.text == "&" and self.tok.kind == "op":
            t = self.advance()
            self.allow(And, t)
            left = And(left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.logic != Logic.ARITH and self.tok.kind == "id" and self.tok.text == "U":
            t = self.advance()
            self.allow(Until, t)
            return Until(left, self.until())
        return left

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.text == "!":
            self.advance()
            return Not(self.unary())
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.formula()
            self.expect(")")
            return node
        if t.kind != "id":
            raise self.err("syntax", f"expected a formula, found {self._desc()}")
        w = t.text
        if self.logic != Logic.ARITH and w in TEMPORAL_WORDS and self.peek().text != "[":
            self.advance()
            cls = TEMPORAL_WORDS[w]
            self.allow(cls, t)
            return cls(self.unary())
        if w in TRACE_QUANT:
            return self.trace_quant()
        if w in PROP_QUANT:
            self.advance()
            self.allow(PropQ, t)
            q = self.name("proposition")
            self.expect(".")
            return PropQ(PROP_QUANT[w], q, self.formula())
        if w in SET_QUANT:
            self.advance()
            self.allow(SetQ, t)
            vt = self.tok
            x = self.name("set variable")
            if x in DISTINGUISHED:
                raise self.err("logic", f"{x} cannot be quantified", vt)
            self.expect(".")
            return SetQ(SET_QUANT[w], x, self.formula())
        if w in ARITH_QUANT:
            self.advance()
            self.allow(ArithQ, t)
            exists, order = ARITH_QUANT[w]
            y = self.name("variable")
            self.expect(".")
            saved = self.scope
            self.scope = {**saved, y: order}
            body = self.formula()
            self.scope = saved
            return ArithQ(exists, order, y, body)
        if w in ("true", "false"):
            self.advance()
            return Const(w == "true")
        if w == "AXIOM_PLUS_TIMES":
            self.advance()
            self.allow(AxiomPlusTimes, t)
            return AxiomPlusTimes()
        if self.logic == Logic.ARITH:
            return self.arith_atom()
        name = self.name("atom")
        if self.tok.text == "[" and self.tok.kind == "op":
            self.advance()
            var = self.name("trace variable")
            self.expect("]")
            return Atom(name, var)
        self.allow(PAtom, t)
        return PAtom(name)

    def trace_quant(self):
        t = self.advance()
        self.allow(TraceQ, t)
        var = self.name("trace variable")
        domain = None
        if self.tok.kind == "id" and self.tok.text == "in":
            it = self.advance()
            if self.logic != Logic.H2L:
                raise self.err("logic", "membership quantifiers only exist in h2l", it)
            domain = self.name("set variable")
        elif self.logic == Logic.H2L:
            raise self.err("logic", "h2l trace quantifiers need 'in <set>'")
        self.expect(".")
        return TraceQ(TRACE_QUANT[t.text], var, self.formula(), domain)

    def arith_atom(self):
        a = self.name("variable")
        t = self.tok
        if t.text == "<":
            self.advance()
            return Less(a, self.name("variable"))
        if t.text == "=":
            self.advance()
            return Eq(a, self.name("variable"))
        if t.text in ("+", "*"):
            self.advance()
            b = self.name("variable")
            self.expect("=")
            c = self.name("variable")
            return (Plus if t.text == "+" else Times)(a, b, c)
        if t.kind == "id" and t.text == "in":
            self.advance()
            container = self.name("variable")
            order = self.scope.get(a) or arith_order_of_name(a)
            if order not in (1, 2):
                raise self.err("logic", f"{a} has order {order}; only orders 1 and 2 can be members", t)
            return Member(a, container, order)
        raise self.err("syntax", f"expected an arithmetic atom after {a!r}, found {self._desc()}")


def parse(text, logic):
    """Parse ``text`` as a formula of ``logic``; raises :class:`ParseError`."""
    return _Parser(text, logic).parse()


_HEADER = re.compile(r"^\s*#\s*logic\s*:\s*(\S+)", re.MULTILINE)


def header_logic(text):
    m = _HEADER.search(text)
    return m.group(1) if m else None


def parse_file_text(text, logic=None):
    """Parse ``.hq`` file contents; ``logic`` overrides the ``#logic:`` header."""
    tag = logic or header_logic(text)
    if tag is None:
        raise ParseError("syntax", "no logic given and no '#logic:' header", 1, 1)
    try:
        lg = Logic(tag)
    except ValueError:
        raise ParseError("syntax", f"unknown logic {tag!r}", 1, 1) from None
    return parse(text, lg)


def load(path, logic=None):
    with open(path, encoding="utf-8") as fh:
        return parse_file_text(fh.read(), logic)


# -- printing ---------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Until: 5}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&", Until: "U"}
_RIGHT = {Implies, Until}
_QUANTS = (TraceQ, PropQ, SetQ, ArithQ)
_UNARY = {Not: "!", Next: "X ", Eventually: "F ", Globally: "G "}


def _prec(n):
    if isinstance(n, _QUANTS):
        return 0
    if type(n) in _PREC:
        return _PREC[type(n)]
    return 7


def _pr(n):
    if isinstance(n, Const):
        return "true" if n.value else "false"
    if isinstance(n, Atom):
        return f"{n.prop}[{n.var}]"
    if isinstance(n, PAtom):
        return n.prop
    if isinstance(n, AxiomPlusTimes):
        return "AXIOM_PLUS_TIMES"
    if isinstance(n, Less):
        return f"{n.left} < {n.right}"
    if isinstance(n, Eq):
        return f"{n.left} = {n.right}"
    if isinstance(n, Plus):
        return f"{n.a} + {n.b} = {n.c}"
    if isinstance(n, Times):
        return f"{n.a} * {n.b} = {n.c}"
    if isinstance(n, Member):
        return f"{n.elem} in {n.container}"
    if type(n) in _UNARY:
        inner = _pr(n.arg)
        # arithmetic atoms are infix, so they also need parentheses
        if _prec(n.arg) < 7 or isinstance(n.arg, (Less, Eq, Plus, Times, Member)):
            inner = f"({inner})"
        return _UNARY[type(n)] + inner
    if type(n) in _PREC:
        p = _PREC[type(n)]
        l, r = _pr(n.left), _pr(n.right)
        lp, rp = _prec(n.left), _prec(n.right)
        right_assoc = type(n) in _RIGHT
        if lp < p or (lp == p and right_assoc):
            l = f"({l})"
        if rp < p or (rp == p and not right_assoc):
            r = f"({r})"
        return f"{l} {_SYM[type(n)]} {r}"
    if isinstance(n, TraceQ):
        kw = "exists" if n.exists else "forall"
        dom = f" in {n.domain}" if n.domain is not None else ""
        return f"{kw} {n.var}{dom} . {_pr(n.body)}"
    if isinstance(n, PropQ):
        return f"{'existsP' if n.exists else 'forallP'} {n.prop} . {_pr(n.body)}"
    if isinstance(n, SetQ):
        return f"{'existsS' if n.exists else 'forallS'} {n.var} . {_pr(n.body)}"
    if isinstance(n, ArithQ):
        return f"{'exists' if n.exists else 'forall'}{n.order} {n.var} . {_pr(n.body)}"
    raise TypeError(type(n).__name__)


def print_formula(f):
    """Canonical text of a formula (or bare node)."""
    return _pr(f.root if isinstance(f, Formula) else f)


def format_file(f, comment=None):
    lines = [f"#logic: {f.logic.value}"]
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(print_formula(f))
    return "\n".join(lines) + "\n"
