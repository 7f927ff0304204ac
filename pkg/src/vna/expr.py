"""A small linear notation for weighted algebras and their free products.

    expr := alg ("*" alg)*
    alg  := term ("(+)" term)*
    term := atom ("(x)" atom)*
    atom := [name "="] leaf | "(" expr ")" | "@" path
    leaf := "M(" rats ")" | "C(" rat ")" | "LF(" param ";" rat ")" | "LZ(" rat ")"
          | "T(" rats ";" rat ")" | "B(" [rats] ";" rat [";" rat] ")"
          | "HT[" profile {"|" profile} ";" rat "]"
    profile := rats ":" (int | "inf")

``B(h1,..;λ)`` has total mass 1 (tail first term ``(1 - Σh)(1 - λ)``); a third
field gives the first tail weight explicitly.  A ``name=`` prefix labels the
summand (``e=M(3/5,2/5)``); labels name projections in reports.  ``⊕``, ``⊗``
and ``∗`` are accepted as synonyms of ``(+)``, ``(x)`` and ``*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .algmodel import (
    Algebra,
    ArakiWoods,
    FreeGroupFactor,
    HyperfiniteTensor,
    MatrixBlock,
    Param,
    TypeIInfinite,
)
from .errors import ParseError
from .numlat import RatioGroup


@dataclass(frozen=True)
class Leaf:
    algebra: Algebra


@dataclass(frozen=True)
class FileRef:
    path: str


@dataclass(frozen=True)
class FreeProduct:
    operands: tuple


@dataclass(frozen=True)
class DirectSum:
    operands: tuple


@dataclass(frozen=True)
class TensorProduct:
    left: object
    right: object


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<oplus>\(\+\)|⊕)
  | (?P<otimes>\(x\)|⊗)
  | (?P<star>\*|∗)
  | (?P<label>[A-Za-z_][A-Za-z0-9_']*=)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<head>HT\[|LF\(|LZ\(|M\(|C\(|T\(|B\()
  | (?P<file>@[^\s()\[\]*,;]+)
  | (?P<word>inf|∞|\?)
  | (?P<punct>[()\[\],;:|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for k, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line, line_start = line + 1, k + 1
        else:
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{msg}, found {found}", tok.line, tok.col)

    def take(self, text=None, kind=None) -> _Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            self.fail(f"expected {text!r}" if text else f"expected {kind}")
        self.i += 1
        return t

    def at(self, text) -> bool:
        return self.tok.text == text

    # grammar -----------------------------------------------------------------

    def expr(self):
        ops = [self.alg()]
        while self.tok.kind == "star":
            self.i += 1
            ops.append(self.alg())
        return ops[0] if len(ops) == 1 else FreeProduct(tuple(ops))

    def alg(self):
        ops = [self.term()]
        while self.tok.kind == "oplus":
            self.i += 1
            ops.append(self.term())
        return ops[0] if len(ops) == 1 else DirectSum(tuple(ops))

    def term(self):
        node = self.atom()
        while self.tok.kind == "otimes":
            self.i += 1
            node = TensorProduct(node, self.atom())
        return node

    def rat(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            self.fail("expected a rational")
        self.i += 1
        p, _, q = t.text.partition("/")
        if q and int(q) == 0:
            raise ParseError("zero denominator", t.line, t.col)
        return Fraction(int(p), int(q or 1))

    def rats(self) -> list[Fraction]:
        out = [self.rat()]
        while self.at(","):
            self.i += 1
            out.append(self.rat())
        return out

    def atom(self):
        t = self.tok
        if t.kind == "file":
            self.i += 1
            return FileRef(t.text[1:])
        label = None
        if t.kind == "label":
            label = t.text[:-1]
            self.i += 1
            t = self.tok
            if t.kind != "head":
                self.fail("expected an algebra term after a label")
        elif t.text == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        if t.kind != "head":
            self.fail("expected an algebra term")
        self.i += 1
        head = t.text[:-1]
        if head == "HT":
            s = self.hyperfinite()
            self.take("]")
        else:
            s = getattr(self, "_" + head)(t)
            self.take(")")
        if label is not None:
            s = replace(s, label=label)
        return Leaf(Algebra((s,)))

    def _M(self, t):
        return MatrixBlock(tuple(self.rats()))

    def _C(self, t):
        return MatrixBlock((self.rat(),))

    def _LZ(self, t):
        return FreeGroupFactor(Fraction(1), self.rat())

    def _LF(self, t):
        p = self.tok
        if p.kind == "word":
            self.i += 1
            param = Param.UNKNOWN if p.text == "?" else Param.INFINITE
        else:
            param = self.rat()
        self.take(";")
        return FreeGroupFactor(param, self.rat())

    def _T(self, t):
        gens = self.rats()
        self.take(";")
        return ArakiWoods(RatioGroup.generate(gens), self.rat())

    def _B(self, t):
        head = [] if self.at(";") else self.rats()
        self.take(";")
        lam_tok = self.tok
        lam = self.rat()
        if not 0 < lam < 1:
            raise ParseError("tail ratio must lie in (0, 1)", lam_tok.line, lam_tok.col)
        if self.at(";"):
            self.i += 1
            first = self.rat()
        else:
            rest = 1 - sum(head, Fraction(0))
            if rest <= 0:
                raise ParseError("head weights leave no mass for the tail", t.line, t.col)
            first = rest * (1 - lam)
        return TypeIInfinite(tuple(head), lam, first)

    def hyperfinite(self):
        facs = [self.profile()]
        while self.at("|"):
            self.i += 1
            facs.append(self.profile())
        self.take(";")
        return HyperfiniteTensor(tuple(facs), self.rat())

    def profile(self):
        prof = tuple(self.rats())
        self.take(":")
        m = self.tok
        if m.text in ("inf", "∞"):
            self.i += 1
            return prof, Param.INFINITE
        if m.kind == "num" and "/" not in m.text:
            self.i += 1
            return prof, int(m.text)
        self.fail("expected a multiplicity (integer or inf)")


def parse(text: str):
    """Parse ``text`` into an expression tree; raises ParseError with line/column."""
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return node
