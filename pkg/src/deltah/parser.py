"""Lexer and recursive-descent parser for the concrete syntax.

Grammar (``--`` starts a line comment)::

    program ::= decl* [command]
    decl    ::= "def" ident "=" expr ";" | "type" ident "=" type ";"
    command ::= expr | "blame"
    expr    ::= "fun" x ":" type "." expr | "mu" f ":" type "." expr
              | "if" expr "then" expr "else" expr | app
    app     ::= prefix atom*
    prefix  ::= ("succ" | "pred" | "iszero" | "proj1" | "proj2") prefix | atom
    atom    ::= digits | "true" | "false" | ident | "(" expr ")"
              | "(" expr ":" type "=>" type ")" | "<" expr "," expr ">"
              | "<|" ... "|>"                     (run-time forms, traces only)
    type    ::= wedge ["->" type]
    wedge   ::= tatom ["/\\" wedge]
    tatom   ::= "nat" | "bool" | ident | "(" type ")" | "{" x ":" type "|" expr "}"

Identifiers bound by ``def``/``type`` are expanded in place when they occur
free, so parsed terms never mention definitions by name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    BLAME,
    FALSE,
    NAT,
    BOOL,
    TRUE,
    Abs,
    Active,
    App,
    Arrow,
    Cast,
    Delayed,
    Fix,
    If,
    IsZero,
    Pair,
    Pred,
    Proj,
    Refine,
    Succ,
    Var,
    Waiting,
    Wedge,
    is_value,
    numeral,
)

KEYWORDS = {
    "fun", "mu", "if", "then", "else", "succ", "pred", "iszero", "true", "false",
    "proj1", "proj2", "nat", "bool", "def", "type", "blame",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>==>|<\||\|>|->|=>|/\\|[<>(){}|:.,;?=])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, kind: str = "syntax"):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.kind = kind


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tok_text = m.group()
            if kind == "ident" and tok_text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, tok_text, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class Defs:
    """Named closed expressions and type aliases available to the parser."""

    exprs: dict = field(default_factory=dict)
    types: dict = field(default_factory=dict)

    def merged(self, other: "Defs") -> "Defs":
        return Defs({**self.exprs, **other.exprs}, {**self.types, **other.types})


@dataclass
class Program:
    defs: Defs
    main: object | None  # Expr, BLAME, or None for declaration-only files


class _Parser:
    def __init__(self, text: str, defs: Defs | None, allow_runtime: bool):
        self.toks = tokenize(text)
        self.i = 0
        self.defs = Defs(dict(defs.exprs), dict(defs.types)) if defs else Defs()
        self.local = Defs()
        self.allow_runtime = allow_runtime
        self.scope: list[str] = []

    # -- token helpers ---------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("sym", "kw")

    def error(self, msg, tok=None, kind="syntax"):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col, kind)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def bind(self, x, parse):
        self.scope.append(x)
        try:
            return parse()
        finally:
            self.scope.pop()

    # -- program ---------------------------------------------------------
    def program(self) -> Program:
        while self.at("def") or self.at("type"):
            self.decl()
        main = None
        if self.tok.kind != "eof":
            main = self.command()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after end of term")
        return Program(self.local, main)

    def decl(self):
        kw = self.tok.text
        self.i += 1
        name = self.ident()
        self.expect("=")
        if kw == "def":
            value = self.expr()
            self.defs.exprs[name] = value
            self.local.exprs[name] = value
        else:
            value = self.type_()
            self.defs.types[name] = value
            self.local.types[name] = value
        self.expect(";")

    def command(self):
        if self.at("blame"):
            self.i += 1
            return BLAME
        return self.expr()

    # -- expressions -----------------------------------------------------
    def expr(self):
        if self.at("fun") or self.at("mu"):
            kw = self.tok.text
            self.i += 1
            x = self.ident()
            self.expect(":")
            ann = self.type_()
            self.expect(".")
            body = self.bind(x, self.expr)
            return Abs(x, ann, body) if kw == "fun" else Fix(x, ann, body)
        if self.at("if"):
            self.i += 1
            c = self.expr()
            self.expect("then")
            t = self.expr()
            self.expect("else")
            e = self.expr()
            return If(c, t, e)
        return self.app()

    def app(self):
        e = self.prefix()
        while self.starts_atom():
            e = App(e, self.atom())
        return e

    def prefix(self):
        t = self.tok
        if t.kind == "kw" and t.text in ("succ", "pred", "iszero", "proj1", "proj2"):
            self.i += 1
            arg = self.prefix()
            match t.text:
                case "succ":
                    return Succ(arg)
                case "pred":
                    return Pred(arg)
                case "iszero":
                    return IsZero(arg)
                case "proj1":
                    return Proj(1, arg)
                case "proj2":
                    return Proj(2, arg)
        return self.atom()

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("num", "ident"):
            return True
        if t.kind == "kw":
            return t.text in ("true", "false")
        return t.kind == "sym" and t.text in ("(", "<", "<|")

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return numeral(int(t.text))
        if t.kind == "ident":
            self.i += 1
            return self.resolve(t)
        if self.at("true"):
            self.i += 1
            return TRUE
        if self.at("false"):
            self.i += 1
            return FALSE
        if self.at("("):
            self.i += 1
            e = self.expr()
            if self.at(":"):
                self.i += 1
                src = self.type_()
                self.expect("=>")
                tgt = self.type_()
                self.expect(")")
                return Cast(e, src, tgt)
            self.expect(")")
            return e
        if self.at("<"):
            self.i += 1
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(">")
            return Pair(left, right)
        if self.at("<|"):
            return self.runtime_form()
        raise self.error(f"expected an expression, found {t.text or 'end of input'!r}")

    def resolve(self, tok: Token):
        name = tok.text
        if name in self.scope or name not in self.defs.exprs:
            return Var(name)
        return self.defs.exprs[name]

    def runtime_form(self):
        start = self.tok
        if not self.allow_runtime:
            raise self.error(
                "run-time check forms cannot appear in source programs",
                start,
                kind="runtime-form-in-source",
            )
        self.i += 1
        first = self.expr()
        if self.at(":"):
            self.i += 1
            src = self.type_()
            self.expect("=>")
            tgt = self.type_()
            self.expect("|>")
            if not isinstance(tgt, Arrow) or not is_value(first):
                raise self.error("delayed check needs a value and an arrow target", start)
            return Delayed(first, src, tgt)
        if self.at("?"):
            self.i += 1
            tgt = self.refinement(start)
            self.expect("|>")
            return Waiting(first, tgt)
        if self.at("==>"):
            self.i += 1
            subject = self.expr()
            self.expect(":")
            tgt = self.refinement(start)
            self.expect("|>")
            if not is_value(subject):
                raise self.error("active check needs a value subject", start)
            return Active(first, subject, tgt)
        raise self.error("expected ':', '?' or '==>' in run-time check form")

    def refinement(self, start):
        t = self.tatom()
        if not isinstance(t, Refine):
            raise self.error("expected a refinement type", start)
        return t

    # -- types -----------------------------------------------------------
    def type_(self):
        left = self.wedge()
        if self.at("->"):
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def wedge(self):
        left = self.tatom()
        if self.at("/\\"):
            self.i += 1
            return Wedge(left, self.wedge())
        return left

    def tatom(self):
        t = self.tok
        if self.at("nat"):
            self.i += 1
            return NAT
        if self.at("bool"):
            self.i += 1
            return BOOL
        if t.kind == "ident":
            self.i += 1
            if t.text not in self.defs.types:
                raise self.error(f"unknown type name {t.text!r}", t)
            return self.defs.types[t.text]
        if self.at("("):
            self.i += 1
            ty = self.type_()
            self.expect(")")
            return ty
        if self.at("{"):
            self.i += 1
            x = self.ident()
            self.expect(":")
            base = self.type_()
            self.expect("|")
            pred = self.bind(x, self.expr)
            self.expect("}")
            return Refine(x, base, pred)
        raise self.error(f"expected a type, found {t.text or 'end of input'!r}")


def parse_program(text: str, defs: Defs | None = None, allow_runtime: bool = False) -> Program:
    return _Parser(text, defs, allow_runtime).program()


def parse(text: str, defs: Defs | None = None, allow_runtime: bool = False):
    """Parse a single command (an expression or ``blame``)."""
    prog = parse_program(text, defs, allow_runtime)
    if prog.main is None:
        raise ParseError("expected a term", 1, 1)
    return prog.main


def parse_type(text: str, defs: Defs | None = None):
    p = _Parser(text, defs, allow_runtime=False)
    t = p.type_()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after type")
    return t
