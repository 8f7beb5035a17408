"""Lexer and recursive-descent parser for ``.ahl`` sources.

Grammar (informal)::

    file      := section*
    section   := 'domains' ':' decl* | 'pre' ':' assertion
               | 'post' ':' assertion | 'program' ':' stmts
    decl      := IDENT 'in' range | IDENT 'in' 'bool'
               | IDENT 'in' 'list' '(' 'maxlen' '=' INT ',' range ')'
               | 'statecap' '=' INT
    stmts     := stmt (';' stmt)* [';']
    stmt      := 'skip' | IDENT ':=' expr | '{' stmts '}'
               | 'if' expr 'then' block ['else' block]
               | ['invariant' ':' assertion] 'while' expr 'do' block

Branches and loop bodies must be braced, so ``if B then {S} else {T}; U``
has exactly one reading.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ahl.domains import BoolDom, FiniteDomain, IntRange, ListDom, DEFAULT_STATE_CAP
from ahl.errors import AhlSyntaxError, DuplicateDeclaration
from ahl.syntax import ast as A
from ahl.syntax.sorts import check_assertion, check_stmt, check_expr

KEYWORDS = frozenset("""
    skip if then else while do true false not and or exists forall lh el
    in bool list maxlen statecap domains pre post program invariant
""".split())

SECTIONS = ("domains", "pre", "post", "program")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>:=|==|!=|<=|>=|&&|\|\||->|\.\.|[<>+\-*(){};,.!:=\[\]])
""", re.VERBOSE)

_WORD_OPS = {"and": "&&", "or": "||", "not": "!"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'int' | 'ident' | 'kw' | 'op' | 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise AhlSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind, text = m.lastgroup, m.group()
        col = pos - line_start + 1
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        elif kind == "ident" and text in KEYWORDS:
            if text in _WORD_OPS:
                tokens.append(Token("op", _WORD_OPS[text], line, col))
            else:
                tokens.append(Token("kw", text, line, col))
        else:
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# tokens that may continue an expression after a parenthesised group
_EXPR_CONTINUE = frozenset(["+", "-", "*", "==", "!=", "<", "<=", ">", ">="])


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.pos = 0

    # -- token plumbing ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text, kind=None) -> bool:
        t = self.tok
        return t.text == text and t.kind in ((kind,) if kind else ("op", "kw"))

    def accept(self, text) -> Optional[Token]:
        if self.at(text):
            t = self.tok
            self.pos += 1
            return t
        return None

    def expect(self, text) -> Token:
        t = self.accept(text)
        if t is None:
            self.fail(f"expected {text!r}")
        return t

    def expect_ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.fail("expected an identifier")
        self.pos += 1
        return t

    def expect_int(self) -> int:
        neg = self.accept("-") is not None
        t = self.tok
        if t.kind != "int":
            self.fail("expected an integer")
        self.pos += 1
        return -int(t.text) if neg else int(t.text)

    def fail(self, message):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise AhlSyntaxError(f"{message}, found {found}", t.line, t.col)

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input")

    # -- expressions ---------------------------------------------------------

    def expr(self) -> A.Expr:
        left = self.and_expr()
        while self.at("||"):
            t = self.tok
            self.pos += 1
            left = A.BoolOp("or", left, self.and_expr(), loc=(t.line, t.col))
        return left

    def and_expr(self) -> A.Expr:
        left = self.not_expr()
        while self.at("&&"):
            t = self.tok
            self.pos += 1
            left = A.BoolOp("and", left, self.not_expr(), loc=(t.line, t.col))
        return left

    def not_expr(self) -> A.Expr:
        t = self.accept("!")
        if t:
            return A.Not(self.not_expr(), loc=(t.line, t.col))
        return self.cmp_expr()

    def cmp_expr(self) -> A.Expr:
        left = self.add_expr()
        t = self.tok
        if t.kind == "op" and t.text in A.CMP_OPS:
            self.pos += 1
            right = self.add_expr()
            if self.tok.kind == "op" and self.tok.text in A.CMP_OPS:
                self.fail("comparisons do not chain; add parentheses")
            return A.Cmp(t.text, left, right, loc=(t.line, t.col))
        return left

    def add_expr(self) -> A.Expr:
        left = self.mul_expr()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            t = self.tok
            self.pos += 1
            left = A.BinOp(t.text, left, self.mul_expr(), loc=(t.line, t.col))
        return left

    def mul_expr(self) -> A.Expr:
        left = self.unary()
        while self.at("*"):
            t = self.tok
            self.pos += 1
            left = A.BinOp("*", left, self.unary(), loc=(t.line, t.col))
        return left

    def unary(self) -> A.Expr:
        t = self.accept("-")
        if t is None:
            return self.primary()
        loc = (t.line, t.col)
        if self.tok.kind == "int":
            value = int(self.tok.text)
            self.pos += 1
            return A.IntLit(-value, loc=loc)
        return A.BinOp("-", A.IntLit(0), self.unary(), loc=loc)

    def primary(self) -> A.Expr:
        t = self.tok
        loc = (t.line, t.col)
        if t.kind == "int":
            self.pos += 1
            return A.IntLit(int(t.text), loc=loc)
        if t.kind == "ident":
            self.pos += 1
            return A.Var(t.text, loc=loc)
        if self.accept("true"):
            return A.BoolLit(True, loc=loc)
        if self.accept("false"):
            return A.BoolLit(False, loc=loc)
        if self.accept("lh"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.Lh(e, loc=loc)
        if self.accept("el"):
            self.expect("(")
            i = self.expr()
            self.expect(",")
            lst = self.expr()
            self.expect(")")
            return A.El(i, lst, loc=loc)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected an expression")

    # -- assertions ----------------------------------------------------------

    def assertion(self) -> A.Assertion:
        left = self.disj()
        t = self.accept("->")
        if t:
            return A.Implies(left, self.assertion(), loc=(t.line, t.col))
        return left

    def disj(self) -> A.Assertion:
        left = self.conj()
        while self.at("||"):
            t = self.tok
            self.pos += 1
            left = A.Or(left, self.conj(), loc=(t.line, t.col))
        return left

    def conj(self) -> A.Assertion:
        left = self.neg()
        while self.at("&&"):
            t = self.tok
            self.pos += 1
            left = A.And(left, self.neg(), loc=(t.line, t.col))
        return left

    def neg(self) -> A.Assertion:
        t = self.accept("!")
        if t:
            return A.NotA(self.neg(), loc=(t.line, t.col))
        if self.at("exists") or self.at("forall"):
            return self.quantifier()
        return self.atomic()

    def quantifier(self) -> A.Assertion:
        t = self.tok
        self.pos += 1
        var = self.expect_ident().text
        self.expect("<=")
        bound = self.add_expr()
        self.expect(".")
        body = self.assertion()
        ctor = A.ExistsLe if t.text == "exists" else A.ForallLe
        return ctor(var, bound, body, loc=(t.line, t.col))

    def atomic(self) -> A.Assertion:
        t = self.tok
        if self.at("("):
            # a parenthesised assertion, unless the group is an operand of a
            # larger expression such as ``(dk == ck2) == true``
            saved = self.pos
            self.pos += 1
            try:
                inner = self.assertion()
                self.expect(")")
            except AhlSyntaxError:
                inner = None
            if inner is not None and not (self.tok.kind == "op" and self.tok.text in _EXPR_CONTINUE):
                return inner
            self.pos = saved
        return A.atom(self.cmp_expr(), loc=(t.line, t.col))

    # -- statements ----------------------------------------------------------

    def stmts(self) -> A.Stmt:
        items = [self.stmt()]
        while self.accept(";"):
            if self._stmt_ends():
                break
            items.append(self.stmt())
        return A.seq(*items)

    def _stmt_ends(self) -> bool:
        t = self.tok
        return t.kind == "eof" or self.at("}") or (self._at_section())

    def _at_section(self) -> bool:
        return self.tok.kind == "kw" and self.tok.text in SECTIONS and self.peek().text == ":"

    def block(self) -> A.Stmt:
        self.expect("{")
        if self.accept("}"):
            self.fail("empty block; write { skip }")
        body = self.stmts()
        self.expect("}")
        return body

    def stmt(self) -> A.Stmt:
        t = self.tok
        loc = (t.line, t.col)
        if self.accept("skip"):
            return A.Skip(loc=loc)
        if t.kind == "ident":
            self.pos += 1
            self.expect(":=")
            return A.Assign(t.text, self.expr(), loc=loc)
        if self.at("{"):
            return self.block()
        if self.accept("if"):
            guard = self.expr()
            self.expect("then")
            then = self.block()
            else_ = self.block() if self.accept("else") else A.Skip()
            return A.If(guard, then, else_, loc=loc)
        inv = None
        if self.accept("invariant"):
            self.expect(":")
            inv = self.assertion()
            t = self.tok
            loc = (t.line, t.col)
            if not self.at("while"):
                self.fail("an invariant must be followed by a while loop")
        if self.accept("while"):
            guard = self.expr()
            self.expect("do")
            body = self.block()
            return A.While(guard, body, inv, loc=loc)
        self.fail("expected a statement")

    # -- .ahl files ----------------------------------------------------------

    def domain_block(self):
        decls, cap = [], DEFAULT_STATE_CAP
        seen = set()
        while True:
            if self.accept("statecap"):
                self.expect("=")
                cap = self.expect_int()
                continue
            if self.tok.kind != "ident":
                break
            name = self.expect_ident()
            if name.text in seen:
                raise DuplicateDeclaration(
                    f"variable {name.text!r} declared twice", name.text, (name.line, name.col))
            seen.add(name.text)
            self.expect("in")
            decls.append((name.text, self.var_domain()))
        return FiniteDomain(tuple(decls), cap)

    def var_domain(self):
        if self.accept("bool"):
            return BoolDom()
        if self.accept("list"):
            self.expect("(")
            self.expect("maxlen")
            self.expect("=")
            n = self.expect_int()
            self.expect(",")
            elem = self.int_range()
            self.expect(")")
            return ListDom(n, elem)
        return self.int_range()

    def int_range(self):
        lo = self.expect_int()
        self.expect("..")
        hi = self.expect_int()
        return IntRange(lo, hi)


@dataclass
class Program:
    """Contents of a parsed ``.ahl`` source."""

    stmt: A.Stmt
    env: dict
    domain: Optional[FiniteDomain] = None
    pre: Optional[A.Assertion] = None
    post: Optional[A.Assertion] = None


def parse_expr(source: str, env: Optional[dict] = None) -> A.Expr:
    p = Parser(source)
    e = p.expr()
    p.expect_eof()
    if env is not None:
        check_expr(e, env)
    return e


def parse_assertion(source: str, env: Optional[dict] = None) -> A.Assertion:
    p = Parser(source)
    a = p.assertion()
    p.expect_eof()
    if env is not None:
        check_assertion(a, env)
    return a


def parse_stmt(source: str, env: Optional[dict] = None) -> A.Stmt:
    p = Parser(source)
    s = p.stmts()
    p.expect_eof()
    if env is not None:
        check_stmt(s, env)
    return s


def parse_program(source: str) -> Program:
    """Parse an ``.ahl`` file, or a bare statement.

    With a ``domains:`` section the program and its annotations are sort
    checked against the declared variables; bare statements are returned
    unchecked with an empty environment.
    """
    p = Parser(source)
    if not p._at_section():
        stmt = p.stmts()
        p.expect_eof()
        return Program(stmt, {})

    parts = {}
    while p.tok.kind != "eof":
        if not p._at_section():
            p.fail("expected a section header (domains:, pre:, post:, program:)")
        head = p.tok
        if head.text in parts:
            raise AhlSyntaxError(f"section {head.text!r} given twice", head.line, head.col)
        p.pos += 2
        if head.text == "domains":
            parts["domains"] = p.domain_block()
        elif head.text in ("pre", "post"):
            parts[head.text] = p.assertion()
        else:
            parts["program"] = p.stmts()
    if "program" not in parts:
        raise AhlSyntaxError("missing program: section")

    domain = parts.get("domains")
    env = domain.env() if domain is not None else {}
    prog = Program(parts["program"], env, domain, parts.get("pre"), parts.get("post"))
    if domain is not None:
        check_stmt(prog.stmt, env)
        for a in (prog.pre, prog.post):
            if a is not None:
                check_assertion(a, env)
    return prog


def parse_file(path) -> Program:
    with open(path, encoding="utf-8") as f:
        return parse_program(f.read())
