"""Abstract syntax of the While language and of the assertion language.

All nodes are frozen dataclasses.  Source locations are carried in ``loc`` but
are excluded from equality and hashing, so two trees are equal exactly when
they are structurally identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

Loc = Optional[Tuple[int, int]]

ARITH_OPS = ("+", "-", "*")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or")


def _loc():
    return field(default=None, compare=False, repr=False)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    loc: Loc = _loc()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    loc: Loc = _loc()


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class BoolOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Not:
    arg: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Lh:
    list: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class El:
    index: "Expr"
    list: "Expr"
    loc: Loc = _loc()


Expr = Union[IntLit, BoolLit, Var, BinOp, Cmp, BoolOp, Not, Lh, El]


# -- assertions --------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """A bool-sorted expression used as an assertion.

    Build atoms through :func:`atom`, which never leaves a boolean connective
    or literal at the top of the wrapped expression.
    """

    expr: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class TrueA:
    loc: Loc = _loc()


@dataclass(frozen=True)
class FalseA:
    loc: Loc = _loc()


@dataclass(frozen=True)
class And:
    left: "Assertion"
    right: "Assertion"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Or:
    left: "Assertion"
    right: "Assertion"
    loc: Loc = _loc()


@dataclass(frozen=True)
class NotA:
    arg: "Assertion"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Implies:
    left: "Assertion"
    right: "Assertion"
    loc: Loc = _loc()


@dataclass(frozen=True)
class ExistsLe:
    var: str
    bound: Expr
    body: "Assertion"
    loc: Loc = _loc()


@dataclass(frozen=True)
class ForallLe:
    var: str
    bound: Expr
    body: "Assertion"
    loc: Loc = _loc()


Assertion = Union[Atom, TrueA, FalseA, And, Or, NotA, Implies, ExistsLe, ForallLe]
Quantifier = (ExistsLe, ForallLe)


def atom(e: Expr, loc: Loc = None) -> Assertion:
    """Wrap a bool-sorted expression as an assertion.

    Boolean connectives and literals at the top of ``e`` are lifted to the
    corresponding assertion connectives.  The lifting preserves meaning and
    keeps printed assertions re-parsable to the same tree.
    """
    if isinstance(e, BoolLit):
        return TrueA(loc=loc) if e.value else FalseA(loc=loc)
    if isinstance(e, Not):
        return NotA(atom(e.arg), loc=loc)
    if isinstance(e, BoolOp):
        ctor = And if e.op == "and" else Or
        return ctor(atom(e.left), atom(e.right), loc=loc)
    return Atom(e, loc=loc)


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    loc: Loc = _loc()


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"
    loc: Loc = _loc()


@dataclass(frozen=True)
class If:
    guard: Expr
    then: "Stmt"
    else_: "Stmt"
    loc: Loc = _loc()


@dataclass(frozen=True)
class While:
    guard: Expr
    body: "Stmt"
    invariant: Optional[Assertion] = None
    loc: Loc = _loc()


Stmt = Union[Skip, Assign, Seq, If, While]

EXPR_TYPES = (IntLit, BoolLit, Var, BinOp, Cmp, BoolOp, Not, Lh, El)
ASSERTION_TYPES = (Atom, TrueA, FalseA, And, Or, NotA, Implies, ExistsLe, ForallLe)
STMT_TYPES = (Skip, Assign, Seq, If, While)


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence of one or more statements."""
    if not stmts:
        return Skip()
    result = stmts[-1]
    for s in reversed(stmts[:-1]):
        result = Seq(s, result)
    return result


def free_vars(node) -> frozenset:
    """Free identifiers of an expression or assertion."""
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, (IntLit, BoolLit, TrueA, FalseA)):
        return frozenset()
    if isinstance(node, (BinOp, Cmp, BoolOp, And, Or, Implies)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, (Not, NotA)):
        return free_vars(node.arg)
    if isinstance(node, Lh):
        return free_vars(node.list)
    if isinstance(node, El):
        return free_vars(node.index) | free_vars(node.list)
    if isinstance(node, Atom):
        return free_vars(node.expr)
    if isinstance(node, Quantifier):
        return free_vars(node.bound) | (free_vars(node.body) - {node.var})
    raise TypeError(f"not an expression or assertion: {node!r}")


def has_loop(c: Stmt) -> bool:
    if isinstance(c, While):
        return True
    if isinstance(c, Seq):
        return has_loop(c.first) or has_loop(c.second)
    if isinstance(c, If):
        return has_loop(c.then) or has_loop(c.else_)
    return False


def assigned_vars(c: Stmt) -> frozenset:
    if isinstance(c, Assign):
        return frozenset([c.target])
    if isinstance(c, Seq):
        return assigned_vars(c.first) | assigned_vars(c.second)
    if isinstance(c, If):
        return assigned_vars(c.then) | assigned_vars(c.else_)
    if isinstance(c, While):
        return assigned_vars(c.body)
    return frozenset()


def strip_invariants(c: Stmt) -> Stmt:
    """``c`` with every loop annotation removed; annotations carry no meaning."""
    if isinstance(c, Seq):
        return Seq(strip_invariants(c.first), strip_invariants(c.second), loc=c.loc)
    if isinstance(c, If):
        return If(c.guard, strip_invariants(c.then), strip_invariants(c.else_), loc=c.loc)
    if isinstance(c, While):
        return While(c.guard, strip_invariants(c.body), None, loc=c.loc)
    return c
