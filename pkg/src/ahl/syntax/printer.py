"""Render ASTs back to concrete syntax.

Output is minimal-parenthesis but always re-parses to the same tree.
"""
from __future__ import annotations

from ahl.syntax import ast as A

# expression binding strength; larger binds tighter
_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6}
_ATOMIC = 9


def _expr_prec(e) -> int:
    if isinstance(e, A.BoolOp):
        return _PREC[e.op]
    if isinstance(e, A.Not):
        return _PREC["not"]
    if isinstance(e, A.Cmp):
        return _PREC["cmp"]
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.IntLit) and e.value < 0:
        return 7
    return _ATOMIC


def _wrap(text, cond):
    return f"({text})" if cond else text


def render_expr(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Lh):
        return f"lh({render_expr(e.list)})"
    if isinstance(e, A.El):
        return f"el({render_expr(e.index)}, {render_expr(e.list)})"
    if isinstance(e, A.Not):
        return "not " + _wrap(render_expr(e.arg), _expr_prec(e.arg) < _ATOMIC)
    if isinstance(e, A.Cmp):
        p = _PREC["cmp"]
        left = _wrap(render_expr(e.left), _expr_prec(e.left) <= p)
        right = _wrap(render_expr(e.right), _expr_prec(e.right) <= p)
        return f"{left} {e.op} {right}"
    if isinstance(e, (A.BinOp, A.BoolOp)):
        p = _PREC[e.op]
        left = _wrap(render_expr(e.left), _expr_prec(e.left) < p)
        right = _wrap(render_expr(e.right), _expr_prec(e.right) <= p)
        op = {"and": "&&", "or": "||"}.get(e.op, e.op)
        return f"{left} {op} {right}"
    raise TypeError(f"not an expression: {e!r}")


_APREC = {A.Implies: 1, A.Or: 2, A.And: 3, A.NotA: 4}


def _assert_prec(a) -> int:
    if isinstance(a, A.Quantifier):
        return 0
    return _APREC.get(type(a), _ATOMIC)


def _operand(a, needs_parens) -> str:
    text = render_assertion(a)
    return _wrap(text, needs_parens or isinstance(a, A.Quantifier))


def render_assertion(a: A.Assertion) -> str:
    if isinstance(a, A.TrueA):
        return "true"
    if isinstance(a, A.FalseA):
        return "false"
    if isinstance(a, A.Atom):
        return render_expr(a.expr)
    if isinstance(a, A.NotA):
        arg = a.arg
        return "!" + _operand(arg, _assert_prec(arg) < _ATOMIC
                              or (isinstance(arg, A.Atom) and _expr_prec(arg.expr) < _ATOMIC))
    if isinstance(a, (A.And, A.Or)):
        p = _assert_prec(a)
        op = "&&" if isinstance(a, A.And) else "||"
        left = _operand(a.left, _assert_prec(a.left) < p)
        right = _operand(a.right, _assert_prec(a.right) <= p)
        return f"{left} {op} {right}"
    if isinstance(a, A.Implies):
        left = _operand(a.left, _assert_prec(a.left) <= 1)
        right = _operand(a.right, _assert_prec(a.right) < 1)
        return f"{left} -> {right}"
    if isinstance(a, A.Quantifier):
        kw = "exists" if isinstance(a, A.ExistsLe) else "forall"
        bound = _wrap(render_expr(a.bound), _expr_prec(a.bound) <= _PREC["cmp"])
        return f"{kw} {a.var} <= {bound} . {render_assertion(a.body)}"
    raise TypeError(f"not an assertion: {a!r}")


def render_stmt(c: A.Stmt) -> str:
    if isinstance(c, A.Skip):
        return "skip"
    if isinstance(c, A.Assign):
        return f"{c.target} := {render_expr(c.value)}"
    if isinstance(c, A.Seq):
        first = render_stmt(c.first)
        if isinstance(c.first, A.Seq):
            first = "{ " + first + " }"
        return f"{first}; {render_stmt(c.second)}"
    if isinstance(c, A.If):
        return (f"if {render_expr(c.guard)} then {{ {render_stmt(c.then)} }}"
                f" else {{ {render_stmt(c.else_)} }}")
    if isinstance(c, A.While):
        head = ""
        if c.invariant is not None:
            head = f"invariant: {render_assertion(c.invariant)} "
        return f"{head}while {render_expr(c.guard)} do {{ {render_stmt(c.body)} }}"
    raise TypeError(f"not a statement: {c!r}")


def render(node) -> str:
    """Concrete syntax for a statement, expression or assertion."""
    if isinstance(node, A.STMT_TYPES):
        return render_stmt(node)
    if isinstance(node, A.EXPR_TYPES):
        return render_expr(node)
    if isinstance(node, A.ASSERTION_TYPES):
        return render_assertion(node)
    raise TypeError(f"cannot render {node!r}")
