"""Sort checking against a declared environment (identifier -> int|bool|list)."""
from __future__ import annotations

from ahl.domains import BOOL, INT, LIST
from ahl.errors import SortError
from ahl.syntax import ast as A


def _binders(a, acc=None) -> set:
    acc = set() if acc is None else acc
    if isinstance(a, A.Quantifier):
        acc.add(a.var)
        _binders(a.body, acc)
    elif isinstance(a, (A.And, A.Or, A.Implies)):
        _binders(a.left, acc)
        _binders(a.right, acc)
    elif isinstance(a, A.NotA):
        _binders(a.arg, acc)
    return acc


def check_expr(e: A.Expr, env: dict, logical: dict | None = None, binders=frozenset()) -> str:
    """Return the sort of ``e`` or raise :class:`SortError`."""
    logical = logical or {}
    if isinstance(e, A.IntLit):
        return INT
    if isinstance(e, A.BoolLit):
        return BOOL
    if isinstance(e, A.Var):
        if e.name in logical:
            return logical[e.name]
        if e.name in env:
            return env[e.name]
        if e.name in binders:
            raise SortError(f"logical variable {e.name!r} used outside its binder", e.name, e.loc)
        raise SortError(f"undeclared variable {e.name!r}", e.name, e.loc)

    def sub(x):
        return check_expr(x, env, logical, binders)

    def want(x, sort, what):
        got = sub(x)
        if got != sort:
            raise SortError(f"{what} must be {sort}, got {got}", _name_of(x), x.loc or e.loc)

    if isinstance(e, A.BinOp):
        want(e.left, INT, f"operand of {e.op}")
        want(e.right, INT, f"operand of {e.op}")
        return INT
    if isinstance(e, A.Cmp):
        left = sub(e.left)
        if e.op in ("==", "!="):
            want(e.right, left, f"right operand of {e.op}")
        else:
            want(e.left, INT, f"operand of {e.op}")
            want(e.right, INT, f"operand of {e.op}")
        return BOOL
    if isinstance(e, A.BoolOp):
        want(e.left, BOOL, f"operand of {e.op}")
        want(e.right, BOOL, f"operand of {e.op}")
        return BOOL
    if isinstance(e, A.Not):
        want(e.arg, BOOL, "operand of not")
        return BOOL
    if isinstance(e, A.Lh):
        want(e.list, LIST, "argument of lh")
        return INT
    if isinstance(e, A.El):
        want(e.index, INT, "index of el")
        want(e.list, LIST, "list argument of el")
        return INT
    raise TypeError(f"not an expression: {e!r}")


def _name_of(e):
    return e.name if isinstance(e, A.Var) else None


def check_assertion(a: A.Assertion, env: dict, logical: dict | None = None, binders=None):
    if binders is None:
        binders = frozenset(_binders(a))
    logical = logical or {}
    if isinstance(a, (A.TrueA, A.FalseA)):
        return
    if isinstance(a, A.Atom):
        sort = check_expr(a.expr, env, logical, binders)
        if sort != BOOL:
            raise SortError(f"assertion atom must be bool, got {sort}", _name_of(a.expr), a.loc)
        return
    if isinstance(a, (A.And, A.Or, A.Implies)):
        check_assertion(a.left, env, logical, binders)
        check_assertion(a.right, env, logical, binders)
        return
    if isinstance(a, A.NotA):
        check_assertion(a.arg, env, logical, binders)
        return
    if isinstance(a, A.Quantifier):
        if a.var in env:
            raise SortError(
                f"bound variable {a.var!r} clashes with a program variable", a.var, a.loc)
        sort = check_expr(a.bound, env, logical, binders)
        if sort != INT:
            raise SortError(f"quantifier bound must be int, got {sort}", a.var, a.loc)
        check_assertion(a.body, env, {**logical, a.var: INT}, binders)
        return
    raise TypeError(f"not an assertion: {a!r}")


def check_stmt(c: A.Stmt, env: dict):
    if isinstance(c, A.Skip):
        return
    if isinstance(c, A.Assign):
        if c.target not in env:
            raise SortError(f"assignment to undeclared variable {c.target!r}", c.target, c.loc)
        sort = check_expr(c.value, env)
        if sort != env[c.target]:
            raise SortError(
                f"cannot assign {sort} to {c.target!r} of sort {env[c.target]}", c.target, c.loc)
        return
    if isinstance(c, A.Seq):
        check_stmt(c.first, env)
        check_stmt(c.second, env)
        return
    if isinstance(c, (A.If, A.While)):
        if check_expr(c.guard, env) != BOOL:
            raise SortError("guard must be bool", _name_of(c.guard), c.loc)
        if isinstance(c, A.If):
            check_stmt(c.then, env)
            check_stmt(c.else_, env)
        else:
            if c.invariant is not None:
                check_assertion(c.invariant, env)
            check_stmt(c.body, env)
        return
    raise TypeError(f"not a statement: {c!r}")
