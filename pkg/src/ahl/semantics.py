"""Big-step interpreter with an explicit fuel bound.

Values are plain Python objects: ``int``, ``bool`` and ``tuple`` of ints for
lists.  A state is a ``dict`` from variable name to value; execution never
mutates its input state.

Fuel is charged one unit per statement node entered and one unit per loop
guard test, so a terminating run with fuel ``f`` terminates identically with
any larger fuel.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from ahl.errors import EvaluationError
from ahl.syntax import ast as A

INDEX_OUT_OF_RANGE = "index_out_of_range"
SORT_MISMATCH = "sort_mismatch"

DEFAULT_FUEL = 10_000


def _is_int(v):
    return type(v) is int


def _want_int(v, e):
    if not _is_int(v):
        raise EvaluationError(SORT_MISMATCH, f"expected an int, got {v!r}", e.loc)
    return v


def _want_bool(v, e):
    if type(v) is not bool:
        raise EvaluationError(SORT_MISMATCH, f"expected a bool, got {v!r}", e.loc)
    return v


def _want_list(v, e):
    if type(v) is not tuple:
        raise EvaluationError(SORT_MISMATCH, f"expected a list, got {v!r}", e.loc)
    return v


def eval_expr(e: A.Expr, s: dict):
    """Evaluate ``e`` in state ``s``.

    Raises :class:`EvaluationError` for ``el`` out of range or a value of the
    wrong sort.
    """
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.BoolLit):
        return e.value
    if isinstance(e, A.Var):
        try:
            return s[e.name]
        except KeyError:
            raise EvaluationError(SORT_MISMATCH, f"variable {e.name!r} not in state", e.loc) from None
    if isinstance(e, A.BinOp):
        x = _want_int(eval_expr(e.left, s), e.left)
        y = _want_int(eval_expr(e.right, s), e.right)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        return x * y
    if isinstance(e, A.Cmp):
        x = eval_expr(e.left, s)
        y = eval_expr(e.right, s)
        if e.op in ("==", "!="):
            if type(x) is not type(y):
                raise EvaluationError(SORT_MISMATCH, f"cannot compare {x!r} with {y!r}", e.loc)
            return (x == y) if e.op == "==" else (x != y)
        _want_int(x, e.left)
        _want_int(y, e.right)
        return {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[e.op]
    if isinstance(e, A.BoolOp):
        # both sides are evaluated; expressions have no short-circuit
        x = _want_bool(eval_expr(e.left, s), e.left)
        y = _want_bool(eval_expr(e.right, s), e.right)
        return (x and y) if e.op == "and" else (x or y)
    if isinstance(e, A.Not):
        return not _want_bool(eval_expr(e.arg, s), e.arg)
    if isinstance(e, A.Lh):
        return len(_want_list(eval_expr(e.list, s), e.list))
    if isinstance(e, A.El):
        i = _want_int(eval_expr(e.index, s), e.index)
        lst = _want_list(eval_expr(e.list, s), e.list)
        if not 1 <= i <= len(lst):
            raise EvaluationError(
                INDEX_OUT_OF_RANGE, f"el({i}, L) with lh(L) = {len(lst)}", e.loc)
        return lst[i - 1]
    raise TypeError(f"not an expression: {e!r}")


def compile_expr(e: A.Expr):
    """``e`` as a function of the state, equivalent to ``eval_expr(e, s)``.

    Used where one expression is evaluated in many states.
    """
    if isinstance(e, (A.IntLit, A.BoolLit)):
        v = e.value
        return lambda s: v
    if isinstance(e, A.Var):
        name, loc = e.name, e.loc

        def var(s):
            try:
                return s[name]
            except KeyError:
                raise EvaluationError(SORT_MISMATCH, f"variable {name!r} not in state", loc) from None
        return var
    if isinstance(e, A.BinOp):
        f, g, l, r = compile_expr(e.left), compile_expr(e.right), e.left, e.right
        op = {"+": int.__add__, "-": int.__sub__, "*": int.__mul__}[e.op]

        def arith(s):
            x, y = f(s), g(s)
            if type(x) is not int:
                _want_int(x, l)
            if type(y) is not int:
                _want_int(y, r)
            return op(x, y)
        return arith
    if isinstance(e, A.Cmp):
        f, g = compile_expr(e.left), compile_expr(e.right)
        if e.op in ("==", "!="):
            eq = e.op == "=="
            if isinstance(e.left, A.Var) and isinstance(e.right, (A.IntLit, A.BoolLit)):
                # the common ``v == literal`` shape, without the generic dispatch
                name, lit, kind = e.left.name, e.right.value, type(e.right.value)

                def var_literal(s):
                    x = s[name] if name in s else f(s)
                    if type(x) is not kind:
                        raise EvaluationError(SORT_MISMATCH, f"cannot compare {x!r} with {lit!r}", e.loc)
                    return (x == lit) == eq
                return var_literal

            def equal(s):
                x, y = f(s), g(s)
                if type(x) is not type(y):
                    raise EvaluationError(SORT_MISMATCH, f"cannot compare {x!r} with {y!r}", e.loc)
                return (x == y) == eq
            return equal
        op = {"<": int.__lt__, "<=": int.__le__, ">": int.__gt__, ">=": int.__ge__}[e.op]

        def order(s):
            x, y = f(s), g(s)
            return op(_want_int(x, e.left), _want_int(y, e.right))
        return order
    if isinstance(e, A.BoolOp):
        f, g = compile_expr(e.left), compile_expr(e.right)
        conj = e.op == "and"

        def boolop(s):
            x = _want_bool(f(s), e.left)
            y = _want_bool(g(s), e.right)
            return (x and y) if conj else (x or y)
        return boolop
    if isinstance(e, A.Not):
        f = compile_expr(e.arg)
        return lambda s: not _want_bool(f(s), e.arg)
    if isinstance(e, A.Lh):
        f = compile_expr(e.list)
        return lambda s: len(_want_list(f(s), e.list))
    if isinstance(e, A.El):
        fi, fl = compile_expr(e.index), compile_expr(e.list)

        def el(s):
            i = _want_int(fi(s), e.index)
            lst = _want_list(fl(s), e.list)
            if not 1 <= i <= len(lst):
                raise EvaluationError(
                    INDEX_OUT_OF_RANGE, f"el({i}, L) with lh(L) = {len(lst)}", e.loc)
            return lst[i - 1]
        return el
    raise TypeError(f"not an expression: {e!r}")


# -- execution outcomes ------------------------------------------------------


@dataclass(frozen=True)
class Terminated:
    final: dict
    fuel_used: int = 0

    def __eq__(self, other):
        return isinstance(other, Terminated) and self.final == other.final

    def __hash__(self):
        return hash(tuple(sorted(self.final.items())))


@dataclass(frozen=True)
class FuelExhausted:
    fuel: int

    def __eq__(self, other):
        return isinstance(other, FuelExhausted)

    def __hash__(self):
        return hash(FuelExhausted)


@dataclass(frozen=True)
class Failed:
    """The run stopped on an evaluation error; there is no final state."""

    kind: str
    message: str
    at: Optional[tuple] = None


ExecOutcome = Union[Terminated, FuelExhausted, Failed]


class _OutOfFuel(Exception):
    pass


class _Machine:
    def __init__(self, fuel):
        self.fuel = fuel
        self.used = 0

    def tick(self):
        if self.used >= self.fuel:
            raise _OutOfFuel
        self.used += 1

    def run(self, c, s):
        self.tick()
        if isinstance(c, A.Skip):
            return s
        if isinstance(c, A.Assign):
            v = eval_expr(c.value, s)
            s = dict(s)
            s[c.target] = v
            return s
        if isinstance(c, A.Seq):
            return self.run(c.second, self.run(c.first, s))
        if isinstance(c, A.If):
            if _want_bool(eval_expr(c.guard, s), c.guard):
                return self.run(c.then, s)
            return self.run(c.else_, s)
        if isinstance(c, A.While):
            while True:
                self.tick()
                if not _want_bool(eval_expr(c.guard, s), c.guard):
                    return s
                s = self.run(c.body, s)
        raise TypeError(f"not a statement: {c!r}")


def exec_stmt(c: A.Stmt, s: dict, fuel: int = DEFAULT_FUEL) -> ExecOutcome:
    """Run ``c`` from ``s`` within ``fuel`` steps."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    m = _Machine(fuel)
    try:
        final = m.run(c, s)
    except _OutOfFuel:
        return FuelExhausted(fuel)
    except EvaluationError as err:
        return Failed(err.kind, str(err), err.loc)
    return Terminated(final, m.used)


class Termination(enum.Enum):
    YES = "yes"
    NO_WITHIN_FUEL = "no_within_fuel"
    ERROR = "error"


def terminates(c: A.Stmt, s: dict, fuel: int = DEFAULT_FUEL) -> Termination:
    out = exec_stmt(c, s, fuel)
    if isinstance(out, Terminated):
        return Termination.YES
    if isinstance(out, FuelExhausted):
        return Termination.NO_WITHIN_FUEL
    return Termination.ERROR
