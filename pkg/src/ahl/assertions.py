"""Assertion evaluation, substitution, state enumeration and implication checks.

Assertions are two-valued.  An atom whose expression cannot be evaluated (for
instance ``el(i, L)`` with ``i`` outside ``1..lh(L)``) is false, and a
quantifier whose bound cannot be evaluated ranges over nothing.  Every such
event is counted so checkers can report it; pass ``strict=True`` to raise
:class:`EvaluationError` instead.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ahl.domains import FiniteDomain
from ahl.errors import DomainError, EvaluationError, SortError
from ahl.semantics import SORT_MISMATCH, compile_expr
from ahl.syntax import ast as A
from ahl.syntax.sorts import check_expr


@dataclass
class Tally:
    """Collects evaluation errors met while evaluating assertions."""

    errors: list = field(default_factory=list)

    def note(self, err):
        self.errors.append(err)


class _Compiler:
    """Turns an assertion into a function of the state."""

    def __init__(self, strict, tally):
        self.strict = strict
        self.tally = tally

    def _failed(self, err):
        if self.strict:
            raise err
        if self.tally is not None:
            self.tally.note(err)

    def expr(self, e):
        """Return f(s) -> (value, ok); errors are noted and give ok=False."""
        f = compile_expr(e)

        def run(s):
            try:
                return f(s), True
            except EvaluationError as err:
                self._failed(err)
                return None, False
        return run

    def assertion(self, a):
        if isinstance(a, A.TrueA):
            return lambda s: True
        if isinstance(a, A.FalseA):
            return lambda s: False
        if isinstance(a, A.Atom):
            f = self.expr(a.expr)

            def atom(s):
                v, ok = f(s)
                if ok and type(v) is not bool:
                    self._failed(EvaluationError(SORT_MISMATCH, f"atom evaluated to {v!r}", a.loc))
                    return False
                return ok and v
            return atom
        if isinstance(a, A.NotA):
            f = self.assertion(a.arg)
            return lambda s: not f(s)
        if isinstance(a, (A.And, A.Or, A.Implies)):
            # both sides are always evaluated so that every error is seen
            f, g = self.assertion(a.left), self.assertion(a.right)
            if isinstance(a, A.And):
                return lambda s: f(s) & g(s)
            if isinstance(a, A.Or):
                return lambda s: f(s) | g(s)
            return lambda s: (not f(s)) | g(s)
        if isinstance(a, A.Quantifier):
            bound, body, var = self.expr(a.bound), self.assertion(a.body), a.var
            combine = any if isinstance(a, A.ExistsLe) else all

            def quantifier(s):
                n, ok = bound(s)
                if not ok:
                    n = 0
                return combine([body({**s, var: j}) for j in range(1, n + 1)])
            return quantifier
        raise TypeError(f"not an assertion: {a!r}")


def eval_assertion(a: A.Assertion, s: dict, strict: bool = False, tally: Tally | None = None) -> bool:
    """Truth value of ``a`` in state ``s``.

    ``exists j <= E . P`` holds iff ``P`` holds for some ``j`` in ``1..E``.
    """
    return _Compiler(strict, tally).assertion(a)(s)


def predicate(a: A.Assertion, strict: bool = False, tally: Tally | None = None):
    """``a`` compiled once, for evaluation in many states."""
    return _Compiler(strict, tally).assertion(a)


# -- substitution ------------------------------------------------------------


def subst_expr(e: A.Expr, v: str, r: A.Expr) -> A.Expr:
    if isinstance(e, A.Var):
        return r if e.name == v else e
    if isinstance(e, (A.IntLit, A.BoolLit)):
        return e
    if isinstance(e, (A.BinOp, A.Cmp, A.BoolOp)):
        return type(e)(e.op, subst_expr(e.left, v, r), subst_expr(e.right, v, r), loc=e.loc)
    if isinstance(e, A.Not):
        return A.Not(subst_expr(e.arg, v, r), loc=e.loc)
    if isinstance(e, A.Lh):
        return A.Lh(subst_expr(e.list, v, r), loc=e.loc)
    if isinstance(e, A.El):
        return A.El(subst_expr(e.index, v, r), subst_expr(e.list, v, r), loc=e.loc)
    raise TypeError(f"not an expression: {e!r}")


def _fresh(base, avoid):
    for n in itertools.count(1):
        name = f"{base}{n}"
        if name not in avoid:
            return name


def _subst(a, v, r, r_free):
    if isinstance(a, (A.TrueA, A.FalseA)):
        return a
    if isinstance(a, A.Atom):
        return A.atom(subst_expr(a.expr, v, r), loc=a.loc)
    if isinstance(a, (A.And, A.Or, A.Implies)):
        return type(a)(_subst(a.left, v, r, r_free), _subst(a.right, v, r, r_free), loc=a.loc)
    if isinstance(a, A.NotA):
        return A.NotA(_subst(a.arg, v, r, r_free), loc=a.loc)
    if isinstance(a, A.Quantifier):
        bound = subst_expr(a.bound, v, r)
        if a.var == v:
            return type(a)(a.var, bound, a.body, loc=a.loc)
        var, body = a.var, a.body
        if var in r_free:
            var = _fresh(a.var, r_free | A.free_vars(body))
            body = _subst(body, a.var, A.Var(var), frozenset([var]))
        return type(a)(var, bound, _subst(body, v, r, r_free), loc=a.loc)
    raise TypeError(f"not an assertion: {a!r}")


def substitute(a: A.Assertion, v: str, e: A.Expr, env: dict | None = None) -> A.Assertion:
    """``a[e/v]``: replace the free occurrences of ``v`` by ``e``.

    Bound variables that would capture a free variable of ``e`` are renamed.
    With ``env`` the sorts of ``v`` and ``e`` are checked to agree.
    """
    if env is not None:
        if v not in env:
            raise SortError(f"undeclared variable {v!r}", v)
        sort = check_expr(e, env)
        if sort != env[v]:
            raise SortError(f"cannot substitute {sort} for {v!r} of sort {env[v]}", v)
    return _subst(a, v, e, A.free_vars(e))


# -- finite domains ----------------------------------------------------------


def enumerate_states(dom: FiniteDomain, env: dict | None = None) -> Iterator[dict]:
    """All states of ``dom``, each exactly once, in a fixed order.

    The first declared variable varies slowest; values ascend, lists go by
    length then lexicographically.
    """
    if env is not None:
        _check_env(dom, env)
    dom.check_cap()
    names = dom.names
    for values in itertools.product(*dom.value_lists):
        yield dict(zip(names, values))


def _check_env(dom, env):
    declared = dom.env()
    for name, sort in env.items():
        if name not in declared:
            raise DomainError(f"no domain declared for {name!r}")
        if declared[name] != sort:
            raise DomainError(f"domain of {name!r} is {declared[name]}, variable is {sort}")


@dataclass(frozen=True)
class Obligation:
    """A side condition ``hypothesis -> conclusion`` to be discharged."""

    hypothesis: A.Assertion
    conclusion: A.Assertion
    origin: str = ""

    def as_assertion(self):
        return A.Implies(self.hypothesis, self.conclusion)


@dataclass
class ImplicationResult:
    valid: bool
    counterexample: Optional[dict] = None
    states: int = 0
    undefined_states: int = 0
    assertion_error: Optional[str] = None

    @property
    def verdict(self):
        return "valid" if self.valid else "invalid"


def check_implication(ob: Obligation, dom: FiniteDomain, env: dict | None = None,
                      strict: bool = False) -> ImplicationResult:
    """Check ``ob`` in every state of ``dom``.

    Returns the first counterexample in enumeration order.  In strict mode an
    evaluation error fails the check at that state.
    """
    tally = Tally()
    hyp = predicate(ob.hypothesis, strict, tally)
    con = predicate(ob.conclusion, strict, tally)
    n = undefined = 0
    for s in enumerate_states(dom, env):
        n += 1
        before = len(tally.errors)
        try:
            ok = (not hyp(s)) or con(s)
        except EvaluationError as err:
            return ImplicationResult(False, s, n, undefined, assertion_error=str(err))
        if len(tally.errors) != before:
            undefined += 1
        if not ok:
            return ImplicationResult(False, s, n, undefined)
    return ImplicationResult(True, None, n, undefined)
