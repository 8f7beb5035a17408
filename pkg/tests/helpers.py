"""Random programs, assertions and domains for the property and acceptance tests."""
from __future__ import annotations

from pathlib import Path

from ahl.domains import FiniteDomain, IntRange
from ahl.syntax import ast as A
from ahl.transformers import StateSet, sp_semantic
from ahl.vcgen import vcgen

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
CORPUS_FILES = sorted(CORPUS.glob("*.ahl"))

VARS = ("x", "y", "z")


def small_domain(names=VARS, hi=2) -> FiniteDomain:
    return FiniteDomain.of({n: IntRange(0, hi) for n in names})


def var_or_const(rng, names, hi=2):
    if rng.random() < 0.6:
        return A.Var(rng.choice(names))
    return A.IntLit(rng.randint(0, hi))


def int_expr(rng, names, depth=2):
    if depth <= 0 or rng.random() < 0.4:
        return var_or_const(rng, names)
    op = rng.choice(A.ARITH_OPS)
    return A.BinOp(op, int_expr(rng, names, depth - 1), int_expr(rng, names, depth - 1))


def bool_expr(rng, names, depth=2):
    r = rng.random()
    if depth <= 0 or r < 0.5:
        if rng.random() < 0.1:
            return A.BoolLit(rng.random() < 0.5)
        return A.Cmp(rng.choice(A.CMP_OPS), int_expr(rng, names, 1), int_expr(rng, names, 1))
    if r < 0.65:
        return A.Not(bool_expr(rng, names, depth - 1))
    return A.BoolOp(rng.choice(A.BOOL_OPS), bool_expr(rng, names, depth - 1),
                    bool_expr(rng, names, depth - 1))


def assertion(rng, names=VARS, depth=3, logical=()):
    """A random assertion; quantifiers bind fresh names j, k, ..."""
    scope = tuple(names) + tuple(logical)
    r = rng.random()
    if depth <= 0 or r < 0.3:
        if rng.random() < 0.08:
            return rng.choice([A.TrueA(), A.FalseA()])
        return A.Atom(A.Cmp(rng.choice(A.CMP_OPS), int_expr(rng, scope, 1), int_expr(rng, scope, 1)))
    if r < 0.45:
        return A.NotA(assertion(rng, names, depth - 1, logical))
    if r < 0.85:
        ctor = rng.choice([A.And, A.Or, A.Implies])
        return ctor(assertion(rng, names, depth - 1, logical), assertion(rng, names, depth - 1, logical))
    j = "jkmn"[len(logical)] if len(logical) < 4 else None
    if j is None:
        return assertion(rng, names, 0, logical)
    ctor = rng.choice([A.ExistsLe, A.ForallLe])
    return ctor(j, var_or_const(rng, names, 3), assertion(rng, names, depth - 1, logical + (j,)))


def program(rng, names=VARS, depth=4, loops=True, closed=False):
    """A random program of nesting depth at most ``depth``.

    Every generated loop has the shape ``while v < k do { S; v := v + 1 }``
    with ``S`` never assigning ``v``, so all runs terminate.  With
    ``closed=True`` every reachable state stays inside ``small_domain``:
    assignments copy a variable, store a constant or compute ``2 - w``.
    """
    return _program(rng, tuple(names), depth, loops, closed, frozenset())


def _assign(rng, names, closed, frozen):
    free = [n for n in names if n not in frozen]
    if not free:
        return A.Skip()
    v = rng.choice(free)
    if closed:
        kind = rng.random()
        if kind < 0.35:
            e = A.IntLit(rng.randint(0, 2))
        elif kind < 0.7:
            e = A.Var(rng.choice(names))
        else:
            e = A.BinOp("-", A.IntLit(2), A.Var(rng.choice(names)))
    else:
        e = int_expr(rng, names, 2)
    return A.Assign(v, e)


def _program(rng, names, depth, loops, closed, frozen):
    if depth <= 1:
        return A.Skip() if rng.random() < 0.15 else _assign(rng, names, closed, frozen)
    r = rng.random()
    if r < 0.25:
        return _assign(rng, names, closed, frozen)
    if r < 0.55:
        return A.Seq(_program(rng, names, depth - 1, loops, closed, frozen),
                     _program(rng, names, depth - 1, loops, closed, frozen))
    if r < 0.8 or not loops:
        return A.If(bool_expr(rng, names, 1),
                    _program(rng, names, depth - 1, loops, closed, frozen),
                    _program(rng, names, depth - 1, loops, closed, frozen))
    free = [n for n in names if n not in frozen]
    if not free:
        return A.Skip()
    v = rng.choice(free)
    body = _program(rng, names, depth - 1, loops, closed, frozen | {v})
    bump = A.Assign(v, A.BinOp("+", A.Var(v), A.IntLit(1)))
    return A.While(A.Cmp("<", A.Var(v), A.IntLit(rng.randint(1, 2))), A.Seq(body, bump))


def divergent_program(rng, names=VARS):
    """A program that diverges on some (possibly all) states."""
    v = rng.choice(names)
    loop = A.While(A.Cmp(rng.choice(["==", "<=", ">="]), A.Var(v), A.IntLit(rng.randint(0, 2))),
                   A.Skip() if rng.random() < 0.5 else A.Assign(rng.choice(names), A.IntLit(rng.randint(0, 2))))
    pre = program(rng, names, 2, loops=False, closed=True)
    return A.Seq(pre, loop) if rng.random() < 0.5 else loop


def random_state_set_assertion(rng, dom, density=None):
    p = rng.random() if density is None else density
    bits = 0
    for i in range(dom.size):
        if rng.random() < p:
            bits |= 1 << i
    s = StateSet(dom, bits)
    return s, s.to_assertion()


def annotate(c, q, dom):
    """Give every loop the exact strongest precondition as its invariant.

    Invariants are computed bottom-up in the same order vcgen visits the
    program, so each loop's postcondition is the one vcgen will use.
    """
    if isinstance(c, A.Seq):
        second = annotate(c.second, q, dom)
        mid = vcgen(second, q).pre
        return A.Seq(annotate(c.first, mid, dom), second)
    if isinstance(c, A.If):
        return A.If(c.guard, annotate(c.then, q, dom), annotate(c.else_, q, dom))
    if isinstance(c, A.While):
        inv = sp_semantic(c, q, dom).states.to_assertion()
        return A.While(c.guard, annotate(c.body, inv, dom), inv)
    return c


def guess_invariants(c, rng, names=VARS):
    """Attach random (usually wrong) invariants to every loop."""
    if isinstance(c, A.Seq):
        return A.Seq(guess_invariants(c.first, rng, names), guess_invariants(c.second, rng, names))
    if isinstance(c, A.If):
        return A.If(c.guard, guess_invariants(c.then, rng, names), guess_invariants(c.else_, rng, names))
    if isinstance(c, A.While):
        return A.While(c.guard, guess_invariants(c.body, rng, names), assertion(rng, names, 2))
    return c
