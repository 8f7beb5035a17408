"""Strongest and weakest preconditions as finite state sets.

For a program ``C`` and postcondition ``Q`` over a finite domain:

* ``sp_semantic``: states from which ``C`` terminates in a ``Q``-state.  It is
  the least precondition making the access triple valid.
* ``wp_semantic``: states from which every terminating run ends in ``Q``.  It
  is the greatest precondition making the Hoare triple valid.
* ``termination_set``: states on which ``C`` terminates within the fuel.

States whose run exhausts the fuel count as non-terminating and set the
``qualified`` flag on the result.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from ahl.assertions import Tally, enumerate_states, predicate, substitute
from ahl.domains import FiniteDomain
from ahl.errors import ContainsLoop
from ahl.semantics import DEFAULT_FUEL, Failed, FuelExhausted, Terminated, exec_stmt
from ahl.syntax import ast as A


class StateSet:
    """A subset of a domain's enumeration, stored as a bitset.

    Bit ``i`` stands for the ``i``-th state of ``enumerate_states(domain)``.
    """

    __slots__ = ("domain", "bits")

    def __init__(self, domain: FiniteDomain, bits: int = 0):
        self.domain = domain
        self.bits = bits

    @classmethod
    def from_predicate(cls, domain, fn):
        bits = 0
        for i, s in enumerate(enumerate_states(domain)):
            if fn(s):
                bits |= 1 << i
        return cls(domain, bits)

    @classmethod
    def full(cls, domain):
        return cls(domain, (1 << domain.size) - 1)

    @classmethod
    def empty(cls, domain):
        return cls(domain, 0)

    def _same(self, other):
        if self.domain != other.domain:
            raise ValueError("state sets over different domains")

    def __contains__(self, state):
        i = self.domain.index_of(state)
        return i is not None and bool(self.bits >> i & 1)

    def __and__(self, other):
        self._same(other)
        return StateSet(self.domain, self.bits & other.bits)

    def __or__(self, other):
        self._same(other)
        return StateSet(self.domain, self.bits | other.bits)

    def complement(self):
        return StateSet(self.domain, ~self.bits & ((1 << self.domain.size) - 1))

    def issubset(self, other) -> bool:
        self._same(other)
        return self.bits & ~other.bits == 0

    def __eq__(self, other):
        return isinstance(other, StateSet) and self.domain == other.domain and self.bits == other.bits

    def __hash__(self):
        return hash((self.domain, self.bits))

    def __len__(self):
        return bin(self.bits).count("1")

    def __iter__(self):
        for i, s in enumerate(enumerate_states(self.domain)):
            if self.bits >> i & 1:
                yield s

    def is_full(self):
        return self.bits == (1 << self.domain.size) - 1

    def first_difference(self, other) -> Optional[dict]:
        """First state (in enumeration order) in exactly one of the sets."""
        self._same(other)
        diff = self.bits ^ other.bits
        if not diff:
            return None
        low = (diff & -diff).bit_length() - 1
        for i, s in enumerate(enumerate_states(self.domain)):
            if i == low:
                return s

    def to_json(self):
        return [state_to_json(s) for s in self]

    def to_assertion(self) -> A.Assertion:
        """An assertion satisfied, within the domain, by exactly these states."""
        disjuncts = []
        for s in self:
            conj = None
            for name, _ in self.domain.vars:
                lit = _state_literal(name, s[name])
                conj = lit if conj is None else A.And(conj, lit)
            disjuncts.append(conj if conj is not None else A.TrueA())
        if not disjuncts:
            return A.FalseA()
        out = disjuncts[0]
        for d in disjuncts[1:]:
            out = A.Or(out, d)
        return out

    def __repr__(self):
        return f"StateSet({len(self)} of {self.domain.size})"


def _state_literal(name, value):
    if type(value) is bool:
        return A.Atom(A.Var(name)) if value else A.NotA(A.Atom(A.Var(name)))
    if type(value) is tuple:
        # lh(v) == n && el(1, v) == x1 && ...
        lit = A.Atom(A.Cmp("==", A.Lh(A.Var(name)), A.IntLit(len(value))))
        for k, x in enumerate(value, start=1):
            lit = A.And(lit, A.Atom(A.Cmp("==", A.El(A.IntLit(k), A.Var(name)), A.IntLit(x))))
        return lit
    return A.Atom(A.Cmp("==", A.Var(name), A.IntLit(value)))


def state_to_json(s):
    return {k: list(v) if type(v) is tuple else v for k, v in s.items()}


# -- running a program over a whole domain -----------------------------------


@dataclass
class Runs:
    """Outcome of running one program from every state of a domain."""

    domain: FiniteDomain
    outcomes: list
    fuel: int

    @property
    def exhausted(self):
        return sum(isinstance(o, FuelExhausted) for o in self.outcomes)

    @property
    def failed(self):
        return sum(isinstance(o, Failed) for o in self.outcomes)

    @property
    def qualified(self):
        return self.exhausted > 0

    def pairs(self):
        for s, o in zip(enumerate_states(self.domain), self.outcomes):
            yield s, o


def run_all(c: A.Stmt, dom: FiniteDomain, fuel: int = DEFAULT_FUEL) -> Runs:
    return Runs(dom, [exec_stmt(c, s, fuel) for s in enumerate_states(dom)], fuel)


@dataclass
class SetResult:
    states: StateSet
    qualified: bool
    exhausted: int = 0
    failed: int = 0
    undefined_states: int = 0


def _set_from_runs(runs, member):
    bits = 0
    for i, (s, out) in enumerate(runs.pairs()):
        if member(s, out):
            bits |= 1 << i
    return StateSet(runs.domain, bits)


def _post_member(q, want_terminated):
    tally = Tally()
    holds = predicate(q, tally=tally)

    def member(s, out):
        if isinstance(out, Terminated):
            return holds(out.final)
        return not want_terminated
    return member, tally


def sp_semantic(c, q, dom, fuel=DEFAULT_FUEL, runs: Runs | None = None) -> SetResult:
    """States ``s`` with ``C: s -> s'`` and ``Q(s')``."""
    runs = runs or run_all(c, dom, fuel)
    member, tally = _post_member(q, want_terminated=True)
    states = _set_from_runs(runs, member)
    return SetResult(states, runs.qualified, runs.exhausted, runs.failed, len(tally.errors))


def wp_semantic(c, q, dom, fuel=DEFAULT_FUEL, runs: Runs | None = None) -> SetResult:
    """States ``s`` such that every terminating run from ``s`` ends in ``Q``."""
    runs = runs or run_all(c, dom, fuel)
    member, tally = _post_member(q, want_terminated=False)
    states = _set_from_runs(runs, member)
    return SetResult(states, runs.qualified, runs.exhausted, runs.failed, len(tally.errors))


def termination_set(c, dom, fuel=DEFAULT_FUEL, runs: Runs | None = None) -> SetResult:
    runs = runs or run_all(c, dom, fuel)
    states = _set_from_runs(runs, lambda s, out: isinstance(out, Terminated))
    return SetResult(states, runs.qualified, runs.exhausted, runs.failed)


def guard_assertion(b: A.Expr) -> A.Assertion:
    """A program guard read as an assertion."""
    return A.atom(b)


def sp_syntactic(c: A.Stmt, q: A.Assertion) -> A.Assertion:
    """Strongest precondition of a loop-free program, computed on syntax.

    Skip is the identity, assignment substitutes, sequencing composes, and a
    conditional splits on its guard: ``(B && SP_S) || (!B && SP_T)``.
    """
    if isinstance(c, A.Skip):
        return q
    if isinstance(c, A.Assign):
        return substitute(q, c.target, c.value)
    if isinstance(c, A.Seq):
        return sp_syntactic(c.first, sp_syntactic(c.second, q))
    if isinstance(c, A.If):
        b = guard_assertion(c.guard)
        return A.Or(A.And(b, sp_syntactic(c.then, q)),
                    A.And(A.NotA(b), sp_syntactic(c.else_, q)))
    if isinstance(c, A.While):
        raise ContainsLoop()
    raise TypeError(f"not a statement: {c!r}")


# -- linking sp, wp and termination ------------------------------------------


class LinkVerdict(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    QUALIFIED = "qualified"


@dataclass
class LinkResult:
    verdict: LinkVerdict
    sp: StateSet
    wp: StateSet
    terminating: StateSet
    counterexample: Optional[dict] = None
    failed_law: Optional[str] = None

    @property
    def pointwise(self) -> bool:
        return self.verdict is not LinkVerdict.FAILS


def check_sp_wp_link(c, q, dom, fuel=DEFAULT_FUEL) -> LinkResult:
    """Check ``sp == wp & T`` and ``wp == {s | s in T -> s in sp}`` pointwise.

    When a run exhausted the fuel the sets still agree by construction, but the
    verdict is ``QUALIFIED``: the termination set is only approximated.
    """
    runs = run_all(c, dom, fuel)
    sp = sp_semantic(c, q, dom, runs=runs).states
    wp = wp_semantic(c, q, dom, runs=runs).states
    term = termination_set(c, dom, runs=runs).states
    bad = sp.first_difference(wp & term)
    if bad is not None:
        return LinkResult(LinkVerdict.FAILS, sp, wp, term, bad, "sp = wp & T")
    bad = wp.first_difference(term.complement() | sp)
    if bad is not None:
        return LinkResult(LinkVerdict.FAILS, sp, wp, term, bad, "wp = (T -> sp)")
    verdict = LinkVerdict.QUALIFIED if runs.qualified else LinkVerdict.HOLDS
    return LinkResult(verdict, sp, wp, term)
