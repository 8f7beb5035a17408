"""Verification conditions for annotated access triples.

``vcgen(C, Q)`` walks the program backwards from ``Q``.  Loop-free parts get
their exact strongest precondition; each ``while`` uses its invariant ``I`` in
place of the (uncomputable) exact one and contributes two conditions:

* ``P_body && B -> I``, where ``P_body`` is the precondition computed for the
  body against ``I``, so that ``(|B -> I|) S (|I|)`` follows by consequence;
* ``Q && !B -> I``, which lets the loop conclude ``Q`` instead of ``!B -> I``.

The result also carries a derivation tree in the access calculus whose
consequence nodes need exactly these conditions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from ahl.assertions import Obligation, check_implication
from ahl.calculus import (
    Derivation, Triple, assign_ax, comp, cond, conseq, skip_ax, while_rule, ACCESS,
)
from ahl.domains import FiniteDomain
from ahl.errors import MissingInvariant
from ahl.syntax import ast as A
from ahl.transformers import guard_assertion


@dataclass
class VCResult:
    pre: A.Assertion
    obligations: list
    derivation: Derivation


def vcgen(c: A.Stmt, q: A.Assertion) -> VCResult:
    if isinstance(c, A.Skip):
        return VCResult(q, [], skip_ax(q))

    if isinstance(c, A.Assign):
        d = assign_ax(q, c.target, c.value)
        return VCResult(d.triple.pre, [], d)

    if isinstance(c, A.Seq):
        second = vcgen(c.second, q)
        first = vcgen(c.first, second.pre)
        return VCResult(first.pre, first.obligations + second.obligations,
                        comp(first.derivation, second.derivation))

    if isinstance(c, A.If):
        b = guard_assertion(c.guard)
        then = vcgen(c.then, q)
        else_ = vcgen(c.else_, q)
        pre = A.Or(A.And(b, then.pre), A.And(A.NotA(b), else_.pre))
        # the side conditions of these two steps hold by construction of pre
        d_then = conseq(A.Implies(b, pre), then.derivation, q, "if: then-branch pre -> (B -> P)")
        d_else = conseq(A.Implies(A.NotA(b), pre), else_.derivation, q,
                        "if: else-branch pre -> (!B -> P)")
        return VCResult(pre, then.obligations + else_.obligations, cond(c.guard, d_then, d_else, pre))

    if isinstance(c, A.While):
        inv = c.invariant
        if inv is None:
            raise MissingInvariant(c.loc)
        b = guard_assertion(c.guard)
        body = vcgen(c.body, inv)
        preserve = Obligation(A.And(body.pre, b), inv, "while: body pre && B -> I")
        exit_ = Obligation(A.And(q, A.NotA(b)), inv, "while: Q && !B -> I")
        d_body = conseq(A.Implies(b, inv), body.derivation, inv, "while: body pre -> (B -> I)")
        d_loop = while_rule(c, d_body)
        d = conseq(inv, d_loop, q, "while: Q -> (!B -> I)")
        return VCResult(inv, body.obligations + [preserve, exit_], d)

    raise TypeError(f"not a statement: {c!r}")


class Outcome(enum.Enum):
    PROVED = "proved"
    FAILED = "failed"


@dataclass
class VerifyResult:
    outcome: Outcome
    vc: VCResult
    results: list = field(default_factory=list)  # (Obligation, ImplicationResult)
    derivation: Optional[Derivation] = None

    @property
    def proved(self):
        return self.outcome is Outcome.PROVED

    @property
    def failure(self):
        for ob, res in self.results:
            if not res.valid:
                return ob, res
        return None


def verify(t: Triple, dom: FiniteDomain, strict: bool = False) -> VerifyResult:
    """Prove an access triple from its loop invariants.

    Every condition from :func:`vcgen`, plus ``pre_computed -> P``, is checked
    over ``dom``.  On success the returned derivation concludes ``t``.
    """
    if t.flavor != ACCESS:
        raise ValueError("verify expects an access triple")
    vc = vcgen(t.prog, t.post)
    top = Obligation(vc.pre, t.pre, "top: computed pre -> P")
    results = []
    for ob in vc.obligations + [top]:
        res = check_implication(ob, dom, strict=strict)
        results.append((ob, res))
    ok = all(res.valid for _, res in results)
    derivation = conseq(t.pre, vc.derivation, t.post, "top: computed pre -> P")
    return VerifyResult(Outcome.PROVED if ok else Outcome.FAILED, vc, results,
                        derivation if ok else None)
