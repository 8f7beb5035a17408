"""Triples, their semantic validity, and derivations in the access calculus.

A derivation is a tree of rule applications; every node carries the triple it
concludes.  :func:`check_derivation` matches each node against its rule schema
and discharges the implication side conditions of the consequence rule by
enumeration over a finite domain.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

from ahl.assertions import Obligation, Tally, check_implication, predicate, substitute
from ahl.domains import FiniteDomain
from ahl.semantics import DEFAULT_FUEL, Terminated
from ahl.syntax import ast as A
from ahl.syntax.parser import parse_assertion, parse_stmt
from ahl.syntax.printer import render
from ahl.transformers import Runs, guard_assertion, run_all, state_to_json

ACCESS = "access"
HOARE = "hoare"


@dataclass(frozen=True)
class Triple:
    flavor: str
    pre: A.Assertion
    prog: A.Stmt
    post: A.Assertion

    def __post_init__(self):
        if self.flavor not in (ACCESS, HOARE):
            raise ValueError(f"unknown triple flavor {self.flavor!r}")

    def __str__(self):
        left, right = ("(|", "|)") if self.flavor == ACCESS else ("{", "}")
        return f"{left}{render(self.pre)}{right} {render(self.prog)} {left}{render(self.post)}{right}"


def access(pre, prog, post) -> Triple:
    return Triple(ACCESS, pre, prog, post)


def hoare(pre, prog, post) -> Triple:
    return Triple(HOARE, pre, prog, post)


def dualize(t: Triple) -> Triple:
    """Swap flavour and negate both assertions.

    An access triple ``(|P|) C (|Q|)`` is equivalent to the Hoare triple
    ``{!P} C {!Q}``.  Dualizing twice yields ``!!P`` and ``!!Q``, which agree
    with ``P`` and ``Q`` in every state but are not syntactically equal.
    """
    flavor = HOARE if t.flavor == ACCESS else ACCESS
    return Triple(flavor, A.NotA(t.pre), t.prog, A.NotA(t.post))


# -- semantic validity -------------------------------------------------------


class Verdict(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    QUALIFIED = "qualified"


@dataclass
class TripleResult:
    verdict: Verdict
    counterexample: Optional[tuple] = None  # (initial state, final state)
    states: int = 0
    exhausted: int = 0
    failed: int = 0
    undefined_states: int = 0

    @property
    def valid(self):
        return self.verdict is Verdict.VALID


def check_triple_semantic(t: Triple, dom: FiniteDomain, fuel: int = DEFAULT_FUEL,
                          runs: Runs | None = None) -> TripleResult:
    """Decide ``t`` by running its program from every state of ``dom``.

    Access flavour: every run ``s -> s'`` with ``Q(s')`` must have ``P(s)``.
    Hoare flavour: every run with ``P(s)`` must have ``Q(s')``.  A
    counterexample is definitive; without one, a run that ran out of fuel
    makes the verdict ``QUALIFIED``.
    """
    runs = runs or run_all(t.prog, dom, fuel)
    tally = Tally()
    pre = predicate(t.pre, tally=tally)
    post = predicate(t.post, tally=tally)
    undefined = 0
    for n, (s, out) in enumerate(runs.pairs(), start=1):
        if not isinstance(out, Terminated):
            continue
        before = len(tally.errors)
        if t.flavor == ACCESS:
            bad = post(out.final) and not pre(s)
        else:
            bad = pre(s) and not post(out.final)
        if len(tally.errors) != before:
            undefined += 1
        if bad:
            return TripleResult(Verdict.INVALID, (s, out.final), n, runs.exhausted,
                                runs.failed, undefined)
    verdict = Verdict.QUALIFIED if runs.qualified else Verdict.VALID
    return TripleResult(verdict, None, len(runs.outcomes), runs.exhausted, runs.failed, undefined)


# -- derivations -------------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    """A rule application concluding ``triple`` from ``premises``."""

    rule: str
    triple: Triple
    premises: tuple = ()
    origin: str = field(default="", compare=False)


RULES = ("skip", "assign", "conseq", "comp", "cond", "while", "conj", "disj")
_ARITY = {"skip": 0, "assign": 0, "conseq": 1, "comp": 2, "cond": 2, "while": 1, "conj": 2, "disj": 2}


def skip_ax(p):
    return Derivation("skip", access(p, A.Skip(), p))


def assign_ax(p, v, e):
    return Derivation("assign", access(substitute(p, v, e), A.Assign(v, e), p))


def conseq(pre, sub, post, origin=""):
    return Derivation("conseq", access(pre, sub.triple.prog, post), (sub,), origin)


def comp(d1, d2):
    t = access(d1.triple.pre, A.Seq(d1.triple.prog, d2.triple.prog), d2.triple.post)
    return Derivation("comp", t, (d1, d2))


def cond(guard, d_then, d_else, pre):
    t = access(pre, A.If(guard, d_then.triple.prog, d_else.triple.prog), d_then.triple.post)
    return Derivation("cond", t, (d_then, d_else))


def while_rule(loop, d_body):
    inv = d_body.triple.post
    post = A.Implies(A.NotA(guard_assertion(loop.guard)), inv)
    return Derivation("while", access(inv, loop, post), (d_body,))


def conj_rule(d1, d2):
    t1, t2 = d1.triple, d2.triple
    return Derivation("conj", access(A.And(t1.pre, t2.pre), t1.prog, A.And(t1.post, t2.post)), (d1, d2))


def disj_rule(d1, d2):
    t1, t2 = d1.triple, d2.triple
    return Derivation("disj", access(A.Or(t1.pre, t2.pre), t1.prog, A.Or(t1.post, t2.post)), (d1, d2))


@dataclass
class NodeReport:
    path: str
    rule: str
    accepted: bool
    reason: str = ""


@dataclass
class ObligationReport:
    path: str
    obligation: Obligation
    valid: bool
    counterexample: Optional[dict] = None
    undefined_states: int = 0
    assertion_error: Optional[str] = None


@dataclass
class DerivationReport:
    nodes: list = field(default_factory=list)
    obligations: list = field(default_factory=list)

    @property
    def accepted(self):
        return all(n.accepted for n in self.nodes) and all(o.valid for o in self.obligations)

    @property
    def rejections(self):
        return [n for n in self.nodes if not n.accepted]


def _schema(d: Derivation) -> tuple[str, list]:
    """Return (reason for mismatch or "", side conditions) for one node."""
    t = d.triple
    if t.flavor != ACCESS:
        return "derivations conclude access triples only", []
    if d.rule not in _ARITY:
        return f"unknown rule {d.rule!r}", []
    if len(d.premises) != _ARITY[d.rule]:
        return f"rule {d.rule} takes {_ARITY[d.rule]} premise(s), got {len(d.premises)}", []
    ps = [p.triple for p in d.premises]
    for p in ps:
        if p.flavor != ACCESS:
            return "premises must be access triples", []

    if d.rule == "skip":
        if not isinstance(t.prog, A.Skip):
            return "skip axiom needs program 'skip'", []
        if t.pre != t.post:
            return "skip axiom needs identical pre and post: (|P|) skip (|P|)", []
        return "", []

    if d.rule == "assign":
        if not isinstance(t.prog, A.Assign):
            return "assignment axiom needs an assignment", []
        want = substitute(t.post, t.prog.target, t.prog.value)
        if t.pre != want:
            return f"assignment axiom needs pre {render(want)}", []
        return "", []

    if d.rule == "conseq":
        (p,) = ps
        if p.prog != t.prog:
            return "consequence premise must be about the same program", []
        label = d.origin or "conseq"
        obs = [Obligation(p.pre, t.pre, f"{label} [pre]"),
               Obligation(t.post, p.post, f"{label} [post]")]
        return "", obs

    if d.rule == "comp":
        p1, p2 = ps
        if t.prog != A.Seq(p1.prog, p2.prog):
            return "composition concludes about S;T from premises about S and T", []
        if p1.post != p2.pre:
            return (f"middle assertions differ: {render(p1.post)} vs {render(p2.pre)}"), []
        if t.pre != p1.pre or t.post != p2.post:
            return "composition needs (|P|) S (|R|) and (|R|) T (|Q|) to conclude (|P|) S;T (|Q|)", []
        return "", []

    if d.rule == "cond":
        p1, p2 = ps
        if not isinstance(t.prog, A.If):
            return "conditional rule needs an if statement", []
        if p1.prog != t.prog.then or p2.prog != t.prog.else_:
            return "premises must be about the then and else branches", []
        b = guard_assertion(t.prog.guard)
        if p1.pre != A.Implies(b, t.pre):
            return f"then premise needs pre {render(A.Implies(b, t.pre))}", []
        if p2.pre != A.Implies(A.NotA(b), t.pre):
            return f"else premise needs pre {render(A.Implies(A.NotA(b), t.pre))}", []
        if p1.post != t.post or p2.post != t.post:
            return "both premises need the conclusion's postcondition", []
        return "", []

    if d.rule == "while":
        (p,) = ps
        if not isinstance(t.prog, A.While):
            return "while rule needs a while loop", []
        if p.prog != t.prog.body:
            return "premise must be about the loop body", []
        b = guard_assertion(t.prog.guard)
        inv = t.pre
        if p.pre != A.Implies(b, inv) or p.post != inv:
            return f"premise needs shape (|{render(A.Implies(b, inv))}|) S (|{render(inv)}|)", []
        want = A.Implies(A.NotA(b), inv)
        if t.post != want:
            return f"while rule concludes post {render(want)}", []
        return "", []

    # conj / disj
    p1, p2 = ps
    # loop annotations may differ between the premises
    same = A.strip_invariants(t.prog)
    if A.strip_invariants(p1.prog) != same or A.strip_invariants(p2.prog) != same:
        return f"{d.rule} premises must be about the conclusion's program", []
    ctor = A.And if d.rule == "conj" else A.Or
    if t.pre != ctor(p1.pre, p2.pre) or t.post != ctor(p1.post, p2.post):
        word = "conjunction" if d.rule == "conj" else "disjunction"
        return f"conclusion must be the component-wise {word} of the premises", []
    return "", []


def check_derivation(d: Derivation, dom: FiniteDomain, strict: bool = False) -> DerivationReport:
    """Check every node's rule schema and discharge every side condition."""
    report = DerivationReport()
    seen = {}  # the same side condition often recurs in one tree

    def visit(node, path):
        reason, obs = _schema(node)
        report.nodes.append(NodeReport(path, node.rule, not reason, reason))
        for ob in obs:
            key = (ob.hypothesis, ob.conclusion)
            if key not in seen:
                seen[key] = check_implication(ob, dom, strict=strict)
            res = seen[key]
            report.obligations.append(ObligationReport(
                path, ob, res.valid, res.counterexample, res.undefined_states, res.assertion_error))
        for k, p in enumerate(node.premises):
            visit(p, f"{path}.{k}")

    visit(d, "0")
    return report


# -- JSON --------------------------------------------------------------------

FORMAT = "ahl-derivation/1"


def triple_to_json(t: Triple) -> dict:
    return {"flavor": t.flavor, "pre": render(t.pre), "prog": render(t.prog), "post": render(t.post)}


def triple_from_json(obj, env=None) -> Triple:
    return Triple(obj.get("flavor", ACCESS), parse_assertion(obj["pre"], env),
                  parse_stmt(obj["prog"], env), parse_assertion(obj["post"], env))


def derivation_to_json(d: Derivation) -> dict:
    out = {"rule": d.rule, **triple_to_json(d.triple)}
    if d.origin:
        out["origin"] = d.origin
    out["premises"] = [derivation_to_json(p) for p in d.premises]
    return out


def derivation_from_json(obj, env=None) -> Derivation:
    if "format" in obj:
        if obj["format"] != FORMAT:
            raise ValueError(f"unsupported derivation format {obj['format']!r}")
        obj = obj["root"]
    premises = tuple(derivation_from_json(p, env) for p in obj.get("premises", []))
    return Derivation(obj["rule"], triple_from_json(obj, env), premises, obj.get("origin", ""))


def dump_derivation(d: Derivation) -> str:
    return json.dumps({"format": FORMAT, "root": derivation_to_json(d)}, indent=2)


def load_derivation(text: str, env=None) -> Derivation:
    return derivation_from_json(json.loads(text), env)


def report_to_json(r: DerivationReport) -> dict:
    return {
        "accepted": r.accepted,
        "nodes": [{"path": n.path, "rule": n.rule, "accepted": n.accepted, **({"reason": n.reason} if n.reason else {})}
                  for n in r.nodes],
        "obligations": [_obligation_json(o) for o in r.obligations],
    }


def _obligation_json(o: ObligationReport) -> dict:
    out = {
        "path": o.path,
        "origin": o.obligation.origin,
        "hypothesis": render(o.obligation.hypothesis),
        "conclusion": render(o.obligation.conclusion),
        "verdict": "valid" if o.valid else "invalid",
    }
    if o.counterexample is not None:
        out["counterexample"] = state_to_json(o.counterexample)
    if o.assertion_error:
        out["assertion_error"] = o.assertion_error
    if o.undefined_states:
        out["undefined_states"] = o.undefined_states
    return out
