"""Command-line front end: ``ahl {check|verify|sp|wp|prove|run|dual} FILE``.

Every command prints one JSON report on stdout (``--pretty`` prints the same
facts as text).  Exit codes: 0 success/valid/proved, 1 invalid/failed,
2 qualified or resource error, 3 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time

from ahl import calculus, transformers, vcgen
from ahl.assertions import eval_assertion
from ahl.domains import BOOL, INT, LIST
from ahl.errors import (
    AhlError, AhlSyntaxError, CapExceeded, ContainsLoop, DomainError, MissingInvariant, SortError,
)
from ahl.semantics import DEFAULT_FUEL, Failed, FuelExhausted, Terminated, exec_stmt
from ahl.syntax import parse_file
from ahl.syntax.printer import render
from ahl.transformers import state_to_json

EXIT_OK, EXIT_FAIL, EXIT_QUALIFIED, EXIT_USAGE = 0, 1, 2, 3


class UsageError(AhlError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL,
                        help="step budget per run (default %(default)s)")
    common.add_argument("--statecap", type=_positive, default=None,
                        help="refuse domains with more states (default: file, $AHL_STATECAP, 10^6)")
    common.add_argument("--strict", action="store_true",
                        help="fail a check when an assertion cannot be evaluated")
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--timing", action="store_true", help="include wall time in statistics")

    p = _Parser(prog="ahl", description="Access Hoare logic toolchain.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="decide the file's triple by enumeration")
    c.add_argument("file")
    c.add_argument("--flavor", choices=[calculus.ACCESS, calculus.HOARE], default=calculus.ACCESS)

    v = sub.add_parser("verify", parents=[common], help="prove the access triple from invariants")
    v.add_argument("file")
    v.add_argument("--emit-derivation", metavar="OUT")

    for name, text in (("sp", "strongest precondition state set"),
                       ("wp", "weakest precondition state set")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("file")
        s.add_argument("--check-corollary", action="store_true",
                       help="also check sp = wp & T and wp = (T -> sp) pointwise")
        if name == "sp":
            s.add_argument("--syntactic", action="store_true",
                           help="also compute the syntactic strongest precondition")

    pr = sub.add_parser("prove", parents=[common], help="check a derivation JSON file")
    pr.add_argument("file")
    pr.add_argument("derivation")

    r = sub.add_parser("run", parents=[common], help="execute the program from one state")
    r.add_argument("file")
    r.add_argument("--state", action="append", default=[], metavar="K=V,...")

    d = sub.add_parser("dual", parents=[common], help="print the dual triple")
    d.add_argument("file")
    d.add_argument("--check", action="store_true", help="decide both triples and compare")
    return p


# -- helpers -----------------------------------------------------------------


def _load(args, need_triple=True, need_domain=True):
    prog = parse_file(args.file)
    if need_domain and prog.domain is None:
        raise UsageError("file has no domains: section")
    if need_triple and (prog.pre is None or prog.post is None):
        raise UsageError("file needs both pre: and post: sections")
    if prog.domain is not None:
        cap = args.statecap or (int(os.environ["AHL_STATECAP"]) if os.environ.get("AHL_STATECAP") else None)
        if cap is not None:
            prog.domain = prog.domain.with_cap(cap)
        prog.domain.check_cap()
    return prog


def _stats(args, runs=None, **extra):
    out = {}
    if runs is not None:
        out["states"] = len(runs.outcomes)
        out["fuel_limit"] = runs.fuel
        out["max_fuel_used"] = max((o.fuel_used for o in runs.outcomes if isinstance(o, Terminated)),
                                   default=0)
        out["fuel_exhausted"] = runs.exhausted
        out["runtime_errors"] = runs.failed
    out.update(extra)
    return out


def _pair(s, s2):
    return {"initial": state_to_json(s), "final": state_to_json(s2)}


# -- commands ----------------------------------------------------------------


def cmd_check(args):
    prog = _load(args)
    t = calculus.Triple(args.flavor, prog.pre, prog.stmt, prog.post)
    runs = transformers.run_all(prog.stmt, prog.domain, args.fuel)
    res = calculus.check_triple_semantic(t, prog.domain, runs=runs)
    report = {
        "command": "check",
        "flavor": args.flavor,
        "triple": str(t),
        "verdict": res.verdict.value,
        "qualified": runs.qualified,
        "counterexamples": [_pair(*res.counterexample)] if res.counterexample else [],
        "statistics": _stats(args, runs, undefined_atom_states=res.undefined_states),
    }
    code = {calculus.Verdict.VALID: EXIT_OK, calculus.Verdict.INVALID: EXIT_FAIL,
            calculus.Verdict.QUALIFIED: EXIT_QUALIFIED}[res.verdict]
    return report, code


def cmd_verify(args):
    prog = _load(args)
    t = calculus.access(prog.pre, prog.stmt, prog.post)
    report = {"command": "verify", "triple": str(t)}
    try:
        res = vcgen.verify(t, prog.domain, strict=args.strict)
    except MissingInvariant as err:
        report.update(verdict="error", qualified=False,
                      error={"kind": "missing_invariant", "message": str(err),
                             "location": list(err.loc) if err.loc else None})
        return report, EXIT_QUALIFIED
    obligations = []
    for ob, r in res.results:
        item = {"origin": ob.origin, "hypothesis": render(ob.hypothesis),
                "conclusion": render(ob.conclusion), "verdict": r.verdict}
        if r.counterexample is not None:
            item["counterexample"] = state_to_json(r.counterexample)
        if r.assertion_error:
            item["assertion_error"] = r.assertion_error
        obligations.append(item)
    failure = res.failure
    report.update(
        verdict=res.outcome.value,
        qualified=False,
        computed_pre=render(res.vc.pre),
        obligations=obligations,
        counterexamples=[state_to_json(failure[1].counterexample)]
        if failure and failure[1].counterexample is not None else [],
        statistics={"states": prog.domain.size, "obligations": len(res.results),
                    "loop_obligations": len(res.vc.obligations)},
    )
    if res.proved:
        check = calculus.check_derivation(res.derivation, prog.domain, strict=args.strict)
        report["derivation_accepted"] = check.accepted
        if args.emit_derivation:
            with open(args.emit_derivation, "w", encoding="utf-8") as f:
                f.write(calculus.dump_derivation(res.derivation) + "\n")
            report["derivation"] = args.emit_derivation
    return report, EXIT_OK if res.proved else EXIT_FAIL


def _cmd_set(args, which):
    prog = _load(args)
    runs = transformers.run_all(prog.stmt, prog.domain, args.fuel)
    fn = transformers.sp_semantic if which == "sp" else transformers.wp_semantic
    res = fn(prog.stmt, prog.post, prog.domain, runs=runs)
    report = {
        "command": which,
        "program": render(prog.stmt),
        "post": render(prog.post),
        "verdict": "computed",
        "qualified": res.qualified,
        "count": len(res.states),
        "domain_size": prog.domain.size,
        "states": res.states.to_json(),
    }
    code = EXIT_QUALIFIED if res.qualified else EXIT_OK
    if getattr(args, "syntactic", False):
        try:
            syn = transformers.sp_syntactic(prog.stmt, prog.post)
        except ContainsLoop as err:
            raise UsageError(str(err)) from None
        syn_set = transformers.StateSet.from_predicate(
            prog.domain, lambda s: eval_assertion(syn, s))
        report["syntactic"] = render(syn)
        report["syntactic_matches"] = syn_set == res.states
    if args.check_corollary:
        link = transformers.check_sp_wp_link(prog.stmt, prog.post, prog.domain, args.fuel)
        report["corollary"] = {
            "verdict": link.verdict.value,
            "law": link.failed_law,
            "counterexample": state_to_json(link.counterexample) if link.counterexample else None,
            "terminating": len(link.terminating),
        }
        if link.verdict is transformers.LinkVerdict.FAILS:
            code = EXIT_FAIL
        elif link.verdict is transformers.LinkVerdict.QUALIFIED:
            code = EXIT_QUALIFIED
    report["statistics"] = _stats(args, runs, undefined_atom_states=res.undefined_states)
    return report, code


def cmd_sp(args):
    return _cmd_set(args, "sp")


def cmd_wp(args):
    return _cmd_set(args, "wp")


def cmd_prove(args):
    prog = _load(args, need_triple=False)
    with open(args.derivation, encoding="utf-8") as f:
        text = f.read()
    try:
        d = calculus.load_derivation(text, prog.env)
    except (ValueError, KeyError, TypeError) as err:
        raise UsageError(f"malformed derivation: {err}") from None
    check = calculus.check_derivation(d, prog.domain, strict=args.strict)
    report = {"command": "prove", "conclusion": str(d.triple)}
    if prog.pre is not None and prog.post is not None:
        target = calculus.access(prog.pre, prog.stmt, prog.post)
        report["concludes_file_triple"] = d.triple == target
    body = calculus.report_to_json(check)
    report["verdict"] = "accepted" if check.accepted else "rejected"
    report["qualified"] = False
    report["nodes"] = body["nodes"]
    report["obligations"] = body["obligations"]
    report["counterexamples"] = [o["counterexample"] for o in body["obligations"] if "counterexample" in o]
    report["statistics"] = {"nodes": len(check.nodes), "obligations": len(check.obligations),
                            "states": prog.domain.size}
    return report, EXIT_OK if check.accepted else EXIT_FAIL


_STATE_ITEM = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*(\[[^\]]*\]|[^,]*)\s*(?:,|$)")


def parse_state(items, env, domain=None) -> dict:
    given = {}
    for text in items:
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _STATE_ITEM.match(text, pos)
            if not m or m.end() == pos:
                raise UsageError(f"cannot read state assignment {text[pos:]!r}")
            name, raw = m.group(1), m.group(2).strip()
            if name not in env:
                raise UsageError(f"unknown variable {name!r}")
            given[name] = _parse_value(name, raw, env[name])
            pos = m.end()
    state = {}
    for name, sort in env.items():
        if name in given:
            state[name] = given[name]
        elif domain is not None:
            state[name] = domain[name].values()[0]
        else:
            state[name] = {INT: 0, BOOL: False, LIST: ()}[sort]
    return state


def _parse_value(name, raw, sort):
    try:
        if sort == BOOL:
            if raw not in ("true", "false"):
                raise ValueError
            return raw == "true"
        if sort == LIST:
            if not (raw.startswith("[") and raw.endswith("]")):
                raise ValueError
            inner = raw[1:-1].strip()
            return tuple(int(x) for x in inner.split(",")) if inner else ()
        return int(raw)
    except ValueError:
        raise UsageError(f"value {raw!r} is not a {sort} for {name!r}") from None


def cmd_run(args):
    prog = _load(args, need_triple=False, need_domain=False)
    state = parse_state(args.state, prog.env, prog.domain)
    out = exec_stmt(prog.stmt, state, args.fuel)
    report = {"command": "run", "initial": state_to_json(state)}
    if isinstance(out, Terminated):
        report.update(verdict="terminated", qualified=False, final=state_to_json(out.final),
                      statistics={"fuel_limit": args.fuel, "fuel_used": out.fuel_used})
        return report, EXIT_OK
    if isinstance(out, FuelExhausted):
        report.update(verdict="fuel_exhausted", qualified=True,
                      statistics={"fuel_limit": args.fuel, "fuel_used": args.fuel})
        return report, EXIT_QUALIFIED
    assert isinstance(out, Failed)
    report.update(verdict="runtime_error", qualified=False,
                  error={"kind": out.kind, "message": out.message,
                         "location": list(out.at) if out.at else None},
                  statistics={"fuel_limit": args.fuel})
    return report, EXIT_FAIL


def cmd_dual(args):
    prog = _load(args, need_domain=args.check)
    t = calculus.access(prog.pre, prog.stmt, prog.post)
    dual = calculus.dualize(t)
    report = {"command": "dual", "triple": str(t), "dual": str(dual),
              "dual_flavor": dual.flavor, "dual_pre": render(dual.pre), "dual_post": render(dual.post)}
    code = EXIT_OK
    if args.check:
        runs = transformers.run_all(prog.stmt, prog.domain, args.fuel)
        a = calculus.check_triple_semantic(t, prog.domain, runs=runs)
        b = calculus.check_triple_semantic(dual, prog.domain, runs=runs)
        agree = a.verdict == b.verdict
        report.update(verdict="agree" if agree else "disagree", qualified=runs.qualified,
                      verdicts={"access": a.verdict.value, "dual": b.verdict.value},
                      statistics=_stats(args, runs))
        code = EXIT_QUALIFIED if runs.qualified else (EXIT_OK if agree else EXIT_FAIL)
    return report, code


COMMANDS = {"check": cmd_check, "verify": cmd_verify, "sp": cmd_sp, "wp": cmd_wp,
            "prove": cmd_prove, "run": cmd_run, "dual": cmd_dual}


# -- output ------------------------------------------------------------------


def render_pretty(report: dict) -> str:
    lines = []

    def scalar(v):
        if v is None:
            return "-"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, list):
            return "[" + ", ".join(scalar(x) for x in v) + "]"
        return str(v)

    def table(rows, indent):
        keys = list(rows[0].keys())
        cells = [[scalar(r.get(k)) for k in keys] for r in rows]
        widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
        pad = " " * indent
        lines.append(pad + "  ".join(k.ljust(w) for k, w in zip(keys, widths)))
        for c in cells:
            lines.append(pad + "  ".join(x.ljust(w) for x, w in zip(c, widths)))

    def walk(obj, indent):
        pad = " " * indent
        for k, v in obj.items():
            if isinstance(v, dict):
                lines.append(f"{pad}{k}:")
                walk(v, indent + 2)
            elif isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
                lines.append(f"{pad}{k}: ({len(v)})")
                flat = all(not isinstance(x, dict) for r in v for x in r.values())
                if flat:
                    table(v, indent + 2)
                else:
                    for i, item in enumerate(v):
                        lines.append(f"{pad}  [{i}]")
                        walk(item, indent + 4)
            else:
                lines.append(f"{pad}{k}: {scalar(v)}")

    walk(report, 0)
    return "\n".join(lines)


def _error_report(command, kind, err, **extra):
    report = {"command": command, "verdict": "error", "qualified": False,
              "error": {"kind": kind, "message": str(err), **extra}}
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except AhlSyntaxError as err:
        report, code = _error_report(args.command, "syntax_error", err.message,
                                     line=err.line, col=err.col), EXIT_USAGE
    except SortError as err:
        report, code = _error_report(args.command, "sort_error", err, name=err.name), EXIT_USAGE
    except CapExceeded as err:
        report, code = _error_report(args.command, "cap_exceeded", err,
                                     states=err.count, cap=err.cap), EXIT_QUALIFIED
    except (UsageError, DomainError) as err:
        report, code = _error_report(args.command, "usage_error", err), EXIT_USAGE
    except OSError as err:
        report, code = _error_report(args.command, "io_error", err), EXIT_USAGE
    if args.timing:
        report.setdefault("statistics", {})["wall_time_s"] = round(time.perf_counter() - started, 6)
    if args.pretty:
        print(render_pretty(report))
    else:
        print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
