"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line."""
import json
import os
import random
import subprocess
import sys

import pytest

import helpers
from ahl import calculus as C
from ahl.assertions import eval_assertion
from ahl.cli import main
from ahl.syntax import has_loop, parse_assertion, parse_file, parse_stmt, render
from ahl.transformers import (
    LinkVerdict, StateSet, check_sp_wp_link, run_all, sp_semantic, sp_syntactic, termination_set,
    wp_semantic,
)
from ahl.vcgen import vcgen, verify

SEED = 20240611


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail
    return emit


def _random_suite(n=200, seed=SEED):
    rng = random.Random(seed)
    for _ in range(n):
        c = helpers.program(rng, depth=4)
        yield c, helpers.assertion(rng), helpers.assertion(rng)


def _extension(dom, a):
    return StateSet.from_predicate(dom, lambda s: eval_assertion(a, s))


def test_criterion_1_hotel_verdict_split(report, capsys):
    results = {}
    for name in ("hotel_p1", "hotel_p2"):
        for flavor in ("access", "hoare"):
            code = main(["check", str(helpers.CORPUS / f"{name}.ahl"), "--flavor", flavor])
            r = json.loads(capsys.readouterr().out)
            results[name, flavor] = (code, r)
    p2_access = results["hotel_p2", "access"][1]
    ok = (results["hotel_p1", "access"][1]["verdict"] == "valid"
          and p2_access["verdict"] == "invalid" and len(p2_access["counterexamples"]) == 1
          and results["hotel_p1", "hoare"][1]["verdict"] == "valid"
          and results["hotel_p2", "hoare"][1]["verdict"] == "valid"
          and all(r["statistics"]["states"] == 128 for _, r in results.values()))
    cex = p2_access["counterexamples"][0] if p2_access["counterexamples"] else None
    report(1, ok, f"P1 access/hoare valid, P2 hoare valid, P2 access invalid at {cex}")


def test_criterion_2_checklist_verification(report, capsys, tmp_path):
    out = tmp_path / "checklist.json"
    path = str(helpers.CORPUS / "checklist.ahl")
    code = main(["verify", path, "--emit-derivation", str(out)])
    v = json.loads(capsys.readouterr().out)
    loop_obs = [o for o in v["obligations"] if o["origin"].startswith("while")]
    code2 = main(["prove", path, str(out)])
    p = json.loads(capsys.readouterr().out)
    ok = (code == 0 and v["verdict"] == "proved" and len(loop_obs) == 2
          and all(o["verdict"] == "valid" for o in v["obligations"])
          and v["statistics"]["states"] == 1200
          and code2 == 0 and p["verdict"] == "accepted" and p["concludes_file_triple"])
    report(2, ok, f"verify={v['verdict']}, {len(loop_obs)} loop obligations valid, "
                  f"prove={p['verdict']} ({p['statistics']['obligations']} obligations)")


def test_criterion_3_duality(report):
    dom = helpers.small_domain()
    total = agree = qualified = 0
    for c, p, q in _random_suite():
        runs = run_all(c, dom)
        t = C.access(p, c, q)
        a = C.check_triple_semantic(t, dom, runs=runs)
        h = C.check_triple_semantic(C.dualize(t), dom, runs=runs)
        total += 1
        agree += a.verdict == h.verdict
        qualified += runs.qualified
    report(3, total >= 200 and agree == total and qualified == 0,
           f"{agree}/{total} access verdicts equal dual Hoare verdicts, {qualified} fuel-qualified")


def test_criterion_4_sp_wp_termination(report):
    dom = helpers.small_domain()
    cases = [(c, q, dom, 10_000) for c, _, q in _random_suite()]
    for path in helpers.CORPUS_FILES:
        prog = parse_file(path)
        cases.append((prog.stmt, prog.post, prog.domain, 10_000))
    rng = random.Random(SEED + 4)
    for _ in range(30):
        cases.append((helpers.divergent_program(rng), helpers.assertion(rng), dom, 300))

    states = bad = terminating = bad_equal = 0
    for c, q, d, fuel in cases:
        runs = run_all(c, d, fuel)
        sp = sp_semantic(c, q, d, runs=runs).states
        wp = wp_semantic(c, q, d, runs=runs).states
        term = termination_set(c, d, runs=runs).states
        states += d.size
        bad += len(StateSet(d, sp.bits ^ (wp & term).bits))
        if term.is_full():
            terminating += 1
            bad_equal += sp != wp
        link = check_sp_wp_link(c, q, d, fuel)
        bad += link.verdict is LinkVerdict.FAILS
    report(4, bad == 0 and bad_equal == 0,
           f"{len(cases)} cases, {states} states: sp = wp & T everywhere ({bad} mismatches); "
           f"sp = wp on all {terminating} always-terminating cases ({bad_equal} mismatches)")


def test_criterion_5_universal_properties(report):
    dom = helpers.small_domain()
    rng = random.Random(SEED + 5)
    pairs = checks = discrepancies = valid_access = valid_hoare = 0
    while pairs < 50:
        c = helpers.program(rng, depth=4)
        q = helpers.assertion(rng)
        runs = run_all(c, dom)
        sp = sp_semantic(c, q, dom, runs=runs).states
        wp = wp_semantic(c, q, dom, runs=runs).states
        pairs += 1
        for k in range(20):
            pset, _ = helpers.random_state_set_assertion(rng, dom)
            if k % 3 == 1:
                pset = pset | sp
            elif k % 3 == 2:
                pset = pset & wp
            p = pset.to_assertion()
            a = C.check_triple_semantic(C.access(p, c, q), dom, runs=runs).valid
            h = C.check_triple_semantic(C.hoare(p, c, q), dom, runs=runs).valid
            checks += 1
            valid_access += a
            valid_hoare += h
            discrepancies += (a != sp.issubset(pset)) + (h != pset.issubset(wp))
    report(5, discrepancies == 0,
           f"{pairs} (C,Q) pairs x 20 P = {checks} checks, {discrepancies} discrepancies "
           f"({valid_access} valid access, {valid_hoare} valid Hoare)")


def test_criterion_6_completeness_construction(report):
    dom = helpers.small_domain()
    rng = random.Random(SEED + 6)
    n = invalid = mismatched = 0
    for _ in range(60):
        c = helpers.program(rng, depth=4, loops=False)
        q = helpers.assertion(rng)
        pre = sp_syntactic(c, q)
        n += 1
        invalid += not C.check_triple_semantic(C.access(pre, c, q), dom).valid
        mismatched += _extension(dom, vcgen(c, q).pre) != sp_semantic(c, q, dom).states
    report(6, n >= 50 and invalid == 0 and mismatched == 0,
           f"{n} loop-free programs: {invalid} invalid sp-triples, {mismatched} vcgen/sp mismatches")


def test_criterion_7_vc_soundness(report):
    dom = helpers.small_domain()
    rng = random.Random(SEED + 7)
    attempted = proved = unsound = 0
    for k in range(300):
        c = helpers.program(rng, depth=4, closed=True)
        q = helpers.assertion(rng)
        if k % 3 == 0:
            c = helpers.guess_invariants(c, rng)
            p = helpers.assertion(rng)
        else:
            c = helpers.annotate(c, q, dom)
            sp = sp_semantic(c, q, dom).states
            extra, _ = helpers.random_state_set_assertion(rng, dom, density=0.2)
            p = (sp | extra).to_assertion() if k % 3 == 1 else helpers.assertion(rng)
        t = C.access(p, c, q)
        res = verify(t, dom)
        attempted += 1
        if res.proved:
            proved += 1
            unsound += not C.check_triple_semantic(t, dom).valid
    for name in ("hotel_p1", "hotel_p2", "checklist"):
        prog = parse_file(helpers.CORPUS / f"{name}.ahl")
        t = C.access(prog.pre, prog.stmt, prog.post)
        attempted += 1
        if verify(t, prog.domain).proved:
            proved += 1
            unsound += not C.check_triple_semantic(t, prog.domain).valid
    report(7, unsound == 0 and proved > 0,
           f"{proved}/{attempted} annotated triples proved, {unsound} proved but semantically invalid")


def test_criterion_8_admissible_rules(report):
    dom = helpers.small_domain()
    rng = random.Random(SEED + 8)
    pairs = failures = 0
    while pairs < 100:
        c = helpers.program(rng, depth=4, closed=True)
        derivs = []
        for _ in range(2):
            q = helpers.assertion(rng)
            extra, _ = helpers.random_state_set_assertion(rng, dom, density=0.2)
            p = (sp_semantic(c, q, dom).states | extra).to_assertion()
            res = verify(C.access(p, helpers.annotate(c, q, dom), q), dom)
            derivs.append(res.derivation if res.proved else None)
        pairs += 1
        if None in derivs:
            failures += 1
            continue
        for rule in (C.conj_rule, C.disj_rule):
            d = rule(*derivs)
            if not (C.check_triple_semantic(d.triple, dom).valid and C.check_derivation(d, dom).accepted):
                failures += 1
    report(8, failures == 0,
           f"{pairs} pairs of valid triples: conjunction and disjunction valid and accepted, "
           f"{failures} failures")


def test_criterion_9_divergence(report, capsys):
    prog = parse_file(helpers.CORPUS / "diverge.ahl")
    rng = random.Random(SEED + 9)
    posts = [prog.post, parse_assertion("true"), parse_assertion("false")]
    posts += [helpers.assertion(rng, ("x",)) for _ in range(20)]
    problems = []
    for q in posts:
        sp = sp_semantic(prog.stmt, q, prog.domain, fuel=500)
        wp = wp_semantic(prog.stmt, q, prog.domain, fuel=500)
        if len(sp.states) != 0 or not wp.states.is_full() or not (sp.qualified and wp.qualified):
            problems.append(f"sets for {render(q)}")
        for t in (C.access(prog.pre, prog.stmt, q), C.hoare(prog.pre, prog.stmt, q)):
            if C.check_triple_semantic(t, prog.domain, fuel=500).verdict is not C.Verdict.QUALIFIED:
                problems.append(f"triple verdict for {render(q)}")
        if check_sp_wp_link(prog.stmt, q, prog.domain, 500).verdict is not LinkVerdict.QUALIFIED:
            problems.append(f"link verdict for {render(q)}")
    for argv in (["check", "--flavor", "access"], ["check", "--flavor", "hoare"], ["sp", "--check-corollary"],
                 ["wp"]):
        code = main([argv[0], str(helpers.CORPUS / "diverge.ahl"), "--fuel", "500", *argv[1:]])
        r = json.loads(capsys.readouterr().out)
        if code != 2 or not r["qualified"] or r["verdict"] in ("valid", "holds"):
            problems.append(f"cli {' '.join(argv)}")
    report(9, not problems,
           f"{len(posts)} postconditions: sp empty, wp full, every verdict qualified"
           + (f"; problems: {problems}" if problems else ""))


_DRIVER = r"""
import hashlib, io, sys, contextlib
from ahl.cli import main
for argv in [line.split("\t") for line in sys.stdin.read().splitlines()]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    print(code, hashlib.sha256(buf.getvalue().encode()).hexdigest())
"""


def _command_lines(tmp_path):
    lines = []
    for path in helpers.CORPUS_FILES:
        f = str(path)
        prog = parse_file(path)
        lines += [["check", f], ["check", f, "--flavor", "hoare"], ["sp", f, "--check-corollary"],
                  ["wp", f], ["dual", f, "--check"], ["run", f, "--fuel", "500"]]
        if prog.pre is not None:
            lines.append(["verify", f])
        if not has_loop(prog.stmt):
            lines.append(["sp", f, "--syntactic"])
    for name in ("hotel_p1", "checklist"):
        f = str(helpers.CORPUS / f"{name}.ahl")
        d = str(tmp_path / f"{name}.json")
        lines.append(["verify", f, "--emit-derivation", d])
        lines.append(["prove", f, d])
    return lines


def test_criterion_10_round_trip_and_determinism(report, tmp_path):
    round_trip_failures = []
    for path in helpers.CORPUS_FILES:
        prog = parse_file(path)
        if parse_stmt(render(prog.stmt)) != prog.stmt:
            round_trip_failures.append(path.name)
        for a in (prog.pre, prog.post):
            if a is not None and parse_assertion(render(a)) != a:
                round_trip_failures.append(path.name)

    lines = _command_lines(tmp_path)
    stdin = "\n".join("\t".join(argv) for argv in lines)
    digests = []
    for hash_seed in ("1", "2", "1"):
        env = {**os.environ, "PYTHONHASHSEED": hash_seed}
        proc = subprocess.run([sys.executable, "-c", _DRIVER], input=stdin, capture_output=True,
                              text=True, env=env, check=True)
        digests.append(proc.stdout.splitlines())
    differing = [" ".join(lines[i]) for i in range(len(lines))
                 if len({d[i] for d in digests}) != 1]
    ok = not round_trip_failures and not differing and all(len(d) == len(lines) for d in digests)
    report(10, ok,
           f"round-trip on {len(helpers.CORPUS_FILES)} corpus files ({len(round_trip_failures)} failures); "
           f"{len(lines)} commands x 3 processes byte-identical ({len(differing)} differ)")
