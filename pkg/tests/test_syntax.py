import random

import pytest
from hypothesis import given, settings, strategies as st

import helpers
from ahl.errors import AhlSyntaxError, DuplicateDeclaration, SortError
from ahl.syntax import (
    And, Assign, Atom, BinOp, BoolLit, Cmp, El, ExistsLe, If, IntLit, Lh, Not, NotA, Or, Seq,
    Skip, Var, While, check_stmt, parse_assertion, parse_expr, parse_file, parse_program,
    parse_stmt, render,
)

P1_TEXT = """
if not (dk == ck1)
  then { acc := (dk == ck2) }
  else { dk := ck2; acc := true }
"""

INV_TEXT = "acc == true || exists j <= lh(L) . j >= i && el(j, L) == p"


def test_parse_skip():
    assert parse_stmt("skip") == Skip()


def test_parse_hotel_p1():
    got = parse_stmt(P1_TEXT)
    want = If(Not(Cmp("==", Var("dk"), Var("ck1"))),
              Assign("acc", Cmp("==", Var("dk"), Var("ck2"))),
              Seq(Assign("dk", Var("ck2")), Assign("acc", BoolLit(True))))
    assert got == want


def test_parse_sequence():
    assert parse_stmt("x := y + 1; skip") == Seq(Assign("x", BinOp("+", Var("y"), IntLit(1))), Skip())


def test_parse_assertions():
    assert parse_assertion("ck1 == dk || ck2 == dk") == Or(
        Atom(Cmp("==", Var("ck1"), Var("dk"))), Atom(Cmp("==", Var("ck2"), Var("dk"))))
    assert parse_assertion("acc == true") == Atom(Cmp("==", Var("acc"), BoolLit(True)))
    got = parse_assertion("exists j <= lh(L) . j >= i && el(j,L) == p")
    assert got == ExistsLe("j", Lh(Var("L")), And(
        Atom(Cmp(">=", Var("j"), Var("i"))),
        Atom(Cmp("==", El(Var("j"), Var("L")), Var("p")))))


def test_word_and_symbol_operators_agree():
    assert parse_assertion("not (x == 1) and y == 2") == parse_assertion("!(x == 1) && y == 2")


def test_implication_is_right_associative():
    a = parse_assertion("x == 1 -> y == 1 -> z == 1")
    assert render(a) == "x == 1 -> y == 1 -> z == 1"
    assert parse_assertion(render(a)) == a


def test_parenthesised_expression_inside_assertion():
    a = parse_assertion("(x + 1) * 2 == 4")
    assert a == Atom(Cmp("==", BinOp("*", BinOp("+", Var("x"), IntLit(1)), IntLit(2)), IntLit(4)))


def test_unary_minus():
    assert parse_expr("-3") == IntLit(-3)
    assert parse_expr("-x") == BinOp("-", IntLit(0), Var("x"))


def test_precedence():
    assert parse_expr("1 + 2 * 3") == BinOp("+", IntLit(1), BinOp("*", IntLit(2), IntLit(3)))
    assert parse_expr("1 - 2 - 3") == BinOp("-", BinOp("-", IntLit(1), IntLit(2)), IntLit(3))


def test_print_skip():
    assert render(Skip()) == "skip"


def test_if_without_else_means_skip():
    assert parse_stmt("if x == 1 then { y := 2 }") == If(
        Cmp("==", Var("x"), IntLit(1)), Assign("y", IntLit(2)), Skip())


def test_branches_need_braces():
    with pytest.raises(AhlSyntaxError):
        parse_stmt("if x == 1 then y := 2 else y := 3")


def test_syntax_error_has_position():
    with pytest.raises(AhlSyntaxError) as info:
        parse_stmt("x := ;")
    assert info.value.line == 1 and info.value.col == 6


def test_comparisons_do_not_chain():
    with pytest.raises(AhlSyntaxError):
        parse_expr("1 < 2 < 3")


def test_invariant_attaches_to_following_while():
    c = parse_stmt("invariant: x >= 0 while x < 2 do { x := x + 1 }")
    assert isinstance(c, While)
    assert c.invariant == Atom(Cmp(">=", Var("x"), IntLit(0)))


def test_keywords_are_reserved():
    with pytest.raises(AhlSyntaxError):
        parse_stmt("while := 1")


def test_sort_errors():
    env = {"x": "int", "b": "bool"}
    with pytest.raises(SortError):
        check_stmt(parse_stmt("x := b"), env)
    with pytest.raises(SortError):
        check_stmt(parse_stmt("while x do { skip }"), env)
    with pytest.raises(SortError) as info:
        check_stmt(parse_stmt("y := 1"), env)
    assert info.value.name == "y"


def test_program_file_sections():
    prog = parse_program("""
domains:
  x in 0..2
  b in bool
pre: x == 0
post: b
program:
  b := x == 0
""")
    assert prog.env == {"x": "int", "b": "bool"}
    assert prog.domain.size == 6
    assert prog.post == Atom(Var("b"))


def test_duplicate_declaration():
    with pytest.raises(DuplicateDeclaration):
        parse_program("domains:\n x in 0..1\n x in bool\nprogram:\n skip\n")


def test_undeclared_variable_in_file():
    with pytest.raises(SortError):
        parse_program("domains:\n x in 0..1\nprogram:\n y := 1\n")


def test_binder_clashing_with_program_variable():
    with pytest.raises(SortError):
        parse_program("domains:\n x in 0..1\npre: exists x <= 2 . x == 1\npost: true\nprogram:\n skip\n")


def test_logical_variable_outside_binder():
    with pytest.raises(SortError):
        parse_program("domains:\n x in 0..1\npre: j == 1\npost: true\nprogram:\n skip\n")


def test_invariant_round_trip():
    a = parse_assertion(INV_TEXT)
    assert parse_assertion(render(a)) == a


@pytest.mark.parametrize("path", helpers.CORPUS_FILES, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    prog = parse_file(path)
    assert parse_stmt(render(prog.stmt)) == prog.stmt
    for a in (prog.pre, prog.post):
        if a is not None:
            assert parse_assertion(render(a)) == a


def test_parser_is_deterministic():
    assert parse_stmt(P1_TEXT) == parse_stmt(P1_TEXT)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random_programs(seed):
    rng = random.Random(seed)
    c = helpers.program(rng, depth=5)
    assert parse_stmt(render(c)) == c
    c2 = helpers.guess_invariants(c, rng)
    assert parse_stmt(render(c2)) == c2


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random_assertions(seed):
    a = helpers.assertion(random.Random(seed), depth=4)
    assert parse_assertion(render(a)) == a


def test_not_over_comparison_atom_round_trips():
    a = NotA(Atom(Cmp("==", Var("x"), IntLit(1))))
    assert parse_assertion(render(a)) == a
