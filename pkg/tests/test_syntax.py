import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openfuture.errors import PropositionSyntaxError
from openfuture.logic import And, Atom, Not, Or, atoms, parse, to_text

labels = st.one_of(
    st.sampled_from(["alive", "dead", "died@3", "up", "X", "a.b-c", "_x"]),
    st.sampled_from(["NOT", "AND", "0", "two words", 'qu"ote', "back\\slash", "é"]),
)
times = st.one_of(
    st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
    st.sampled_from([0.0, 1.0, 2.5, 1e-7, 0.01]),
)
propositions = st.recursive(
    st.builds(Atom, labels, times),
    lambda sub: st.one_of(st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub)),
    max_leaves=12,
)


def test_atom():
    assert parse("X(alive, 2.0)") == Atom("alive", 2.0)


def test_not_binds_tighter_than_and():
    assert parse("NOT X(a,1) AND X(b,2)") == And(Not(Atom("a", 1)), Atom("b", 2))


def test_and_binds_tighter_than_or():
    assert parse("X(a,1) OR X(b,1) AND X(c,1)") == Or(Atom("a", 1), And(Atom("b", 1), Atom("c", 1)))


def test_left_associative():
    p = parse("X(a,1) OR X(b,1) OR X(c,1)")
    assert p == Or(Or(Atom("a", 1), Atom("b", 1)), Atom("c", 1))


def test_parentheses_and_whitespace():
    p = parse("  NOT(\tX ( a , 1 )OR X(\"b c\",-2.5e0))  ")
    assert p == Not(Or(Atom("a", 1), Atom("b c", -2.5)))


def test_quoted_escapes():
    assert parse(r'X("a\"b\\c", 0)') == Atom('a"b\\c', 0)


def test_double_not():
    assert parse("NOT NOT X(a, .5)") == Not(Not(Atom("a", 0.5)))


def test_atoms_iterates_leaves():
    p = parse("X(a,1) AND NOT (X(b,2) OR X(a,3))")
    assert [a.label for a in atoms(p)] == ["a", "b", "a"]


@pytest.mark.parametrize("text,column,fragment", [
    ("X(a,1) OR", 10, "end of input"),
    ("", 1, "empty"),
    ("   ", 1, "empty"),
    ("X(a,1) X(b,2)", 8, "found 'X'"),
    ("X(a 1)", 5, "','"),
    ("X(a,1", 6, "')'"),
    ("(X(a,1)", 8, "')'"),
    ("X(a,b)", 5, "decimal time"),
    ("X(NOT,1)", 3, "label"),
    ("X(a,1) & X(b,1)", 8, "unexpected character"),
    ('X("a,1)', 3, "unterminated"),
    ("Y(a,1)", 1, "atom"),
    ("AND X(a,1)", 1, "found 'AND'"),
])
def test_errors_have_positions(text, column, fragment):
    with pytest.raises(PropositionSyntaxError) as info:
        parse(text)
    assert info.value.column == column
    assert fragment in str(info.value)
    assert info.value.caret().splitlines()[-1] == " " * (column - 1) + "^"


@settings(max_examples=500, deadline=None)
@given(propositions)
def test_print_parse_round_trip(p):
    text = to_text(p)
    assert parse(text) == p
    assert to_text(parse(text)) == text
