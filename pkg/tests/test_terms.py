import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_first_counterexample, random_term
from quasikit.constructions import resolve_group
from quasikit.tables import random_latin_square, validate_table
from quasikit.terms import (
    ALWAYS_ALLOWED,
    Binary,
    BudgetExceeded,
    ConstU,
    Identity,
    MissingEquals,
    TermSyntaxError,
    UnboundVariable,
    Var,
    check_identity,
    eval_term,
    evaluate,
    format_term,
    parse_identity,
    parse_loop_identity,
    parse_term,
    term_size,
)

M3 = validate_table([[0, 2, 1], [1, 0, 2], [2, 1, 0]])
MEDIAL = "(x*y)*(z*w) = (x*z)*(y*w)"
AXIOMS = ("x*(x\\y) = y", "x\\(x*y) = y", "(x*y)/y = x", "(x/y)*y = x")


# -- parsing ------------------------------------------------------------------

def test_parse_examples():
    x, y, z = Var("x"), Var("y"), Var("z")
    assert parse_term("x*(x\\y)") == Binary("*", x, Binary("\\", x, y))
    assert parse_term("x/y/z") == Binary("/", Binary("/", x, y), z)
    assert parse_term(" x * y \\ z ") == Binary("\\", Binary("*", x, y), z)
    assert parse_term("u") == ConstU()
    assert parse_term("u1") == Var("u1")


@pytest.mark.parametrize("text, offset", [("x*)", 2), ("(x*y", 4), ("x y", 2), ("*x", 0), ("x+y", 1), ("", 0)])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(TermSyntaxError) as exc:
        parse_term(text)
    assert exc.value.position == offset
    assert exc.value.expected


def test_parse_identity():
    ident = parse_identity("x\\(y*(u1\\v)) = u1\\(y*(x\\v))")
    assert ident.variables == ("x", "y", "u1", "v")
    assert parse_identity("x = x").variables == ("x",)
    assert parse_identity("u = u").variables == ()
    with pytest.raises(TermSyntaxError):
        parse_identity("x = ")
    with pytest.raises(MissingEquals):
        parse_identity("x*y")
    with pytest.raises(TermSyntaxError):
        parse_identity("x = y = z")


def test_loop_grammar():
    ident = parse_loop_identity("(x+y)+z = x+(y+z)")
    assert ident.variables == ("x", "y", "z")
    with pytest.raises(TermSyntaxError):
        parse_loop_identity("x*y = y*x")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 12))
def test_print_parse_roundtrip(seed, internal):
    t = random_term(random.Random(seed), internal, names=("x", "y", "z2", "abc"), u_rate=0.3)
    assert parse_term(format_term(t)) == t
    assert term_size(t) == 2 * internal + 1


# -- evaluation ---------------------------------------------------------------

def test_eval_examples():
    assert eval_term("x/y", M3, {"x": 1, "y": 2}) == 0
    assert eval_term("u", M3) == 0
    assert eval_term("u", M3, u=2) == 2
    with pytest.raises(UnboundVariable):
        eval_term("x*y", M3, {"x": 0})


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6), st.data())
def test_eval_axiom(n, seed, data):
    Q = random_latin_square(n, seed)
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    assert eval_term("x*(x\\y)", Q, {"x": a, "y": b}) == b


# -- identity checking --------------------------------------------------------

def test_medial_identity_examples():
    v = check_identity(M3, MEDIAL)
    assert v.holds and v.counterexample is None and v.assignments_checked == 81
    s3 = check_identity(resolve_group("S3"), MEDIAL)
    # frozen from a plain Python scan of the S3 table
    assert not s3.holds and s3.counterexample == (("x", 0), ("y", 1), ("z", 2), ("w", 0))


@pytest.mark.parametrize("axiom", AXIOMS)
@pytest.mark.parametrize("n", [1, 2, 5, 7])
def test_axioms_hold(axiom, n):
    for seed in range(5):
        assert check_identity(random_latin_square(n, seed), axiom).holds


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6), st.integers(0, 2**32))
def test_counterexample_is_lexicographically_first(n, seed, tseed):
    rng = random.Random(tseed)
    Q = random_latin_square(n, seed)
    ident = Identity(random_term(rng, rng.randint(0, 4)), random_term(rng, rng.randint(0, 4)))
    u = rng.randrange(n)
    verdict = check_identity(Q, ident, u=u)
    expected = brute_first_counterexample(Q, ident, u=u)
    assert verdict.holds == (expected is None)
    if expected is not None:
        assert verdict.counterexample == expected
    assert verdict.assignments_checked <= n ** len(ident.variables)


def test_chunked_scan_matches_plain_scan():
    # 8^7 assignments are scanned in several blocks
    Q = resolve_group("Z8")
    ident = parse_identity("((((((a*b)*c)*d)*e)*f)*g)*u = ((((((a*b)*c)*d)*e)*f)*g)*(u\\(u*(g/g)))")
    assert check_identity(Q, ident).holds
    # a*a = a only for a = 0, so the first failure lies in the second block
    wrong = parse_identity("((((((a*a)*b)*c)*d)*e)*f)*g = (((((a*b)*c)*d)*e)*f)*g")
    v = check_identity(Q, wrong)
    assert not v.holds
    assert v.counterexample == brute_first_counterexample(Q, wrong)
    assert v.counterexample[0] == ("a", 1)


def test_budget():
    Q = random_latin_square(7, 0)
    five = parse_identity("(((x*y)*z)*w)*v = (((x*y)*z)*w)*v")
    with pytest.raises(BudgetExceeded) as exc:
        check_identity(Q, five, budget=1000)
    assert (exc.value.k, exc.value.n) == (5, 7)
    # five variables over order 6 are always allowed
    assert 6**5 <= ALWAYS_ALLOWED
    assert check_identity(random_latin_square(6, 0), five, budget=10).holds


def test_verdict_serialization():
    v = check_identity(M3, "x*y = y*x")
    assert v.to_dict() == {"verdict": "fails", "counterexample": [["x", 0], ["y", 1]]}
    assert v.assignment == {"x": 0, "y": 1}
    assert check_identity(M3, "x = x").to_dict() == {"verdict": "holds", "counterexample": None}


def test_array_evaluation_matches_scalar():
    Q = random_latin_square(5, 11)
    t = parse_term("(x/(y*u))\\(x*y)")
    xs, ys = np.meshgrid(np.arange(5), np.arange(5), indexing="ij")
    arr = evaluate(t, Q, {"x": xs, "y": ys})
    assert all(arr[a, b] == eval_term(t, Q, {"x": a, "y": b}) for a in range(5) for b in range(5))
