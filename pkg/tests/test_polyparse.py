"""Surface syntax: grammar coverage, diagnostics, round-trip stability."""

import random
import string

import pytest

from dworkbox import ParseError, SuperElement, VariableContext, parse, render
from dworkbox.verify import random_element


@pytest.fixture
def ctx():
    return VariableContext(2, 1, (3,))


def test_parse_dwork_potential(ctx):
    e = parse("y1*(x0^3 + x1^3 + x2^3)", ctx)
    assert e == parse("y1*x0^3 + y1*x1^3 + y1*x2^3", ctx)


def test_parse_two_term_rational(ctx):
    e = parse("3/2*x0^2*y1 - x1*x2*y1", ctx)
    assert len(e.terms) == 2
    assert render(e) == "3/2*y1*x0^2 - y1*x1*x2"


def test_parse_eta_variables(ctx):
    assert parse("e1*e2", ctx) == SuperElement.eta(ctx, 1) * SuperElement.eta(ctx, 2)
    assert parse("e2*e1", ctx) == -parse("e1*e2", ctx)


def test_parse_parentheses_and_powers(ctx):
    e = parse("(x0 + x1)*(x0 + x1)", ctx)
    assert e == parse("x0^2 + 2*x0*x1 + x1^2", ctx)
    assert parse("x0^0", ctx) == SuperElement.one(ctx)
    # powers attach to variables only; parenthesized powers are not grammar
    with pytest.raises(ParseError):
        parse("(x0 + x1)^2", ctx)


def test_parse_leading_minus(ctx):
    assert parse("-x0", ctx) == -parse("x0", ctx)
    assert parse("-3/4*x0 + x1", ctx) == parse("x1 - 3/4*x0", ctx)


def test_index_range_errors(ctx):
    with pytest.raises(ParseError):
        parse("x5", ctx)
    with pytest.raises(ParseError):
        parse("y2", ctx)
    with pytest.raises(ParseError):
        parse("y0", ctx)
    with pytest.raises(ParseError):
        parse("e0", ctx)
    with pytest.raises(ParseError):
        parse("e5", ctx)


def test_eta_power_rejected(ctx):
    with pytest.raises(ParseError):
        parse("e1^2", ctx)
    assert parse("e1^1", ctx) == SuperElement.eta(ctx, 1)


def test_implicit_multiplication_rejected(ctx):
    with pytest.raises(ParseError):
        parse("2x0", ctx)
    with pytest.raises(ParseError):
        parse("x0 x1", ctx)


def test_syntax_errors_carry_position(ctx):
    with pytest.raises(ParseError) as info:
        parse("x0 + ", ctx)
    assert info.value.column == 6
    with pytest.raises(ParseError) as info:
        parse("x0 +\n* x1", ctx)
    assert info.value.line == 2
    with pytest.raises(ParseError) as info:
        parse("x0 $ x1", ctx)
    assert "'$'" in str(info.value)


def test_malformed_rational(ctx):
    with pytest.raises(ParseError):
        parse("1/0", ctx)
    with pytest.raises(ParseError):
        parse("3/", ctx)


def test_render_zero(ctx):
    assert render(SuperElement.zero(ctx)) == "0"
    assert parse("0", ctx).is_zero()


def test_render_sign_folding(ctx):
    e = parse("e2*e1", ctx)  # = -e1*e2
    assert render(e) == "-e1*e2"
    assert parse(render(e), ctx) == e


def test_render_unit_coefficients(ctx):
    assert render(parse("1*x0", ctx)) == "x0"
    assert render(parse("-1*x0", ctx)) == "-x0"
    assert render(parse("5", ctx)) == "5"
    assert render(parse("-5/3", ctx)) == "-5/3"


def test_round_trip_random(ctx):
    rng = random.Random(90)
    for _ in range(500):
        e = random_element(ctx, rng, terms=rng.randint(1, 5))
        assert parse(render(e), ctx) == e


def test_round_trip_other_context():
    ctx = VariableContext(3, 2, (2, 4))
    rng = random.Random(91)
    for _ in range(200):
        e = random_element(ctx, rng, terms=3)
        assert parse(render(e), ctx) == e


def test_render_is_canonical_and_idempotent(ctx):
    rng = random.Random(92)
    for _ in range(200):
        e = random_element(ctx, rng, terms=4)
        text = render(e)
        assert render(parse(text, ctx)) == text


def test_parser_totality_fuzz(ctx):
    rng = random.Random(93)
    alphabet = "xye0123456789+-*/^() .\n" + string.ascii_lowercase
    for _ in range(800):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 24)))
        try:
            parse(text, ctx)
        except ParseError as exc:
            assert exc.line >= 1 and exc.column >= 1
        # any other exception type is a bug and fails the test


def test_whitespace_insensitive(ctx):
    assert parse(" y1 * x0 ^ 3 ", ctx) == parse("y1*x0^3", ctx)
    assert parse("x0\n+\nx1", ctx) == parse("x0 + x1", ctx)
