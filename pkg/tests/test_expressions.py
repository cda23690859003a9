import math

import numpy as np
import pytest

from beamcontact.expressions import ParseError, parse_expression


def test_basic_arithmetic_and_precedence():
    assert parse_expression("2+3*4")(0.0) == 14.0
    assert parse_expression("2*3+4")(0.0) == 10.0
    assert parse_expression("2+3*x^2")(2.0) == 14.0
    assert parse_expression("(2+3)*x")(2.0) == 10.0
    assert parse_expression("7/2")(0.0) == 3.5
    assert parse_expression("1 - 2 - 3")(0.0) == -4.0
    assert parse_expression("12/3/2")(0.0) == 2.0


def test_power_is_right_associative_and_tight():
    assert parse_expression("2^3^2")(0.0) == 512.0
    assert parse_expression("-x^2")(3.0) == -9.0
    assert parse_expression("(-x)^2")(3.0) == 9.0
    assert parse_expression("2*x^3")(2.0) == 16.0


def test_functions_and_numbers():
    assert parse_expression("sin(x)")(0.5) == pytest.approx(math.sin(0.5))
    assert parse_expression("cos(x)^2 + sin(x)^2")(1.3) == pytest.approx(1.0)
    assert parse_expression("exp(-x)")(2.0) == pytest.approx(math.exp(-2.0))
    assert parse_expression("1.5e2")(0.0) == 150.0
    assert parse_expression(".25")(0.0) == 0.25
    assert parse_expression("x/2")(0.8) == 0.4


def test_array_evaluation_matches_scalar():
    expr = parse_expression("sin(2*x) + x^3 - 0.5")
    xs = np.linspace(-1.0, 1.0, 23)
    out = expr(xs)
    assert out.shape == xs.shape
    for xi, vi in zip(xs, out):
        assert expr(float(xi)) == pytest.approx(vi, abs=1e-15)


def test_constant_expression_broadcasts():
    expr = parse_expression("3")
    xs = np.linspace(0.0, 1.0, 5)
    np.testing.assert_array_equal(expr(xs), np.full(5, 3.0))


@pytest.mark.parametrize(
    "text",
    ["x/", "2**3", "foo(x)", "x+", "(x", "x)", "", "sin x", "1..2", "x 2"],
)
def test_malformed_expressions_raise(text):
    with pytest.raises(ParseError):
        parse_expression(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_expression("1 + foo")
    assert err.value.position == 4


def test_unexpected_character():
    with pytest.raises(ParseError):
        parse_expression("x & 2")


def test_derivative_polynomial():
    dd = parse_expression("x^3 - 2*x + 7").derivative()
    xs = np.linspace(-2.0, 2.0, 9)
    np.testing.assert_allclose(dd(xs), 3 * xs**2 - 2.0, atol=1e-12)


def test_derivative_against_central_differences():
    rng = np.random.default_rng(11)
    cases = [
        "x/2",
        "sin(3*x)*cos(x)",
        "exp(-x^2)",
        "(x^2 + 1)/(x + 3)",
        "2^x",
        "sin(x)^3",
    ]
    for text in cases:
        expr = parse_expression(text)
        dd = expr.derivative()
        for _ in range(10):
            x = rng.uniform(-1.0, 1.0)
            h = 1e-6
            fd = (expr(x + h) - expr(x - h)) / (2 * h)
            assert dd(x) == pytest.approx(fd, rel=1e-5, abs=1e-7), text


def test_derivative_of_general_power_rejected():
    with pytest.raises(ValueError):
        parse_expression("x^x").derivative()
    with pytest.raises(ValueError):
        parse_expression("(0-2)^x").derivative()


def test_derivative_text_reparses():
    dd = parse_expression("sin(2*x) + x^4").derivative()
    again = parse_expression(str(dd))
    xs = np.linspace(0.0, 1.0, 7)
    np.testing.assert_allclose(again(xs), dd(xs), atol=1e-14)


def test_division_by_zero_yields_nonfinite_not_raise():
    expr = parse_expression("1/x")
    assert not np.isfinite(expr(0.0))
