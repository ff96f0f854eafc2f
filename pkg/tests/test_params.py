import math

import numpy as np
import pytest

from qencode.params import Expr, Parameter, parameter_vector, parse_angle


def test_expression_evaluates_and_lists_parameters():
    a, b = Parameter("x[0]"), Parameter("x[1]")
    e = 2.0 * (math.pi - a) * (math.pi - b)
    assert e.parameters == ("x[0]", "x[1]")
    assert e.evaluate({"x[0]": 1.0, "x[1]": 2.0}) == pytest.approx(2 * (math.pi - 1) * (math.pi - 2))


def test_evaluate_is_elementwise():
    e = 2.0 * Parameter("t")
    np.testing.assert_allclose(e.evaluate({"t": np.array([0.5, 1.0])}), [1.0, 2.0])


def test_substitute_partial_and_full():
    a, b = parameter_vector("x", 2)
    e = a * b + 1.0
    partial = e.substitute({"x[0]": 3.0})
    assert isinstance(partial, Expr) and partial.parameters == ("x[1]",)
    assert partial.evaluate({"x[1]": 2.0}) == 7.0
    assert e.substitute({"x[0]": 3.0, "x[1]": 2.0}) == 7.0


def test_missing_binding_names_parameter():
    with pytest.raises(KeyError, match="theta"):
        Parameter("theta").evaluate({})


@pytest.mark.parametrize("expr", [
    2.0 * Parameter("x[0]"),
    2.0 * (math.pi - Parameter("x[0]")) * (math.pi - Parameter("x[3]")),
    Parameter("a") - (Parameter("b") - 1.5),
    -Parameter("z") + 0.25,
])
def test_string_round_trip(expr):
    back = parse_angle(str(expr))
    vals = {name: 0.1 * (i + 1) for i, name in enumerate(expr.parameters)}
    assert back.parameters == expr.parameters
    assert back.evaluate(vals) == pytest.approx(expr.evaluate(vals), abs=1e-15)


def test_parse_rejects_calls():
    with pytest.raises(ValueError):
        parse_angle("sin(x)")
