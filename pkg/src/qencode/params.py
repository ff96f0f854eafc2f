"""Symbolic gate angles.

A gate angle is either a plain float or an :class:`Expr` tree over named
parameters. Evaluation works elementwise on numpy arrays, so one expression
can be bound to a whole batch of samples at once.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

Number = Union[int, float]
Angle = Union[float, "Expr"]


@dataclass(frozen=True)
class Expr:
    op: str  # sym | const | add | sub | mul | neg
    args: tuple

    # -- construction -------------------------------------------------------
    @staticmethod
    def _wrap(value) -> Expr:
        if isinstance(value, Expr):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return Expr("const", (float(value),))
        return NotImplemented

    def _binary(self, op, other, reflected=False):
        other = Expr._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return Expr(op, (other, self) if reflected else (self, other))

    def __add__(self, other):
        return self._binary("add", other)

    def __radd__(self, other):
        return self._binary("add", other, reflected=True)

    def __sub__(self, other):
        return self._binary("sub", other)

    def __rsub__(self, other):
        return self._binary("sub", other, reflected=True)

    def __mul__(self, other):
        return self._binary("mul", other)

    def __rmul__(self, other):
        return self._binary("mul", other, reflected=True)

    def __neg__(self):
        return Expr("neg", (self,))

    # -- inspection ---------------------------------------------------------
    @property
    def parameters(self) -> tuple[str, ...]:
        """Parameter names in order of first appearance."""
        if self.op == "sym":
            return (self.args[0],)
        if self.op == "const":
            return ()
        seen: dict[str, None] = {}
        for a in self.args:
            for name in a.parameters:
                seen.setdefault(name)
        return tuple(seen)

    @property
    def is_symbol(self) -> bool:
        return self.op == "sym"

    def evaluate(self, bindings: Mapping[str, object]):
        if self.op == "sym":
            try:
                return bindings[self.args[0]]
            except KeyError:
                raise KeyError(f"missing binding for parameter {self.args[0]!r}") from None
        if self.op == "const":
            return self.args[0]
        if self.op == "neg":
            return -self.args[0].evaluate(bindings)
        a, b = (arg.evaluate(bindings) for arg in self.args)
        if self.op == "add":
            return a + b
        if self.op == "sub":
            return a - b
        return a * b

    def substitute(self, values: Mapping[str, float]) -> Angle:
        """Replace bound symbols; collapses to a float once nothing is free."""
        if not any(name in values for name in self.parameters):
            return self
        free = [n for n in self.parameters if n not in values]
        if not free:
            return float(self.evaluate(values))
        if self.op == "sym":
            return self  # unreachable: handled above
        new_args = []
        for a in self.args:
            sub = a.substitute(values)
            new_args.append(Expr._wrap(sub))
        return Expr(self.op, tuple(new_args))

    def __str__(self) -> str:
        return _render(self, 0)

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"


def Parameter(name: str) -> Expr:
    return Expr("sym", (name,))


def parameter_vector(prefix: str, length: int) -> list[Expr]:
    return [Parameter(f"{prefix}[{i}]") for i in range(length)]


_PREC = {"add": 1, "sub": 1, "mul": 2, "neg": 3, "sym": 4, "const": 4}


def _render(e: Expr, parent: int) -> str:
    if e.op == "sym":
        return e.args[0]
    if e.op == "const":
        v = e.args[0]
        if v == math.pi:
            return "pi"
        return repr(v)
    prec = _PREC[e.op]
    if e.op == "neg":
        s = "-" + _render(e.args[0], prec)
    else:
        sym = {"add": " + ", "sub": " - ", "mul": "*"}[e.op]
        # right operand of sub binds tighter to keep a - (b - c) intact
        right_prec = prec + 1 if e.op == "sub" else prec
        s = _render(e.args[0], prec) + sym + _render(e.args[1], right_prec)
    return f"({s})" if prec < parent else s


def parse_angle(text: str) -> Angle:
    """Inverse of ``str(expr)``: parses names like ``x[0]``, ``pi`` and + - * ."""
    tree = ast.parse(text, mode="eval").body
    result = _from_ast(tree)
    if isinstance(result, Expr) and result.op == "const":
        return result.args[0]
    return result


def _from_ast(node) -> Expr:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return Expr("const", (float(node.value),))
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return Expr("const", (math.pi,))
        return Parameter(node.id)
    if isinstance(node, ast.Subscript):
        if not isinstance(node.value, ast.Name):
            raise ValueError("unsupported subscript in angle expression")
        index = node.slice
        if not (isinstance(index, ast.Constant) and isinstance(index.value, int)):
            raise ValueError("parameter index must be an integer literal")
        return Parameter(f"{node.value.id}[{index.value}]")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_from_ast(node.operand)
    if isinstance(node, ast.BinOp):
        ops = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul"}
        op = ops.get(type(node.op))
        if op is None:
            raise ValueError(f"unsupported operator {type(node.op).__name__}")
        return Expr(op, (_from_ast(node.left), _from_ast(node.right)))
    raise ValueError(f"unsupported angle expression: {ast.dump(node)}")
