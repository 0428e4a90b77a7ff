"""Parsing of field elements from text.

Grammar: rational literals, ``eta``, ``theta``, ``sqrt(...)`` of an element of
F, ``sqrtD`` for a discriminant given as context, the operators ``+ - * / ^``
and parentheses.  In numeric mode ``e``, ``pi`` and decimal literals are also
allowed.  The printed form of every exact value
parses back to the same value.
"""

from __future__ import annotations

import ast
from fractions import Fraction

from .numerics import E, PI, NumericReal
from .tower import ETA, THETA, FElem, LElem, MismatchedContext, QuadRealElem, sqrt_in_L


class ParseError(ValueError):
    pass


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


class _Evaluator:
    def __init__(self, text: str, numeric: bool, D):
        self.text = text
        self.numeric = numeric
        self.D = D

    def __call__(self, node):
        method = getattr(self, "visit_" + type(node).__name__, None)
        if method is None:
            raise ParseError(f"unsupported syntax: {ast.get_source_segment(self.text, node) or type(node).__name__}")
        return method(node)

    def visit_Expression(self, node):
        return self(node.body)

    def visit_Constant(self, node):
        value = node.value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"unsupported literal {value!r}")
        if isinstance(value, int):
            return Fraction(value)
        if not self.numeric:
            raise ParseError("decimal literals need numeric mode")
        return NumericReal.lift(Fraction(ast.get_source_segment(self.text, node)))

    def visit_Name(self, node):
        if node.id == "eta":
            return ETA.to_L()
        if node.id == "theta":
            return THETA
        if node.id == "sqrtD":
            if self.D is None:
                raise ParseError("'sqrtD' needs a discriminant")
            root = sqrt_in_L(self.D)
            return root if root is not None else QuadRealElem(0, 1, self.D)
        if node.id in ("e", "pi"):
            if not self.numeric:
                raise ParseError(f"'{node.id}' needs numeric mode")
            return E if node.id == "e" else PI
        raise ParseError(f"unknown name {node.id!r}")

    def visit_UnaryOp(self, node):
        value = self(node.operand)
        if isinstance(node.op, ast.USub):
            return -value
        if isinstance(node.op, ast.UAdd):
            return value
        raise ParseError("unsupported unary operator")

    def visit_BinOp(self, node):
        left, right = self(node.left), self(node.right)
        if isinstance(node.op, ast.Pow):
            if not isinstance(right, Fraction) or right.denominator != 1:
                raise ParseError("exponents must be integers")
            return left ** int(right)
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ParseError("unsupported operator")
        try:
            return op(left, right)
        except ZeroDivisionError as exc:
            raise ParseError("division by zero") from exc

    def visit_Call(self, node):
        if not (isinstance(node.func, ast.Name) and node.func.id == "sqrt") or len(node.args) != 1 or node.keywords:
            raise ParseError("only sqrt(x) is supported")
        arg = self(node.args[0])
        if isinstance(arg, NumericReal):
            raise ParseError("sqrt of a numeric value is not supported")
        arg = LElem.coerce(arg)
        if not arg.in_F():
            raise ParseError("sqrt argument must lie in Q(eta)")
        root = sqrt_in_L(arg)
        if root is not None:
            return root
        if arg.sign() <= 0:
            raise ParseError("sqrt argument must be positive")
        return QuadRealElem(0, 1, arg.even_part())


def parse(text: str, numeric: bool = False, D=None):
    """Parse ``text`` to an LElem, QuadRealElem or (numeric mode) NumericReal.

    ``D`` (an element of F) gives meaning to the symbol ``sqrtD``.
    """
    source = text.strip().replace("^", "**")
    if not source:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from exc
    if D is not None:
        D = FElem.coerce(D) if not isinstance(D, LElem) else D.even_part()
    try:
        value = _Evaluator(source, numeric, D)(tree)
    except MismatchedContext as exc:
        raise ParseError(str(exc)) from exc
    if isinstance(value, Fraction):
        return LElem.coerce(value)
    return value
