from linopen.expr.nodes import (
    ExprNode,
    Constant,
    StateVariable,
    ControlVariable,
    Negation,
    Addition,
    Subtraction,
    Multiplication,
    Division,
    Power,
    FunctionCall,
    FUNCTIONS,
    compile_components,
    vectorize_components,
)
from linopen.expr.parser import parse_expr
from linopen.expr.affine import detect_control_affine, span_dimension_estimate

__all__ = [
    "ExprNode",
    "Constant",
    "StateVariable",
    "ControlVariable",
    "Negation",
    "Addition",
    "Subtraction",
    "Multiplication",
    "Division",
    "Power",
    "FunctionCall",
    "FUNCTIONS",
    "compile_components",
    "vectorize_components",
    "parse_expr",
    "detect_control_affine",
    "span_dimension_estimate",
]
