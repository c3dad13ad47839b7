# =============================================================================
# Linopen Expression Parser
# =============================================================================
#
# Recursive descent parser for the system-definition expression language:
#
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := base ('^' number)?
#   base   := number | ident | '(' expr ')' | '-' base | func '(' expr ')'
#   ident  := ('x'|'u') digits
#   func   := 'sin' | 'cos' | 'exp' | 'tanh'
#
# Note that, following the grammar, unary minus binds tighter than '^', so
# that "-x1^2" reads as (-x1)^2. A minus sign directly before a number is
# folded into the literal, so "-2" reads as the constant -2.0 and unparses
# back to it. Literals overflowing to infinity are rejected.
#
import re
import math
from collections import namedtuple

from linopen.exceptions import (
    ExpressionSyntaxError,
    UnknownIdentifierError,
    NonConstantExponentError,
)
from linopen.expr.nodes import (
    FUNCTIONS,
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
)

Token = namedtuple("Token", ("kind", "text", "offset"))

TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
    |(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<name>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

VARIABLE_RE = re.compile(r"^([xu])([1-9]\d*)$")

BINARY_OPERATIONS = {
    "+": Addition,
    "-": Subtraction,
    "*": Multiplication,
    "/": Division,
}


def byte_offset(text: str, position: int) -> int:
    return len(text[:position].encode("utf-8"))


def tokenize(text: str):
    tokens = []
    position = 0

    while position < len(text):
        match = TOKEN_RE.match(text, position)

        if match is None:
            raise ExpressionSyntaxError(
                'unexpected character "%s"' % text[position],
                offset=byte_offset(text, position),
            )

        kind = match.lastgroup

        if kind != "space":
            tokens.append(
                Token(kind, match.group(kind), byte_offset(text, position))
            )

        position = match.end()

    tokens.append(Token("end", "", byte_offset(text, len(text))))

    return tokens


class ExpressionParser(object):
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def at_op(self, *symbols) -> bool:
        token = self.current
        return token.kind == "op" and token.text in symbols

    def expect_op(self, symbol: str) -> Token:
        if not self.at_op(symbol):
            raise self.unexpected('expected "%s"' % symbol)

        return self.advance()

    def unexpected(self, expectation: str) -> ExpressionSyntaxError:
        token = self.current

        if token.kind == "end":
            found = "end of input"
        else:
            found = '"%s"' % token.text

        return ExpressionSyntaxError(
            "%s but found %s" % (expectation, found), offset=token.offset
        )

    def parse(self):
        node = self.parse_expression()

        if self.current.kind != "end":
            raise self.unexpected("expected an operator")

        return node

    def parse_expression(self):
        node = self.parse_term()

        while self.at_op("+", "-"):
            operation = BINARY_OPERATIONS[self.advance().text]
            node = operation(node, self.parse_term())

        return node

    def parse_term(self):
        node = self.parse_factor()

        while self.at_op("*", "/"):
            operation = BINARY_OPERATIONS[self.advance().text]
            node = operation(node, self.parse_factor())

        return node

    def parse_factor(self):
        node = self.parse_base()

        if self.at_op("^"):
            self.advance()
            offset = self.current.offset
            exponent = self.parse_base()

            # A parenthesized negative number is still a constant exponent
            if isinstance(exponent, Negation) and isinstance(
                exponent.operand, Constant
            ):
                exponent = Constant(-exponent.operand.value)

            if not isinstance(exponent, Constant):
                raise NonConstantExponentError(
                    "exponent should be a constant number", offset=offset
                )

            node = Power(node, exponent)

        return node

    def parse_base(self):
        token = self.current

        if token.kind == "number":
            self.advance()
            return self.parse_number(token)

        if token.kind == "name":
            return self.parse_name()

        if self.at_op("("):
            self.advance()
            node = self.parse_expression()
            self.expect_op(")")
            return node

        if self.at_op("-"):
            self.advance()

            # A minus sign before a literal is part of the number
            if self.current.kind == "number":
                return Constant(-self.parse_number(self.advance()).value)

            return Negation(self.parse_base())

        raise self.unexpected("expected a number, a variable or a parenthesis")

    def parse_number(self, token):
        value = float(token.text)

        if not math.isfinite(value):
            raise ExpressionSyntaxError(
                "number %s is out of range" % token.text, offset=token.offset
            )

        return Constant(value)

    def parse_name(self):
        token = self.advance()
        name = token.text

        if name in FUNCTIONS:
            self.expect_op("(")
            argument = self.parse_expression()
            self.expect_op(")")
            return FunctionCall(name, argument)

        match = VARIABLE_RE.match(name)

        if match is None:
            raise UnknownIdentifierError(
                'unknown identifier "%s"' % name, offset=token.offset
            )

        index = int(match.group(2))

        if match.group(1) == "x":
            return StateVariable(index)

        return ControlVariable(index)


def parse_expr(text: str):
    """
    Function parsing the given text as an expression of the system-definition
    language and returning its AST.

    Identifiers are 1-indexed state (`x1`, `x2`...) or control (`u1`...)
    variables, and the only supported functions are `sin`, `cos`, `exp` and
    `tanh`. Exponents must be constant numbers.

    Args:
        text (str): expression to parse.

    Returns:
        ExprNode: root of the parsed tree.

    Example:
        from linopen import parse_expr

        parse_expr("x1^3 + x2").unparse()
        >>> "x1^3.0 + x2"
    """
    if not isinstance(text, str):
        raise TypeError("expected a string but got %s" % type(text).__name__)

    if not text.strip():
        raise ExpressionSyntaxError("empty expression", offset=0)

    return ExpressionParser(text).parse()
