"""Recursive-descent parser for the restricted program dialect.

The grammar admits exactly one function definition per program: def with
optional parameter defaults and return annotation, assignment and
augmented assignment, if/elif/else, for (with tuple targets), while,
return/pass/break/continue, and an expression language with boolean
operators, chained comparisons, arithmetic, calls, attribute access,
subscripts and slices, list and dict displays, single-clause list
comprehensions, and f-strings. Everything else is a parse error, with
indentation faults flagged separately from other syntax faults.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from .lexer import FStringExpr, LexError, Token, TokenKind, tokenize, tokenize_expression


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int = 0, *, indentation: bool = False):
        super().__init__(f"{message} (line {line})")
        self.message = message
        self.line = line
        self.col = col
        self.indentation = indentation


# Expressions

@dataclass(frozen=True, slots=True)
class Name:
    id: str
    line: int


@dataclass(frozen=True, slots=True)
class Literal:
    value: Any
    line: int


@dataclass(frozen=True, slots=True)
class FString:
    parts: tuple[Union[str, "Expr"], ...]
    line: int


@dataclass(frozen=True, slots=True)
class ListLit:
    items: tuple["Expr", ...]
    line: int


@dataclass(frozen=True, slots=True)
class DictLit:
    pairs: tuple[tuple["Expr", "Expr"], ...]
    line: int


@dataclass(frozen=True, slots=True)
class ListComp:
    element: "Expr"
    targets: tuple[str, ...]
    iterable: "Expr"
    condition: "Expr | None"
    line: int


@dataclass(frozen=True, slots=True)
class BoolOp:
    op: str  # "and" | "or"
    values: tuple["Expr", ...]
    line: int


@dataclass(frozen=True, slots=True)
class NotOp:
    operand: "Expr"
    line: int


@dataclass(frozen=True, slots=True)
class UnaryOp:
    op: str  # "-" | "+"
    operand: "Expr"
    line: int


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int


@dataclass(frozen=True, slots=True)
class Compare:
    left: "Expr"
    ops: tuple[str, ...]
    comparators: tuple["Expr", ...]
    line: int


@dataclass(frozen=True, slots=True)
class Call:
    func: "Expr"
    args: tuple["Expr", ...]
    line: int


@dataclass(frozen=True, slots=True)
class Attribute:
    value: "Expr"
    attr: str
    line: int


@dataclass(frozen=True, slots=True)
class SliceExpr:
    start: "Expr | None"
    stop: "Expr | None"
    line: int


@dataclass(frozen=True, slots=True)
class Subscript:
    value: "Expr"
    index: "Expr | SliceExpr"
    line: int


Expr = Union[
    Name, Literal, FString, ListLit, DictLit, ListComp, BoolOp, NotOp,
    UnaryOp, BinOp, Compare, Call, Attribute, Subscript,
]


# Statements

@dataclass(frozen=True, slots=True)
class Assign:
    target: Expr  # Name or Subscript
    value: Expr
    line: int


@dataclass(frozen=True, slots=True)
class AugAssign:
    target: Expr
    op: str  # "+" "-" "*" "/" "//" "%"
    value: Expr
    line: int


@dataclass(frozen=True, slots=True)
class ExprStmt:
    value: Expr
    line: int


@dataclass(frozen=True, slots=True)
class Return:
    value: Expr | None
    line: int


@dataclass(frozen=True, slots=True)
class Pass:
    line: int


@dataclass(frozen=True, slots=True)
class Break:
    line: int


@dataclass(frozen=True, slots=True)
class Continue:
    line: int


@dataclass(frozen=True, slots=True)
class If:
    branches: tuple[tuple[Expr, tuple["Stmt", ...]], ...]
    orelse: tuple["Stmt", ...]
    line: int


@dataclass(frozen=True, slots=True)
class For:
    targets: tuple[str, ...]
    iterable: Expr
    body: tuple["Stmt", ...]
    line: int


@dataclass(frozen=True, slots=True)
class While:
    condition: Expr
    body: tuple["Stmt", ...]
    line: int


Stmt = Union[Assign, AugAssign, ExprStmt, Return, Pass, Break, Continue, If, For, While]


@dataclass(frozen=True, slots=True)
class Param:
    name: str
    default: Expr | None


@dataclass(frozen=True, slots=True)
class FunctionDef:
    name: str
    params: tuple[Param, ...]
    body: tuple[Stmt, ...]
    line: int


@dataclass(frozen=True, slots=True)
class Module:
    func: FunctionDef


_COMPARISON_OPS = frozenset({"==", "!=", "<", "<=", ">", ">="})
_AUG_OPS = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "//=": "//", "%=": "%"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.index = 0
        self.loop_depth = 0

    # token plumbing

    def peek(self, offset: int = 0) -> Token:
        index = min(self.index + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        if self.index < len(self.tokens) - 1:
            self.index += 1
        return tok

    def at_op(self, *values: str) -> bool:
        tok = self.peek()
        return tok.kind is TokenKind.OP and tok.value in values

    def at_keyword(self, *values: str) -> bool:
        tok = self.peek()
        return tok.kind is TokenKind.KEYWORD and tok.value in values

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        indentation = tok.kind in (TokenKind.INDENT, TokenKind.DEDENT)
        return ParseError(message, tok.line, tok.col, indentation=indentation)

    def describe(self, tok: Token | None = None) -> str:
        tok = tok or self.peek()
        if tok.kind is TokenKind.EOF:
            return "end of input"
        if tok.kind is TokenKind.NEWLINE:
            return "end of line"
        if tok.kind in (TokenKind.INDENT, TokenKind.DEDENT):
            return tok.kind.value
        return repr(tok.value)

    def expect_op(self, value: str) -> Token:
        if not self.at_op(value):
            raise self.error(f"expected {value!r}, got {self.describe()}")
        return self.advance()

    def expect_keyword(self, value: str) -> Token:
        if not self.at_keyword(value):
            raise self.error(f"expected {value!r}, got {self.describe()}")
        return self.advance()

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind is TokenKind.RESERVED:
            raise self.error(f"{tok.value!r} is a reserved word outside the dialect", tok)
        if tok.kind is not TokenKind.NAME:
            raise self.error(f"expected a name, got {self.describe()}")
        return self.advance()

    def expect_newline(self) -> None:
        tok = self.peek()
        if tok.kind is TokenKind.NEWLINE:
            self.advance()
            return
        if tok.kind in (TokenKind.EOF, TokenKind.DEDENT):
            return
        raise self.error(f"expected end of line, got {self.describe()}")

    def skip_newlines(self) -> None:
        while self.peek().kind is TokenKind.NEWLINE:
            self.advance()

    # module structure

    def parse_module(self) -> Module:
        self.skip_newlines()
        func = self.parse_funcdef()
        self.skip_newlines()
        tok = self.peek()
        if tok.kind is not TokenKind.EOF:
            if tok.kind is TokenKind.KEYWORD and tok.value == "def":
                raise self.error("exactly one function definition is allowed", tok)
            raise self.error(
                f"unexpected {self.describe(tok)} after the function definition", tok
            )
        return Module(func=func)

    def parse_funcdef(self) -> FunctionDef:
        tok = self.peek()
        if not self.at_keyword("def"):
            raise self.error(f"program must start with a function definition, got {self.describe()}")
        self.advance()
        name = self.expect_name()
        self.expect_op("(")
        params = self.parse_params()
        self.expect_op(")")
        if self.at_op("->"):
            self.advance()
            self.parse_expression()  # annotation, validated for syntax only
        self.expect_op(":")
        body = self.parse_suite()
        return FunctionDef(name=name.value, params=params, body=body, line=tok.line)

    def parse_params(self) -> tuple[Param, ...]:
        params: list[Param] = []
        seen: set[str] = set()
        while not self.at_op(")"):
            name = self.expect_name()
            if name.value in seen:
                raise self.error(f"duplicate parameter {name.value!r}", name)
            seen.add(name.value)
            default = None
            if self.at_op("="):
                self.advance()
                default = self.parse_expression()
            elif params and params[-1].default is not None:
                raise self.error("parameter without default follows one with a default", name)
            params.append(Param(name=name.value, default=default))
            if self.at_op(","):
                self.advance()
            elif not self.at_op(")"):
                raise self.error(f"expected ',' or ')', got {self.describe()}")
        return tuple(params)

    def parse_suite(self) -> tuple[Stmt, ...]:
        if self.peek().kind is not TokenKind.NEWLINE:
            stmt = self.parse_simple_stmt()
            self.expect_newline()
            return (stmt,)
        self.advance()
        if self.peek().kind is not TokenKind.INDENT:
            tok = self.peek()
            raise ParseError("expected an indented block", tok.line, tok.col, indentation=True)
        self.advance()
        body: list[Stmt] = []
        while self.peek().kind is not TokenKind.DEDENT:
            if self.peek().kind is TokenKind.EOF:
                break
            body.append(self.parse_statement())
        if self.peek().kind is TokenKind.DEDENT:
            self.advance()
        if not body:
            raise self.error("expected at least one statement in block")
        return tuple(body)

    def parse_statement(self) -> Stmt:
        tok = self.peek()
        if tok.kind is TokenKind.NEWLINE:
            self.advance()
            return self.parse_statement()
        if tok.kind is TokenKind.INDENT:
            raise self.error("unexpected indent", tok)
        if tok.kind is TokenKind.KEYWORD:
            if tok.value == "if":
                return self.parse_if()
            if tok.value == "for":
                return self.parse_for()
            if tok.value == "while":
                return self.parse_while()
            if tok.value == "def":
                raise self.error("nested function definitions are not allowed", tok)
        stmt = self.parse_simple_stmt()
        self.expect_newline()
        return stmt

    def parse_simple_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind is TokenKind.RESERVED:
            raise self.error(f"{tok.value!r} is a reserved word outside the dialect", tok)
        if tok.kind is TokenKind.KEYWORD:
            if tok.value == "return":
                self.advance()
                value = None
                if self.peek().kind not in (TokenKind.NEWLINE, TokenKind.EOF, TokenKind.DEDENT):
                    value = self.parse_expression()
                return Return(value=value, line=tok.line)
            if tok.value == "pass":
                self.advance()
                return Pass(line=tok.line)
            if tok.value == "break":
                if self.loop_depth == 0:
                    raise self.error("'break' outside loop", tok)
                self.advance()
                return Break(line=tok.line)
            if tok.value == "continue":
                if self.loop_depth == 0:
                    raise self.error("'continue' not properly in loop", tok)
                self.advance()
                return Continue(line=tok.line)
        expr = self.parse_expression()
        if self.at_op("="):
            eq = self.advance()
            self._check_assign_target(expr, eq)
            value = self.parse_expression()
            return Assign(target=expr, value=value, line=tok.line)
        aug = self.peek()
        if aug.kind is TokenKind.OP and aug.value in _AUG_OPS:
            self.advance()
            self._check_assign_target(expr, aug)
            value = self.parse_expression()
            return AugAssign(target=expr, op=_AUG_OPS[aug.value], value=value, line=tok.line)
        return ExprStmt(value=expr, line=tok.line)

    def _check_assign_target(self, target: Expr, tok: Token) -> None:
        if not isinstance(target, (Name, Subscript)):
            raise self.error("can only assign to a name or a subscript", tok)
        if isinstance(target, Subscript) and isinstance(target.index, SliceExpr):
            raise self.error("cannot assign to a slice", tok)

    def parse_if(self) -> If:
        tok = self.expect_keyword("if")
        branches = [(self.parse_condition(), self.parse_suite())]
        orelse: tuple[Stmt, ...] = ()
        while self.at_keyword("elif"):
            self.advance()
            branches.append((self.parse_condition(), self.parse_suite()))
        if self.at_keyword("else"):
            self.advance()
            self.expect_op(":")
            orelse = self.parse_suite()
        return If(branches=tuple(branches), orelse=orelse, line=tok.line)

    def parse_condition(self) -> Expr:
        condition = self.parse_expression()
        self.expect_op(":")
        return condition

    def parse_for(self) -> For:
        tok = self.expect_keyword("for")
        targets = [self.expect_name().value]
        while self.at_op(","):
            self.advance()
            targets.append(self.expect_name().value)
        self.expect_keyword("in")
        iterable = self.parse_expression()
        self.expect_op(":")
        self.loop_depth += 1
        try:
            body = self.parse_suite()
        finally:
            self.loop_depth -= 1
        return For(targets=tuple(targets), iterable=iterable, body=body, line=tok.line)

    def parse_while(self) -> While:
        tok = self.expect_keyword("while")
        condition = self.parse_condition()
        self.loop_depth += 1
        try:
            body = self.parse_suite()
        finally:
            self.loop_depth -= 1
        return While(condition=condition, body=body, line=tok.line)

    # expressions, loosest binding first

    def parse_expression(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        first = self.parse_and()
        if not self.at_keyword("or"):
            return first
        values = [first]
        while self.at_keyword("or"):
            self.advance()
            values.append(self.parse_and())
        return BoolOp(op="or", values=tuple(values), line=first.line)

    def parse_and(self) -> Expr:
        first = self.parse_not()
        if not self.at_keyword("and"):
            return first
        values = [first]
        while self.at_keyword("and"):
            self.advance()
            values.append(self.parse_not())
        return BoolOp(op="and", values=tuple(values), line=first.line)

    def parse_not(self) -> Expr:
        if self.at_keyword("not"):
            tok = self.advance()
            return NotOp(operand=self.parse_not(), line=tok.line)
        return self.parse_comparison()

    def _comparison_op(self) -> str | None:
        tok = self.peek()
        if tok.kind is TokenKind.OP and tok.value in _COMPARISON_OPS:
            self.advance()
            return tok.value
        if self.at_keyword("in"):
            self.advance()
            return "in"
        if self.at_keyword("not") and self.peek(1).kind is TokenKind.KEYWORD and self.peek(1).value == "in":
            self.advance()
            self.advance()
            return "not in"
        return None

    def parse_comparison(self) -> Expr:
        left = self.parse_arith()
        ops: list[str] = []
        comparators: list[Expr] = []
        while (op := self._comparison_op()) is not None:
            ops.append(op)
            comparators.append(self.parse_arith())
        if not ops:
            return left
        return Compare(left=left, ops=tuple(ops), comparators=tuple(comparators), line=left.line)

    def parse_arith(self) -> Expr:
        left = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance().value
            left = BinOp(op=op, left=left, right=self.parse_term(), line=left.line)
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.at_op("*", "/", "//", "%"):
            op = self.advance().value
            left = BinOp(op=op, left=left, right=self.parse_unary(), line=left.line)
        return left

    def parse_unary(self) -> Expr:
        if self.at_op("-", "+"):
            tok = self.advance()
            return UnaryOp(op=tok.value, operand=self.parse_unary(), line=tok.line)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        expr = self.parse_atom()
        while True:
            if self.at_op("("):
                self.advance()
                args = self.parse_call_args()
                expr = Call(func=expr, args=args, line=expr.line)
            elif self.at_op("."):
                self.advance()
                name = self.expect_name()
                expr = Attribute(value=expr, attr=name.value, line=name.line)
            elif self.at_op("["):
                tok = self.advance()
                expr = Subscript(value=expr, index=self.parse_subscript(tok), line=tok.line)
            else:
                return expr

    def parse_call_args(self) -> tuple[Expr, ...]:
        args: list[Expr] = []
        while not self.at_op(")"):
            args.append(self.parse_expression())
            if self.at_op("="):
                raise self.error("keyword arguments are not supported")
            if self.at_op(","):
                self.advance()
            elif not self.at_op(")"):
                raise self.error(f"expected ',' or ')', got {self.describe()}")
        self.advance()
        return tuple(args)

    def parse_subscript(self, open_tok: Token) -> Expr | SliceExpr:
        start = None
        if not self.at_op(":"):
            start = self.parse_expression()
            if self.at_op("]"):
                self.advance()
                return start
        self.expect_op(":")
        stop = None
        if not self.at_op("]"):
            stop = self.parse_expression()
        self.expect_op("]")
        return SliceExpr(start=start, stop=stop, line=open_tok.line)

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind is TokenKind.RESERVED:
            raise self.error(f"{tok.value!r} is a reserved word outside the dialect", tok)
        if tok.kind is TokenKind.NAME:
            self.advance()
            return Name(id=tok.value, line=tok.line)
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return Literal(value=tok.value, line=tok.line)
        if tok.kind is TokenKind.STRING:
            self.advance()
            return Literal(value=tok.value, line=tok.line)
        if tok.kind is TokenKind.FSTRING:
            self.advance()
            return self._build_fstring(tok)
        if tok.kind is TokenKind.KEYWORD:
            if tok.value in ("True", "False"):
                self.advance()
                return Literal(value=tok.value == "True", line=tok.line)
            if tok.value == "None":
                self.advance()
                return Literal(value=None, line=tok.line)
            raise self.error(f"unexpected keyword {tok.value!r} in expression", tok)
        if self.at_op("("):
            self.advance()
            inner = self.parse_expression()
            if self.at_op(","):
                raise self.error("tuples are not supported; use a list")
            self.expect_op(")")
            return inner
        if self.at_op("["):
            return self.parse_list_display()
        if self.at_op("{"):
            return self.parse_dict_display()
        if self.at_op("**"):
            raise self.error("the power operator is not supported", tok)
        raise self.error(f"unexpected {self.describe(tok)} in expression", tok)

    def parse_list_display(self) -> Expr:
        open_tok = self.expect_op("[")
        if self.at_op("]"):
            self.advance()
            return ListLit(items=(), line=open_tok.line)
        first = self.parse_expression()
        if self.at_keyword("for"):
            self.advance()
            targets = [self.expect_name().value]
            while self.at_op(","):
                self.advance()
                targets.append(self.expect_name().value)
            self.expect_keyword("in")
            iterable = self.parse_or()
            condition = None
            if self.at_keyword("if"):
                self.advance()
                condition = self.parse_or()
            if self.at_keyword("for"):
                raise self.error("only one 'for' clause is supported in a comprehension")
            self.expect_op("]")
            return ListComp(
                element=first,
                targets=tuple(targets),
                iterable=iterable,
                condition=condition,
                line=open_tok.line,
            )
        items = [first]
        while self.at_op(","):
            self.advance()
            if self.at_op("]"):
                break
            items.append(self.parse_expression())
        self.expect_op("]")
        return ListLit(items=tuple(items), line=open_tok.line)

    def parse_dict_display(self) -> Expr:
        open_tok = self.expect_op("{")
        pairs: list[tuple[Expr, Expr]] = []
        while not self.at_op("}"):
            key = self.parse_expression()
            if not self.at_op(":"):
                raise self.error("expected ':' in dict display (set literals are not supported)")
            self.advance()
            value = self.parse_expression()
            pairs.append((key, value))
            if self.at_op(","):
                self.advance()
            elif not self.at_op("}"):
                raise self.error(f"expected ',' or '}}', got {self.describe()}")
        self.advance()
        return DictLit(pairs=tuple(pairs), line=open_tok.line)

    def _build_fstring(self, tok: Token) -> FString:
        parts: list[str | Expr] = []
        for part in tok.value:
            if isinstance(part, str):
                parts.append(part)
                continue
            assert isinstance(part, FStringExpr)
            parts.append(_parse_fragment(part.source, tok.line))
        return FString(parts=tuple(parts), line=tok.line)


def _parse_fragment(source: str, line: int) -> Expr:
    """Parse one f-string interpolation as a standalone expression."""
    try:
        tokens = tokenize_expression(source)
    except LexError as exc:
        raise ParseError(f"in f-string expression: {exc.message}", line) from exc
    parser = _Parser(tokens)
    expr = parser.parse_expression()
    if parser.peek().kind is not TokenKind.EOF:
        raise ParseError(
            f"unexpected {parser.describe()} in f-string expression", line
        )
    return expr


def parse(source: str) -> Module:
    """Parse a full program; every failure surfaces as ParseError."""
    try:
        tokens = tokenize(source)
        return _Parser(tokens).parse_module()
    except LexError as exc:
        raise ParseError(exc.message, exc.line, exc.col, indentation=exc.indentation) from exc
    except RecursionError:
        raise ParseError("expression nesting is too deep", 1) from None
