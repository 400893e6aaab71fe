"""Lexer for the restricted program dialect.

Indentation-sensitive, Python-like surface: INDENT/DEDENT tokens from a
width stack (tabs advance to the next multiple of 8), implicit line
joining inside brackets, # comments, string and f-string literals. The
lexer never executes anything; it only produces tokens or raises LexError
with a position and an indentation flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

KEYWORDS = frozenset(
    {
        "def", "return", "if", "elif", "else", "for", "while", "in",
        "not", "and", "or", "True", "False", "None", "pass", "break",
        "continue",
    }
)

# Python words outside the dialect; rejected at parse time so misuse is a
# parsing failure rather than a mysterious runtime one.
RESERVED = frozenset(
    {
        "import", "from", "class", "lambda", "try", "except", "finally",
        "raise", "del", "global", "nonlocal", "with", "yield", "assert",
        "async", "await", "is",
    }
)

_TWO_CHAR_OPS = (
    "==", "!=", "<=", ">=", "//", "->", "+=", "-=", "*=", "/=", "%=", "**",
)
_ONE_CHAR_OPS = "+-*/%<>=()[]{},:."
_TAB_WIDTH = 8


class TokenKind(Enum):
    NAME = "name"
    KEYWORD = "keyword"
    RESERVED = "reserved"
    NUMBER = "number"
    STRING = "string"
    FSTRING = "fstring"
    OP = "op"
    NEWLINE = "newline"
    INDENT = "indent"
    DEDENT = "dedent"
    EOF = "eof"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    value: Any
    line: int
    col: int

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.value!r}, {self.line}:{self.col})"


@dataclass(frozen=True, slots=True)
class FStringExpr:
    """One interpolation slot: raw expression source plus its position."""

    source: str
    line: int
    col: int


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int, *, indentation: bool = False):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col
        self.indentation = indentation


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "0": "\0"}


class Lexer:
    def __init__(self, source: str):
        self.source = source.replace("\r\n", "\n").replace("\r", "\n")
        self.pos = 0
        self.line = 1
        self.col = 0
        self.bracket_depth = 0
        self.indents = [0]
        self.tokens: list[Token] = []
        self.at_line_start = True

    def error(self, message: str, *, indentation: bool = False) -> LexError:
        return LexError(message, self.line, self.col, indentation=indentation)

    def _peek(self, offset: int = 0) -> str:
        index = self.pos + offset
        return self.source[index] if index < len(self.source) else ""

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 0
        else:
            self.col += 1
        return ch

    def _emit(self, kind: TokenKind, value: Any, line: int | None = None, col: int | None = None) -> None:
        self.tokens.append(
            Token(kind, value, self.line if line is None else line, self.col if col is None else col)
        )

    def tokenize(self) -> list[Token]:
        while self.pos < len(self.source):
            if self.at_line_start and self.bracket_depth == 0:
                if self._handle_line_start():
                    continue
                break
            self._scan_token()
        if self.bracket_depth > 0:
            raise self.error("unexpected end of input inside brackets")
        if not self.at_line_start:
            self._emit(TokenKind.NEWLINE, "\n")
        while self.indents[-1] > 0:
            self.indents.pop()
            self._emit(TokenKind.DEDENT, None)
        self._emit(TokenKind.EOF, None)
        return self.tokens

    def _handle_line_start(self) -> bool:
        """Measure indentation; True means keep looping, False means EOF."""
        width = 0
        while True:
            ch = self._peek()
            if ch == " ":
                width += 1
            elif ch == "\t":
                width += _TAB_WIDTH - (width % _TAB_WIDTH)
            else:
                break
            self._advance()
        ch = self._peek()
        if ch == "#":
            while self._peek() not in ("", "\n"):
                self._advance()
            ch = self._peek()
        if ch == "\n":
            self._advance()
            return True
        if ch == "":
            return False
        if width > self.indents[-1]:
            self.indents.append(width)
            self._emit(TokenKind.INDENT, width)
        else:
            while width < self.indents[-1]:
                self.indents.pop()
                self._emit(TokenKind.DEDENT, None)
            if width != self.indents[-1]:
                raise self.error(
                    "unindent does not match any outer indentation level",
                    indentation=True,
                )
        self.at_line_start = False
        return True

    def _scan_token(self) -> None:
        ch = self._peek()
        if ch in (" ", "\t"):
            self._advance()
            return
        if ch == "#":
            while self._peek() not in ("", "\n"):
                self._advance()
            return
        if ch == "\n":
            self._advance()
            if self.bracket_depth == 0:
                self.tokens.append(Token(TokenKind.NEWLINE, "\n", self.line - 1, self.col))
                self.at_line_start = True
            return
        if ch in ("'", '"'):
            self._scan_string()
            return
        if ch in ("f", "F") and self._peek(1) in ("'", '"'):
            self._scan_fstring()
            return
        if ch.isdigit():
            self._scan_number()
            return
        if ch.isalpha() or ch == "_":
            self._scan_name()
            return
        self._scan_operator()

    def _scan_name(self) -> None:
        line, col = self.line, self.col
        chars = []
        while self._peek().isalnum() or self._peek() == "_":
            chars.append(self._advance())
        name = "".join(chars)
        if name in KEYWORDS:
            kind = TokenKind.KEYWORD
        elif name in RESERVED:
            kind = TokenKind.RESERVED
        else:
            kind = TokenKind.NAME
        self._emit(kind, name, line, col)

    def _scan_number(self) -> None:
        line, col = self.line, self.col
        chars = []
        while self._peek().isdigit():
            chars.append(self._advance())
        is_float = False
        if self._peek() == "." and self._peek(1).isdigit():
            is_float = True
            chars.append(self._advance())
            while self._peek().isdigit():
                chars.append(self._advance())
        if self._peek() in ("e", "E") and (
            self._peek(1).isdigit()
            or (self._peek(1) in ("+", "-") and self._peek(2).isdigit())
        ):
            is_float = True
            chars.append(self._advance())
            if self._peek() in ("+", "-"):
                chars.append(self._advance())
            while self._peek().isdigit():
                chars.append(self._advance())
        text = "".join(chars)
        self._emit(TokenKind.NUMBER, float(text) if is_float else int(text), line, col)

    def _scan_escape(self) -> str:
        self._advance()  # the backslash
        if self._peek() in ("", "\n"):
            raise self.error("unterminated string literal")
        ch = self._advance()
        return _ESCAPES.get(ch, "\\" + ch)

    def _scan_string(self) -> None:
        line, col = self.line, self.col
        quote = self._advance()
        chars: list[str] = []
        while True:
            ch = self._peek()
            if ch in ("", "\n"):
                raise LexError("unterminated string literal", line, col)
            if ch == quote:
                self._advance()
                break
            if ch == "\\":
                chars.append(self._scan_escape())
            else:
                chars.append(self._advance())
        self._emit(TokenKind.STRING, "".join(chars), line, col)

    def _scan_fstring(self) -> None:
        line, col = self.line, self.col
        self._advance()  # the f prefix
        quote = self._advance()
        parts: list[Any] = []
        text: list[str] = []

        def flush_text() -> None:
            if text:
                parts.append("".join(text))
                text.clear()

        while True:
            ch = self._peek()
            if ch in ("", "\n"):
                raise LexError("unterminated f-string literal", line, col)
            if ch == quote:
                self._advance()
                break
            if ch == "\\":
                text.append(self._scan_escape())
                continue
            if ch == "{":
                if self._peek(1) == "{":
                    self._advance()
                    self._advance()
                    text.append("{")
                    continue
                flush_text()
                parts.append(self._scan_fstring_expr(quote))
                continue
            if ch == "}":
                if self._peek(1) == "}":
                    self._advance()
                    self._advance()
                    text.append("}")
                    continue
                raise self.error("single '}' is not allowed in f-string")
            text.append(self._advance())
        flush_text()
        self._emit(TokenKind.FSTRING, parts, line, col)

    def _scan_fstring_expr(self, quote: str) -> FStringExpr:
        self._advance()  # the opening brace
        expr_line, expr_col = self.line, self.col
        depth = 0
        chars: list[str] = []
        while True:
            ch = self._peek()
            if ch in ("", "\n"):
                raise self.error("unterminated expression in f-string")
            if ch == quote:
                raise self.error("quote character inside f-string expression")
            if ch in "([{":
                depth += 1
            elif ch in ")]}":
                if ch == "}" and depth == 0:
                    self._advance()
                    break
                depth -= 1
            elif ch in ("'", '"') :
                inner_quote = self._advance()
                chars.append(inner_quote)
                while True:
                    sch = self._peek()
                    if sch in ("", "\n"):
                        raise self.error("unterminated string in f-string expression")
                    chars.append(self._advance())
                    if sch == inner_quote:
                        break
                continue
            chars.append(self._advance())
        source = "".join(chars)
        if not source.strip():
            raise LexError("empty expression in f-string", expr_line, expr_col)
        return FStringExpr(source=source, line=expr_line, col=expr_col)

    def _scan_operator(self) -> None:
        line, col = self.line, self.col
        two = self._peek() + self._peek(1)
        if two in _TWO_CHAR_OPS:
            self._advance()
            self._advance()
            if two == "//" and self._peek() == "=":
                self._advance()
                two = "//="
            self._emit(TokenKind.OP, two, line, col)
            return
        ch = self._peek()
        if ch in _ONE_CHAR_OPS:
            self._advance()
            if ch in "([{":
                self.bracket_depth += 1
            elif ch in ")]}":
                self.bracket_depth = max(0, self.bracket_depth - 1)
            self._emit(TokenKind.OP, ch, line, col)
            return
        raise self.error(f"unexpected character {ch!r}")


def tokenize(source: str) -> list[Token]:
    return Lexer(source).tokenize()


def tokenize_expression(source: str) -> list[Token]:
    """Tokens for a bare expression (no indentation handling).

    Used for f-string interpolations: the fragment is lexed standalone and
    must not contain newlines, which the f-string scanner already enforces.
    """
    tokens = Lexer(source).tokenize()
    return [t for t in tokens if t.kind not in (TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT)]
