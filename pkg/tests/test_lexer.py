import pytest

from vqdbench.progeng.lexer import FStringExpr, LexError, TokenKind, tokenize


def kinds(source):
    return [t.kind for t in tokenize(source)]


def values(source, kind):
    return [t.value for t in tokenize(source) if t.kind == kind]


def test_simple_statement_token_stream():
    tokens = tokenize("x = 1\n")
    assert [(t.kind, t.value) for t in tokens] == [
        (TokenKind.NAME, "x"),
        (TokenKind.OP, "="),
        (TokenKind.NUMBER, 1),
        (TokenKind.NEWLINE, "\n"),
        (TokenKind.EOF, None),
    ]


def test_indent_dedent_pairing():
    source = "if x:\n  y = 1\nz = 2\n"
    stream = kinds(source)
    assert stream.count(TokenKind.INDENT) == 1
    assert stream.count(TokenKind.DEDENT) == 1
    assert stream.index(TokenKind.INDENT) < stream.index(TokenKind.DEDENT)


def test_nested_blocks_emit_matching_dedents():
    source = "if a:\n  if b:\n    x = 1\ny = 2\n"
    stream = kinds(source)
    assert stream.count(TokenKind.INDENT) == 2
    assert stream.count(TokenKind.DEDENT) == 2


def test_dangling_indents_close_at_eof():
    stream = kinds("if a:\n  if b:\n    x = 1")
    assert stream.count(TokenKind.DEDENT) == 2
    assert stream[-1] == TokenKind.EOF


def test_tab_counts_as_eight_columns():
    tokens = tokenize("if a:\n\t  x = 1\n")
    indent = next(t for t in tokens if t.kind == TokenKind.INDENT)
    assert indent.value == 10
    # Tab and eight spaces land on the same level: one block, no error.
    stream = kinds("if a:\n\tx = 1\n        y = 2\n")
    assert stream.count(TokenKind.INDENT) == 1
    assert stream.count(TokenKind.DEDENT) == 1


def test_inconsistent_dedent_is_an_indentation_error():
    source = "if a:\n    x = 1\n  y = 2\n"
    with pytest.raises(LexError) as exc_info:
        tokenize(source)
    assert exc_info.value.indentation


def test_blank_and_comment_lines_do_not_affect_indentation():
    source = "if a:\n  x = 1\n\n  # a comment\n  y = 2\n"
    stream = kinds(source)
    assert stream.count(TokenKind.INDENT) == 1
    assert stream.count(TokenKind.DEDENT) == 1


def test_brackets_join_lines_without_indent_tokens():
    source = "x = [\n    1,\n  2,\n]\n"
    stream = kinds(source)
    assert TokenKind.INDENT not in stream
    assert stream.count(TokenKind.NEWLINE) == 1


def test_keywords_reserved_and_names_are_distinguished():
    tokens = tokenize("for import price\n")
    assert [t.kind for t in tokens[:3]] == [
        TokenKind.KEYWORD,
        TokenKind.RESERVED,
        TokenKind.NAME,
    ]


def test_number_forms():
    assert values("x = 42\n", TokenKind.NUMBER) == [42]
    assert values("x = 3.25\n", TokenKind.NUMBER) == [3.25]
    assert values("x = 1e2\n", TokenKind.NUMBER) == [100.0]


def test_string_escapes():
    assert values(r"x = 'a\nb'" + "\n", TokenKind.STRING) == ["a\nb"]
    assert values(r'x = "it\'s"' + "\n", TokenKind.STRING) == ["it's"]
    with pytest.raises(LexError):
        tokenize("x = 'unterminated\n")


def test_fstring_splits_text_and_expressions():
    tokens = tokenize("x = f'count {n} of {m}'\n")
    fstring = next(t for t in tokens if t.kind == TokenKind.FSTRING)
    parts = fstring.value
    assert parts[0] == "count "
    assert isinstance(parts[1], FStringExpr) and parts[1].source == "n"
    assert parts[2] == " of "
    assert isinstance(parts[3], FStringExpr) and parts[3].source == "m"


def test_fstring_requires_closed_braces():
    with pytest.raises(LexError):
        tokenize("x = f'oops {n'\n")


def test_two_char_operators_lex_greedily():
    ops = values("a == b != c <= d >= e // f -> g\n", TokenKind.OP)
    assert ops == ["==", "!=", "<=", ">=", "//", "->"]


def test_unknown_character_is_a_lex_error():
    with pytest.raises(LexError) as exc_info:
        tokenize("x = 1 @ 2\n")
    assert not exc_info.value.indentation
    assert exc_info.value.line == 1
