import pytest

from rlang.lexer import KEYWORDS, LexError, Token, TokenKind, tokenize


def kinds(source):
    return [t.kind for t in tokenize(source)]


def lexemes(source):
    return [(t.kind, t.lexeme) for t in tokenize(source)]


def test_factor_line_token_stream():
    toks = tokenize("Factor position := S[0:2]\n")
    assert [(t.kind, t.lexeme) for t in toks] == [
        (TokenKind.KEYWORD, "Factor"),
        (TokenKind.IDENT, "position"),
        (TokenKind.OP, ":="),
        (TokenKind.KEYWORD, "S"),
        (TokenKind.PUNCT, "["),
        (TokenKind.INT, "0"),
        (TokenKind.PUNCT, ":"),
        (TokenKind.INT, "2"),
        (TokenKind.PUNCT, "]"),
        (TokenKind.NEWLINE, "\n"),
    ]


def test_empty_input_yields_no_tokens():
    assert tokenize("") == []


def test_single_block_indent_dedent_placement():
    toks = tokenize("Policy main:\n    Execute up\n")
    names = [t.kind for t in toks]
    assert names.count(TokenKind.INDENT) == 1
    assert names.count(TokenKind.DEDENT) == 1
    indent_at = names.index(TokenKind.INDENT)
    assert toks[indent_at + 1].lexeme == "Execute"
    assert names[-1] == TokenKind.DEDENT


def test_nested_blocks_balance():
    source = (
        "Effect e:\n"
        "    if x > 0:\n"
        "        S' -> S\n"
        "    else:\n"
        "        x' -> x\n"
    )
    names = kinds(source)
    assert names.count(TokenKind.INDENT) == 3
    assert names.count(TokenKind.DEDENT) == 3
    depth = 0
    for kind in names:
        depth += kind is TokenKind.INDENT
        depth -= kind is TokenKind.DEDENT
        assert depth >= 0
    assert depth == 0


def test_tabs_in_indentation_rejected():
    with pytest.raises(LexError, match="tab"):
        tokenize("Policy p:\n\tExecute up\n")


def test_dedent_must_match_an_open_block():
    source = "Policy p:\n        Execute up\n    Execute down\n"
    with pytest.raises(LexError, match="indentation"):
        tokenize(source)


def test_illegal_character_reports_position():
    with pytest.raises(LexError) as err:
        tokenize("Constant bad := 1 @ 2\n")
    assert "@" in str(err.value)
    assert err.value.span.line == 1
    assert err.value.span.column == 19


def test_digits_then_dot_then_letters_is_not_a_float():
    assert lexemes("3.foo\n")[:3] == [
        (TokenKind.INT, "3"),
        (TokenKind.PUNCT, "."),
        (TokenKind.IDENT, "foo"),
    ]


def test_trailing_dot_is_a_float():
    assert lexemes("3.\n")[0] == (TokenKind.FLOAT, "3.")


def test_comments_are_stripped():
    toks = tokenize("x := 1  # note\n# whole line comment\n")
    meaningful = [t for t in toks if t.kind is not TokenKind.NEWLINE]
    assert [(t.kind, t.lexeme) for t in meaningful] == [
        (TokenKind.IDENT, "x"),
        (TokenKind.OP, ":="),
        (TokenKind.INT, "1"),
    ]


def test_keywords_are_case_sensitive():
    toks = tokenize("constant c := 3\n")
    assert toks[0].kind is TokenKind.IDENT
    assert toks[0].lexeme == "constant"
    assert "Constant" in KEYWORDS
    assert "constant" not in KEYWORDS


def test_import_path_keeps_its_quotes():
    toks = tokenize('import "vocab.json"\n')
    assert toks[0] == Token(TokenKind.KEYWORD, "import", toks[0].span)
    assert toks[1].kind is TokenKind.STRING
    assert toks[1].lexeme == '"vocab.json"'


def test_spans_cover_their_lexemes():
    source = "Factor position := S[0:2]\n"
    for t in tokenize(source):
        assert t.span.line == 1
        start = t.span.column - 1
        assert source[start : start + t.span.length] == t.lexeme
