"""Layout-sensitive tokenizer.

Blocks are delimited by indentation, so the token stream carries synthetic
INDENT/DEDENT tokens driven by an indent stack, plus a NEWLINE at the end of
every logical line. The first content line sets the left margin, so programs
indented as a whole tokenize the same as flush-left ones. Indentation must
use spaces (tabs are rejected) and must dedent back to a level already on
the stack. Newlines inside brackets are insignificant, as are blank and
comment-only lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import LexError, Span


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    INT = "integer-literal"
    FLOAT = "float-literal"
    STRING = "string-literal"
    OP = "operator"
    PUNCT = "punctuation"
    NEWLINE = "newline"
    INDENT = "indent"
    DEDENT = "dedent"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: Span

    def __repr__(self):  # compact, for test failure output
        return f"Token({self.kind.name}, {self.lexeme!r}, {self.span.line}:{self.span.column})"


KEYWORDS = frozenset(
    {
        # declarations
        "Constant", "Action", "Factor", "Proposition", "Goal", "Feature",
        "MarkovFeature", "Object", "Class", "Option", "Policy", "Effect",
        "ActionRestriction",
        # statements and clauses
        "Execute", "Restrict", "Reward", "if", "elif", "else", "init",
        "until", "with", "or", "and", "not", "in", "import",
        # reserved value names
        "S", "A", "True", "False",
    }
)

TWO_CHAR_OPS = (":=", "->", "==", "!=", "<=", ">=")
ONE_CHAR_OPS = frozenset("+-*/<>'")
PUNCTUATION = frozenset("()[]:,.")
OPENERS = frozenset("([")
CLOSERS = frozenset(")]")


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str, path: str | None = None) -> list[Token]:
    """Tokenize ``source``. Returns [] for empty input.

    Raises LexError on tab indentation, inconsistent dedents, unterminated
    strings and unknown characters.
    """
    tokens: list[Token] = []
    indents = [0]
    baseline_set = False  # first content line fixes the left margin
    i = 0
    line = 1
    col = 1
    depth = 0  # bracket nesting; newlines are insignificant inside
    at_line_start = True
    n = len(source)

    def err(msg: str, length: int = 1) -> LexError:
        return LexError(msg, Span(line, col, length), path)

    def emit(kind: TokenKind, lexeme: str, length: int | None = None):
        tokens.append(Token(kind, lexeme, Span(line, col, length if length is not None else len(lexeme))))

    while i < n:
        if at_line_start and depth == 0:
            # Measure indentation; skip the line outright if it is blank or
            # holds only a comment.
            start = i
            width = 0
            while i < n and source[i] in " \t":
                if source[i] == "\t":
                    col = 1 + (i - start)
                    raise err("tab characters are not allowed in indentation")
                width += 1
                i += 1
            col = 1 + width
            if i >= n or source[i] == "\n" or source[i] == "#":
                while i < n and source[i] != "\n":
                    i += 1
                if i < n:
                    i += 1
                    line += 1
                    col = 1
                continue
            if not baseline_set:
                # Snippets may be indented as a whole; the first content line
                # sets the margin every later line is measured against.
                indents[0] = width
                baseline_set = True
            elif width > indents[-1]:
                indents.append(width)
                emit(TokenKind.INDENT, "", 0)
            else:
                while width < indents[-1]:
                    indents.pop()
                    emit(TokenKind.DEDENT, "", 0)
                if width != indents[-1]:
                    raise err("inconsistent indentation: no enclosing block at this level")
            at_line_start = False
            continue

        c = source[i]
        if c == "\n":
            if depth == 0:
                emit(TokenKind.NEWLINE, "\n", 1)
                at_line_start = True
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] == "\n":
                raise err("unterminated string literal", j - i)
            emit(TokenKind.STRING, source[i : j + 1])
            col += j + 1 - i
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_float = False
            if j < n and source[j] == "." and not (j + 1 < n and _is_ident_start(source[j + 1])):
                # A trailing dot is a valid float ("Reward 1."), but "3.foo"
                # would be an attribute access on an integer, which we reject
                # here as part of the number instead: digits only after dot.
                is_float = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            emit(TokenKind.FLOAT if is_float else TokenKind.INT, text)
            col += j - i
            i = j
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            emit(TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENT, text)
            col += j - i
            i = j
            continue
        two = source[i : i + 2]
        if two in TWO_CHAR_OPS:
            emit(TokenKind.OP, two)
            i += 2
            col += 2
            continue
        if c in PUNCTUATION:
            if c in OPENERS:
                depth += 1
            elif c in CLOSERS:
                depth = max(0, depth - 1)
            emit(TokenKind.PUNCT, c)
            i += 1
            col += 1
            continue
        if c in ONE_CHAR_OPS:
            emit(TokenKind.OP, c)
            i += 1
            col += 1
            continue
        raise err(f"unexpected character {c!r}")

    if tokens and not at_line_start and depth == 0:
        # Input ended mid-line; close the logical line.
        tokens.append(Token(TokenKind.NEWLINE, "\n", Span(line, col, 0)))
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token(TokenKind.DEDENT, "", Span(line, col, 0)))
    return tokens
