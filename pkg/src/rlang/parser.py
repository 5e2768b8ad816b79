"""Recursive-descent parser over the layout token stream.

One function per nonterminal; blocks are INDENT/DEDENT-delimited statement
lists. Probabilistic statements chain alternatives with ``or``, which may
start a fresh line inside the same block:

    Execute up with P(0.25)
    or Execute down with P(0.25)

Option bodies accept the surface variations seen in practice: the init
expression may be parenthesized or bare and may carry a trailing colon.
"""

from __future__ import annotations

from . import ast
from .errors import ParseError, Span
from .lexer import Token, TokenKind, tokenize

_DECL_STARTERS = {
    "Constant": ast.ConstantDecl,
    "Action": ast.ActionDecl,
    "Factor": ast.FactorDecl,
    "Proposition": ast.PropositionDecl,
    "Goal": ast.GoalDecl,
    "Feature": ast.FeatureDecl,
    "MarkovFeature": ast.MarkovFeatureDecl,
}

_CMP_OPS = {"<", "<=", ">", ">=", "==", "!="}


class _Parser:
    def __init__(self, tokens: list[Token], path: str | None):
        self.tokens = tokens
        self.pos = 0
        self.path = path

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def check(self, kind: TokenKind, lexeme: str | None = None, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        if tok is None or tok.kind is not kind:
            return False
        return lexeme is None or tok.lexeme == lexeme

    def match(self, kind: TokenKind, lexeme: str | None = None) -> Token | None:
        if self.check(kind, lexeme):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, lexeme: str | None = None, expected: str | None = None) -> Token:
        if self.check(kind, lexeme):
            return self.advance()
        want = expected or (lexeme if lexeme is not None else kind.value)
        return self.fail([want])

    def fail(self, expected: list[str]):
        tok = self.peek()
        if tok is None:
            span = self.tokens[-1].span if self.tokens else Span(1, 1, 0)
            found = "end of input"
        else:
            span = tok.span
            found = {TokenKind.NEWLINE: "end of line", TokenKind.INDENT: "indent", TokenKind.DEDENT: "dedent"}.get(
                tok.kind, repr(tok.lexeme)
            )
        names = ", ".join(expected)
        raise ParseError(f"expected {names}, found {found}", span, self.path, expected=expected)

    def span_from(self, tok: Token) -> Span:
        last = self.tokens[self.pos - 1] if self.pos > 0 else tok
        length = max(1, (last.span.column + last.span.length) - tok.span.column) if last.span.line == tok.span.line else tok.span.length
        return Span(tok.span.line, tok.span.column, length)

    # -- program -----------------------------------------------------------

    def parse_program(self) -> ast.ParsedProgram:
        imports: list[str] = []
        while self.check(TokenKind.KEYWORD, "import"):
            self.advance()
            tok = self.expect(TokenKind.STRING, expected="import path string")
            imports.append(tok.lexeme[1:-1])
            self.expect(TokenKind.NEWLINE)
        decls: list[ast.Declaration] = []
        while not self.at_end():
            if self.check(TokenKind.KEYWORD, "import"):
                tok = self.peek()
                raise ParseError("import lines must precede all declarations", tok.span, self.path)
            decls.append(self.parse_declaration())
        return ast.ParsedProgram(tuple(imports), tuple(decls))

    def parse_declaration(self) -> ast.Declaration:
        tok = self.peek()
        # "Markov Feature" is the spaced spelling of MarkovFeature.
        if tok is not None and tok.kind is TokenKind.IDENT and tok.lexeme == "Markov" and self.check(TokenKind.KEYWORD, "Feature", ahead=1):
            self.advance()
            return self._parse_simple_decl(ast.MarkovFeatureDecl)
        if tok is None or tok.kind is not TokenKind.KEYWORD:
            return self.fail(["a declaration keyword"])
        kw = tok.lexeme
        if kw in _DECL_STARTERS:
            return self._parse_simple_decl(_DECL_STARTERS[kw])
        if kw == "Object":
            return self._parse_object()
        if kw == "Class":
            return self._parse_class()
        if kw == "Policy":
            return self._parse_policy()
        if kw == "Option":
            return self._parse_option()
        if kw == "Effect":
            return self._parse_effect()
        if kw == "ActionRestriction":
            return self._parse_restriction()
        return self.fail(["a declaration keyword"])

    def _parse_simple_decl(self, cls):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="name").lexeme
        self.expect(TokenKind.OP, ":=")
        expr = self.parse_expr()
        self.expect(TokenKind.NEWLINE)
        return cls(name, expr, self.span_from(start))

    def _parse_object(self):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="name").lexeme
        self.expect(TokenKind.OP, ":=")
        ctor = self.parse_expr()
        if not isinstance(ctor, ast.Call):
            raise ParseError("Object declarations require a class instantiation", ctor.span, self.path)
        self.expect(TokenKind.NEWLINE)
        return ast.ObjectDecl(name, ctor, self.span_from(start))

    def _parse_class(self):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="class name").lexeme
        parent = None
        if self.match(TokenKind.PUNCT, "("):
            parent = self.expect(TokenKind.IDENT, expected="parent class name").lexeme
            self.expect(TokenKind.PUNCT, ")")
        self.expect(TokenKind.PUNCT, ":")
        self.expect(TokenKind.NEWLINE)
        self.expect(TokenKind.INDENT, expected="an indented attribute block")
        attrs: list[tuple[str, str]] = []
        while not self.check(TokenKind.DEDENT):
            attr = self.expect(TokenKind.IDENT, expected="attribute name").lexeme
            self.expect(TokenKind.PUNCT, ":")
            tname = self.expect(TokenKind.IDENT, expected="attribute type").lexeme
            self.expect(TokenKind.NEWLINE)
            attrs.append((attr, tname))
        self.expect(TokenKind.DEDENT)
        return ast.ClassDecl(name, parent, tuple(attrs), self.span_from(start))

    def _parse_policy(self):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="policy name").lexeme
        body = self._parse_block(self._parse_policy_stmt)
        return ast.PolicyDecl(name, body, self.span_from(start))

    def _parse_effect(self):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="effect name").lexeme
        body = self._parse_block(self._parse_effect_stmt)
        return ast.EffectDecl(name, body, self.span_from(start))

    def _parse_restriction(self):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="restriction name").lexeme
        body = self._parse_block(self._parse_restrict_stmt)
        return ast.ActionRestrictionDecl(name, body, self.span_from(start))

    def _parse_option(self):
        start = self.advance()
        name = self.expect(TokenKind.IDENT, expected="option name").lexeme
        self.expect(TokenKind.PUNCT, ":")
        self.expect(TokenKind.NEWLINE)
        self.expect(TokenKind.INDENT, expected="an indented option body")
        self.expect(TokenKind.KEYWORD, "init")
        init = self.parse_expr()
        self.match(TokenKind.PUNCT, ":")  # trailing colon after init is optional
        self.expect(TokenKind.NEWLINE)
        self.expect(TokenKind.INDENT, expected="an indented policy block")
        body: list[ast.Stmt] = []
        while not self.check(TokenKind.DEDENT):
            body.append(self._parse_policy_stmt())
        self.expect(TokenKind.DEDENT)
        self.expect(TokenKind.KEYWORD, "until")
        until = self.parse_expr()
        self.expect(TokenKind.NEWLINE)
        self.expect(TokenKind.DEDENT)
        return ast.OptionDecl(name, init, tuple(body), until, self.span_from(start))

    # -- statement blocks --------------------------------------------------

    def _parse_block(self, stmt_parser) -> tuple[ast.Stmt, ...]:
        self.expect(TokenKind.PUNCT, ":")
        self.expect(TokenKind.NEWLINE)
        self.expect(TokenKind.INDENT, expected="an indented block")
        stmts: list[ast.Stmt] = []
        while not self.check(TokenKind.DEDENT):
            stmts.append(stmt_parser())
        self.expect(TokenKind.DEDENT)
        return tuple(stmts)

    def _parse_conditional(self, stmt_parser, node_cls):
        start = self.expect(TokenKind.KEYWORD, "if")
        branches = []
        cond = self.parse_expr()
        branches.append((cond, self._parse_block(stmt_parser)))
        while self.check(TokenKind.KEYWORD, "elif"):
            self.advance()
            cond = self.parse_expr()
            branches.append((cond, self._parse_block(stmt_parser)))
        orelse = None
        if self.check(TokenKind.KEYWORD, "else"):
            self.advance()
            orelse = self._parse_block(stmt_parser)
        return node_cls(tuple(branches), orelse, self.span_from(start))

    def _parse_with_prob(self) -> ast.Expr | None:
        if self.match(TokenKind.KEYWORD, "with"):
            tok = self.expect(TokenKind.IDENT, expected="P")
            if tok.lexeme != "P":
                raise ParseError("expected P(...) after 'with'", tok.span, self.path, expected=["P"])
            self.expect(TokenKind.PUNCT, "(")
            prob = self.parse_expr()
            self.expect(TokenKind.PUNCT, ")")
            return prob
        return None

    def _more_alternatives(self) -> bool:
        # ``or`` either follows directly or opens the next line of the block.
        if self.check(TokenKind.KEYWORD, "or"):
            return True
        if self.check(TokenKind.NEWLINE) and self.check(TokenKind.KEYWORD, "or", ahead=1):
            self.advance()
            return True
        return False

    def _parse_policy_stmt(self) -> ast.Stmt:
        if self.check(TokenKind.KEYWORD, "if"):
            return self._parse_conditional(self._parse_policy_stmt, ast.PolicyIf)
        start = self.expect(TokenKind.KEYWORD, "Execute", expected="'Execute' or 'if'")
        target = self.parse_expr()
        first = ast.ExecuteStmt(target, self.span_from(start))
        prob = self._parse_with_prob()
        if prob is None:
            if self._more_alternatives():
                raise ParseError(
                    "probabilistic alternatives require 'with P(...)' on every branch",
                    self.peek().span, self.path,
                )
            self.expect(TokenKind.NEWLINE)
            return first
        alternatives = [(first, prob)]
        while self._more_alternatives():
            self.expect(TokenKind.KEYWORD, "or")
            tok = self.expect(TokenKind.KEYWORD, "Execute")
            target = self.parse_expr()
            alt = ast.ExecuteStmt(target, self.span_from(tok))
            p = self._parse_with_prob()
            if p is None:
                raise ParseError("probabilistic alternatives require 'with P(...)' on every branch",
                                 alt.span, self.path)
            alternatives.append((alt, p))
        self.expect(TokenKind.NEWLINE)
        return ast.PolicyProb(tuple(alternatives), self.span_from(start))

    def _parse_effect_core(self) -> ast.Stmt:
        """One reward / prediction / reference, without probability suffix."""
        if self.check(TokenKind.KEYWORD, "Reward"):
            start = self.advance()
            value = self.parse_expr()
            return ast.RewardStmt(value, self.span_from(start))
        if self.check(TokenKind.OP, "->"):
            start = self.advance()
            name = self.expect(TokenKind.IDENT, expected="effect name").lexeme
            return ast.EffectRefStmt(name, self.span_from(start))
        first = self.peek()
        target = self.parse_expr()
        if not _is_prediction_target(target):
            raise ParseError(
                "prediction targets must be a primed factor, S', or a primed attribute chain",
                target.span, self.path,
            )
        self.expect(TokenKind.OP, "->")
        value = self.parse_expr()
        return ast.PredictionStmt(target, value, self.span_from(first))

    def _parse_effect_stmt(self) -> ast.Stmt:
        if self.check(TokenKind.KEYWORD, "if"):
            return self._parse_conditional(self._parse_effect_stmt, ast.EffectIf)
        start = self.peek()
        core = self._parse_effect_core()
        prob = self._parse_with_prob()
        if prob is None:
            if self._more_alternatives():
                raise ParseError(
                    "probabilistic alternatives require 'with P(...)' on every branch",
                    self.peek().span, self.path,
                )
            self.expect(TokenKind.NEWLINE)
            return core
        alternatives = [(core, prob)]
        while self._more_alternatives():
            self.expect(TokenKind.KEYWORD, "or")
            alt = self._parse_effect_core()
            p = self._parse_with_prob()
            if p is None:
                raise ParseError("probabilistic alternatives require 'with P(...)' on every branch",
                                 self.peek().span if self.peek() else start.span, self.path)
            alternatives.append((alt, p))
        self.expect(TokenKind.NEWLINE)
        return ast.EffectProb(tuple(alternatives), self.span_from(start))

    def _parse_restrict_stmt(self) -> ast.Stmt:
        if self.check(TokenKind.KEYWORD, "if"):
            return self._parse_conditional(self._parse_restrict_stmt, ast.RestrictIf)
        start = self.expect(TokenKind.KEYWORD, "Restrict", expected="'Restrict' or 'if'")
        action = self.parse_expr()
        self.expect(TokenKind.NEWLINE)
        return ast.RestrictStmt(action, self.span_from(start))

    # -- expressions -------------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        return self._parse_or()

    def _parse_or(self) -> ast.Expr:
        left = self._parse_and()
        while self.check(TokenKind.KEYWORD, "or"):
            tok = self.advance()
            right = self._parse_and()
            left = ast.BinOp("or", left, right, tok.span)
        return left

    def _parse_and(self) -> ast.Expr:
        left = self._parse_not()
        while self.check(TokenKind.KEYWORD, "and"):
            tok = self.advance()
            right = self._parse_not()
            left = ast.BinOp("and", left, right, tok.span)
        return left

    def _parse_not(self) -> ast.Expr:
        if self.check(TokenKind.KEYWORD, "not"):
            tok = self.advance()
            operand = self._parse_not()
            return ast.Unary("not", operand, tok.span)
        return self._parse_comparison()

    def _parse_comparison(self) -> ast.Expr:
        left = self._parse_additive()
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.OP and tok.lexeme in _CMP_OPS:
            self.advance()
            right = self._parse_additive()
            return ast.Compare(tok.lexeme, left, right, tok.span)
        if tok is not None and tok.kind is TokenKind.KEYWORD and tok.lexeme == "in":
            self.advance()
            right = self._parse_additive()
            return ast.Compare("in", left, right, tok.span)
        return left

    def _parse_additive(self) -> ast.Expr:
        left = self._parse_multiplicative()
        while self.check(TokenKind.OP, "+") or self.check(TokenKind.OP, "-"):
            tok = self.advance()
            right = self._parse_multiplicative()
            left = ast.BinOp(tok.lexeme, left, right, tok.span)
        return left

    def _parse_multiplicative(self) -> ast.Expr:
        left = self._parse_unary()
        while self.check(TokenKind.OP, "*") or self.check(TokenKind.OP, "/"):
            tok = self.advance()
            right = self._parse_unary()
            left = ast.BinOp(tok.lexeme, left, right, tok.span)
        return left

    def _parse_unary(self) -> ast.Expr:
        if self.check(TokenKind.OP, "-"):
            tok = self.advance()
            operand = self._parse_unary()
            return ast.Unary("-", operand, tok.span)
        return self._parse_postfix()

    def _parse_postfix(self) -> ast.Expr:
        node = self._parse_primary()
        while True:
            if self.check(TokenKind.PUNCT, "["):
                open_tok = self.advance()
                lo = self.parse_expr()
                if self.match(TokenKind.PUNCT, ":"):
                    hi = self.parse_expr()
                    self.expect(TokenKind.PUNCT, "]")
                    node = ast.Slice(node, lo, hi, open_tok.span)
                else:
                    self.expect(TokenKind.PUNCT, "]")
                    node = ast.Index(node, lo, open_tok.span)
            elif self.check(TokenKind.PUNCT, "."):
                self.advance()
                attr = self.expect(TokenKind.IDENT, expected="attribute name")
                node = ast.Attr(node, attr.lexeme, attr.span)
            elif self.check(TokenKind.OP, "'"):
                tok = self.advance()
                node = ast.Prime(node, tok.span)
            else:
                return node

    def _parse_primary(self) -> ast.Expr:
        tok = self.peek()
        if tok is None:
            return self.fail(["an expression"])
        if tok.kind is TokenKind.INT:
            self.advance()
            return ast.NumberLit(float(tok.lexeme), True, tok.span)
        if tok.kind is TokenKind.FLOAT:
            self.advance()
            return ast.NumberLit(float(tok.lexeme), False, tok.span)
        if tok.kind is TokenKind.KEYWORD:
            if tok.lexeme == "S":
                self.advance()
                return ast.StateRef(tok.span)
            if tok.lexeme == "A":
                self.advance()
                return ast.ActionSym(tok.span)
            if tok.lexeme == "True":
                self.advance()
                return ast.BoolLit(True, tok.span)
            if tok.lexeme == "False":
                self.advance()
                return ast.BoolLit(False, tok.span)
            return self.fail(["an expression"])
        if tok.kind is TokenKind.IDENT:
            self.advance()
            if self.check(TokenKind.PUNCT, "("):
                self.advance()
                args: list[ast.Expr] = []
                if not self.check(TokenKind.PUNCT, ")"):
                    args.append(self.parse_expr())
                    while self.match(TokenKind.PUNCT, ","):
                        args.append(self.parse_expr())
                self.expect(TokenKind.PUNCT, ")")
                return ast.Call(tok.lexeme, tuple(args), tok.span)
            return ast.Name(tok.lexeme, tok.span)
        if tok.kind is TokenKind.PUNCT and tok.lexeme == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(TokenKind.PUNCT, ")")
            return inner
        if tok.kind is TokenKind.PUNCT and tok.lexeme == "[":
            self.advance()
            items: list[ast.Expr] = []
            if not self.check(TokenKind.PUNCT, "]"):
                items.append(self.parse_expr())
                while self.match(TokenKind.PUNCT, ","):
                    items.append(self.parse_expr())
            self.expect(TokenKind.PUNCT, "]")
            return ast.ListLit(tuple(items), tok.span)
        return self.fail(["an expression"])


def _is_prediction_target(expr: ast.Expr) -> bool:
    if isinstance(expr, ast.Prime):
        return isinstance(expr.base, (ast.Name, ast.StateRef))
    # S'.obj.attr parses as Attr(Attr(Prime(S), obj), attr)
    node = expr
    depth = 0
    while isinstance(node, ast.Attr):
        node = node.base
        depth += 1
    return depth == 2 and isinstance(node, ast.Prime) and isinstance(node.base, ast.StateRef)


def parse_tokens(tokens: list[Token], path: str | None = None) -> ast.ParsedProgram:
    return _Parser(tokens, path).parse_program()


def parse_program(source: str, path: str | None = None) -> ast.ParsedProgram:
    """Tokenize and parse a full program text."""
    return parse_tokens(tokenize(source, path), path)
