"""Syntax tree node types and the canonical pretty-printer.

Nodes compare structurally; spans are carried for diagnostics but excluded
from equality so that parse -> pretty_print -> parse round-trips compare
equal. The checker annotates nodes in place (``vtype``/``sig`` attributes),
which is why the dataclasses are not frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .errors import Span


def _span_field():
    return field(compare=False, repr=False)


# --------------------------------------------------------------------------
# expressions


@dataclass(eq=True)
class Expr:
    pass


@dataclass
class NumberLit(Expr):
    value: float
    is_int: bool
    span: Span = _span_field()


@dataclass
class BoolLit(Expr):
    value: bool
    span: Span = _span_field()


@dataclass
class ListLit(Expr):
    items: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass
class Name(Expr):
    ident: str
    span: Span = _span_field()


@dataclass
class StateRef(Expr):
    """The reserved state symbol ``S``."""

    span: Span = _span_field()


@dataclass
class ActionSym(Expr):
    """The reserved action symbol ``A``."""

    span: Span = _span_field()


@dataclass
class Prime(Expr):
    """Postfix ``'``: re-evaluate the base against the next state."""

    base: Expr
    span: Span = _span_field()


@dataclass
class Index(Expr):
    base: Expr
    index: Expr
    span: Span = _span_field()


@dataclass
class Slice(Expr):
    base: Expr
    lo: Expr
    hi: Expr
    span: Span = _span_field()


@dataclass
class Attr(Expr):
    base: Expr
    attr: str
    span: Span = _span_field()


@dataclass
class Unary(Expr):
    op: str  # "-" | "not"
    operand: Expr
    span: Span = _span_field()


@dataclass
class BinOp(Expr):
    op: str  # "+" "-" "*" "/" "and" "or"
    left: Expr
    right: Expr
    span: Span = _span_field()


@dataclass
class Compare(Expr):
    op: str  # "<" "<=" ">" ">=" "==" "!=" "in"
    left: Expr
    right: Expr
    span: Span = _span_field()


@dataclass
class Call(Expr):
    """Class instantiation, e.g. ``Arm(expr)``."""

    func: str
    args: tuple[Expr, ...]
    span: Span = _span_field()


# --------------------------------------------------------------------------
# statements


@dataclass
class Stmt:
    pass


@dataclass
class ExecuteStmt(Stmt):
    target: Expr
    span: Span = _span_field()


@dataclass
class PolicyProb(Stmt):
    """``Execute a with P(p) or Execute b with P(q) ...``"""

    alternatives: tuple[tuple[ExecuteStmt, Expr], ...]
    span: Span = _span_field()


@dataclass
class PolicyIf(Stmt):
    branches: tuple[tuple[Expr, tuple[Stmt, ...]], ...]
    orelse: tuple[Stmt, ...] | None
    span: Span = _span_field()


@dataclass
class RewardStmt(Stmt):
    value: Expr
    span: Span = _span_field()


@dataclass
class PredictionStmt(Stmt):
    """``target' -> expr`` where target is a factor, S, or an attribute chain."""

    target: Expr
    value: Expr
    span: Span = _span_field()


@dataclass
class EffectRefStmt(Stmt):
    name: str
    span: Span = _span_field()


@dataclass
class EffectProb(Stmt):
    """Probabilistic effect statement; alternatives carry their own mass."""

    alternatives: tuple[tuple[Stmt, Expr], ...]
    span: Span = _span_field()


@dataclass
class EffectIf(Stmt):
    branches: tuple[tuple[Expr, tuple[Stmt, ...]], ...]
    orelse: tuple[Stmt, ...] | None
    span: Span = _span_field()


@dataclass
class RestrictStmt(Stmt):
    action: Expr
    span: Span = _span_field()


@dataclass
class RestrictIf(Stmt):
    branches: tuple[tuple[Expr, tuple[Stmt, ...]], ...]
    orelse: tuple[Stmt, ...] | None
    span: Span = _span_field()


# --------------------------------------------------------------------------
# declarations


@dataclass
class Declaration:
    pass


@dataclass
class ConstantDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class ActionDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class FactorDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class PropositionDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class GoalDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class FeatureDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class MarkovFeatureDecl(Declaration):
    name: str
    expr: Expr
    span: Span = _span_field()


@dataclass
class ObjectDecl(Declaration):
    name: str
    ctor: Call
    span: Span = _span_field()


@dataclass
class ClassDecl(Declaration):
    name: str
    parent: str | None
    attrs: tuple[tuple[str, str], ...]  # (attribute name, type name)
    span: Span = _span_field()


@dataclass
class PolicyDecl(Declaration):
    name: str
    body: tuple[Stmt, ...]
    span: Span = _span_field()


@dataclass
class OptionDecl(Declaration):
    name: str
    init: Expr
    body: tuple[Stmt, ...]
    until: Expr
    span: Span = _span_field()


@dataclass
class EffectDecl(Declaration):
    name: str
    body: tuple[Stmt, ...]
    span: Span = _span_field()


@dataclass
class ActionRestrictionDecl(Declaration):
    name: str
    body: tuple[Stmt, ...]
    span: Span = _span_field()


@dataclass
class ParsedProgram:
    """Parse result: import references (vocabulary or nested programs) plus
    the declaration list in source order."""

    imports: tuple[str, ...]
    declarations: tuple[Declaration, ...]


# --------------------------------------------------------------------------
# pretty-printing

_DECL_KEYWORD = {
    ConstantDecl: "Constant",
    ActionDecl: "Action",
    FactorDecl: "Factor",
    PropositionDecl: "Proposition",
    GoalDecl: "Goal",
    FeatureDecl: "Feature",
    MarkovFeatureDecl: "MarkovFeature",
}

# binding strength, loosest first; comparisons are non-associative
_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6, "neg": 7}
_CMP_OPS = frozenset({"<", "<=", ">", ">=", "==", "!=", "in"})


def _fmt_number(node: NumberLit) -> str:
    if node.is_int:
        return str(int(node.value))
    return repr(node.value)


def _expr_prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Compare):
        return _PREC["cmp"]
    if isinstance(node, Unary):
        return _PREC["not"] if node.op == "not" else _PREC["neg"]
    return 99


def format_expr(node: Expr) -> str:
    def child(sub: Expr, parent_prec: int, right: bool = False) -> str:
        text = format_expr(sub)
        prec = _expr_prec(sub)
        if prec < parent_prec or (prec == parent_prec and right):
            return f"({text})"
        return text

    if isinstance(node, NumberLit):
        return _fmt_number(node)
    if isinstance(node, BoolLit):
        return "True" if node.value else "False"
    if isinstance(node, ListLit):
        return "[" + ", ".join(format_expr(x) for x in node.items) + "]"
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, StateRef):
        return "S"
    if isinstance(node, ActionSym):
        return "A"
    if isinstance(node, Prime):
        return child(node.base, 99) + "'"
    if isinstance(node, Index):
        return child(node.base, 99) + "[" + format_expr(node.index) + "]"
    if isinstance(node, Slice):
        return child(node.base, 99) + "[" + format_expr(node.lo) + ":" + format_expr(node.hi) + "]"
    if isinstance(node, Attr):
        return child(node.base, 99) + "." + node.attr
    if isinstance(node, Unary):
        if node.op == "not":
            return "not " + child(node.operand, _PREC["not"])
        return "-" + child(node.operand, _PREC["neg"])
    if isinstance(node, BinOp):
        # Right operands of equal precedence keep their parens so that
        # a - (b - c) round-trips (parsing is left-associative).
        prec = _PREC[node.op]
        return f"{child(node.left, prec)} {node.op} {child(node.right, prec, right=True)}"
    if isinstance(node, Compare):
        prec = _PREC["cmp"]
        return f"{child(node.left, prec + 1)} {node.op} {child(node.right, prec + 1)}"
    if isinstance(node, Call):
        return node.func + "(" + ", ".join(format_expr(a) for a in node.args) + ")"
    raise TypeError(f"unknown expression node {node!r}")


def _fmt_stmt(stmt: Stmt, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    if isinstance(stmt, ExecuteStmt):
        out.append(f"{pad}Execute {format_expr(stmt.target)}")
    elif isinstance(stmt, PolicyProb):
        first, p = stmt.alternatives[0]
        out.append(f"{pad}Execute {format_expr(first.target)} with P({format_expr(p)})")
        for alt, p in stmt.alternatives[1:]:
            out.append(f"{pad}or Execute {format_expr(alt.target)} with P({format_expr(p)})")
    elif isinstance(stmt, RewardStmt):
        out.append(f"{pad}Reward {format_expr(stmt.value)}")
    elif isinstance(stmt, PredictionStmt):
        out.append(f"{pad}{format_expr(stmt.target)} -> {format_expr(stmt.value)}")
    elif isinstance(stmt, EffectRefStmt):
        out.append(f"{pad}-> {stmt.name}")
    elif isinstance(stmt, EffectProb):
        for k, (alt, p) in enumerate(stmt.alternatives):
            lead = "" if k == 0 else "or "
            sub: list[str] = []
            _fmt_stmt(alt, 0, sub)
            out.append(f"{pad}{lead}{sub[0]} with P({format_expr(p)})")
    elif isinstance(stmt, (PolicyIf, EffectIf, RestrictIf)):
        for k, (cond, body) in enumerate(stmt.branches):
            out.append(f"{pad}{'if' if k == 0 else 'elif'} {format_expr(cond)}:")
            for s in body:
                _fmt_stmt(s, indent + 1, out)
        if stmt.orelse is not None:
            out.append(f"{pad}else:")
            for s in stmt.orelse:
                _fmt_stmt(s, indent + 1, out)
    elif isinstance(stmt, RestrictStmt):
        out.append(f"{pad}Restrict {format_expr(stmt.action)}")
    else:
        raise TypeError(f"unknown statement node {stmt!r}")


def pretty_print(program: ParsedProgram | list[Declaration] | tuple[Declaration, ...]) -> str:
    """Render a canonical source text that parses back to an equal tree."""
    if isinstance(program, ParsedProgram):
        imports = program.imports
        decls = program.declarations
    else:
        imports = ()
        decls = tuple(program)
    out: list[str] = []
    for ref in imports:
        out.append(f'import "{ref}"')
    if imports and decls:
        out.append("")
    for i, decl in enumerate(decls):
        if i > 0:
            out.append("")
        kw = _DECL_KEYWORD.get(type(decl))
        if kw is not None:
            out.append(f"{kw} {decl.name} := {format_expr(decl.expr)}")
        elif isinstance(decl, ObjectDecl):
            out.append(f"Object {decl.name} := {format_expr(decl.ctor)}")
        elif isinstance(decl, ClassDecl):
            head = f"Class {decl.name}({decl.parent}):" if decl.parent else f"Class {decl.name}:"
            out.append(head)
            for attr, tname in decl.attrs:
                out.append(f"    {attr}: {tname}")
        elif isinstance(decl, PolicyDecl):
            out.append(f"Policy {decl.name}:")
            for s in decl.body:
                _fmt_stmt(s, 1, out)
        elif isinstance(decl, OptionDecl):
            out.append(f"Option {decl.name}:")
            out.append(f"    init {format_expr(decl.init)}")
            for s in decl.body:
                _fmt_stmt(s, 2, out)
            out.append(f"    until {format_expr(decl.until)}")
        elif isinstance(decl, EffectDecl):
            out.append(f"Effect {decl.name}:")
            for s in decl.body:
                _fmt_stmt(s, 1, out)
        elif isinstance(decl, ActionRestrictionDecl):
            out.append(f"ActionRestriction {decl.name}:")
            for s in decl.body:
                _fmt_stmt(s, 1, out)
        else:
            raise TypeError(f"unknown declaration node {decl!r}")
    text = "\n".join(out)
    return text + "\n" if text else ""


def walk(node) -> "list":
    """All AST nodes reachable from ``node``, including itself."""
    seen = []

    def visit(x):
        if isinstance(x, (Expr, Stmt, Declaration)):
            seen.append(x)
            for f in vars(x).values():
                visit(f)
        elif isinstance(x, (tuple, list)):
            for item in x:
                visit(item)

    visit(node)
    return seen
