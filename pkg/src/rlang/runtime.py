"""Grounded values and expression evaluation.

Values are small tagged wrappers over float tuples plus Bool, List and the
absorbing Unknown. Unknown dominates every operator, including the logical
ones: ``False and Unknown`` is Unknown (both operands are always evaluated,
there is no short-circuit), which keeps evaluation conservative and
referentially transparent.

``evaluate`` resolves names through a resolver (the checked program), so a
reference always re-evaluates its definition against the current context.
The prime operator re-evaluates the referenced definition with the next
state substituted for the current one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

from . import ast
from .errors import EvalError, MissingContextError, UnboundGroundingError

S_DOM = "S"
A_DOM = "A"
SP_DOM = "S'"


class GroundedValue:
    pass


class _Unknown(GroundedValue):
    def __repr__(self):
        return "Unknown"

    def __bool__(self):
        raise TypeError("Unknown has no truth value; test with 'is UNKNOWN'")


UNKNOWN = _Unknown()


@dataclass(frozen=True)
class Real(GroundedValue):
    values: tuple[float, ...]

    @staticmethod
    def scalar(x: float) -> "Real":
        return Real((float(x),))

    @staticmethod
    def of(seq) -> "Real":
        return Real(tuple(float(x) for x in seq))

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_scalar(self) -> float:
        if len(self.values) != 1:
            raise EvalError(f"expected a scalar, got a {len(self.values)}-vector")
        return self.values[0]

    def __repr__(self):
        if len(self.values) == 1:
            return f"Real({self.values[0]!r})"
        return f"Real({list(self.values)!r})"


@dataclass(frozen=True)
class Bool(GroundedValue):
    value: bool

    def __repr__(self):
        return f"Bool({self.value})"


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class ActionVal(GroundedValue):
    values: tuple[float, ...]
    name: str | None = field(default=None, compare=False)

    @staticmethod
    def of(value, name: str | None = None) -> "ActionVal":
        if isinstance(value, (int, float)):
            return ActionVal((float(value),), name)
        return ActionVal(tuple(float(x) for x in value), name)

    def as_index(self) -> int:
        if len(self.values) != 1 or self.values[0] != int(self.values[0]):
            raise EvalError("action value is not a discrete index")
        return int(self.values[0])

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"ActionVal({list(self.values)!r}{label})"


@dataclass(frozen=True)
class StateVal(GroundedValue):
    values: tuple[float, ...]

    def __repr__(self):
        return f"StateVal({list(self.values)!r})"


@dataclass(frozen=True)
class ListVal(GroundedValue):
    items: tuple[GroundedValue, ...]


@dataclass(frozen=True)
class EvalContext:
    """What a query supplies: current state, action, next state, and an
    optional host attribute provider ``(obj, attr, primed, ctx) -> value``."""

    s: tuple[float, ...] | None = None
    a: ActionVal | None = None
    s_next: tuple[float, ...] | None = None
    attr_provider: object = None

    def provides(self) -> frozenset:
        out = set()
        if self.s is not None:
            out.add(S_DOM)
        if self.a is not None:
            out.add(A_DOM)
        if self.s_next is not None:
            out.add(SP_DOM)
        return frozenset(out)

    def primed(self) -> "EvalContext":
        if self.s_next is None:
            raise MissingContextError("prime used but no next state in context")
        return replace(self, s=self.s_next, s_next=None)


def make_context(s=None, a=None, s_next=None, attr_provider=None) -> EvalContext:
    """Coerce plain sequences / ints into a context."""
    if s is not None:
        s = tuple(float(x) for x in s)
    if s_next is not None:
        s_next = tuple(float(x) for x in s_next)
    if a is not None and not isinstance(a, ActionVal):
        a = ActionVal.of(a)
    return EvalContext(s, a, s_next, attr_provider)


def value_from_literal(raw) -> GroundedValue:
    """Inline vocab/JSON literal -> grounded value."""
    if isinstance(raw, bool):
        return TRUE if raw else FALSE
    if isinstance(raw, (int, float)):
        return Real.scalar(raw)
    if isinstance(raw, list):
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw):
            return Real.of(raw)
        return ListVal(tuple(value_from_literal(x) for x in raw))
    raise EvalError(f"cannot ground literal {raw!r}")


# --------------------------------------------------------------------------
# marker values used while walking attribute chains


@dataclass(frozen=True)
class _StateObj(GroundedValue):
    obj: str
    primed: bool


@dataclass(frozen=True)
class _ObjVal(GroundedValue):
    symbol: object  # semantics.Symbol for an Object declaration


_warned_attrs: set[tuple[str, str]] = set()


def _warn_unmapped(obj: str, attr: str) -> None:
    if (obj, attr) not in _warned_attrs:
        _warned_attrs.add((obj, attr))
        warnings.warn(f"attribute {obj}.{attr} has no state-index mapping; it grounds to Unknown")


# --------------------------------------------------------------------------
# evaluation


def _components(value: GroundedValue, what: str) -> tuple[float, ...]:
    if isinstance(value, (Real, StateVal, ActionVal)):
        return value.values
    raise EvalError(f"{what} is not a numeric vector: {value!r}")


def _state_components(ctx: EvalContext, primed: bool) -> tuple[float, ...]:
    vec = ctx.s_next if primed else ctx.s
    if vec is None:
        raise MissingContextError("context does not provide the referenced state")
    return vec


def _arith(op: str, lv: GroundedValue, rv: GroundedValue) -> GroundedValue:
    left = _components(lv, "left operand")
    right = _components(rv, "right operand")
    if len(left) == len(right):
        pairs = zip(left, right)
    elif len(left) == 1:
        pairs = ((left[0], r) for r in right)
    elif len(right) == 1:
        pairs = ((l, right[0]) for l in left)
    else:
        raise EvalError(f"dimension mismatch: {len(left)} vs {len(right)}")
    if op == "+":
        out = tuple(l + r for l, r in pairs)
    elif op == "-":
        out = tuple(l - r for l, r in pairs)
    elif op == "*":
        out = tuple(l * r for l, r in pairs)
    elif op == "/":
        result = []
        for l, r in pairs:
            if r == 0.0:
                raise EvalError("division by zero")
            result.append(l / r)
        out = tuple(result)
    else:
        raise EvalError(f"unknown arithmetic operator {op}")
    return Real(out)


def _vec_equal(lv: GroundedValue, rv: GroundedValue) -> bool:
    left = _components(lv, "left operand")
    right = _components(rv, "right operand")
    if len(left) != len(right):
        raise EvalError(f"dimension mismatch in comparison: {len(left)} vs {len(right)}")
    return left == right


def _membership(lv: GroundedValue, rv: GroundedValue) -> Bool:
    if isinstance(rv, ListVal):
        for item in rv.items:
            if item is UNKNOWN:
                raise EvalError("membership over a list containing Unknown")
            li = _components(lv, "membership operand")
            ri = _components(item, "list element")
            if len(li) == len(ri) and li == ri:
                return TRUE
        return FALSE
    # A plain vector acts as a container of scalars ("bridge in inventory").
    container = _components(rv, "membership container")
    needle = _components(lv, "membership operand")
    if len(needle) != 1:
        raise EvalError("membership in a vector requires a scalar on the left")
    return TRUE if needle[0] in container else FALSE


def evaluate(expr: ast.Expr, ctx: EvalContext, env) -> GroundedValue:
    """Ground ``expr`` against ``ctx``.

    ``env`` resolves names: it must offer ``lookup(name) -> Symbol`` and
    ``attribute_entry(obj) -> VocabularyEntry | None`` (the checked program
    does). The context must provide every domain element the expression's
    signature mentions; missing elements raise EvalError.
    """
    if isinstance(expr, ast.NumberLit):
        return Real.scalar(expr.value)
    if isinstance(expr, ast.BoolLit):
        return TRUE if expr.value else FALSE
    if isinstance(expr, ast.ListLit):
        items = [evaluate(item, ctx, env) for item in expr.items]
        if any(item is UNKNOWN for item in items):
            return UNKNOWN
        if items and all(isinstance(i, Real) and i.dim == 1 for i in items):
            return Real(tuple(i.values[0] for i in items))
        return ListVal(tuple(items))
    if isinstance(expr, ast.StateRef):
        return StateVal(_state_components(ctx, primed=False))
    if isinstance(expr, ast.ActionSym):
        if ctx.a is None:
            raise MissingContextError("context does not provide an action")
        return ctx.a
    if isinstance(expr, ast.Name):
        return _eval_name(expr.ident, ctx, env)
    if isinstance(expr, ast.Prime):
        return _eval_prime(expr, ctx, env)
    if isinstance(expr, ast.Attr):
        return _eval_attr(expr, ctx, env)
    if isinstance(expr, ast.Index):
        base = evaluate(expr.base, ctx, env)
        if base is UNKNOWN:
            return UNKNOWN
        comps = _components(base, "indexed value")
        i = _static_int(expr.index, ctx, env)
        if not 0 <= i < len(comps):
            raise EvalError(f"index {i} out of range for dimension {len(comps)}")
        return Real((comps[i],))
    if isinstance(expr, ast.Slice):
        base = evaluate(expr.base, ctx, env)
        if base is UNKNOWN:
            return UNKNOWN
        comps = _components(base, "sliced value")
        lo = _static_int(expr.lo, ctx, env)
        hi = _static_int(expr.hi, ctx, env)
        if not (0 <= lo <= hi <= len(comps)):
            raise EvalError(f"slice [{lo}:{hi}] out of range for dimension {len(comps)}")
        return Real(comps[lo:hi])
    if isinstance(expr, ast.Unary):
        val = evaluate(expr.operand, ctx, env)
        if val is UNKNOWN:
            return UNKNOWN
        if expr.op == "-":
            return Real(tuple(-x for x in _components(val, "negation operand")))
        if expr.op == "not":
            if not isinstance(val, Bool):
                raise EvalError("'not' requires a boolean operand")
            return FALSE if val.value else TRUE
        raise EvalError(f"unknown unary operator {expr.op}")
    if isinstance(expr, ast.BinOp):
        lv = evaluate(expr.left, ctx, env)
        rv = evaluate(expr.right, ctx, env)
        if lv is UNKNOWN or rv is UNKNOWN:
            return UNKNOWN
        if expr.op in ("and", "or"):
            if not isinstance(lv, Bool) or not isinstance(rv, Bool):
                raise EvalError(f"'{expr.op}' requires boolean operands")
            if expr.op == "and":
                return TRUE if (lv.value and rv.value) else FALSE
            return TRUE if (lv.value or rv.value) else FALSE
        return _arith(expr.op, lv, rv)
    if isinstance(expr, ast.Compare):
        lv = evaluate(expr.left, ctx, env)
        rv = evaluate(expr.right, ctx, env)
        if lv is UNKNOWN or rv is UNKNOWN:
            return UNKNOWN
        op = expr.op
        if op == "in":
            return _membership(lv, rv)
        if op in ("==", "!="):
            eq = _vec_equal(lv, rv)
            return TRUE if (eq if op == "==" else not eq) else FALSE
        l = _components(lv, "comparison operand")
        r = _components(rv, "comparison operand")
        if len(l) != 1 or len(r) != 1:
            raise EvalError("order comparisons require scalars")
        a, b = l[0], r[0]
        result = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        return TRUE if result else FALSE
    if isinstance(expr, ast.Call):
        raise EvalError("class instantiation is only valid in Object declarations")
    raise EvalError(f"cannot evaluate node {type(expr).__name__}")


def _static_int(expr: ast.Expr, ctx: EvalContext, env) -> int:
    value = evaluate(expr, ctx, env)
    if value is UNKNOWN:
        raise EvalError("index bounds cannot be Unknown")
    x = _components(value, "index bound")
    if len(x) != 1 or x[0] != int(x[0]):
        raise EvalError("index bounds must be integers")
    return int(x[0])


def _eval_name(name: str, ctx: EvalContext, env) -> GroundedValue:
    sym = env.lookup(name)
    kind = sym.kind
    if kind in ("constant", "action"):
        return sym.value
    if kind == "factor":
        s = _state_components(ctx, primed=False)
        if sym.indices is None:  # alias of the whole state
            return Real(s)
        try:
            return Real(tuple(s[i] for i in sym.indices))
        except IndexError:
            raise EvalError(f"factor {name} indexes past the state dimension {len(s)}") from None
    if kind in ("feature", "proposition", "goal", "markov_feature"):
        return evaluate(sym.decl.expr, ctx, env)
    if kind == "vocab":
        return _eval_vocab(sym, ctx, env)
    if kind == "learnable":
        return UNKNOWN
    if kind == "builtin_true":
        return TRUE
    if kind == "object":
        return _ObjVal(sym)
    raise EvalError(f"{name} ({kind}) cannot be used as a value")


def _eval_vocab(sym, ctx: EvalContext, env) -> GroundedValue:
    from . import semantics  # late import; type names only

    entry = sym.entry
    if entry.kind == "constant":
        return sym.value
    if entry.kind == "action":
        return sym.value
    if entry.kind == "factor":
        s = _state_components(ctx, primed=False)
        try:
            return Real(tuple(s[i] for i in entry.indices))
        except IndexError:
            raise EvalError(f"factor {entry.name} indexes past the state dimension {len(s)}") from None
    if entry.kind in ("feature", "proposition"):
        if entry.value is not None:
            return sym.value
        fn = env.registry.callable_for(entry.key)
        if fn is None:
            raise UnboundGroundingError(f"grounding key {entry.key!r} for {entry.name!r} is not registered")
        out = fn(ctx)
        return _check_vocab_result(entry, out)
    if entry.kind == "policy":
        fn = env.registry.callable_for(entry.key)
        if fn is None:
            raise UnboundGroundingError(f"grounding key {entry.key!r} for {entry.name!r} is not registered")
        out = fn(ctx)
        if out is not UNKNOWN and not isinstance(out, ActionVal):
            raise semantics.wrong_grounding_type(entry, out)
        return out
    if entry.kind == "learnable_policy":
        return UNKNOWN
    raise EvalError(f"{entry.name} ({entry.kind}) cannot be used as a value")


def _check_vocab_result(entry, out: GroundedValue) -> GroundedValue:
    from . import semantics

    if out is UNKNOWN:
        return out
    if entry.kind == "proposition" and not isinstance(out, Bool):
        raise semantics.wrong_grounding_type(entry, out)
    if entry.kind == "feature" and not isinstance(out, Real):
        raise semantics.wrong_grounding_type(entry, out)
    return out


def _eval_prime(expr: ast.Prime, ctx: EvalContext, env) -> GroundedValue:
    if isinstance(expr.base, ast.StateRef):
        return StateVal(_state_components(ctx, primed=True))
    # Re-evaluate the referenced definition with s := s_next.
    return evaluate(expr.base, ctx.primed(), env)


def _eval_attr(expr: ast.Attr, ctx: EvalContext, env) -> GroundedValue:
    base = expr.base
    if isinstance(base, ast.StateRef):
        return _StateObj(expr.attr, primed=False)
    if isinstance(base, ast.Prime) and isinstance(base.base, ast.StateRef):
        return _StateObj(expr.attr, primed=True)
    inner = evaluate(base, ctx, env)
    if inner is UNKNOWN:
        return UNKNOWN
    if isinstance(inner, _StateObj):
        return _state_attr(inner.obj, expr.attr, inner.primed, ctx, env)
    if isinstance(inner, _ObjVal):
        sym = inner.symbol
        bound = sym.object_attrs.get(expr.attr)
        if bound is None:
            raise EvalError(f"object {sym.name} has no attribute {expr.attr}")
        return evaluate(bound, ctx, env)
    raise EvalError(f"cannot access attribute {expr.attr} on {inner!r}")


def _state_attr(obj: str, attr: str, primed: bool, ctx: EvalContext, env) -> GroundedValue:
    entry = env.attribute_entry(obj)
    spec = entry.attributes.get(attr) if entry is not None and entry.attributes else None
    if spec is not None and spec.indices is not None:
        s = _state_components(ctx, primed)
        try:
            picked = tuple(s[i] for i in spec.indices)
        except IndexError:
            raise EvalError(f"attribute {obj}.{attr} indexes past the state dimension {len(s)}") from None
        if spec.type == "bool":
            return TRUE if picked[0] != 0.0 else FALSE
        return Real(picked)
    if ctx.attr_provider is not None:
        out = ctx.attr_provider(obj, attr, primed, ctx)
        if out is not None:
            return out
    _warn_unmapped(obj, attr)
    return UNKNOWN


# --------------------------------------------------------------------------
# partial functions


@dataclass(frozen=True)
class PartialFunction:
    """Ordered guard/value pairs; a guard of None is an 'else' arm."""

    branches: tuple[tuple[ast.Expr | None, ast.Expr], ...]


def evaluate_partial(pf: PartialFunction, ctx: EvalContext, env) -> GroundedValue:
    """First-match semantics; Unknown guard poisons the result; no match
    (and no else arm) yields Unknown."""
    for guard, value in pf.branches:
        if guard is None:
            return evaluate(value, ctx, env)
        g = evaluate(guard, ctx, env)
        if g is UNKNOWN:
            return UNKNOWN
        if not isinstance(g, Bool):
            raise EvalError("guard did not evaluate to a boolean")
        if g.value:
            return evaluate(value, ctx, env)
    return UNKNOWN
