"""Name resolution, value typing, and domain-signature checking.

Every expression gets a value type (real vector with a possibly-unknown
dimension, boolean, action, state, object, or list) and a domain signature:
the subset of {S, A, S'} it reads. Signatures are unioned upward, and each
declaration kind constrains what its body may read; a Proposition touching
S' is a DomainError, not a parse error.

Names must be declared before use. Imported vocabulary entries are seeded
into the table first, so programs may reference them anywhere; in-program
declarations may not shadow them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast, runtime
from .errors import (
    DomainError,
    DuplicateNameError,
    Span,
    TypeCheckError,
    UnresolvedNameError,
)
from .runtime import A_DOM, S_DOM, SP_DOM, ActionVal, Bool, EvalContext, Real
from .vocab import VocabularyEntry, VocabularyRegistry

EMPTY_SIG: frozenset = frozenset()
S_ONLY = frozenset({S_DOM})
SA = frozenset({S_DOM, A_DOM})
SAS = frozenset({S_DOM, A_DOM, SP_DOM})

# Suffix that makes an undeclared identifier resolve as a learnable policy
# placeholder (the explicit vocabulary kind works for any other name).
LEARNABLE_SUFFIX = "_learnable_policy"

CLASS_ATTR_TYPES = ("str", "int", "float", "bool", "object")


# --------------------------------------------------------------------------
# value types


class ValueType:
    pass


@dataclass(frozen=True)
class RealVec(ValueType):
    dim: int | None  # None: dimension not known statically

    def __str__(self):
        return f"real[{self.dim}]" if self.dim is not None else "real[?]"


@dataclass(frozen=True)
class BoolT(ValueType):
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class ActionT(ValueType):
    def __str__(self):
        return "action"


@dataclass(frozen=True)
class StateT(ValueType):
    def __str__(self):
        return "state"


@dataclass(frozen=True)
class ObjectT(ValueType):
    cls: str

    def __str__(self):
        return f"object({self.cls})"


@dataclass(frozen=True)
class ListT(ValueType):
    elem: ValueType | None

    def __str__(self):
        return f"list[{self.elem}]" if self.elem is not None else "list[?]"


@dataclass(frozen=True)
class _StateObjT(ValueType):
    """Intermediate type of ``S.obj`` before the attribute is picked."""

    obj: str
    primed: bool

    def __str__(self):
        return f"state-object({self.obj})"


BOOL = BoolT()
ACTION = ActionT()
STATE = StateT()
SCALAR = RealVec(1)


def _fmt_sig(sig: frozenset) -> str:
    if not sig:
        return "{}"
    order = {S_DOM: 0, A_DOM: 1, SP_DOM: 2}
    return "{" + ", ".join(sorted(sig, key=order.get)) + "}"


def wrong_grounding_type(entry: VocabularyEntry, got) -> TypeCheckError:
    expected = {"proposition": "a boolean", "feature": "a real vector", "policy": "an action"}.get(
        entry.kind, "a value"
    )
    return TypeCheckError(
        f"grounding for {entry.name!r} returned {type(got).__name__}, expected {expected}"
    )


# --------------------------------------------------------------------------
# symbols


@dataclass
class Symbol:
    name: str
    kind: str  # constant action factor proposition goal feature markov_feature
    #            object class policy option effect restriction vocab learnable builtin_true
    vtype: ValueType | None = None
    sig: frozenset = EMPTY_SIG
    decl: ast.Declaration | None = None
    value: object = None  # folded compile-time value (constants, actions)
    indices: tuple[int, ...] | None = None  # factors: selected state indices
    entry: VocabularyEntry | None = None  # vocabulary-backed symbols
    object_attrs: dict | None = None  # Object decls: attr -> bound expression
    attr_types: dict | None = None  # Object decls: attr -> (ValueType, sig)
    class_attrs: tuple | None = None  # Class decls: ((attr, type-name), ...) parent-first
    span: Span | None = None


@dataclass
class CheckedProgram:
    """Symbol table plus the annotated AST; the resolver used at evaluation
    and compile time."""

    program: ast.ParsedProgram
    registry: VocabularyRegistry
    path: str | None = None
    symbols: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)  # separate namespace (names may collide)
    policies: dict = field(default_factory=dict)
    effects: dict = field(default_factory=dict)
    restrictions: list = field(default_factory=list)
    goals: list = field(default_factory=list)
    actions: dict = field(default_factory=dict)

    def lookup(self, name: str) -> Symbol:
        sym = self.symbols.get(name)
        if sym is None:
            raise UnresolvedNameError(f"undefined name {name!r}", path=self.path)
        return sym

    def attribute_entry(self, obj: str) -> VocabularyEntry | None:
        entry = self.registry.get(obj)
        if entry is not None and entry.kind == "attribute_map":
            return entry
        return None

    def const_float(self, expr: ast.Expr) -> float:
        """Fold a compile-time scalar (probability weights and the like)."""
        value = runtime.evaluate(expr, EvalContext(), self)
        if not isinstance(value, Real) or value.dim != 1:
            raise TypeCheckError("expected a constant scalar", expr.span, self.path)
        return value.values[0]

    @property
    def main_effect(self) -> Symbol | None:
        return self.effects.get("main")

    @property
    def main_policy(self) -> Symbol | None:
        return self.policies.get("main")


# --------------------------------------------------------------------------
# capability vector

CAPABILITY_AXES = ("transition", "reward", "policy", "options", "restrictions", "goals")


@dataclass(frozen=True)
class CapabilityVector:
    transition: bool = False
    reward: bool = False
    policy: bool = False
    options: bool = False
    restrictions: bool = False
    goals: bool = False

    def bits(self) -> tuple[int, ...]:
        return tuple(int(getattr(self, axis)) for axis in CAPABILITY_AXES)

    def __str__(self):
        on = [axis for axis in CAPABILITY_AXES if getattr(self, axis)]
        return "+".join(on) if on else "none"


def capability_vector(cp: CheckedProgram) -> CapabilityVector:
    has_pred = False
    has_reward = False
    main = cp.main_effect
    if main is not None:
        seen: set[str] = set()

        def scan(sym: Symbol):
            nonlocal has_pred, has_reward
            if sym.name in seen or sym.decl is None:
                return
            seen.add(sym.name)
            for node in ast.walk(sym.decl):
                if isinstance(node, ast.PredictionStmt):
                    has_pred = True
                elif isinstance(node, ast.RewardStmt):
                    has_reward = True
                elif isinstance(node, ast.EffectRefStmt):
                    ref = cp.effects.get(node.name)
                    if ref is not None:
                        scan(ref)

        scan(main)
    return CapabilityVector(
        transition=has_pred,
        reward=has_reward,
        policy=bool(cp.policies),
        options=bool(cp.options),
        restrictions=bool(cp.restrictions),
        goals=bool(cp.goals),
    )


# --------------------------------------------------------------------------
# checker


class _Checker:
    def __init__(self, program: ast.ParsedProgram, registry: VocabularyRegistry, path: str | None):
        self.cp = CheckedProgram(program, registry, path)
        self.path = path

    # -- errors --------------------------------------------------------------

    def _err(self, cls, message: str, span: Span | None):
        raise cls(message, span, self.path)

    # -- symbol table --------------------------------------------------------

    def define(self, sym: Symbol):
        if sym.name in self.cp.symbols:
            prior = self.cp.symbols[sym.name]
            what = "vocabulary entry" if prior.kind in ("vocab", "learnable") else prior.kind
            self._err(DuplicateNameError, f"{sym.name!r} is already defined as a {what}", sym.span)
        self.cp.symbols[sym.name] = sym

    def resolve(self, name: str, span: Span | None) -> Symbol:
        sym = self.cp.symbols.get(name)
        if sym is not None:
            return sym
        if name.endswith(LEARNABLE_SUFFIX):
            sym = Symbol(name, "learnable", ACTION, S_ONLY)
            self.cp.symbols[name] = sym
            return sym
        self._err(UnresolvedNameError, f"undefined name {name!r}", span)

    def seed_vocabulary(self):
        self.cp.symbols["any"] = Symbol("any", "builtin_true", BOOL, EMPTY_SIG)
        for entry in self.cp.registry.entries.values():
            if entry.kind == "attribute_map":
                continue  # reachable only through S.<obj> attribute chains
            sym = self._vocab_symbol(entry)
            if sym.name in self.cp.symbols:
                self._err(DuplicateNameError, f"vocabulary entry {sym.name!r} collides with a builtin", None)
            self.cp.symbols[sym.name] = sym
            if entry.kind == "action":
                self.cp.actions[entry.name] = sym

    def _vocab_symbol(self, entry: VocabularyEntry) -> Symbol:
        if entry.kind == "factor":
            return Symbol(entry.name, "vocab", RealVec(len(entry.indices)), S_ONLY, entry=entry)
        if entry.kind == "feature":
            sig = entry.domain if entry.domain is not None else S_ONLY
            if entry.value is not None:
                value = runtime.value_from_literal(entry.value)
                return Symbol(entry.name, "vocab", RealVec(value.dim), EMPTY_SIG, value=value, entry=entry)
            return Symbol(entry.name, "vocab", RealVec(entry.dim), sig, entry=entry)
        if entry.kind == "proposition":
            sig = entry.domain if entry.domain is not None else S_ONLY
            if entry.value is not None:
                value = runtime.value_from_literal(entry.value)
                return Symbol(entry.name, "vocab", BOOL, EMPTY_SIG, value=value, entry=entry)
            return Symbol(entry.name, "vocab", BOOL, sig, entry=entry)
        if entry.kind == "constant":
            value = runtime.value_from_literal(entry.value)
            vtype = _literal_type(value)
            return Symbol(entry.name, "vocab", vtype, EMPTY_SIG, value=value, entry=entry)
        if entry.kind == "action":
            value = ActionVal.of(entry.value, entry.name)
            return Symbol(entry.name, "vocab", ACTION, EMPTY_SIG, value=value, entry=entry)
        if entry.kind == "policy":
            return Symbol(entry.name, "vocab", ACTION, S_ONLY, entry=entry)
        if entry.kind == "effect":
            return Symbol(entry.name, "vocab", None, SAS, entry=entry)
        if entry.kind == "learnable_policy":
            return Symbol(entry.name, "learnable", ACTION, S_ONLY, entry=entry)
        raise AssertionError(entry.kind)

    # -- expression typing -----------------------------------------------------

    def infer(self, expr: ast.Expr) -> tuple[ValueType | None, frozenset]:
        vtype, sig = self._infer(expr)
        expr.vtype = vtype
        expr.sig = sig
        return vtype, sig

    def _infer(self, expr: ast.Expr):
        if isinstance(expr, ast.NumberLit):
            return SCALAR, EMPTY_SIG
        if isinstance(expr, ast.BoolLit):
            return BOOL, EMPTY_SIG
        if isinstance(expr, ast.ListLit):
            return self._infer_list(expr)
        if isinstance(expr, ast.StateRef):
            return STATE, S_ONLY
        if isinstance(expr, ast.ActionSym):
            return ACTION, frozenset({A_DOM})
        if isinstance(expr, ast.Name):
            sym = self.resolve(expr.ident, expr.span)
            if sym.kind in ("policy", "option", "effect", "restriction", "class"):
                self._err(TypeCheckError, f"{expr.ident!r} is a {sym.kind} and cannot be used in an expression", expr.span)
            if sym.kind == "vocab" and sym.entry.kind in ("policy", "effect"):
                self._err(TypeCheckError, f"{expr.ident!r} is a vocabulary {sym.entry.kind} and cannot be used in an expression", expr.span)
            if sym.kind == "learnable":
                self._err(TypeCheckError, f"{expr.ident!r} is a learnable policy placeholder and cannot be used in an expression", expr.span)
            return sym.vtype, sym.sig
        if isinstance(expr, ast.Prime):
            return self._infer_prime(expr)
        if isinstance(expr, ast.Attr):
            return self._infer_attr(expr)
        if isinstance(expr, ast.Index):
            return self._infer_index(expr)
        if isinstance(expr, ast.Slice):
            return self._infer_slice(expr)
        if isinstance(expr, ast.Unary):
            vtype, sig = self.infer(expr.operand)
            if expr.op == "not":
                if not isinstance(vtype, BoolT) and vtype is not None:
                    self._err(TypeCheckError, f"'not' requires a boolean, got {vtype}", expr.span)
                return BOOL, sig
            if not _is_numeric(vtype):
                self._err(TypeCheckError, f"negation requires a real vector, got {vtype}", expr.span)
            return vtype, sig
        if isinstance(expr, ast.BinOp):
            return self._infer_binop(expr)
        if isinstance(expr, ast.Compare):
            return self._infer_compare(expr)
        if isinstance(expr, ast.Call):
            self._err(TypeCheckError, "class instantiation is only valid in Object declarations", expr.span)
        raise AssertionError(type(expr).__name__)

    def _infer_list(self, expr: ast.ListLit):
        sig = EMPTY_SIG
        types = []
        for item in expr.items:
            t, s = self.infer(item)
            types.append(t)
            sig = sig | s
        if not types:
            return ListT(None), sig
        if all(isinstance(t, RealVec) and t.dim == 1 for t in types):
            return RealVec(len(types)), sig
        first = types[0]
        if isinstance(first, RealVec) and all(t == first for t in types):
            return ListT(first), sig
        self._err(TypeCheckError, "list items must be scalars or same-dimension vectors", expr.span)

    def _infer_prime(self, expr: ast.Prime):
        vtype, sig = self.infer(expr.base)
        if not sig <= S_ONLY:
            self._err(DomainError, f"prime applies to expressions over {_fmt_sig(S_ONLY)}, got {_fmt_sig(sig)}", expr.span)
        primed = frozenset({SP_DOM}) if S_DOM in sig else EMPTY_SIG
        return vtype, primed

    def _infer_attr(self, expr: ast.Attr):
        base = expr.base
        if isinstance(base, ast.StateRef):
            base.vtype, base.sig = STATE, S_ONLY
            return _StateObjT(expr.attr, primed=False), S_ONLY
        if isinstance(base, ast.Prime) and isinstance(base.base, ast.StateRef):
            base.base.vtype, base.base.sig = STATE, S_ONLY
            base.vtype, base.sig = STATE, frozenset({SP_DOM})
            return _StateObjT(expr.attr, primed=True), frozenset({SP_DOM})
        vtype, sig = self.infer(base)
        if isinstance(vtype, _StateObjT):
            return self._state_attr_type(vtype, expr.attr), sig
        if isinstance(vtype, ObjectT) and isinstance(base, ast.Name):
            sym = self.cp.symbols[base.ident]
            if sym.attr_types is None or expr.attr not in sym.attr_types:
                self._err(TypeCheckError, f"object {base.ident!r} has no attribute {expr.attr!r}", expr.span)
            return sym.attr_types[expr.attr]
        self._err(TypeCheckError, f"cannot access attribute {expr.attr!r} on {vtype}", expr.span)

    def _state_attr_type(self, holder: _StateObjT, attr: str):
        entry = self.cp.attribute_entry(holder.obj)
        spec = entry.attributes.get(attr) if entry is not None else None
        if spec is None:
            return None  # no mapping shipped; grounds to Unknown at evaluation
        if spec.type == "bool":
            return BOOL
        return RealVec(len(spec.indices) if spec.indices is not None else 1)

    def _infer_index(self, expr: ast.Index):
        vtype, sig = self.infer(expr.base)
        i = self._static_index(expr.index)
        if isinstance(vtype, ListT):
            return vtype.elem, sig
        if isinstance(vtype, StateT):
            return SCALAR, sig
        if isinstance(vtype, RealVec):
            if vtype.dim is not None and not 0 <= i < vtype.dim:
                self._err(TypeCheckError, f"index {i} out of range for {vtype}", expr.span)
            return SCALAR, sig
        self._err(TypeCheckError, f"cannot index into {vtype}", expr.span)

    def _infer_slice(self, expr: ast.Slice):
        vtype, sig = self.infer(expr.base)
        lo = self._static_index(expr.lo)
        hi = self._static_index(expr.hi)
        if hi <= lo:
            self._err(TypeCheckError, f"slice [{lo}:{hi}] is empty", expr.span)
        if isinstance(vtype, StateT):
            return RealVec(hi - lo), sig
        if isinstance(vtype, RealVec):
            if vtype.dim is not None and hi > vtype.dim:
                self._err(TypeCheckError, f"slice [{lo}:{hi}] out of range for {vtype}", expr.span)
            return RealVec(hi - lo), sig
        self._err(TypeCheckError, f"cannot slice {vtype}", expr.span)

    def _static_index(self, expr: ast.Expr) -> int:
        try:
            value = self.cp.const_float(expr)
        except Exception:
            self._err(TypeCheckError, "index bounds must be compile-time integers", expr.span)
        if value != int(value) or value < 0:
            self._err(TypeCheckError, "index bounds must be non-negative integers", expr.span)
        self.infer(expr)
        return int(value)

    def _infer_binop(self, expr: ast.BinOp):
        lt, ls = self.infer(expr.left)
        rt, rs = self.infer(expr.right)
        sig = ls | rs
        if expr.op in ("and", "or"):
            for t, side in ((lt, expr.left), (rt, expr.right)):
                if t is not None and not isinstance(t, BoolT):
                    self._err(TypeCheckError, f"'{expr.op}' requires booleans, got {t}", side.span)
            return BOOL, sig
        if not _is_numeric(lt) or not _is_numeric(rt):
            bad = lt if not _is_numeric(lt) else rt
            self._err(TypeCheckError, f"arithmetic requires real vectors, got {bad}", expr.span)
        return _broadcast(lt, rt, expr, self), sig

    def _infer_compare(self, expr: ast.Compare):
        lt, ls = self.infer(expr.left)
        rt, rs = self.infer(expr.right)
        sig = ls | rs
        op = expr.op
        if op == "in":
            if isinstance(rt, ListT):
                if isinstance(rt.elem, RealVec) and isinstance(lt, RealVec):
                    if lt.dim is not None and rt.elem.dim is not None and lt.dim != rt.elem.dim:
                        self._err(TypeCheckError, f"membership dimension mismatch: {lt} in {rt}", expr.span)
                return BOOL, sig
            if _is_numeric(rt):
                if isinstance(lt, RealVec) and lt.dim not in (1, None):
                    self._err(TypeCheckError, "membership in a vector requires a scalar on the left", expr.span)
                return BOOL, sig
            self._err(TypeCheckError, f"'in' requires a list or vector on the right, got {rt}", expr.span)
        action_sides = sum(isinstance(t, ActionT) for t in (lt, rt))
        if action_sides == 1:
            self._err(TypeCheckError, "actions compare only to actions", expr.span)
        if action_sides == 2:
            if op not in ("==", "!="):
                self._err(TypeCheckError, "actions support only == and !=", expr.span)
            return BOOL, sig
        if op in ("==", "!="):
            for t, side in ((lt, expr.left), (rt, expr.right)):
                if t is not None and not _is_numeric(t):
                    self._err(TypeCheckError, f"equality requires real vectors, got {t}", side.span)
            ld = _dim_of(lt)
            rd = _dim_of(rt)
            if ld is not None and rd is not None and ld != rd:
                self._err(TypeCheckError, f"dimension mismatch in comparison: {ld} vs {rd}", expr.span)
            return BOOL, sig
        for t, side in ((lt, expr.left), (rt, expr.right)):
            if t is None:
                continue
            if not isinstance(t, RealVec) or t.dim not in (1, None):
                self._err(TypeCheckError, f"order comparisons require scalars, got {t}", side.span)
        return BOOL, sig

    # -- declarations ----------------------------------------------------------

    def check(self) -> CheckedProgram:
        self.seed_vocabulary()
        for decl in self.cp.program.declarations:
            self._check_decl(decl)
        return self.cp

    def _check_decl(self, decl: ast.Declaration):
        if isinstance(decl, ast.ConstantDecl):
            self._check_constant(decl)
        elif isinstance(decl, ast.ActionDecl):
            self._check_action(decl)
        elif isinstance(decl, ast.FactorDecl):
            self._check_factor(decl)
        elif isinstance(decl, (ast.PropositionDecl, ast.GoalDecl)):
            self._check_proposition(decl)
        elif isinstance(decl, ast.FeatureDecl):
            self._check_feature(decl, "Feature", S_ONLY)
        elif isinstance(decl, ast.MarkovFeatureDecl):
            self._check_feature(decl, "MarkovFeature", SAS)
        elif isinstance(decl, ast.ClassDecl):
            self._check_class(decl)
        elif isinstance(decl, ast.ObjectDecl):
            self._check_object(decl)
        elif isinstance(decl, ast.PolicyDecl):
            self._check_policy(decl)
        elif isinstance(decl, ast.OptionDecl):
            self._check_option(decl)
        elif isinstance(decl, ast.EffectDecl):
            self._check_effect(decl)
        elif isinstance(decl, ast.ActionRestrictionDecl):
            self._check_restriction(decl)
        else:
            raise AssertionError(type(decl).__name__)

    def _fold(self, decl, expr: ast.Expr):
        vtype, sig = self.infer(expr)
        if sig != EMPTY_SIG:
            self._err(DomainError, f"{type(decl).__name__[:-4]} bodies must be compile-time values, got signature {_fmt_sig(sig)}", expr.span)
        return runtime.evaluate(expr, EvalContext(), self.cp), vtype

    def _check_constant(self, decl: ast.ConstantDecl):
        value, vtype = self._fold(decl, decl.expr)
        self.define(Symbol(decl.name, "constant", vtype, EMPTY_SIG, decl=decl, value=value, span=decl.span))

    def _check_action(self, decl: ast.ActionDecl):
        value, vtype = self._fold(decl, decl.expr)
        if isinstance(value, ActionVal):
            value = ActionVal(value.values, decl.name)
        elif isinstance(value, Real):
            value = ActionVal(value.values, decl.name)
        else:
            self._err(TypeCheckError, f"Action values must be numeric, got {vtype}", decl.expr.span)
        sym = Symbol(decl.name, "action", ACTION, EMPTY_SIG, decl=decl, value=value, span=decl.span)
        self.define(sym)
        self.cp.actions[decl.name] = sym

    def _check_factor(self, decl: ast.FactorDecl):
        vtype, sig = self.infer(decl.expr)
        if not sig <= S_ONLY:
            self._err(DomainError, f"Factor bodies read the current state only, got {_fmt_sig(sig)}", decl.expr.span)
        indices = self._projection_indices(decl.expr)
        dim = len(indices) if indices is not None else None
        self.define(Symbol(decl.name, "factor", RealVec(dim), S_ONLY, decl=decl, indices=indices, span=decl.span))

    def _projection_indices(self, expr: ast.Expr) -> tuple[int, ...] | None:
        """State indices a factor body selects; None for the whole state.

        Factors are projections so that effects can predict them by index;
        arbitrary arithmetic belongs in a Feature.
        """
        if isinstance(expr, ast.StateRef):
            return None
        if isinstance(expr, ast.Name):
            sym = self.cp.symbols.get(expr.ident)
            if sym is not None and sym.kind == "factor":
                return sym.indices
            if sym is not None and sym.kind == "vocab" and sym.entry.kind == "factor":
                return sym.entry.indices
            self._err(TypeCheckError, f"Factor bodies must project the state; {expr.ident!r} is not a factor", expr.span)
        if isinstance(expr, (ast.Index, ast.Slice)):
            base = self._projection_indices(expr.base)
            if isinstance(expr, ast.Index):
                i = self._static_index(expr.index)
                if base is None:
                    return (i,)
                if i >= len(base):
                    self._err(TypeCheckError, f"index {i} out of range for factor of dimension {len(base)}", expr.span)
                return (base[i],)
            lo = self._static_index(expr.lo)
            hi = self._static_index(expr.hi)
            if base is None:
                return tuple(range(lo, hi))
            if hi > len(base):
                self._err(TypeCheckError, f"slice [{lo}:{hi}] out of range for factor of dimension {len(base)}", expr.span)
            return base[lo:hi]
        self._err(TypeCheckError, "Factor bodies must be state projections (S or factor slices)", expr.span)

    def _check_proposition(self, decl):
        kind = "goal" if isinstance(decl, ast.GoalDecl) else "proposition"
        vtype, sig = self.infer(decl.expr)
        # wrong world beats wrong shape: complain about S'/A before booleanness
        if not sig <= S_ONLY:
            self._err(DomainError, f"{kind.capitalize()} signature must be within {_fmt_sig(S_ONLY)}, got {_fmt_sig(sig)}", decl.expr.span)
        if vtype is not None and not isinstance(vtype, BoolT):
            self._err(TypeCheckError, f"{kind.capitalize()} bodies must be boolean, got {vtype}", decl.expr.span)
        sym = Symbol(decl.name, kind, BOOL, sig, decl=decl, span=decl.span)
        self.define(sym)
        if kind == "goal":
            self.cp.goals.append(sym)

    def _check_feature(self, decl, label: str, bound: frozenset):
        vtype, sig = self.infer(decl.expr)
        if not sig <= bound:
            self._err(DomainError, f"{label} signature must be within {_fmt_sig(bound)}, got {_fmt_sig(sig)}", decl.expr.span)
        if vtype is not None and not _is_numeric(vtype):
            self._err(TypeCheckError, f"{label} bodies must be real vectors, got {vtype}", decl.expr.span)
        kind = "feature" if label == "Feature" else "markov_feature"
        dim = _dim_of(vtype)
        self.define(Symbol(decl.name, kind, RealVec(dim), sig, decl=decl, span=decl.span))

    def _check_class(self, decl: ast.ClassDecl):
        chain: list[tuple[str, str]] = []
        if decl.parent is not None:
            parent = self.cp.symbols.get(decl.parent)
            if parent is None or parent.kind != "class":
                self._err(UnresolvedNameError, f"unknown parent class {decl.parent!r}", decl.span)
            chain.extend(parent.class_attrs)
        for attr, tname in decl.attrs:
            if tname not in CLASS_ATTR_TYPES:
                self._err(TypeCheckError, f"unknown attribute type {tname!r} (one of {', '.join(CLASS_ATTR_TYPES)})", decl.span)
            if any(a == attr for a, _ in chain):
                self._err(DuplicateNameError, f"attribute {attr!r} already defined in the class chain", decl.span)
            chain.append((attr, tname))
        self.define(Symbol(decl.name, "class", None, EMPTY_SIG, decl=decl, class_attrs=tuple(chain), span=decl.span))

    def _check_object(self, decl: ast.ObjectDecl):
        cls = self.cp.symbols.get(decl.ctor.func)
        if cls is None or cls.kind != "class":
            self._err(UnresolvedNameError, f"unknown class {decl.ctor.func!r}", decl.ctor.span)
        if len(decl.ctor.args) != len(cls.class_attrs):
            self._err(
                TypeCheckError,
                f"{decl.ctor.func} takes {len(cls.class_attrs)} attribute value(s), got {len(decl.ctor.args)}",
                decl.ctor.span,
            )
        bound: dict = {}
        attr_types: dict = {}
        for (attr, tname), arg in zip(cls.class_attrs, decl.ctor.args):
            vtype, sig = self.infer(arg)
            if tname in ("int", "float"):
                if vtype is not None and (not isinstance(vtype, RealVec) or vtype.dim not in (1, None)):
                    self._err(TypeCheckError, f"attribute {attr!r} ({tname}) requires a scalar, got {vtype}", arg.span)
            elif tname == "bool":
                if vtype is not None and not isinstance(vtype, BoolT):
                    self._err(TypeCheckError, f"attribute {attr!r} (bool) requires a boolean, got {vtype}", arg.span)
            else:
                self._err(TypeCheckError, f"attributes of type {tname!r} cannot be bound from expressions", arg.span)
            bound[attr] = arg
            attr_types[attr] = (vtype, sig)
        self.define(
            Symbol(
                decl.name, "object", ObjectT(cls.name), EMPTY_SIG,
                decl=decl, object_attrs=bound, attr_types=attr_types, span=decl.span,
            )
        )

    # -- behavior bodies -------------------------------------------------------

    def _check_execute(self, stmt: ast.ExecuteStmt):
        target = stmt.target
        if isinstance(target, ast.Name):
            sym = self.resolve(target.ident, target.span)
            ok = (
                sym.kind in ("action", "policy", "learnable")
                or (sym.kind == "vocab" and sym.entry.kind in ("action", "policy"))
            )
            if not ok:
                self._err(TypeCheckError, f"Execute expects an action or policy, {target.ident!r} is a {sym.kind}", target.span)
            target.vtype, target.sig = ACTION, sym.sig
            return
        vtype, sig = self.infer(target)
        if vtype is not None and not isinstance(vtype, ActionT):
            self._err(TypeCheckError, f"Execute expects an action, got {vtype}", target.span)
        if not sig <= S_ONLY:
            self._err(DomainError, f"policies read the current state only, got {_fmt_sig(sig)}", target.span)

    def _check_prob_weights(self, pairs, span: Span):
        total = 0.0
        for _, prob in pairs:
            vtype, sig = self.infer(prob)
            if sig != EMPTY_SIG:
                self._err(TypeCheckError, "probabilities must be compile-time constants", prob.span)
            p = self.cp.const_float(prob)
            if not 0.0 <= p <= 1.0 + 1e-9:
                self._err(TypeCheckError, f"probability {p} outside [0, 1]", prob.span)
            total += p
        if total > 1.0 + 1e-9:
            self._err(TypeCheckError, f"branch probabilities sum to {total}, which exceeds 1", span)

    def _check_policy_stmts(self, stmts, guard_bound: frozenset = S_ONLY):
        for stmt in stmts:
            if isinstance(stmt, ast.ExecuteStmt):
                self._check_execute(stmt)
            elif isinstance(stmt, ast.PolicyProb):
                for alt, _ in stmt.alternatives:
                    self._check_execute(alt)
                self._check_prob_weights(stmt.alternatives, stmt.span)
            elif isinstance(stmt, ast.PolicyIf):
                self._check_guarded(stmt, guard_bound, self._check_policy_stmts)
            else:
                raise AssertionError(type(stmt).__name__)

    def _check_guarded(self, stmt, bound: frozenset, body_checker):
        for cond, body in stmt.branches:
            vtype, sig = self.infer(cond)
            if vtype is not None and not isinstance(vtype, BoolT):
                self._err(TypeCheckError, f"conditions must be boolean, got {vtype}", cond.span)
            if not sig <= bound:
                self._err(DomainError, f"condition signature must be within {_fmt_sig(bound)}, got {_fmt_sig(sig)}", cond.span)
            body_checker(body)
        if stmt.orelse is not None:
            body_checker(stmt.orelse)

    def _check_policy(self, decl: ast.PolicyDecl):
        self._check_policy_stmts(decl.body)
        sym = Symbol(decl.name, "policy", ACTION, S_ONLY, decl=decl, span=decl.span)
        self.define(sym)
        self.cp.policies[decl.name] = sym

    def _check_option(self, decl: ast.OptionDecl):
        for label, expr in (("init", decl.init), ("until", decl.until)):
            vtype, sig = self.infer(expr)
            if vtype is not None and not isinstance(vtype, BoolT):
                self._err(TypeCheckError, f"option {label} must be boolean, got {vtype}", expr.span)
            if not sig <= S_ONLY:
                self._err(DomainError, f"option {label} signature must be within {_fmt_sig(S_ONLY)}, got {_fmt_sig(sig)}", expr.span)
        self._check_policy_stmts(decl.body)
        if decl.name in self.cp.options:
            self._err(DuplicateNameError, f"option {decl.name!r} is already defined", decl.span)
        # Options live in their own namespace: an option may share its name
        # with the action or policy its body executes.
        self.cp.options[decl.name] = Symbol(decl.name, "option", None, S_ONLY, decl=decl, span=decl.span)

    def _check_prediction(self, stmt: ast.PredictionStmt):
        target = stmt.target
        target_type = self._prediction_target_type(target)
        vtype, sig = self.infer(stmt.value)
        if not sig <= SA:
            self._err(DomainError, f"prediction values are functions of {_fmt_sig(SA)}, got {_fmt_sig(sig)}", stmt.value.span)
        if target_type is None or vtype is None:
            return
        if isinstance(target_type, BoolT):
            if not isinstance(vtype, BoolT):
                self._err(TypeCheckError, f"prediction for a boolean attribute requires a boolean, got {vtype}", stmt.value.span)
            return
        if isinstance(target_type, StateT):
            if not (isinstance(vtype, (StateT, RealVec))):
                self._err(TypeCheckError, f"state predictions require a state or real vector, got {vtype}", stmt.value.span)
            return
        if isinstance(vtype, StateT):
            self._err(TypeCheckError, "factor predictions require a real vector, got state", stmt.value.span)
        if not _is_numeric(vtype):
            self._err(TypeCheckError, f"factor predictions require a real vector, got {vtype}", stmt.value.span)
        td, vd = target_type.dim, _dim_of(vtype)
        if td is not None and vd is not None and vd not in (td, 1):
            self._err(TypeCheckError, f"prediction dimension mismatch: target {td}, value {vd}", stmt.value.span)

    def _prediction_target_type(self, target: ast.Expr) -> ValueType | None:
        if isinstance(target, ast.Prime):
            if isinstance(target.base, ast.StateRef):
                target.vtype, target.sig = STATE, frozenset({SP_DOM})
                return STATE
            name = target.base.ident
            sym = self.resolve(name, target.span)
            if sym.kind == "factor":
                dim = sym.vtype.dim
            elif sym.kind == "vocab" and sym.entry.kind == "factor":
                dim = len(sym.entry.indices)
            else:
                self._err(TypeCheckError, f"prediction targets must be factors, {name!r} is a {sym.kind}", target.span)
            target.vtype, target.sig = RealVec(dim), frozenset({SP_DOM})
            return RealVec(dim)
        # attribute chain: S'.obj.attr
        vtype, sig = self.infer(target)
        return vtype

    def _check_effect_stmts(self, stmts):
        for stmt in stmts:
            if isinstance(stmt, ast.RewardStmt):
                vtype, sig = self.infer(stmt.value)
                if vtype is not None and (not isinstance(vtype, RealVec) or vtype.dim not in (1, None)):
                    self._err(TypeCheckError, f"rewards are scalar, got {vtype}", stmt.value.span)
                if not sig <= SAS:
                    self._err(DomainError, f"reward signature must be within {_fmt_sig(SAS)}, got {_fmt_sig(sig)}", stmt.value.span)
            elif isinstance(stmt, ast.PredictionStmt):
                self._check_prediction(stmt)
            elif isinstance(stmt, ast.EffectRefStmt):
                sym = self.cp.effects.get(stmt.name)
                if sym is None:
                    vocab = self.cp.symbols.get(stmt.name)
                    if vocab is not None and vocab.kind == "vocab" and vocab.entry.kind == "effect":
                        continue
                    self._err(UnresolvedNameError, f"undefined effect {stmt.name!r}", stmt.span)
            elif isinstance(stmt, ast.EffectProb):
                for alt, _ in stmt.alternatives:
                    self._check_effect_stmts((alt,))
                self._check_prob_weights(stmt.alternatives, stmt.span)
            elif isinstance(stmt, ast.EffectIf):
                self._check_guarded(stmt, SA, self._check_effect_stmts)
            else:
                raise AssertionError(type(stmt).__name__)

    def _check_effect(self, decl: ast.EffectDecl):
        self._check_effect_stmts(decl.body)
        sym = Symbol(decl.name, "effect", None, SAS, decl=decl, span=decl.span)
        self.define(sym)
        self.cp.effects[decl.name] = sym

    def _check_restrict_stmts(self, stmts):
        for stmt in stmts:
            if isinstance(stmt, ast.RestrictStmt):
                target = stmt.action
                if not isinstance(target, ast.Name):
                    self._err(TypeCheckError, "Restrict expects an action name", stmt.span)
                sym = self.resolve(target.ident, target.span)
                is_action = sym.kind == "action" or (sym.kind == "vocab" and sym.entry.kind == "action")
                if not is_action:
                    self._err(TypeCheckError, f"Restrict expects an action, {target.ident!r} is a {sym.kind}", target.span)
                target.vtype, target.sig = ACTION, EMPTY_SIG
            elif isinstance(stmt, ast.RestrictIf):
                self._check_guarded(stmt, S_ONLY, self._check_restrict_stmts)
            else:
                raise AssertionError(type(stmt).__name__)

    def _check_restriction(self, decl: ast.ActionRestrictionDecl):
        self._check_restrict_stmts(decl.body)
        sym = Symbol(decl.name, "restriction", None, S_ONLY, decl=decl, span=decl.span)
        self.define(sym)
        self.cp.restrictions.append(sym)


def _is_numeric(t: ValueType | None) -> bool:
    return t is None or isinstance(t, (RealVec, StateT))


def _dim_of(t: ValueType | None) -> int | None:
    if isinstance(t, RealVec):
        return t.dim
    return None


def _literal_type(value) -> ValueType:
    if isinstance(value, Bool):
        return BOOL
    if isinstance(value, Real):
        return RealVec(value.dim)
    if isinstance(value, runtime.ListVal):
        if value.items and all(isinstance(i, Real) for i in value.items):
            dims = {i.dim for i in value.items}
            return ListT(RealVec(dims.pop()) if len(dims) == 1 else None)
        return ListT(None)
    raise TypeCheckError(f"unsupported literal value {value!r}")


def _broadcast(lt, rt, expr, checker) -> ValueType:
    ld = _dim_of(lt) if not isinstance(lt, StateT) else None
    rd = _dim_of(rt) if not isinstance(rt, StateT) else None
    if ld is None or rd is None:
        known = ld if ld is not None else rd
        if known == 1:
            return RealVec(None)
        return RealVec(known)
    if ld == rd:
        return RealVec(ld)
    if ld == 1:
        return RealVec(rd)
    if rd == 1:
        return RealVec(ld)
    checker._err(TypeCheckError, f"dimension mismatch: {ld} vs {rd}", expr.span)


def check_program(
    program: ast.ParsedProgram | list | tuple,
    registry: VocabularyRegistry | None = None,
    path: str | None = None,
) -> CheckedProgram:
    """Resolve and type-check a parsed program against a vocabulary."""
    if not isinstance(program, ast.ParsedProgram):
        program = ast.ParsedProgram((), tuple(program))
    if registry is None:
        registry = VocabularyRegistry()
    return _Checker(program, registry, path).check()
