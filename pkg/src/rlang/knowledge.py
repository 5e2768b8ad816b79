"""Compile checked programs into queryable knowledge objects.

Two objects come out of a program. DynamicsTaskKnowledge answers questions
about the world: partial next-state distributions, rewards, and goal tests,
all read off the effect named ``main`` plus Goal declarations.
SolutionKnowledge answers questions about behavior: the policy named
``main``, option triples, and per-state action restrictions.

Composition rules for effect bodies:
  - conditionals pick the first branch whose guard is true; an unknown
    guard makes the whole statement contribute nothing
  - bare predictions within one body combine multiplicatively and must
    target disjoint state indices (checked statically)
  - everything else in a body combines additively: known masses must not
    exceed 1, next-state supports must not intersect across terms, and
    whatever mass is left over is reported as unknown, never invented
  - probabilistic alternatives scale their sub-results by weight; equal
    assignments merge, and the residual weight goes to unknown
  - rewards add across contributing terms; a term with no reachable
    reward statement simply contributes nothing
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import ast, runtime
from .errors import (
    EvalError,
    FullRestrictionError,
    IllFormedCompositionError,
)
from .runtime import (
    UNKNOWN,
    ActionVal,
    Bool,
    EvalContext,
    GroundedValue,
    Real,
    StateVal,
    make_context,
)
from .semantics import CheckedProgram, Symbol, capability_vector

_EPS = 1e-9


def _truth(value: GroundedValue) -> bool | None:
    if value is UNKNOWN:
        return None
    if isinstance(value, Bool):
        return value.value
    raise EvalError(f"condition evaluated to {type(value).__name__}, expected a boolean")


def _fmt_num(x: float) -> str:
    if math.isfinite(x) and x == int(x):
        return str(int(x))
    return repr(x)


def _fmt_vec(values: tuple[float, ...]) -> str:
    if len(values) == 1:
        return _fmt_num(values[0])
    return "[" + ", ".join(_fmt_num(v) for v in values) + "]"


def _fmt_prob(p: float) -> str:
    # probabilities always carry a decimal point: 1.0, 0.0, 0.5
    text = f"{p:g}"
    return text if ("." in text or "e" in text) else text + ".0"


# --------------------------------------------------------------------------
# next-state assignments


@dataclass(frozen=True)
class Assignment:
    """What one transition entry pins down about the next state.

    Either the complete next state, or a set of per-factor parts
    (label, state indices, values). Unlisted indices are unconstrained.
    """

    state: tuple[float, ...] | None = None
    parts: tuple[tuple[str, tuple[int, ...], tuple[float, ...]], ...] = ()

    @property
    def is_full(self) -> bool:
        return self.state is not None

    def indices(self) -> frozenset | None:
        """Constrained state indices; None means all of them."""
        if self.state is not None:
            return None
        return frozenset(i for _, idx, _ in self.parts for i in idx)

    def value_at(self, i: int) -> float | None:
        if self.state is not None:
            return self.state[i] if i < len(self.state) else None
        for _, idx, values in self.parts:
            for pos, j in enumerate(idx):
                if j == i:
                    return values[pos]
        return None

    def overlaps(self, other: "Assignment") -> bool:
        """True when some full next state satisfies both assignments."""
        mine, theirs = self.indices(), other.indices()
        if mine is None and theirs is None:
            return self.state == other.state
        shared = (mine if theirs is None else theirs) if (mine is None or theirs is None) else mine & theirs
        if not shared:
            return True  # unconstrained elsewhere, so supports intersect
        return all(self.value_at(i) == other.value_at(i) for i in shared)

    def apply_to(self, state) -> tuple[float, ...]:
        """Complete this assignment over ``state``, carrying unpredicted
        indices through unchanged."""
        if self.state is not None:
            return self.state
        out = [float(x) for x in state]
        for _, idx, values in self.parts:
            for pos, j in enumerate(idx):
                if j >= len(out):
                    raise EvalError(f"prediction writes index {j} past the state dimension {len(out)}")
                out[j] = values[pos]
        return tuple(out)

    def __str__(self):
        if self.state is not None:
            return "{S'=" + _fmt_vec(self.state) + "}"
        inner = ", ".join(f"{label}'={_fmt_vec(values)}" for label, _, values in self.parts)
        return "{" + inner + "}"


def _normalized(parts) -> tuple:
    return tuple(sorted(parts, key=lambda p: (min(p[1]), p[0])))


# --------------------------------------------------------------------------
# query results


@dataclass(frozen=True)
class TransitionQueryResult:
    entries: tuple[tuple[Assignment, float], ...]
    unknown_mass: float

    @property
    def known_mass(self) -> float:
        return sum(p for _, p in self.entries)

    def __str__(self):
        pieces = [f"{a}: {_fmt_prob(p)}" for a, p in self.entries]
        pieces.append(f"unknown: {_fmt_prob(self.unknown_mass)}")
        return "; ".join(pieces)


@dataclass(frozen=True)
class PolicyQueryResult:
    entries: tuple[tuple[ActionVal, float], ...]
    unknown_mass: float

    @property
    def known_mass(self) -> float:
        return sum(p for _, p in self.entries)

    def __str__(self):
        pieces = [f"{a.name or _fmt_vec(a.values)}: {_fmt_prob(p)}" for a, p in self.entries]
        pieces.append(f"unknown: {_fmt_prob(self.unknown_mass)}")
        return "; ".join(pieces)


UNKNOWN_TRANSITION = TransitionQueryResult((), 1.0)
UNKNOWN_POLICY = PolicyQueryResult((), 1.0)


@dataclass(frozen=True)
class GoalTest:
    name: str
    _sym: Symbol = field(repr=False)
    _cp: CheckedProgram = field(repr=False)
    _attr_provider: object = field(repr=False, default=None)

    def is_goal(self, s) -> bool:
        ctx = make_context(s=s, attr_provider=self._attr_provider)
        return _truth(runtime.evaluate(self._sym.decl.expr, ctx, self._cp)) is True


@dataclass(frozen=True)
class OptionSpec:
    """A temporally extended behavior: where it may start, what it runs,
    and when it stops."""

    name: str
    is_learnable: bool
    learnable_name: str | None
    _decl: ast.OptionDecl = field(repr=False)
    _cp: CheckedProgram = field(repr=False)
    _attr_provider: object = field(repr=False, default=None)

    def _ctx(self, s) -> EvalContext:
        return make_context(s=s, attr_provider=self._attr_provider)

    def can_start(self, s) -> bool:
        return _truth(runtime.evaluate(self._decl.init, self._ctx(s), self._cp)) is True

    def terminates(self, s) -> bool:
        return _truth(runtime.evaluate(self._decl.until, self._ctx(s), self._cp)) is True

    def policy(self, s) -> PolicyQueryResult:
        return _policy_of(self._decl.body, self._ctx(s), self._cp)


# --------------------------------------------------------------------------
# transition channel


class _Merge:
    """Additive accumulator for sibling terms with a disjointness check."""

    def __init__(self):
        self.entries: list[tuple[Assignment, float]] = []
        self.mass = 0.0

    def add_term(self, term: list[tuple[Assignment, float]]):
        if not term:
            return
        for assignment, _ in term:
            for prior, _ in self.entries:
                if assignment.overlaps(prior):
                    raise IllFormedCompositionError(
                        f"combined effects both constrain next states matching {assignment} and {prior}"
                    )
        self.entries.extend(term)
        self.mass += sum(p for _, p in term)
        if self.mass > 1.0 + _EPS:
            raise IllFormedCompositionError(
                f"combined effect probabilities total {self.mass}, which exceeds 1"
            )

    def result(self) -> TransitionQueryResult:
        return TransitionQueryResult(tuple(self.entries), max(0.0, 1.0 - self.mass))


def _attr_target(target: ast.Attr) -> tuple[str, str]:
    return target.base.attr, target.attr


def _prediction_parts(stmt: ast.PredictionStmt, ctx: EvalContext, cp: CheckedProgram):
    """One bare prediction -> ('state', vector) | ('parts', part) | None.

    None means the rule gives no information here: the value is unknown,
    or the target has no index mapping.
    """
    value = runtime.evaluate(stmt.value, ctx, cp)
    if value is UNKNOWN:
        return None
    target = stmt.target
    if isinstance(target, ast.Prime):
        if isinstance(target.base, ast.StateRef):
            return "state", tuple(runtime._components(value, "state prediction"))
        sym = cp.lookup(target.base.ident)
        indices = sym.indices if sym.kind == "factor" else sym.entry.indices
        label = target.base.ident
        if indices is None:
            return "state", tuple(runtime._components(value, "state prediction"))
    else:
        obj, attr = _attr_target(target)
        entry = cp.attribute_entry(obj)
        spec = entry.attributes.get(attr) if entry is not None else None
        if spec is None or spec.indices is None:
            runtime._warn_unmapped(obj, attr)
            return None
        indices = tuple(spec.indices)
        label = f"{obj}.{attr}"
    if isinstance(value, Bool):
        values = (1.0 if value.value else 0.0,)
    else:
        values = tuple(runtime._components(value, "prediction"))
    if len(values) == 1 and len(indices) > 1:
        values = values * len(indices)
    if len(values) != len(indices):
        raise EvalError(
            f"prediction for {label!r} produced {len(values)} value(s) for {len(indices)} index(es)"
        )
    return "parts", (label, tuple(indices), values)


def _transition_of(stmts, ctx: EvalContext, cp: CheckedProgram) -> TransitionQueryResult:
    merge = _Merge()
    state_vec = None
    parts: list = []
    for stmt in stmts:
        if isinstance(stmt, ast.RewardStmt):
            continue
        if isinstance(stmt, ast.PredictionStmt):
            got = _prediction_parts(stmt, ctx, cp)
            if got is None:
                continue
            kind, payload = got
            if kind == "state":
                state_vec = payload
            else:
                parts.append(payload)
            continue
        merge.add_term(list(_transition_term(stmt, ctx, cp).entries))
    if state_vec is not None and parts:
        raise IllFormedCompositionError(
            "a whole-state prediction sits beside factor predictions in one body"
        )
    if state_vec is not None:
        merge.add_term([(Assignment(state=state_vec), 1.0)])
    elif parts:
        merge.add_term([(Assignment(parts=_normalized(parts)), 1.0)])
    return merge.result()


def _transition_term(stmt: ast.Stmt, ctx: EvalContext, cp: CheckedProgram) -> TransitionQueryResult:
    if isinstance(stmt, ast.PredictionStmt):
        return _transition_of((stmt,), ctx, cp)
    if isinstance(stmt, ast.EffectRefStmt):
        sym = cp.effects.get(stmt.name)
        if sym is None:
            return UNKNOWN_TRANSITION  # vocabulary effect: contents not stated here
        return _transition_of(sym.decl.body, ctx, cp)
    if isinstance(stmt, ast.EffectIf):
        for cond, body in stmt.branches:
            t = _truth(runtime.evaluate(cond, ctx, cp))
            if t is None:
                return UNKNOWN_TRANSITION
            if t:
                return _transition_of(body, ctx, cp)
        if stmt.orelse is not None:
            return _transition_of(stmt.orelse, ctx, cp)
        return UNKNOWN_TRANSITION
    if isinstance(stmt, ast.EffectProb):
        scaled: list[tuple[Assignment, float]] = []
        for alt, prob in stmt.alternatives:
            p = cp.const_float(prob)
            if p <= 0.0:
                continue
            sub = _transition_term(alt, ctx, cp)
            for assignment, q in sub.entries:
                scaled.append((assignment, p * q))
        merged: list[tuple[Assignment, float]] = []
        for assignment, p in scaled:
            for i, (prior, q) in enumerate(merged):
                if prior == assignment:
                    merged[i] = (prior, q + p)
                    break
            else:
                merged.append((assignment, p))
        mass = sum(p for _, p in merged)
        return TransitionQueryResult(tuple(merged), max(0.0, 1.0 - mass))
    if isinstance(stmt, ast.RewardStmt):
        return UNKNOWN_TRANSITION
    raise AssertionError(type(stmt).__name__)


# --------------------------------------------------------------------------
# reward channel


def _reward_of(stmts, ctx: EvalContext, cp: CheckedProgram) -> float | None:
    """Summed reward of a body; None when nothing contributes."""
    total = None
    for stmt in stmts:
        r = _reward_term(stmt, ctx, cp)
        if r is not None:
            total = r if total is None else total + r
    return total


def _reward_term(stmt: ast.Stmt, ctx: EvalContext, cp: CheckedProgram) -> float | None:
    if isinstance(stmt, ast.RewardStmt):
        value = runtime.evaluate(stmt.value, ctx, cp)
        if value is UNKNOWN:
            return None
        if not isinstance(value, Real) or value.dim != 1:
            raise EvalError("reward expressions must produce a scalar")
        return value.values[0]
    if isinstance(stmt, ast.PredictionStmt):
        return None
    if isinstance(stmt, ast.EffectRefStmt):
        sym = cp.effects.get(stmt.name)
        if sym is None:
            return None
        return _reward_of(sym.decl.body, ctx, cp)
    if isinstance(stmt, ast.EffectIf):
        for cond, body in stmt.branches:
            t = _truth(runtime.evaluate(cond, ctx, cp))
            if t is None:
                return None
            if t:
                return _reward_of(body, ctx, cp)
        if stmt.orelse is not None:
            return _reward_of(stmt.orelse, ctx, cp)
        return None
    if isinstance(stmt, ast.EffectProb):
        total = None
        for alt, prob in stmt.alternatives:
            p = cp.const_float(prob)
            r = _reward_term(alt, ctx, cp)
            if r is not None:
                total = (total or 0.0) + p * r
        return total
    raise AssertionError(type(stmt).__name__)


# --------------------------------------------------------------------------
# policy channel


def _policy_of(stmts, ctx: EvalContext, cp: CheckedProgram) -> PolicyQueryResult:
    decided, result = _policy_body(stmts, ctx, cp)
    return result if decided else UNKNOWN_POLICY


def _policy_body(stmts, ctx: EvalContext, cp: CheckedProgram) -> tuple[bool, PolicyQueryResult]:
    """Run a policy body; the first statement that commits to an action
    distribution decides the result. Conditionals with no matching branch
    fall through to the next statement."""
    for stmt in stmts:
        if isinstance(stmt, ast.ExecuteStmt):
            return True, _execute_result(stmt, ctx, cp)
        if isinstance(stmt, ast.PolicyProb):
            entries: list[tuple[ActionVal, float]] = []
            for alt, prob in stmt.alternatives:
                p = cp.const_float(prob)
                if p <= 0.0:
                    continue
                sub = _execute_result(alt, ctx, cp)
                for action, q in sub.entries:
                    for i, (prior, mass) in enumerate(entries):
                        if prior == action:
                            entries[i] = (prior, mass + p * q)
                            break
                    else:
                        entries.append((action, p * q))
            mass = sum(p for _, p in entries)
            return True, PolicyQueryResult(tuple(entries), max(0.0, 1.0 - mass))
        if isinstance(stmt, ast.PolicyIf):
            taken = None
            for cond, body in stmt.branches:
                t = _truth(runtime.evaluate(cond, ctx, cp))
                if t is None:
                    return True, UNKNOWN_POLICY
                if t:
                    taken = body
                    break
            if taken is None:
                taken = stmt.orelse
            if taken is not None:
                decided, result = _policy_body(taken, ctx, cp)
                if decided:
                    return True, result
            continue
        raise AssertionError(type(stmt).__name__)
    return False, UNKNOWN_POLICY


def _execute_result(stmt: ast.ExecuteStmt, ctx: EvalContext, cp: CheckedProgram) -> PolicyQueryResult:
    target = stmt.target
    if isinstance(target, ast.Name):
        sym = cp.lookup(target.ident)
        if sym.kind == "policy":
            return _policy_of(sym.decl.body, ctx, cp)
        if sym.kind == "learnable" or (sym.kind == "vocab" and sym.entry.kind == "learnable_policy"):
            return UNKNOWN_POLICY
    value = runtime.evaluate(target, ctx, cp)
    if value is UNKNOWN:
        return UNKNOWN_POLICY
    if not isinstance(value, ActionVal):
        raise EvalError(f"Execute target produced {type(value).__name__}, expected an action")
    return PolicyQueryResult(((value, 1.0),), 0.0)


# --------------------------------------------------------------------------
# knowledge objects


@dataclass(frozen=True)
class DynamicsTaskKnowledge:
    """What the program asserts about the environment: next-state
    structure, rewards, and goal states."""

    program: CheckedProgram
    goals: tuple[GoalTest, ...]
    attr_provider: object = None

    def _ctx(self, s, a=None, s_next=None) -> EvalContext:
        return make_context(s=s, a=a, s_next=s_next, attr_provider=self.attr_provider)

    def transition(self, s, a) -> TransitionQueryResult:
        main = self.program.main_effect
        if main is None:
            return UNKNOWN_TRANSITION
        return _transition_of(main.decl.body, self._ctx(s, a), self.program)

    def reward(self, s, a, s_next):
        main = self.program.main_effect
        if main is None:
            return UNKNOWN
        r = _reward_of(main.decl.body, self._ctx(s, a, s_next), self.program)
        return UNKNOWN if r is None else r

    def is_goal(self, s) -> bool:
        return any(g.is_goal(s) for g in self.goals)


@dataclass(frozen=True)
class SolutionKnowledge:
    """What the program asserts about behavior: advice policies, options,
    and action restrictions."""

    program: CheckedProgram
    options: tuple[OptionSpec, ...]
    attr_provider: object = None

    def _ctx(self, s) -> EvalContext:
        return make_context(s=s, attr_provider=self.attr_provider)

    @property
    def policy_names(self) -> tuple[str, ...]:
        return tuple(self.program.policies)

    def advice_policy_name(self) -> str | None:
        """``main`` when present, else the only declared policy."""
        if "main" in self.program.policies:
            return "main"
        if len(self.program.policies) == 1:
            return next(iter(self.program.policies))
        return None

    def policy(self, s, name: str | None = None) -> PolicyQueryResult:
        if name is None:
            name = self.advice_policy_name()
        sym = self.program.policies.get(name) if name is not None else None
        if sym is None:
            return UNKNOWN_POLICY
        return _policy_of(sym.decl.body, self._ctx(s), self.program)

    def main_policy(self, s) -> PolicyQueryResult:
        sym = self.program.main_policy
        if sym is None:
            return UNKNOWN_POLICY
        return _policy_of(sym.decl.body, self._ctx(s), self.program)

    def restrictions(self, s) -> set:
        """Names of actions the program forbids in state ``s``."""
        ctx = self._ctx(s)
        out: set = set()
        for sym in self.program.restrictions:
            _collect_restrictions(sym.decl.body, ctx, self.program, out)
        if out and self.program.actions and out >= set(self.program.actions):
            raise FullRestrictionError(
                f"restrictions forbid every declared action in state {list(s)}"
            )
        return out


def _collect_restrictions(stmts, ctx: EvalContext, cp: CheckedProgram, out: set):
    for stmt in stmts:
        if isinstance(stmt, ast.RestrictStmt):
            out.add(stmt.action.ident)
        elif isinstance(stmt, ast.RestrictIf):
            for cond, body in stmt.branches:
                t = _truth(runtime.evaluate(cond, ctx, cp))
                if t is True:
                    _collect_restrictions(body, ctx, cp, out)
                    break
                if t is None:  # guard not decidable: restrict nothing
                    break
            else:
                if stmt.orelse is not None:
                    _collect_restrictions(stmt.orelse, ctx, cp, out)
        else:
            raise AssertionError(type(stmt).__name__)


# --------------------------------------------------------------------------
# compilation


@dataclass(frozen=True)
class EffectIR:
    """A named, statically validated effect body."""

    name: str
    body: tuple[ast.Stmt, ...]


def _static_targets(stmt: ast.PredictionStmt, cp: CheckedProgram):
    """(label, index set | None-for-all) of a bare prediction, if static."""
    target = stmt.target
    if isinstance(target, ast.Prime):
        if isinstance(target.base, ast.StateRef):
            return "S", None
        sym = cp.symbols.get(target.base.ident)
        if sym is None:
            return None
        indices = sym.indices if sym.kind == "factor" else getattr(sym.entry, "indices", None)
        return target.base.ident, (frozenset(indices) if indices is not None else None)
    obj, attr = _attr_target(target)
    entry = cp.attribute_entry(obj)
    spec = entry.attributes.get(attr) if entry is not None else None
    if spec is None or spec.indices is None:
        return None  # no mapping: contributes unknown, cannot clash
    return f"{obj}.{attr}", frozenset(spec.indices)


def _validate_body(name: str, stmts, cp: CheckedProgram):
    bare: list = []
    for stmt in stmts:
        if isinstance(stmt, ast.PredictionStmt):
            got = _static_targets(stmt, cp)
            if got is not None:
                bare.append((got, stmt))
        elif isinstance(stmt, ast.EffectIf):
            for _, body in stmt.branches:
                _validate_body(name, body, cp)
            if stmt.orelse is not None:
                _validate_body(name, stmt.orelse, cp)
        elif isinstance(stmt, ast.EffectProb):
            for alt, _ in stmt.alternatives:
                _validate_body(name, (alt,), cp)
    for i, ((label_a, idx_a), stmt_a) in enumerate(bare):
        for (label_b, idx_b), _ in bare[:i]:
            clash = (
                idx_a is None
                or idx_b is None
                or (idx_a & idx_b)
            )
            if clash:
                raise IllFormedCompositionError(
                    f"effect {name!r} predicts {label_a!r} and {label_b!r} side by side, "
                    f"but they write overlapping state indices",
                    stmt_a.span,
                    cp.path,
                )


def compile_knowledge(
    cp: CheckedProgram, attr_provider=None
) -> tuple[DynamicsTaskKnowledge, SolutionKnowledge]:
    """Build both knowledge objects; statically rejects effect bodies
    whose side-by-side predictions write the same state indices."""
    for name, sym in cp.effects.items():
        _validate_body(name, sym.decl.body, cp)
    goals = tuple(GoalTest(sym.name, sym, cp, attr_provider) for sym in cp.goals)
    options = []
    for name, sym in cp.options.items():
        learnable = _learnable_body_name(sym.decl, cp)
        options.append(
            OptionSpec(name, learnable is not None, learnable, sym.decl, cp, attr_provider)
        )
    dynamics = DynamicsTaskKnowledge(cp, goals, attr_provider)
    solution = SolutionKnowledge(cp, tuple(options), attr_provider)
    return dynamics, solution


def _learnable_body_name(decl: ast.OptionDecl, cp: CheckedProgram) -> str | None:
    if len(decl.body) != 1 or not isinstance(decl.body[0], ast.ExecuteStmt):
        return None
    target = decl.body[0].target
    if not isinstance(target, ast.Name):
        return None
    sym = cp.symbols.get(target.ident)
    if sym is not None and sym.kind == "learnable":
        return target.ident
    return None


# --------------------------------------------------------------------------
# module-level query functions


def query_transition(k: DynamicsTaskKnowledge, s, a) -> TransitionQueryResult:
    return k.transition(s, a)


def query_reward(k: DynamicsTaskKnowledge, s, a, s_next):
    return k.reward(s, a, s_next)


def query_policy(k: SolutionKnowledge, s, name: str | None = None) -> PolicyQueryResult:
    return k.policy(s, name)


def sample_policy(k: SolutionKnowledge, s, rng, name: str | None = None):
    """Draw an action from the policy distribution at ``s``; lands on
    UNKNOWN with the leftover probability."""
    result = k.policy(s, name) if isinstance(k, SolutionKnowledge) else k
    u = rng.random()
    acc = 0.0
    for action, p in result.entries:
        acc += p
        if u < acc:
            return action
    return UNKNOWN


def restricted_actions(k: SolutionKnowledge, s) -> set:
    return k.restrictions(s)


# --------------------------------------------------------------------------
# dump format


def dump_knowledge(cp: CheckedProgram) -> str:
    """Deterministic text rendering of everything a program pins down."""
    lines: list[str] = []
    caps = capability_vector(cp)
    lines.append(f"capabilities: {caps}")
    main_e = cp.main_effect
    lines.append(f"dynamics: {'effect main' if main_e is not None else 'unknown'}")
    for name in cp.effects:
        mark = " (main)" if name == "main" else ""
        lines.append(f"  effect {name}{mark}: {_count_rules(cp.effects[name].decl.body)}")
    lines.append(f"goals: {', '.join(g.name for g in cp.goals) if cp.goals else 'none'}")
    policy_names = ", ".join(cp.policies) if cp.policies else "none"
    lines.append(f"policies: {policy_names}")
    lines.append(f"options: {', '.join(cp.options) if cp.options else 'none'}")
    restr = ", ".join(sym.name for sym in cp.restrictions) if cp.restrictions else "none"
    lines.append(f"restrictions: {restr}")
    return "\n".join(lines) + "\n"


def _count_rules(stmts) -> str:
    preds = rewards = refs = 0
    stack = list(stmts)
    while stack:
        stmt = stack.pop()
        if isinstance(stmt, ast.PredictionStmt):
            preds += 1
        elif isinstance(stmt, ast.RewardStmt):
            rewards += 1
        elif isinstance(stmt, ast.EffectRefStmt):
            refs += 1
        elif isinstance(stmt, ast.EffectIf):
            for _, body in stmt.branches:
                stack.extend(body)
            if stmt.orelse is not None:
                stack.extend(stmt.orelse)
        elif isinstance(stmt, ast.EffectProb):
            stack.extend(alt for alt, _ in stmt.alternatives)
    return f"{preds} prediction(s), {rewards} reward(s), {refs} reference(s)"
