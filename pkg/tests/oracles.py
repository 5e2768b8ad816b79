"""Hand-rolled reference implementations the test suite compares against.

Nothing here imports the package under test. Each oracle recomputes an
expected answer from first principles:

  * FactoredModel: a tiny declarative transition/reward model that can
    render itself to program source and compute its own joint next-state
    distribution and reward directly from the data structure.
  * Grid-with-lava planning: the true slippery-move model, dense value
    iteration for optimal values, and exact policy evaluation by linear
    solve.
  * Advice-table value iteration mirroring the documented warm-start
    rules (known rewards written first, terminal states drop the
    bootstrap, untouched pairs stay zero).
  * Central finite differences for gradient checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# --------------------------------------------------------------------------
# random factored models
#
# Statements:
#   ("pred", target, value)              bare prediction; target: int | "S"
#   ("mix", ((target, value, w), ...))   probabilistic alternatives
#   ("cond", ((guard, body), ...), else_body | None)
#   ("ref", name)                        reference to another effect
#   ("reward", x)                        scalar reward contribution
# Values (deterministic, evaluated against the current state):
#   ("lit", v)       scalar literal
#   ("id",)          the target factor's own current value
#   ("copy", j)      factor j's current value
#   ("shift", j, d)  factor j plus d
#   ("state",)       the whole current state       (target "S" only)
#   ("statelit", t)  a full next-state literal     (target "S" only)
# Guards:
#   ("feq", i, v)    factor i equals v
#   ("act", k)       the queried action is act<k>


@dataclass(frozen=True)
class FactoredModel:
    sizes: tuple[int, ...]
    n_actions: int
    effects: tuple[tuple[str, tuple], ...]  # ordered (name, body); "main" last

    @property
    def main(self) -> tuple:
        return dict(self.effects)["main"]

    def states(self):
        out = [()]
        for k in self.sizes:
            out = [s + (float(v),) for s in out for v in range(k)]
        return out


def _eval_value(value, target, s):
    kind = value[0]
    if kind == "lit":
        return float(value[1])
    if kind == "id":
        return s[target]
    if kind == "copy":
        return s[value[1]]
    if kind == "shift":
        return s[value[1]] + value[2]
    if kind == "state":
        return tuple(s)
    if kind == "statelit":
        return tuple(float(v) for v in value[1])
    raise AssertionError(value)


def _eval_guard(guard, s, a_idx):
    if guard[0] == "feq":
        return s[guard[1]] == guard[2]
    if guard[0] == "act":
        return a_idx == guard[1]
    raise AssertionError(guard)


def _body_entries(model: FactoredModel, body, s, a_idx):
    """Entries [(assignment, p), ...] of one body; assignment is either
    ("full", state) or a sorted tuple of (factor, value) pairs. Bare
    predictions fold into a single assignment appended after the other
    terms; mixes merge equal alternatives in order; conditionals take the
    first true branch and contribute nothing when none matches."""
    effects = dict(model.effects)
    terms = []
    parts = {}
    state_vec = None
    has_bare = False
    for stmt in body:
        kind = stmt[0]
        if kind == "reward":
            continue
        if kind == "pred":
            has_bare = True
            _, target, value = stmt
            if target == "S":
                state_vec = _eval_value(value, None, s)
            else:
                parts[target] = _eval_value(value, target, s)
        elif kind == "mix":
            merged = []
            for target, value, weight in stmt[1]:
                if target == "S":
                    asg = ("full", _eval_value(value, None, s))
                else:
                    asg = ((target, _eval_value(value, target, s)),)
                for i, (prev, q) in enumerate(merged):
                    if prev == asg:
                        merged[i] = (prev, q + weight)
                        break
                else:
                    merged.append((asg, weight))
            terms.append(merged)
        elif kind == "cond":
            _, branches, orelse = stmt
            taken = orelse
            for guard, sub in branches:
                if _eval_guard(guard, s, a_idx):
                    taken = sub
                    break
            if taken is not None:
                terms.append(_body_entries(model, taken, s, a_idx))
        elif kind == "ref":
            terms.append(_body_entries(model, effects[stmt[1]], s, a_idx))
        else:
            raise AssertionError(stmt)
    out = []
    for term in terms:
        out.extend(term)
    if has_bare:
        if state_vec is not None:
            out.append((("full", state_vec), 1.0))
        else:
            out.append((tuple(sorted(parts.items())), 1.0))
    return out


def _complete(assignment, s):
    if assignment[0] == "full":
        return assignment[1]
    nxt = list(s)
    for idx, value in assignment:
        nxt[idx] = value
    return tuple(nxt)


def joint_transition(model: FactoredModel, s, a_idx):
    """Full next-state distribution plus unknown mass for one (s, a),
    with unpredicted factors carried through unchanged."""
    entries = _body_entries(model, model.main, s, a_idx)
    dist = {}
    for assignment, p in entries:
        nxt = _complete(assignment, s)
        dist[nxt] = dist.get(nxt, 0.0) + p
    known = sum(p for _, p in entries)
    return dist, 1.0 - known


def model_reward(model: FactoredModel, body, s, a_idx):
    """Summed reward of a body, None when no rule contributes."""
    effects = dict(model.effects)
    total = None
    for stmt in body:
        kind = stmt[0]
        r = None
        if kind == "reward":
            r = float(stmt[1])
        elif kind == "cond":
            _, branches, orelse = stmt
            taken = orelse
            for guard, sub in branches:
                if _eval_guard(guard, s, a_idx):
                    taken = sub
                    break
            if taken is not None:
                r = model_reward(model, taken, s, a_idx)
        elif kind == "ref":
            r = model_reward(model, effects[stmt[1]], s, a_idx)
        if r is not None:
            total = r if total is None else total + r
    return total


# ----- rendering to program source -----


def _fmt_scalar(v) -> str:
    return str(int(v)) if float(v) == int(v) else repr(float(v))


def _render_value(value, target) -> str:
    kind = value[0]
    if kind == "lit":
        return _fmt_scalar(value[1])
    if kind == "id":
        return f"f{target}"
    if kind == "copy":
        return f"f{value[1]}"
    if kind == "shift":
        j, d = value[1], value[2]
        return f"f{j} + {_fmt_scalar(d)}" if d >= 0 else f"f{j} - {_fmt_scalar(-d)}"
    if kind == "state":
        return "S"
    if kind == "statelit":
        return "[" + ", ".join(_fmt_scalar(v) for v in value[1]) + "]"
    raise AssertionError(value)


def _render_guard(guard) -> str:
    if guard[0] == "feq":
        return f"f{guard[1]} == {_fmt_scalar(guard[2])}"
    return f"A == act{guard[1]}"


def _render_target(target) -> str:
    return "S'" if target == "S" else f"f{target}'"


def _render_body(body, indent, lines):
    pad = "    " * indent
    for stmt in body:
        kind = stmt[0]
        if kind == "pred":
            _, target, value = stmt
            lines.append(f"{pad}{_render_target(target)} -> {_render_value(value, target)}")
        elif kind == "mix":
            for i, (target, value, weight) in enumerate(stmt[1]):
                head = "" if i == 0 else "or "
                lines.append(
                    f"{pad}{head}{_render_target(target)} -> "
                    f"{_render_value(value, target)} with P({weight!r})"
                )
        elif kind == "cond":
            _, branches, orelse = stmt
            for i, (guard, sub) in enumerate(branches):
                word = "if" if i == 0 else "elif"
                lines.append(f"{pad}{word} {_render_guard(guard)}:")
                _render_body(sub, indent + 1, lines)
            if orelse is not None:
                lines.append(f"{pad}else:")
                _render_body(orelse, indent + 1, lines)
        elif kind == "ref":
            lines.append(f"{pad}-> {stmt[1]}")
        elif kind == "reward":
            lines.append(f"{pad}Reward {_fmt_scalar(stmt[1])}")
        else:
            raise AssertionError(stmt)


def render_model(model: FactoredModel) -> str:
    lines = []
    for k in range(model.n_actions):
        lines.append(f"Action act{k} := {k}")
    for i in range(len(model.sizes)):
        lines.append(f"Factor f{i} := S[{i}:{i + 1}]")
    for name, body in model.effects:
        lines.append("")
        lines.append(f"Effect {name}:")
        _render_body(body, 1, lines)
    return "\n".join(lines) + "\n"


# ----- generation -----

_WEIGHT_SETS = {
    1: ((0.5,), (1.0,), (0.25,), (0.375,)),
    2: ((0.25, 0.5), (0.5, 0.5), (0.375, 0.25), (0.125, 0.5)),
    3: ((0.25, 0.25, 0.25), (0.125, 0.25, 0.5), (0.25, 0.25, 0.5)),
}


def _random_value(rng, sizes, target):
    roll = rng.random()
    if roll < 0.4:
        return ("lit", float(rng.randrange(sizes[target])))
    if roll < 0.6:
        return ("id",)
    if roll < 0.8:
        return ("copy", rng.randrange(len(sizes)))
    return ("shift", rng.randrange(len(sizes)), rng.choice((-1.0, 1.0)))


def _product_body(rng, sizes):
    if rng.random() < 0.2:
        if rng.random() < 0.5:
            return (("pred", "S", ("state",)),)
        lit = tuple(float(rng.randrange(k)) for k in sizes)
        return (("pred", "S", ("statelit", lit)),)
    chosen = [i for i in range(len(sizes)) if rng.random() < 0.7]
    if not chosen:
        chosen = [rng.randrange(len(sizes))]
    return tuple(("pred", i, _random_value(rng, sizes, i)) for i in chosen)


def _mix_stmt(rng, sizes):
    n_alt = rng.randint(1, 3)
    weights = rng.choice(_WEIGHT_SETS[n_alt])
    target = rng.randrange(len(sizes))
    alts = []
    for w in weights:
        if rng.random() < 0.15:
            alts.append(("S", ("state",), w))
        else:
            alts.append((target, _random_value(rng, sizes, target), w))
    return ("mix", tuple(alts))


def _split_mix_bodies(rng, sizes):
    """Two statements (or referenced effects) putting mass on the same
    factor at two different values; supports stay disjoint."""
    target = rng.randrange(len(sizes))
    v0, v1 = rng.sample(range(max(sizes[target], 2)), 2)
    w0, w1 = rng.choice(((0.25, 0.5), (0.5, 0.25), (0.375, 0.375)))
    first = ("mix", ((target, ("lit", float(v0)), w0),))
    second = ("mix", ((target, ("lit", float(v1)), w1),))
    return first, second


def _cond_stmt(rng, sizes):
    n_branch = rng.randint(1, 2)
    branches = []
    for _ in range(n_branch):
        g = rng.randrange(len(sizes))
        guard = ("feq", g, float(rng.randrange(sizes[g])))
        sub = _product_body(rng, sizes) if rng.random() < 0.6 else (_mix_stmt(rng, sizes),)
        branches.append((guard, sub))
    orelse = None
    if rng.random() < 0.6:
        orelse = _product_body(rng, sizes) if rng.random() < 0.6 else (_mix_stmt(rng, sizes),)
    return ("cond", tuple(branches), orelse)


def _action_body(rng, sizes):
    roll = rng.random()
    if roll < 0.08:
        return (("reward", float(rng.choice((-1.0, 0.0, 1.0)))),)
    if roll < 0.45:
        body = _product_body(rng, sizes)
        if rng.random() < 0.3:
            body = body + (("reward", float(rng.choice((-1.0, 0.5, 1.0)))),)
        return body
    if roll < 0.7:
        return (_mix_stmt(rng, sizes),)
    if roll < 0.85:
        return (_cond_stmt(rng, sizes),)
    return _split_mix_bodies(rng, sizes)


def random_factored_model(rng) -> FactoredModel:
    n = rng.randint(1, 4)
    sizes = tuple(rng.randint(2, 3) for _ in range(n))
    helpers = []
    shape = rng.random()
    if shape < 0.15:
        main = _action_body(rng, sizes)
    elif shape < 0.3:
        first, second = _split_mix_bodies(rng, sizes)
        helpers = [("aux0", (first,)), ("aux1", (second,))]
        main = (("ref", "aux0"), ("ref", "aux1"))
        if rng.random() < 0.5:
            helpers.append(("aux2", (("reward", 1.0),)))
            main = main + (("ref", "aux2"),)
    else:
        branches = [(("act", 0), _action_body(rng, sizes))]
        tail = rng.random()
        if tail < 0.4:
            orelse = _action_body(rng, sizes)
            main = (("cond", tuple(branches), orelse),)
        elif tail < 0.8:
            branches.append((("act", 1), _action_body(rng, sizes)))
            main = (("cond", tuple(branches), None),)
        else:
            main = (("cond", tuple(branches), None),)
    return FactoredModel(sizes=sizes, n_actions=2, effects=tuple(helpers) + (("main", main),))


# --------------------------------------------------------------------------
# reward-pair models: two referenced effects contributing only rewards


def random_reward_pair(rng):
    """A FactoredModel whose main references two reward-only effects;
    used to check that rewards add over the contributing subset."""
    sizes = (rng.randint(2, 3),)

    def reward_body():
        roll = rng.random()
        value = float(rng.choice((-1.0, -0.1, 0.5, 1.0, 3.0)))
        if roll < 0.3:
            return (("reward", value),)
        guard = ("feq", 0, float(rng.randrange(sizes[0])))
        if roll < 0.65:
            return (("cond", ((guard, (("reward", value),)),), None),)
        other = float(rng.choice((-2.0, 0.0, 2.0)))
        return (("cond", ((guard, (("reward", value),)),), (("reward", other),)),)

    effects = (("left", reward_body()), ("right", reward_body()),
               ("main", (("ref", "left"), ("ref", "right"))))
    return FactoredModel(sizes=sizes, n_actions=2, effects=effects)


# --------------------------------------------------------------------------
# grid-with-lava planning oracles

GRID_SIZE = 6
GRID_START = (1.0, 1.0)
GRID_WALL = (3.0, 1.0)
GRID_GOAL = (5.0, 1.0)
GRID_LAVA = frozenset({(3.0, 2.0), (1.0, 4.0), (2.0, 4.0), (2.0, 5.0)})
GRID_MOVES = ((1.0, 0.0), (-1.0, 0.0), (0.0, -1.0), (0.0, 1.0))  # up, down, left, right


def grid_states():
    return tuple(
        (float(x), float(y)) for x in range(1, GRID_SIZE + 1) for y in range(1, GRID_SIZE + 1)
    )


def grid_move(s, a_idx):
    dx, dy = GRID_MOVES[a_idx]
    nx, ny = s[0] + dx, s[1] + dy
    if not (1.0 <= nx <= GRID_SIZE and 1.0 <= ny <= GRID_SIZE) or (nx, ny) == GRID_WALL:
        return tuple(s)
    return (nx, ny)


def grid_terminal(s) -> bool:
    return tuple(s) in GRID_LAVA or tuple(s) == GRID_GOAL


def arrival_reward(s_next) -> float:
    if tuple(s_next) in GRID_LAVA:
        return -1.0
    if tuple(s_next) == GRID_GOAL:
        return 1.0
    return 0.0


def slip_distribution(s, a_idx):
    """Intended move lands with probability 2/3; each of the other three
    directions is replayed with probability 1/9."""
    dist = {}
    for b in range(4):
        p = 2.0 / 3.0 if b == a_idx else 1.0 / 9.0
        nxt = grid_move(s, b)
        dist[nxt] = dist.get(nxt, 0.0) + p
    return dist


def optimal_q(gamma: float, sweeps: int = 2000):
    """True-model Q values over the full grid; terminal states are
    absorbing with value zero and rewards are paid on arrival."""
    states = grid_states()
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    q = np.zeros((n, 4))
    for _ in range(sweeps):
        v = q.max(axis=1)
        for s in states:
            if grid_terminal(s):
                v[index[s]] = 0.0
        new = np.zeros_like(q)
        for s in states:
            si = index[s]
            if grid_terminal(s):
                continue
            for a in range(4):
                total = 0.0
                for nxt, p in slip_distribution(s, a).items():
                    cont = 0.0 if grid_terminal(nxt) else v[index[nxt]]
                    total += p * (arrival_reward(nxt) + gamma * cont)
                new[si, a] = total
        if np.abs(new - q).max() < 1e-12:
            q = new
            break
        q = new
    return q, states


def evaluate_policy(policy: dict, gamma: float) -> float:
    """Exact value of the start state under ``policy`` (state -> action
    index) in the true slippery model, by linear solve."""
    states = grid_states()
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    a_mat = np.eye(n)
    b = np.zeros(n)
    for s in states:
        si = index[s]
        if grid_terminal(s):
            continue
        for nxt, p in slip_distribution(s, policy[s]).items():
            b[si] += p * arrival_reward(nxt)
            if not grid_terminal(nxt):
                a_mat[si, index[nxt]] -= gamma * p
    v = np.linalg.solve(a_mat, b)
    return float(v[index[GRID_START]])


def standing_reward(s) -> float:
    """The advice's per-state reward: it describes the state you are in,
    not the one you arrive at."""
    if tuple(s) in GRID_LAVA:
        return -1.0
    if tuple(s) == GRID_GOAL:
        return 1.0
    return 0.0


def advice_q(gamma: float, sweeps: int = 1000):
    """Warm-start oracle for the full grid advice: deterministic intended
    moves, standing rewards, terminal states keep only their own reward."""
    states = grid_states()
    q = {(s, a): standing_reward(s) for s in states for a in range(4)}
    for _ in range(sweeps):
        new = {}
        for s in states:
            for a in range(4):
                if grid_terminal(s):
                    new[(s, a)] = standing_reward(s)
                else:
                    nxt = grid_move(s, a)
                    best = max(q[(nxt, b)] for b in range(4))
                    new[(s, a)] = standing_reward(s) + gamma * best
        if max(abs(new[k] - q[k]) for k in q) < 1e-12:
            q = new
            break
        q = new
    return q


def partial_advice_q(gamma: float, sweeps: int = 1000):
    """Warm-start oracle when the advice only covers moving up and only
    rewards lava states: everything else is never written and stays 0.

    Returns (q, written) where written is the set of covered (s, a) keys.
    """
    states = grid_states()
    q = {}
    written = set()
    for s in states:
        if s in GRID_LAVA:
            for a in range(4):
                q[(s, a)] = -1.0
                written.add((s, a))

    def get(s, a):
        return q.get((s, a), 0.0)

    for _ in range(sweeps):
        new = {}
        for s in states:
            if grid_terminal(s):
                new[(s, 0)] = -1.0 if s in GRID_LAVA else 0.0
            else:
                nxt = grid_move(s, 0)
                best = max(get(nxt, b) for b in range(4))
                r = -1.0 if s in GRID_LAVA else 0.0
                new[(s, 0)] = r + gamma * best
        for key, value in new.items():
            q[key] = value
            written.add(key)
    return q, written


# --------------------------------------------------------------------------
# numeric gradient


def central_difference_gradient(f, x0, h: float = 1e-5) -> np.ndarray:
    """Elementwise central differences of a scalar function of an array."""
    x0 = np.asarray(x0, dtype=float)
    grad = np.zeros_like(x0)
    it = np.nditer(x0, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        bumped = x0.copy()
        bumped[idx] = x0[idx] + h
        hi = f(bumped)
        bumped[idx] = x0[idx] - h
        lo = f(bumped)
        grad[idx] = (hi - lo) / (2.0 * h)
        it.iternext()
    return grad
