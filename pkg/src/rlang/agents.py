"""Learning agents that consume compiled knowledge.

Four ways in: value-table warm starts from a partial model, count-table
seeding for model-based exploration, option hierarchies, and policy
mixing for gradient learners. A capability match picks among them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, MissingContextError
from .knowledge import (
    DynamicsTaskKnowledge,
    OptionSpec,
    SolutionKnowledge,
    sample_policy,
)
from .runtime import UNKNOWN, ActionVal
from .semantics import CAPABILITY_AXES, CapabilityVector

DEFAULT_SWEEPS = 1000
SWEEP_TOL = 1e-9


def _key(s) -> tuple[float, ...]:
    return tuple(float(x) for x in s)


# --------------------------------------------------------------------------
# value tables


class QTable:
    """Sparse (state, action-index) -> value map; absent entries are 0."""

    def __init__(self, n_actions: int):
        self.n_actions = n_actions
        self.values: dict = {}

    def get(self, s, a_idx: int) -> float:
        return self.values.get((_key(s), a_idx), 0.0)

    def set(self, s, a_idx: int, value: float):
        self.values[(_key(s), a_idx)] = value

    def row(self, s, allowed=None) -> list[float]:
        idx = range(self.n_actions) if allowed is None else allowed
        return [self.get(s, i) for i in idx]

    def best_value(self, s, allowed=None) -> float:
        allowed = list(range(self.n_actions)) if allowed is None else list(allowed)
        return max(self.get(s, i) for i in allowed)

    def best_action(self, s, allowed=None) -> int:
        allowed = list(range(self.n_actions)) if allowed is None else list(allowed)
        best = allowed[0]
        for i in allowed[1:]:
            if self.get(s, i) > self.get(s, best):
                best = i
        return best


def _reward_sa(k: DynamicsTaskKnowledge, s, a):
    """Reward with the next state unbound; rules that need it stay unknown."""
    try:
        return k.reward(s, a, None)
    except MissingContextError:
        return UNKNOWN


def init_q_table(
    k: DynamicsTaskKnowledge,
    states,
    actions,
    gamma: float,
    iterations: int = DEFAULT_SWEEPS,
    terminal=None,
    tol: float = SWEEP_TOL,
) -> QTable:
    """Warm-start a value table from the partial model.

    Pass one writes every known reward. Then Bellman sweeps run over the
    (s, a) pairs whose transitions the model pins down, completing
    partially predicted next states by identity and counting unknown
    reward as 0. States flagged terminal (goal tests plus ``terminal``)
    drop the bootstrap term: the episode ends there, nothing follows.
    Pairs the model says nothing about are never written and stay 0.
    """
    states = [_key(s) for s in states]
    q = QTable(len(actions))

    def is_end(s) -> bool:
        if k.is_goal(s):
            return True
        return bool(terminal(s)) if terminal is not None else False

    backups = []  # (s, a_idx, bootstrap?, [(s_next, p, reward)])
    for s in states:
        for a_idx, a in enumerate(actions):
            r = _reward_sa(k, s, a)
            if r is not UNKNOWN:
                q.set(s, a_idx, r)
            res = k.transition(s, a)
            if not res.entries:
                continue
            moves = []
            for assignment, p in res.entries:
                s_next = assignment.apply_to(s)
                r_sas = k.reward(s, a, s_next)
                moves.append((s_next, p, 0.0 if r_sas is UNKNOWN else r_sas))
            backups.append((s, a_idx, not is_end(s), moves))

    for _ in range(iterations):
        delta = 0.0
        for s, a_idx, bootstrap, moves in backups:
            if bootstrap:
                new = sum(p * (r + gamma * q.best_value(s_next)) for s_next, p, r in moves)
            else:
                new = sum(p * r for _, p, r in moves)
            delta = max(delta, abs(new - q.get(s, a_idx)))
            q.set(s, a_idx, new)
        if delta < tol:
            break
    return q


def q_learning_step(
    q: QTable, s, a_idx: int, r: float, s_next, alpha: float, gamma: float, terminal: bool
):
    target = r if terminal else r + gamma * q.best_value(s_next)
    q.set(s, a_idx, q.get(s, a_idx) + alpha * (target - q.get(s, a_idx)))


def epsilon_greedy(q: QTable, s, epsilon: float, rng, restricted=frozenset()) -> int:
    allowed = [i for i in range(q.n_actions) if i not in restricted]
    if not allowed:
        raise ConfigError("every action is restricted; nothing to select")
    if rng.random() < epsilon:
        return allowed[int(rng.random() * len(allowed))]
    return q.best_action(s, allowed)


@dataclass
class QLearner:
    q: QTable
    alpha: float
    epsilon: float
    gamma: float

    def act(self, s, rng, restricted=frozenset()) -> int:
        return epsilon_greedy(self.q, s, self.epsilon, rng, restricted)

    def observe(self, s, a_idx: int, r: float, s_next, terminal: bool):
        q_learning_step(self.q, s, a_idx, r, s_next, self.alpha, self.gamma, terminal)


# --------------------------------------------------------------------------
# model-based exploration with seeded counts


@dataclass
class RMaxModel:
    states: tuple
    actions: tuple
    m: int
    seed_count: int
    r_max: float
    gamma: float
    counts: dict = field(default_factory=dict)  # (si, ai) -> seed + real observations
    real_counts: dict = field(default_factory=dict)
    seed_transition: dict = field(default_factory=dict)  # (si, ai) -> ((sj, p), ...)
    seed_reward: dict = field(default_factory=dict)
    obs_next: dict = field(default_factory=dict)  # (si, ai) -> {sj: n}
    obs_reward: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.states)}

    def state_index(self, s) -> int:
        return self.index[_key(s)]

    def observe(self, s, a_idx: int, r: float, s_next):
        si, sj = self.state_index(s), self.state_index(s_next)
        pair = (si, a_idx)
        self.counts[pair] = self.counts.get(pair, 0) + 1
        self.real_counts[pair] = self.real_counts.get(pair, 0) + 1
        nxt = self.obs_next.setdefault(pair, {})
        nxt[sj] = nxt.get(sj, 0) + 1
        self.obs_reward[pair] = self.obs_reward.get(pair, 0.0) + r

    def empirical(self, si: int, a_idx: int):
        """((sj, p), ...), mean reward once m real samples exist, else None."""
        pair = (si, a_idx)
        n = self.real_counts.get(pair, 0)
        if n < self.m:
            return None
        nxt = self.obs_next[pair]
        trans = tuple((sj, c / n) for sj, c in sorted(nxt.items()))
        return trans, self.obs_reward[pair] / n

    def standing_reward(self, si: int) -> float:
        """The model's own per-step reward for occupying state si, 0 if unseeded."""
        best = None
        for ai in range(len(self.actions)):
            r = self.seed_reward.get((si, ai))
            if r is not None and (best is None or r > best):
                best = r
        return 0.0 if best is None else best


def seed_rmax(k: DynamicsTaskKnowledge, model: RMaxModel) -> RMaxModel:
    """Copy every fully known (s, a) of the model knowledge into the count
    tables at the configured seed count."""
    if model.seed_count >= model.m:
        raise ConfigError(
            f"seed count {model.seed_count} must stay below the known threshold {model.m}"
        )
    for si, s in enumerate(model.states):
        for a_idx, a in enumerate(model.actions):
            res = k.transition(s, a)
            if not res.entries or res.unknown_mass > 1e-12:
                continue
            trans = []
            reward = 0.0
            usable = True
            for assignment, p in res.entries:
                s_next = assignment.apply_to(s)
                if _key(s_next) not in model.index:
                    usable = False
                    break
                r = k.reward(s, a, s_next)
                if r is UNKNOWN:
                    usable = False
                    break
                trans.append((model.state_index(s_next), p))
                reward += p * r
            if not usable:
                continue
            pair = (si, a_idx)
            model.seed_transition[pair] = tuple(trans)
            model.seed_reward[pair] = reward
            model.counts[pair] = model.counts.get(pair, 0) + model.seed_count
    return model


class RMaxAgent:
    """Plan greedily on the current model; unknown pairs look as good as
    the best possible future, which is what drives exploration.

    Terminal states plan to value 0 (the episode is over). Model rewards
    are paid for occupying a state, while the environment pays on
    arrival, so a seeded pair that lands on a terminal state collects
    that state's modeled standing reward as part of its own backup; the
    empirical arrival reward replaces the whole construction once a pair
    has m real samples.
    """

    def __init__(self, model: RMaxModel, terminal=None, plan_iterations: int = 1000, plan_tol: float = 1e-9):
        self.model = model
        self.terminal = terminal
        self.plan_iterations = plan_iterations
        self.plan_tol = plan_tol
        self._stale = True
        self._q = None

    def _plan(self):
        m = self.model
        n_s, n_a = len(m.states), len(m.actions)
        optimistic = m.r_max / (1.0 - m.gamma) if m.gamma < 1.0 else m.r_max * 1e6
        end = np.zeros(n_s, dtype=bool)
        if self.terminal is not None:
            for si, s in enumerate(m.states):
                end[si] = bool(self.terminal(s))
        trans = np.zeros((n_s, n_a, n_s))
        rewards = np.zeros((n_s, n_a))
        usable = np.zeros((n_s, n_a), dtype=bool)
        for si in range(n_s):
            if end[si]:
                continue
            for ai in range(n_a):
                got = m.empirical(si, ai)
                if got is None and (si, ai) in m.seed_transition:
                    pairs = m.seed_transition[(si, ai)]
                    r = m.seed_reward[(si, ai)]
                    # arrival-time transport of the landing state's standing reward
                    r += m.gamma * sum(p * m.standing_reward(sj) for sj, p in pairs if end[sj])
                elif got is not None:
                    pairs, r = got
                else:
                    continue
                usable[si, ai] = True
                rewards[si, ai] = r
                for sj, p in pairs:
                    trans[si, ai, sj] = p
        q = np.zeros((n_s, n_a))
        for _ in range(self.plan_iterations):
            v = q.max(axis=1)
            v[end] = 0.0
            new = rewards + m.gamma * trans @ v
            new[~usable] = optimistic
            new[end, :] = 0.0
            delta = np.abs(new - q).max()
            q = new
            if delta < self.plan_tol:
                break
        self._q = q
        self._stale = False

    def act(self, s, rng=None) -> int:
        if self._stale:
            self._plan()
        return int(np.argmax(self._q[self.model.state_index(s)]))

    def greedy_policy(self) -> dict:
        if self._stale:
            self._plan()
        return {s: int(np.argmax(self._q[si])) for si, s in enumerate(self.model.states)}

    def observe(self, s, a_idx: int, r: float, s_next):
        pair = (self.model.state_index(s), a_idx)
        before = self.model.real_counts.get(pair, 0)
        self.model.observe(s, a_idx, r, s_next)
        if before + 1 == self.model.m:
            self._stale = True  # empirical stats just took over this pair

    def end_episode(self):
        self._stale = True


# --------------------------------------------------------------------------
# option hierarchies


OPTION_TIMEOUT = 100


@dataclass
class HierarchicalAgentState:
    options: tuple[OptionSpec, ...]
    outer: QTable
    inner: dict  # option name -> QLearner, learnable options only
    outer_alpha: float = 0.5
    outer_epsilon: float = 0.01
    timeout: int = OPTION_TIMEOUT


def init_options(
    k: SolutionKnowledge,
    learner_factory=None,
    outer_alpha: float = 0.5,
    outer_epsilon: float = 0.01,
    timeout: int = OPTION_TIMEOUT,
) -> HierarchicalAgentState:
    """One outer value table over options; a fresh inner learner for every
    option whose body is left to be learned."""
    inner = {}
    for opt in k.options:
        if opt.is_learnable:
            if learner_factory is None:
                raise ConfigError(f"option {opt.name!r} is learnable but no learner factory was given")
            inner[opt.name] = learner_factory(opt)
    return HierarchicalAgentState(
        options=k.options,
        outer=QTable(len(k.options)),
        inner=inner,
        outer_alpha=outer_alpha,
        outer_epsilon=outer_epsilon,
        timeout=timeout,
    )


def run_option_episode(agent: HierarchicalAgentState, spec, rng, gamma: float | None = None):
    """One episode driven by options; returns the undiscounted return.

    The outer table learns over option choices with the usual value
    update, discounting by the option's realized duration. Inner learners
    for learnable options train on the pseudo-reward: 1 the first time
    the option's stop condition holds, else 0.
    """
    gamma = spec.gamma if gamma is None else gamma
    s = spec.reset(rng)
    total = 0.0
    steps = 0
    done = False
    while not done and steps < spec.max_steps:
        available = [i for i, o in enumerate(agent.options) if o.can_start(s)]
        if not available:
            a_idx = int(rng.random() * len(spec.actions))
            s, r, done = spec.step(s, a_idx, rng)
            total += r
            steps += 1
            continue
        o_idx = _pick_option(agent, s, available, rng)
        opt = agent.options[o_idx]
        learner = agent.inner.get(opt.name)
        s0 = s
        acc = 0.0
        k = 0
        while True:
            a_idx = _option_action(agent, opt, learner, s, rng)
            s_next, r, done = spec.step(s, a_idx, rng)
            total += r
            steps += 1
            acc += (gamma**k) * r
            k += 1
            stop = opt.terminates(s_next)
            if learner is not None:
                learner.observe(s, a_idx, 1.0 if stop else 0.0, s_next, stop or done)
            s = s_next
            if stop or done or k >= agent.timeout or steps >= spec.max_steps:
                break
        if done:
            target = acc
        else:
            nxt = [i for i, o in enumerate(agent.options) if o.can_start(s)]
            boot = agent.outer.best_value(s, nxt) if nxt else 0.0
            target = acc + (gamma**k) * boot
        old = agent.outer.get(s0, o_idx)
        agent.outer.set(s0, o_idx, old + agent.outer_alpha * (target - old))
    return total


def _pick_option(agent: HierarchicalAgentState, s, available, rng) -> int:
    if rng.random() < agent.outer_epsilon:
        return available[int(rng.random() * len(available))]
    best = available[0]
    for i in available[1:]:
        if agent.outer.get(s, i) > agent.outer.get(s, best):
            best = i
    return best


def _option_action(agent, opt: OptionSpec, learner, s, rng) -> int:
    if learner is not None:
        return learner.act(s, rng)
    result = opt.policy(s)
    if not result.entries:
        raise ConfigError(f"option {opt.name!r} has no action at state {list(s)}")
    action = sample_policy(result, s, rng)
    if action is UNKNOWN:
        action = result.entries[0][0]
    return action.as_index()


# --------------------------------------------------------------------------
# linear-softmax policy gradient


class LinearSoftmaxPolicy:
    """Action preferences linear in the raw state plus a bias term."""

    def __init__(self, state_dim: int, n_actions: int):
        self.weights = np.zeros((n_actions, state_dim + 1))
        self.n_actions = n_actions

    def features(self, s) -> np.ndarray:
        return np.append(np.asarray(s, dtype=float), 1.0)

    def probs(self, s) -> np.ndarray:
        z = self.weights @ self.features(s)
        z -= z.max()
        e = np.exp(z)
        return e / e.sum()

    def log_prob(self, s, a_idx: int) -> float:
        return float(np.log(self.probs(s)[a_idx]))

    def log_prob_gradient(self, s, a_idx: int) -> np.ndarray:
        phi = self.features(s)
        p = self.probs(s)
        one_hot = np.zeros(self.n_actions)
        one_hot[a_idx] = 1.0
        return np.outer(one_hot - p, phi)

    def sample(self, s, rng) -> int:
        u = rng.random()
        acc = 0.0
        for i, p in enumerate(self.probs(s)):
            acc += p
            if u < acc:
                return i
        return self.n_actions - 1


def reinforce_update(policy: LinearSoftmaxPolicy, trajectories, gamma: float, lr: float):
    """Batch policy-gradient step from (s, a, r) trajectories."""
    grad = np.zeros_like(policy.weights)
    for traj in trajectories:
        g = 0.0
        returns = []
        for _, _, r in reversed(traj):
            g = r + gamma * g
            returns.append(g)
        returns.reverse()
        for (s, a_idx, _), g_t in zip(traj, returns):
            grad += g_t * policy.log_prob_gradient(s, a_idx)
    policy.weights += lr * grad


# --------------------------------------------------------------------------
# policy mixing


@dataclass
class MixingSchedule:
    beta0: float
    decay: float
    batches: int = 0

    @property
    def beta(self) -> float:
        return self.beta0 * self.decay**self.batches

    def advance(self):
        self.batches += 1


def policy_mixing_rollout(
    spec,
    learned_policy,
    advice_policy,
    beta: float,
    decay: float,
    rng,
    episodes: int = 5,
):
    """Run one batch of episodes, gating each step between advice and the
    learner with probability ``beta``; advice that answers unknown falls
    back to the learner for that step. Returns the trajectories and the
    decayed beta for the next batch.

    learned_policy: (s, rng) -> action index
    advice_policy: s -> action index or None
    """
    trajectories = []
    for _ in range(episodes):
        s = spec.reset(rng)
        traj = []
        for _ in range(spec.max_steps):
            a_idx = None
            if rng.random() < beta:
                a_idx = advice_policy(s)
            if a_idx is None:
                a_idx = learned_policy(s, rng)
            s_next, r, done = spec.step(s, a_idx, rng)
            traj.append((s, a_idx, r))
            s = s_next
            if done:
                break
        trajectories.append(traj)
    return trajectories, beta * decay


def advice_action_fn(solution: SolutionKnowledge, spec, name: str | None = None):
    """Adapt a compiled policy into the mixing interface."""

    def advice(s):
        result = solution.policy(s, name)
        if not result.entries:
            return None
        best = max(result.entries, key=lambda e: e[1])[0]
        try:
            return spec.action_index(best)
        except KeyError:
            return None

    return advice


# --------------------------------------------------------------------------
# capability-based agent selection


@dataclass(frozen=True)
class AgentCapability:
    agent_id: str
    bits: tuple[int, ...]  # same axis order as CapabilityVector

    def __post_init__(self):
        if len(self.bits) != len(CAPABILITY_AXES):
            raise ConfigError(
                f"capability vector needs {len(CAPABILITY_AXES)} bits, got {len(self.bits)}"
            )


DEFAULT_AGENTS = (
    AgentCapability("informed-q", (1, 1, 0, 0, 1, 1)),
    AgentCapability("hierarchical-q", (0, 0, 0, 1, 0, 0)),
    AgentCapability("mixing-pg", (0, 0, 1, 0, 0, 0)),
    AgentCapability("uninformed", (0, 0, 0, 0, 0, 0)),
)


def select_agent(provided: CapabilityVector, registry=DEFAULT_AGENTS) -> str:
    """Most covered program bits win; fewest wasted agent bits break ties,
    then registration order."""
    if not registry:
        raise ConfigError("no agents registered")
    p = provided.bits()
    best = None
    best_rank = None
    for pos, cap in enumerate(registry):
        matched = sum(1 for pb, cb in zip(p, cap.bits) if pb and cb)
        unused = sum(1 for pb, cb in zip(p, cap.bits) if cb and not pb)
        rank = (-matched, unused, pos)
        if best_rank is None or rank < best_rank:
            best, best_rank = cap, rank
    return best.agent_id
