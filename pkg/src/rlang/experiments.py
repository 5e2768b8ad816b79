"""Seeded experiment runner emitting learning-curve CSVs.

A config names an environment, an advice program, an agent (or lets the
capability match decide), hyperparameters, and a list of seeds. Each
seed runs an independent agent; rows come out as seed,episode,return in
seed order, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, fields

from .agents import (
    DEFAULT_AGENTS,
    LinearSoftmaxPolicy,
    QLearner,
    QTable,
    RMaxAgent,
    RMaxModel,
    init_options,
    init_q_table,
    policy_mixing_rollout,
    reinforce_update,
    run_option_episode,
    seed_rmax,
    select_agent,
)
from .envs import REGISTRY
from .errors import ConfigError
from .knowledge import compile_knowledge
from .loader import load_program
from .semantics import capability_vector
from .vocab import VocabularyRegistry, load_vocabulary


@dataclass(frozen=True)
class Hyperparameters:
    epsilon: float = 0.1
    alpha: float = 0.05
    gamma: float | None = None  # None: the environment's own discount
    beta0: float = 0.7
    decay: float = 0.99
    sweeps: int = 1000
    rmax_m: int = 30
    rmax_k: int = 1
    r_max: float = 1.0
    step_cap: int | None = None  # None: the environment's own cap
    batch: int = 5
    learning_rate: float = 0.001

    def validate(self):
        checks = (
            (0.0 <= self.epsilon <= 1.0, "epsilon must lie in [0, 1]"),
            (0.0 < self.alpha <= 1.0, "alpha must lie in (0, 1]"),
            (self.gamma is None or 0.0 < self.gamma <= 1.0, "gamma must lie in (0, 1]"),
            (0.0 <= self.beta0 <= 1.0, "beta0 must lie in [0, 1]"),
            (0.0 < self.decay <= 1.0, "decay must lie in (0, 1]"),
            (self.sweeps >= 1, "sweeps must be at least 1"),
            (self.rmax_m >= 1, "rmax_m must be at least 1"),
            (0 <= self.rmax_k, "rmax_k must be non-negative"),
            (self.step_cap is None or self.step_cap >= 1, "step_cap must be at least 1"),
            (self.batch >= 1, "batch must be at least 1"),
            (self.learning_rate > 0.0, "learning_rate must be positive"),
        )
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)


@dataclass(frozen=True)
class ExperimentConfig:
    env: str
    agent: str = "auto"
    program: str | None = None  # None: the environment's bundled advice program
    vocab: tuple[str, ...] = ()
    hyperparameters: Hyperparameters = Hyperparameters()
    seeds: tuple[int, ...] = (0,)
    episodes: int = 100
    output: str = "curves.csv"

    def validate(self):
        if self.env not in REGISTRY:
            raise ConfigError(f"unknown environment {self.env!r}; choose from {sorted(REGISTRY)}")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if self.episodes < 1:
            raise ConfigError("episodes must be at least 1")
        self.hyperparameters.validate()


def _reject_unknown(data: dict, allowed, where: str):
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    top = {f.name for f in fields(ExperimentConfig)}
    _reject_unknown(data, top, path)
    hyper = data.pop("hyperparameters", {})
    if not isinstance(hyper, dict):
        raise ConfigError(f"{path}: hyperparameters must be an object")
    hnames = {f.name for f in fields(Hyperparameters)}
    _reject_unknown(hyper, hnames, f"{path} hyperparameters")
    if "seeds" in data:
        data["seeds"] = tuple(data["seeds"])
    if "vocab" in data:
        data["vocab"] = tuple(data["vocab"])
    cfg = ExperimentConfig(hyperparameters=Hyperparameters(**hyper), **data)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# per-agent episode loops


def _q_episode(spec, agent, rng, solution=None):
    s = spec.reset(rng)
    total = 0.0
    for _ in range(spec.max_steps):
        restricted = frozenset()
        if solution is not None:
            names = solution.restrictions(s)
            restricted = frozenset(spec.action_index(spec.action_named(n)) for n in names)
        a = agent.act(s, rng, restricted)
        s_next, r, done = spec.step(s, a, rng)
        agent.observe(s, a, r, s_next, done)
        total += r
        s = s_next
        if done:
            break
    return total


def _rmax_episode(spec, agent, rng):
    s = spec.reset(rng)
    total = 0.0
    for _ in range(spec.max_steps):
        a = agent.act(s)
        s_next, r, done = spec.step(s, a, rng)
        agent.observe(s, a, r, s_next)
        total += r
        s = s_next
        if done:
            break
    agent.end_episode()
    return total


def _state_dim(spec) -> int:
    return 1 + max(i for indices in spec.layout.values() for i in indices)


class _PolicyGradientRun:
    """Batched REINFORCE with Bernoulli-gated advice; beta0 = 0 is the
    plain unmixed learner."""

    def __init__(self, spec, solution, hyper, gamma):
        self.spec = spec
        self.policy = LinearSoftmaxPolicy(_state_dim(spec), len(spec.actions))
        self.beta = hyper.beta0
        self.decay = hyper.decay
        self.batch = hyper.batch
        self.lr = hyper.learning_rate
        self.gamma = gamma
        self.advice = _advice_fn(solution, spec) if hyper.beta0 > 0 else lambda s: None

    def run(self, rng, episodes):
        returns = []
        while len(returns) < episodes:
            want = min(self.batch, episodes - len(returns))
            trajs, self.beta = policy_mixing_rollout(
                self.spec, lambda s, rg: self.policy.sample(s, rg),
                self.advice, self.beta, self.decay, rng, episodes=want,
            )
            returns.extend(sum(r for _, _, r in t) for t in trajs)
            reinforce_update(self.policy, trajs, self.gamma, self.lr)
        return returns


def _advice_fn(solution, spec):
    from .agents import advice_action_fn

    if solution is None or solution.advice_policy_name() is None:
        raise ConfigError("mixing agent needs an advice policy in the program")
    return advice_action_fn(solution, spec)


def _require_states(spec, agent_id):
    if spec.states is None:
        raise ConfigError(f"agent {agent_id!r} needs an enumerable state space; {spec.name!r} has none")


def _run_seed(cfg: ExperimentConfig, spec, k, solution, agent_id: str, seed: int):
    h = cfg.hyperparameters
    gamma = h.gamma if h.gamma is not None else spec.gamma
    rng = random.Random(seed)
    episodes = cfg.episodes

    if agent_id == "informed-q":
        _require_states(spec, agent_id)
        q = init_q_table(k, spec.states, spec.actions, gamma,
                         iterations=h.sweeps, terminal=spec.is_terminal)
        agent = QLearner(q, alpha=h.alpha, epsilon=h.epsilon, gamma=gamma)
        return [_q_episode(spec, agent, rng, solution) for _ in range(episodes)]
    if agent_id == "uninformed":
        agent = QLearner(QTable(len(spec.actions)), alpha=h.alpha, epsilon=h.epsilon, gamma=gamma)
        return [_q_episode(spec, agent, rng) for _ in range(episodes)]
    if agent_id in ("rmax-informed", "rmax-uninformed"):
        _require_states(spec, agent_id)
        model = RMaxModel(states=spec.states, actions=spec.actions, m=h.rmax_m,
                          seed_count=h.rmax_k, r_max=h.r_max, gamma=gamma)
        if agent_id == "rmax-informed":
            seed_rmax(k, model)
        agent = RMaxAgent(model, terminal=spec.is_terminal, plan_iterations=h.sweeps)
        return [_rmax_episode(spec, agent, rng) for _ in range(episodes)]
    if agent_id == "hierarchical-q":
        agent = init_options(
            solution,
            learner_factory=lambda opt: QLearner(QTable(len(spec.actions)),
                                                 alpha=0.1, epsilon=0.1, gamma=gamma),
            outer_alpha=h.alpha, outer_epsilon=h.epsilon)
        return [run_option_episode(agent, spec, rng, gamma) for _ in range(episodes)]
    if agent_id == "mixing-pg":
        return _PolicyGradientRun(spec, solution, h, gamma).run(rng, episodes)
    raise ConfigError(f"unknown agent {agent_id!r}")


def resolve_agent(cfg: ExperimentConfig, checked) -> str:
    if cfg.agent != "auto":
        return cfg.agent
    return select_agent(capability_vector(checked), DEFAULT_AGENTS)


def output_path(cfg: ExperimentConfig) -> str:
    override = os.environ.get("RLANG_OUTPUT_DIR")
    if override:
        return os.path.join(override, os.path.basename(cfg.output))
    return cfg.output


def run_experiment(cfg: ExperimentConfig) -> str:
    """Run every seed and write the learning-curve CSV; returns its path."""
    cfg.validate()
    factory = REGISTRY[cfg.env]
    spec = factory()
    if cfg.hyperparameters.step_cap is not None:
        spec = spec.with_step_cap(cfg.hyperparameters.step_cap)
    if cfg.program is not None:
        registry = VocabularyRegistry()
        for vpath in cfg.vocab:
            registry.add_all(load_vocabulary(vpath))
        checked = load_program(cfg.program, registry=registry,
                               groundings=spec.groundings)
    else:
        from .envs import load_env_program

        checked = load_env_program(spec)
    k, solution = compile_knowledge(checked)
    agent_id = resolve_agent(cfg, checked)

    rows = []
    for seed in cfg.seeds:
        returns = _run_seed(cfg, spec, k, solution, agent_id, seed)
        rows.extend((seed, ep, ret) for ep, ret in enumerate(returns, start=1))

    path = output_path(cfg)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("seed,episode,return\n")
        for seed, ep, ret in rows:
            fh.write(f"{seed},{ep},{float(ret)!r}\n")
    return path


def window_mean(values, window: int = 50):
    """Running mean over the trailing ``window`` entries at each index."""
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out
