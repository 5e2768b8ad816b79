"""The shipped claims, end to end.

Expected values come from the reference implementations in oracles.py or
from frozen closed-form bands; nothing below is read back from the
package's own output. Each test prints into the verdict block that
conftest appends to the terminal summary.
"""

import json
import pathlib
import random
import time
from importlib import resources

import numpy as np
import pytest
from click.testing import CliRunner

import oracles
from conftest import eval_name
from rlang import UNKNOWN, check_source, compile_knowledge, load_program
from rlang.agents import (
    LinearSoftmaxPolicy,
    QLearner,
    QTable,
    RMaxAgent,
    RMaxModel,
    epsilon_greedy,
    init_options,
    init_q_table,
    run_option_episode,
    seed_rmax,
)
from rlang.ast import pretty_print
from rlang.cli import main as cli_main
from rlang.envs import load_env_program
from rlang.experiments import ExperimentConfig, Hyperparameters, run_experiment
from rlang.parser import parse_program

SEEDS = (0, 1, 2, 3, 4)
T95_DF4 = 2.776451  # two-sided 95% Student-t quantile, 4 degrees of freedom

ASSETS = resources.files("rlang.envs") / "assets"

# Covers only the up action and only lava rewards; the wall case is nested
# inside the action guard so the claimed move is right everywhere.
PARTIAL_UP_ADVICE = """\
import "lava_gap.vocab.json"

Effect dynamics:
    if A == up:
        if at_wall:
            S' -> S
        else:
            x' -> x + 1
            y' -> y

Effect reward:
    if in_lava:
        Reward -1

Effect main:
    -> dynamics
    -> reward
"""

KEEP_OUT_ADVICE = """\
import "lava_gap.vocab.json"

Constant lava_cells := [[3, 2], [1, 4], [2, 4], [2, 5]]

ActionRestriction keep_out:
    if [x + 1, y] in lava_cells:
        Restrict up
    if [x - 1, y] in lava_cells:
        Restrict down
    if [x, y - 1] in lava_cells:
        Restrict left
    if [x, y + 1] in lava_cells:
        Restrict right
"""


def _window_means(values, window=50):
    out, acc = [], 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def _curves(path):
    rows = {}
    with open(path, encoding="utf-8") as fh:
        assert fh.readline().rstrip("\n") == "seed,episode,return"
        for line in fh:
            seed, _, ret = line.rstrip("\n").split(",")
            rows.setdefault(int(seed), []).append(float(ret))
    return [returns for _, returns in sorted(rows.items())]


def _ci95(samples):
    mean = sum(samples) / len(samples)
    var = sum((x - mean) ** 2 for x in samples) / (len(samples) - 1)
    half = T95_DF4 * var**0.5 / len(samples) ** 0.5
    return mean - half, mean + half


def test_c1_corpus_checks_cleanly(corpus_files):
    assert len(corpus_files) == 16
    start = time.perf_counter()
    declarations = 0
    for path in corpus_files:
        checked = load_program(str(path))
        declarations += len(checked.program.declarations)
    elapsed = time.perf_counter() - start
    assert declarations == 41
    assert elapsed < 1.0
    runner = CliRunner()
    for path in corpus_files:
        result = runner.invoke(cli_main, ["check", str(path)])
        assert result.exit_code == 0, f"{path.name}: {result.output}"


def test_c2_momentum_advice_return_band(mountain_spec):
    spec = mountain_spec
    _, solution = compile_knowledge(load_env_program(spec))
    rng = random.Random(0)
    start = time.perf_counter()
    total = 0.0
    for _ in range(100):
        s = spec.reset(rng)
        for _ in range(spec.max_steps):
            result = solution.policy(s)
            assert result.unknown_mass == 0.0
            action = result.entries[0][0]
            s, r, done = spec.step(s, spec.action_index(action), rng)
            total += r
            if done:
                break
    elapsed = time.perf_counter() - start
    average = total / 100
    assert -130.0 <= average <= -110.0
    assert elapsed < 5.0


def _lava_curves(tmp_path, name, agent, epsilon):
    cfg = ExperimentConfig(
        env="lava_gap",
        agent=agent,
        seeds=SEEDS,
        episodes=100,
        output=str(tmp_path / name),
        hyperparameters=Hyperparameters(epsilon=epsilon, alpha=0.05),
    )
    return [_window_means(c) for c in _curves(run_experiment(cfg))]


def test_c3_warm_start_beats_uninformed(tmp_path):
    start = time.perf_counter()
    informed = _lava_curves(tmp_path, "informed.csv", "informed-q", 0.01)
    uninformed = _lava_curves(tmp_path, "uninformed.csv", "uninformed", 0.1)
    elapsed = time.perf_counter() - start

    informed_mean = [sum(c[e] for c in informed) / len(SEEDS) for e in range(100)]
    uninformed_mean = [sum(c[e] for c in uninformed) / len(SEEDS) for e in range(100)]
    # once the smoothing window has filled, the warm start stays ahead
    for episode in range(49, 100):
        assert informed_mean[episode] > uninformed_mean[episode], episode
    informed_low, _ = _ci95([c[99] for c in informed])
    _, uninformed_high = _ci95([c[99] for c in uninformed])
    assert informed_low > uninformed_high
    assert elapsed < 30.0


def test_c4_seeded_rmax_learns_faster(lava_spec, lava_knowledge):
    spec = lava_spec
    k, _ = lava_knowledge
    q_star, states = oracles.optimal_q(spec.gamma)
    v_star = float(q_star[states.index(oracles.GRID_START)].max())
    assert v_star == pytest.approx(-0.0153100579, abs=1e-9)
    tolerance = 0.06  # near-optimal: within this of the start-state optimum

    def first_good_episode(informed, seed, cap=1000):
        model = RMaxModel(states=spec.states, actions=spec.actions, m=30,
                          seed_count=1, r_max=1.0, gamma=spec.gamma)
        if informed:
            seed_rmax(k, model)
        agent = RMaxAgent(model, terminal=spec.is_terminal)
        rng = random.Random(seed)
        last = None
        for episode in range(1, cap + 1):
            s = spec.reset(rng)
            for _ in range(spec.max_steps):
                a = agent.act(s)
                s_next, r, done = spec.step(s, a, rng)
                agent.observe(s, a, r, s_next)
                s = s_next
                if done:
                    break
            agent.end_episode()
            policy = agent.greedy_policy()
            if policy != last:
                last = policy
                if oracles.evaluate_policy(policy, spec.gamma) >= v_star - tolerance:
                    return episode
        return cap + 1

    start = time.perf_counter()
    for seed in SEEDS:
        with_advice = first_good_episode(True, seed)
        without = first_good_episode(False, seed)
        assert with_advice <= 1000 and without <= 1000
        assert with_advice < without, (seed, with_advice, without)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0


def test_c5_options_solve_taxi_flat_does_not(taxi_spec):
    spec = taxi_spec
    _, solution = compile_knowledge(load_env_program(spec))
    episodes = 2000
    start = time.perf_counter()

    hierarchical = []
    for seed in SEEDS:
        agent = init_options(solution)
        rng = random.Random(seed)
        returns = [run_option_episode(agent, spec, rng, spec.gamma) for _ in range(episodes)]
        hierarchical.append(_window_means(returns))

    flat = []
    for seed in SEEDS:
        learner = QLearner(QTable(len(spec.actions)), alpha=0.05, epsilon=0.1, gamma=spec.gamma)
        rng = random.Random(seed)
        returns = []
        for _ in range(episodes):
            s = spec.reset(rng)
            total = 0.0
            for _ in range(spec.max_steps):
                a = learner.act(s, rng)
                s_next, r, done = spec.step(s, a, rng)
                learner.observe(s, a, r, s_next, done)
                total += r
                s = s_next
                if done:
                    break
            returns.append(total)
        flat.append(_window_means(returns))
    elapsed = time.perf_counter() - start

    hier_mean = [sum(c[e] for c in hierarchical) / len(SEEDS) for e in range(episodes)]
    flat_mean = [sum(c[e] for c in flat) / len(SEEDS) for e in range(episodes)]
    assert max(hier_mean) >= 0.9
    assert max(flat_mean) < 0.9
    assert elapsed < 300.0


def test_c6_factored_queries_match_joint_oracle():
    for i in range(100):
        rng = random.Random(1000 + i)
        model = oracles.random_factored_model(rng)
        k, _ = compile_knowledge(check_source(oracles.render_model(model)))
        for s in model.states():
            for a_idx in range(model.n_actions):
                result = k.transition(s, a_idx)
                got = {}
                for assignment, p in result.entries:
                    full = assignment.apply_to(s)
                    got[full] = got.get(full, 0.0) + p
                want, want_unknown = oracles.joint_transition(model, s, a_idx)
                assert got == want, (i, s, a_idx)
                assert result.unknown_mass == want_unknown, (i, s, a_idx)
                mass = sum(p for _, p in result.entries) + result.unknown_mass
                assert abs(mass - 1.0) <= 1e-9


def test_c7_warm_start_matches_value_iteration(lava_spec, lava_knowledge):
    spec = lava_spec
    k, _ = lava_knowledge
    q = init_q_table(k, spec.states, spec.actions, spec.gamma,
                     iterations=1000, terminal=spec.is_terminal)
    want = oracles.advice_q(spec.gamma)
    worst = max(abs(q.get(s, a) - want[(s, a)])
                for s in oracles.grid_states() for a in range(4))
    assert worst < 1e-6

    checked = check_source(PARTIAL_UP_ADVICE, str(ASSETS / "partial_up.rlang"),
                           None, spec.groundings)
    k_gap, _ = compile_knowledge(checked)
    q_gap = init_q_table(k_gap, spec.states, spec.actions, spec.gamma,
                         iterations=1000, terminal=spec.is_terminal)
    want_gap, written = oracles.partial_advice_q(spec.gamma)
    assert len(written) == 48
    for s in oracles.grid_states():
        for a in range(4):
            if (s, a) in written:
                assert abs(q_gap.get(s, a) - want_gap[(s, a)]) < 1e-6
            else:
                # pairs the advice says nothing about are never touched
                assert q_gap.get(s, a) == 0.0


def test_c8_gradient_check_and_mixing_gain(tmp_path):
    # only the linear policy ships; nothing here exercises neural nets
    rng = np.random.default_rng(7)
    policy = LinearSoftmaxPolicy(4, 2)
    worst = 0.0
    for _ in range(100):
        policy.weights = rng.normal(scale=0.5, size=policy.weights.shape)
        s = rng.normal(size=4)
        a = int(rng.integers(2))
        analytic = policy.log_prob_gradient(s, a)

        def log_prob(w, s=s, a=a):
            saved = policy.weights
            policy.weights = w
            try:
                return policy.log_prob(s, a)
            finally:
                policy.weights = saved

        numeric = oracles.central_difference_gradient(log_prob, policy.weights)
        worst = max(worst, float(np.abs(analytic - numeric).max()))
    assert worst <= 1e-5

    def cartpole_run(name, beta0):
        cfg = ExperimentConfig(
            env="cart_pole",
            agent="mixing-pg",
            seeds=SEEDS,
            episodes=100,
            output=str(tmp_path / name),
            hyperparameters=Hyperparameters(beta0=beta0, decay=0.99),
        )
        return _curves(run_experiment(cfg))

    mixed = cartpole_run("mixed.csv", 0.7)
    plain = cartpole_run("plain.csv", 0.0)
    for seed, (with_advice, without) in enumerate(zip(mixed, plain)):
        assert sum(with_advice) / 100 > sum(without) / 100, seed


def test_c9_property_suite(corpus_files, lava_spec, tmp_path):
    # parse/pretty round-trip over the whole corpus
    for path in corpus_files:
        source = path.read_text(encoding="utf-8")
        first = parse_program(source, str(path))
        again = parse_program(pretty_print(first), str(path))
        assert again.declarations == first.declarations, path.name

    # arithmetic and logic absorb unknown operands
    vocab = tmp_path / "probe.vocab.json"
    vocab.write_text(json.dumps({"vocabulary": [
        {"name": "hidden", "kind": "feature", "key": "probe.hidden", "dim": 1},
    ]}))
    source = "\n".join([
        'import "probe.vocab.json"',
        "",
        "Factor x := S[0:1]",
        "Feature shifted := hidden + x",
        "Feature scaled := hidden * 0",
        "Proposition beyond := hidden > 100",
        "Proposition guarded := x > 0 and hidden > 0",
        "Proposition hedged := x > 0 or hidden > 0",
        "",
    ])
    checked = check_source(source, str(tmp_path / "probe.rlang"), None,
                           {"probe.hidden": lambda ctx: UNKNOWN})
    for name in ("shifted", "scaled", "beyond", "guarded", "hedged"):
        assert eval_name(checked, name, s=(3.0,)) is UNKNOWN, name

    # rewards add over whichever referenced effects contribute
    for i in range(200):
        rng = random.Random(5000 + i)
        model = oracles.random_reward_pair(rng)
        k, _ = compile_knowledge(check_source(oracles.render_model(model)))
        for s in model.states():
            for a_idx in range(model.n_actions):
                want = oracles.model_reward(model, model.main, s, a_idx)
                got = k.reward(s, a_idx, s)
                if want is None:
                    assert got is UNKNOWN
                else:
                    assert got == pytest.approx(want)

    # restrictions hold over a long exploratory rollout
    spec = lava_spec
    checked = check_source(KEEP_OUT_ADVICE, str(ASSETS / "keep_out.rlang"),
                           None, spec.groundings)
    _, solution = compile_knowledge(checked)
    q = QTable(len(spec.actions))
    rng = random.Random(11)
    s = spec.reset(rng)
    fired = 0
    for _ in range(10_000):
        names = solution.restrictions(s)
        restricted = frozenset(spec.action_index(spec.action_named(n)) for n in names)
        fired += bool(restricted)
        a = epsilon_greedy(q, s, 1.0, rng, restricted)
        assert a not in restricted
        s, _, done = spec.step(s, a, rng)
        if done:
            s = spec.reset(rng)
    assert fired > 500  # the guard has to have actually mattered

    # the same config writes byte-identical curves
    def run_once(name):
        cfg = ExperimentConfig(env="lava_gap", agent="uninformed", seeds=(0, 1),
                               episodes=20, output=str(tmp_path / name))
        return pathlib.Path(run_experiment(cfg)).read_bytes()

    assert run_once("first.csv") == run_once("second.csv")
