"""Command-line front end.

Exit codes: 0 clean, 1 program diagnostics, 2 usage or config problems.
"""

from __future__ import annotations

import sys

import click

from .envs import REGISTRY, load_env_program
from .errors import ConfigError, RLangError
from .experiments import load_config, run_experiment
from .knowledge import compile_knowledge, dump_knowledge
from .loader import load_program
from .runtime import UNKNOWN, ActionVal
from .vocab import VocabularyRegistry, load_vocabulary


@click.group()
def main():
    """Check advice programs, query their compiled knowledge, and run
    seeded learning experiments."""


def _registry(vocab_paths, env_name):
    registry = VocabularyRegistry()
    for path in vocab_paths:
        registry.add_all(load_vocabulary(path))
    groundings = None
    if env_name is not None:
        if env_name not in REGISTRY:
            raise click.UsageError(f"unknown environment {env_name!r}; choose from {sorted(REGISTRY)}")
        groundings = REGISTRY[env_name]().groundings
    return registry, groundings


def _load(file, vocab_paths, env_name):
    if file is None:
        if env_name is None:
            raise click.UsageError("give a program file or --env")
        return load_env_program(REGISTRY[env_name]())
    registry, groundings = _registry(vocab_paths, env_name)
    return load_program(file, registry=registry, groundings=groundings)


def _fail(err: RLangError):
    click.echo(err.diagnostic(), err=True)
    sys.exit(1)


@main.command()
@click.argument("file", required=False)
@click.option("--vocab", multiple=True, help="Extra vocabulary JSON files.")
@click.option("--env", "env_name", default=None, help="Bind a built-in environment's vocabulary and groundings.")
def check(file, vocab, env_name):
    """Parse and typecheck a program; print one diagnostic per problem."""
    try:
        checked = _load(file, vocab, env_name)
    except RLangError as err:
        _fail(err)
    click.echo(f"ok: {len(checked.program.declarations)} declarations")


def _parse_state(text):
    if text is None:
        return None
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise click.UsageError(f"state must be comma-separated numbers, got {text!r}")


@main.command()
@click.argument("file", required=False)
@click.option("--state", required=True, help="Comma-separated state vector, e.g. 2,3.")
@click.option("--action", "action_name", default=None, help="Action name; with no --next prints the transition.")
@click.option("--next", "next_state", default=None, help="Next state; prints the reward for (s, a, s').")
@click.option("--vocab", multiple=True)
@click.option("--env", "env_name", default=None)
def query(file, state, action_name, next_state, vocab, env_name):
    """Query compiled knowledge: transition, reward, or the advice policy."""
    try:
        checked = _load(file, vocab, env_name)
        k, solution = compile_knowledge(checked)
        s = _parse_state(state)
        if action_name is None:
            click.echo(str(solution.policy(s)))
            return
        sym = checked.lookup(action_name)
        if sym is None or not isinstance(sym.value, ActionVal):
            raise click.UsageError(f"unknown action {action_name!r}")
        a = sym.value
        nxt = _parse_state(next_state)
        if nxt is None:
            click.echo(str(k.transition(s, a)))
        else:
            r = k.reward(s, a, nxt)
            click.echo("unknown" if r is UNKNOWN else f"{r:g}")
    except RLangError as err:
        _fail(err)


@main.command()
@click.argument("config", type=click.Path(exists=True))
def run(config):
    """Run the experiment described by a JSON config; write the CSV."""
    try:
        cfg = load_config(config)
        path = run_experiment(cfg)
    except ConfigError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(2)
    except RLangError as err:
        _fail(err)
    click.echo(path)


@main.command("dump-knowledge")
@click.argument("file", required=False)
@click.option("--vocab", multiple=True)
@click.option("--env", "env_name", default=None)
def dump(file, vocab, env_name):
    """Print a deterministic summary of everything a program provides."""
    try:
        checked = _load(file, vocab, env_name)
    except RLangError as err:
        _fail(err)
    click.echo(dump_knowledge(checked))


if __name__ == "__main__":
    main()
