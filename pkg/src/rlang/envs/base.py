"""Environment contract shared by every task."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Callable

from ..loader import check_source
from ..runtime import ActionVal
from ..semantics import CheckedProgram
from ..vocab import VocabularyRegistry, load_vocabulary

State = tuple[float, ...]


@dataclass(frozen=True)
class EnvSpec:
    """A task as a pure function bundle: step never mutates anything, all
    randomness comes in through the rng argument."""

    name: str
    layout: dict  # factor label -> state indices
    actions: tuple[ActionVal, ...]
    reset: Callable  # rng -> state
    step: Callable  # (state, action index, rng) -> (state, reward, terminal)
    gamma: float
    max_steps: int
    program_file: str
    vocab_file: str
    groundings: dict = field(default_factory=dict)  # key -> callable(ctx)
    states: tuple | None = None  # full enumeration, when tractable
    is_terminal: Callable | None = None

    def action_index(self, action: ActionVal) -> int:
        for i, a in enumerate(self.actions):
            if a == action:
                return i
        raise KeyError(f"action {action!r} is not one of {self.name}'s actions")

    def action_named(self, name: str) -> ActionVal:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(f"{self.name} has no action named {name!r}")

    def with_step_cap(self, cap: int) -> "EnvSpec":
        return replace(self, max_steps=cap)

    def make_registry(self) -> VocabularyRegistry:
        registry = VocabularyRegistry()
        registry.add_all(load_vocabulary(str(_asset(self.vocab_file))))
        for key, fn in self.groundings.items():
            registry.register_grounding(key, fn)
        return registry


def _asset(name: str):
    return resources.files("rlang.envs") / "assets" / name


def load_env_program(spec: EnvSpec) -> CheckedProgram:
    """Check the advice program shipped with ``spec``, groundings bound."""
    path = _asset(spec.program_file)
    return check_source(path.read_text(encoding="utf-8"), str(path), None, spec.groundings)
