"""Grid task with a wall, a lava gap, and slippery moves.

Coordinates run 1..6 on both axes. The first state component is the axis
``up`` increments. Moves fail with probability 1/3, replaying one of the
other three directions chosen uniformly; wall and boundary rules apply to
the replayed move too. Stepping into lava ends the episode at -1, the
goal ends it at +1.
"""

from __future__ import annotations

from ..runtime import ActionVal, Bool
from .base import EnvSpec

SIZE = 6
START = (1.0, 1.0)
WALL = (3.0, 1.0)
GOAL = (5.0, 1.0)
LAVA = frozenset({(3.0, 2.0), (1.0, 4.0), (2.0, 4.0), (2.0, 5.0)})

ACTIONS = (
    ActionVal((0.0,), "up"),
    ActionVal((1.0,), "down"),
    ActionVal((2.0,), "left"),
    ActionVal((3.0,), "right"),
)
_DELTAS = ((1.0, 0.0), (-1.0, 0.0), (0.0, -1.0), (0.0, 1.0))


def _move(s, a_idx: int):
    dx, dy = _DELTAS[a_idx]
    nx, ny = s[0] + dx, s[1] + dy
    if not (1.0 <= nx <= SIZE and 1.0 <= ny <= SIZE) or (nx, ny) == WALL:
        return s
    return (nx, ny)


def _blocked(s, a_idx: int) -> bool:
    return _move(s, a_idx) == tuple(s)


def _reset(rng):
    return START


def _step(s, a_idx: int, rng):
    s = (float(s[0]), float(s[1]))
    if rng.random() < 1.0 / 3.0:
        others = [i for i in range(4) if i != a_idx]
        a_idx = others[int(rng.random() * 3.0)]
    nxt = _move(s, a_idx)
    if nxt in LAVA:
        return nxt, -1.0, True
    if nxt == GOAL:
        return nxt, 1.0, True
    return nxt, 0.0, False


def _is_terminal(s) -> bool:
    s = (float(s[0]), float(s[1]))
    return s in LAVA or s == GOAL


def _all_states():
    # the wall cell stays in the enumeration; it is simply never entered
    return tuple(
        (float(x), float(y)) for x in range(1, SIZE + 1) for y in range(1, SIZE + 1)
    )


def _ground_at_wall(ctx):
    if ctx.a is None:
        raise ValueError("at_wall reads the attempted action")
    return Bool(_blocked(ctx.s, ctx.a.as_index()))


GROUNDINGS = {
    "lava_gap.at_wall": _ground_at_wall,
    "lava_gap.in_lava": lambda ctx: Bool(ctx.s in LAVA),
    "lava_gap.at_goal": lambda ctx: Bool(ctx.s == GOAL),
}


def lava_gap() -> EnvSpec:
    return EnvSpec(
        name="lava_gap",
        layout={"x": (0,), "y": (1,)},
        actions=ACTIONS,
        reset=_reset,
        step=_step,
        gamma=0.95,
        max_steps=100,
        program_file="lava_gap.rlang",
        vocab_file="lava_gap.vocab.json",
        groundings=GROUNDINGS,
        states=_all_states(),
        is_terminal=_is_terminal,
    )
