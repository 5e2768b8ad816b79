"""Two-passenger taxi on a 5x5 grid, one seat.

State layout (13 components):
    0,1   taxi x, y
    2     carrying flag (any passenger aboard)
    3..7  passenger 0: x, y, dest x, dest y, aboard flag
    8..12 passenger 1: same

Each reset seats the taxi at (2,2) and deals every passenger a start
depot and a distinct destination depot. Reward is 1, and the episode
ends, once both passengers sit at their destinations.
"""

from __future__ import annotations

from ..runtime import ActionVal, Bool
from .base import EnvSpec

GRID = 5
DEPOTS = ((0.0, 0.0), (0.0, 4.0), (4.0, 0.0), (4.0, 3.0))
TAXI_START = (2.0, 2.0)

ACTIONS = (
    ActionVal((0.0,), "move_n"),
    ActionVal((1.0,), "move_s"),
    ActionVal((2.0,), "move_e"),
    ActionVal((3.0,), "move_w"),
    ActionVal((4.0,), "pick_up"),
    ActionVal((5.0,), "drop_off"),
)
_MOVES = {0: (0.0, 1.0), 1: (0.0, -1.0), 2: (1.0, 0.0), 3: (-1.0, 0.0)}

_P = (3, 8)  # offset of each passenger block


def _reset(rng):
    s = [TAXI_START[0], TAXI_START[1], 0.0] + [0.0] * 10
    for off in _P:
        start = DEPOTS[int(rng.random() * 4.0)]
        rest = [d for d in DEPOTS if d != start]
        dest = rest[int(rng.random() * 3.0)]
        s[off], s[off + 1] = start
        s[off + 2], s[off + 3] = dest
        s[off + 4] = 0.0
    return tuple(s)


def _delivered(s, off: int) -> bool:
    return s[off + 4] == 0.0 and (s[off], s[off + 1]) == (s[off + 2], s[off + 3])


def _all_delivered(s) -> bool:
    return all(_delivered(s, off) for off in _P)


def _step(s, a_idx: int, rng):
    s = [float(v) for v in s]
    if a_idx in _MOVES:
        dx, dy = _MOVES[a_idx]
        s[0] = min(float(GRID - 1), max(0.0, s[0] + dx))
        s[1] = min(float(GRID - 1), max(0.0, s[1] + dy))
        for off in _P:
            if s[off + 4] == 1.0:
                s[off], s[off + 1] = s[0], s[1]
    elif a_idx == 4:  # pick up the co-located waiting passenger, if any
        if s[2] == 0.0:
            for off in _P:
                if s[off + 4] == 0.0 and (s[off], s[off + 1]) == (s[0], s[1]) and not _delivered(s, off):
                    s[off + 4] = 1.0
                    s[2] = 1.0
                    break
    elif a_idx == 5:
        for off in _P:
            if s[off + 4] == 1.0:
                s[off + 4] = 0.0
                s[2] = 0.0
                break
    nxt = tuple(s)
    if _all_delivered(nxt):
        return nxt, 1.0, True
    return nxt, 0.0, False


def _is_terminal(s) -> bool:
    return _all_delivered([float(v) for v in s])


def _nav_action(s, target) -> int | None:
    """One move toward target, or None when already there."""
    if s[0] < target[0]:
        return 2
    if s[0] > target[0]:
        return 3
    if s[1] < target[1]:
        return 0
    if s[1] > target[1]:
        return 1
    return None


def _goto_pickup(off: int):
    def policy(ctx):
        s = ctx.s
        move = _nav_action(s, (s[off], s[off + 1]))
        if move is None:
            return ACTIONS[4]
        return ACTIONS[move]

    return policy


def _goto_dropoff(off: int):
    def policy(ctx):
        s = ctx.s
        move = _nav_action(s, (s[off + 2], s[off + 3]))
        if move is None:
            return ACTIONS[5]
        return ACTIONS[move]

    return policy


GROUNDINGS = {
    "taxi.passenger_in_taxi": lambda ctx: Bool(ctx.s[2] == 1.0),
    "taxi.passenger_0_in_dest": lambda ctx: Bool(_delivered(ctx.s, _P[0])),
    "taxi.passenger_1_in_dest": lambda ctx: Bool(_delivered(ctx.s, _P[1])),
    "taxi.passenger_0_intaxi": lambda ctx: Bool(ctx.s[_P[0] + 4] == 1.0),
    "taxi.passenger_1_intaxi": lambda ctx: Bool(ctx.s[_P[1] + 4] == 1.0),
    "taxi.goto_pickup_0": _goto_pickup(_P[0]),
    "taxi.goto_dropoff_0": _goto_dropoff(_P[0]),
    "taxi.goto_pickup_1": _goto_pickup(_P[1]),
    "taxi.goto_dropoff_1": _goto_dropoff(_P[1]),
}


def taxi_flat() -> EnvSpec:
    return EnvSpec(
        name="taxi",
        layout={
            "taxi_position": (0, 1),
            "carrying": (2,),
            "passenger_0": (3, 4, 5, 6, 7),
            "passenger_1": (8, 9, 10, 11, 12),
        },
        actions=ACTIONS,
        reset=_reset,
        step=_step,
        gamma=0.95,
        max_steps=500,
        program_file="taxi.rlang",
        vocab_file="taxi.vocab.json",
        groundings=GROUNDINGS,
        is_terminal=_is_terminal,
    )
