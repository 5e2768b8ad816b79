"""Mountain car and cart pole with the standard published constants.

Both integrate with a forward Euler step; any change to the constants
below fails the golden trajectory tests.
"""

from __future__ import annotations

import math

from ..runtime import ActionVal
from .base import EnvSpec

# mountain car
MC_MIN_POS, MC_MAX_POS = -1.2, 0.6
MC_MAX_SPEED = 0.07
MC_GOAL_POS = 0.5
MC_FORCE = 0.001
MC_GRAVITY = 0.0025

MC_ACTIONS = (
    ActionVal((0.0,), "go_left"),
    ActionVal((1.0,), "coast"),
    ActionVal((2.0,), "go_right"),
)

# cart pole
CP_GRAVITY = 9.8
CP_MASS_CART = 1.0
CP_MASS_POLE = 0.1
CP_TOTAL_MASS = CP_MASS_CART + CP_MASS_POLE
CP_HALF_LENGTH = 0.5
CP_POLE_MASS_LENGTH = CP_MASS_POLE * CP_HALF_LENGTH
CP_FORCE_MAG = 10.0
CP_TAU = 0.02
CP_ANGLE_LIMIT = 15.0 * math.pi / 180.0
CP_X_LIMIT = 2.4

CP_ACTIONS = (
    ActionVal((0.0,), "move_left"),
    ActionVal((1.0,), "move_right"),
)


def _mc_reset(rng):
    return (-0.6 + 0.2 * rng.random(), 0.0)


def _mc_step(s, a_idx: int, rng):
    pos, vel = float(s[0]), float(s[1])
    vel += MC_FORCE * (a_idx - 1) - MC_GRAVITY * math.cos(3.0 * pos)
    vel = min(MC_MAX_SPEED, max(-MC_MAX_SPEED, vel))
    pos += vel
    pos = min(MC_MAX_POS, max(MC_MIN_POS, pos))
    if pos == MC_MIN_POS and vel < 0.0:
        vel = 0.0
    return (pos, vel), -1.0, pos >= MC_GOAL_POS


def mountain_car() -> EnvSpec:
    return EnvSpec(
        name="mountain_car",
        layout={"position": (0,), "velocity": (1,)},
        actions=MC_ACTIONS,
        reset=_mc_reset,
        step=_mc_step,
        gamma=1.0,
        max_steps=200,
        program_file="mountain_car.rlang",
        vocab_file="mountain_car.vocab.json",
        is_terminal=lambda s: float(s[0]) >= MC_GOAL_POS,
    )


def _cp_reset(rng):
    return tuple(-0.05 + 0.1 * rng.random() for _ in range(4))


def _cp_step(s, a_idx: int, rng):
    x, x_dot, theta, theta_dot = (float(v) for v in s)
    force = CP_FORCE_MAG if a_idx == 1 else -CP_FORCE_MAG
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    temp = (force + CP_POLE_MASS_LENGTH * theta_dot**2 * sin_t) / CP_TOTAL_MASS
    theta_acc = (CP_GRAVITY * sin_t - cos_t * temp) / (
        CP_HALF_LENGTH * (4.0 / 3.0 - CP_MASS_POLE * cos_t**2 / CP_TOTAL_MASS)
    )
    x_acc = temp - CP_POLE_MASS_LENGTH * theta_acc * cos_t / CP_TOTAL_MASS
    x += CP_TAU * x_dot
    x_dot += CP_TAU * x_acc
    theta += CP_TAU * theta_dot
    theta_dot += CP_TAU * theta_acc
    nxt = (x, x_dot, theta, theta_dot)
    done = abs(x) > CP_X_LIMIT or abs(theta) > CP_ANGLE_LIMIT
    return nxt, 1.0, done


def cart_pole() -> EnvSpec:
    return EnvSpec(
        name="cart_pole",
        layout={
            "cart_position": (0,),
            "cart_velocity": (1,),
            "pole_angle": (2,),
            "pole_angular_velocity": (3,),
        },
        actions=CP_ACTIONS,
        reset=_cp_reset,
        step=_cp_step,
        gamma=0.99,
        max_steps=200,
        program_file="cart_pole.rlang",
        vocab_file="cart_pole.vocab.json",
        is_terminal=lambda s: abs(float(s[0])) > CP_X_LIMIT or abs(float(s[2])) > CP_ANGLE_LIMIT,
    )
