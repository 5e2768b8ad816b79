"""Small seeded environments with paired advice programs."""

from .base import EnvSpec, load_env_program
from .classic_control import cart_pole, mountain_car
from .lava_gap import lava_gap
from .taxi import taxi_flat

__all__ = [
    "EnvSpec",
    "cart_pole",
    "lava_gap",
    "load_env_program",
    "mountain_car",
    "taxi_flat",
]

REGISTRY = {
    "lava_gap": lava_gap,
    "taxi": taxi_flat,
    "mountain_car": mountain_car,
    "cart_pole": cart_pole,
}
