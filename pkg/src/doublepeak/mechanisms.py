"""Facility location mechanisms as named rules ``Instance -> Lottery``.

All rules here read the sorted profile only, so they are anonymous by
construction.  Deterministic rules return a single-atom lottery.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import Instance, Lottery
from .errors import EmptyInstance, IndexOutOfRange
from .optimal import optimal_max, optimal_social

__all__ = [
    "Mechanism",
    "median_index",
    "m1",
    "m2",
    "kth_peak",
    "opt_sc_mech",
    "opt_mc_mech",
    "MECHANISM_NAMES",
    "get_mechanism",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Mechanism:
    name: str
    apply: Callable[[Instance], Lottery]
    truthful: bool = False  # proven strategyproof / truthful-in-expectation (symmetric peaks)

    def __call__(self, instance: Instance) -> Lottery:
        return self.apply(instance)


def median_index(n: int) -> int:
    """1-based sorted position of the median agent, ties to the left."""
    if n < 1:
        raise EmptyInstance("median of an empty profile")
    return (n + 1) // 2


def m1(instance: Instance) -> Lottery:
    """Fair coin between the two peaks of the median agent."""
    p = instance.params
    x_m = instance.locations[median_index(instance.n) - 1]
    return Lottery(((x_m - p.b_left, HALF), (x_m + p.b_right, HALF)))


def m2(instance: Instance, side: str = "left") -> Lottery:
    """Left peak of the leftmost agent, or right peak of the rightmost one."""
    if side == "left":
        return Lottery.point(instance.locations[0] - instance.params.b_left)
    if side == "right":
        return Lottery.point(instance.locations[-1] + instance.params.b_right)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def kth_peak(instance: Instance, k: int, side: str) -> Lottery:
    """A peak of the k-th smallest report (1-based)."""
    if not 1 <= k <= instance.n:
        raise IndexOutOfRange(f"k={k} outside 1..{instance.n}")
    x_k = instance.locations[k - 1]
    if side == "left":
        return Lottery.point(x_k - instance.params.b_left)
    if side == "right":
        return Lottery.point(x_k + instance.params.b_right)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def opt_sc_mech(instance: Instance) -> Lottery:
    return Lottery.point(optimal_social(instance).location)


def opt_mc_mech(instance: Instance) -> Lottery:
    return Lottery.point(optimal_max(instance).location)


MECHANISM_NAMES = ("m1", "m2-left", "m2-right", "kth-left:<k>", "kth-right:<k>", "opt-sc", "opt-mc")

_FIXED = {
    "m1": Mechanism("m1", m1, truthful=True),
    "m2-left": Mechanism("m2-left", lambda inst: m2(inst, "left"), truthful=True),
    "m2-right": Mechanism("m2-right", lambda inst: m2(inst, "right"), truthful=True),
    "opt-sc": Mechanism("opt-sc", opt_sc_mech),
    "opt-mc": Mechanism("opt-mc", opt_mc_mech),
}

_KTH = re.compile(r"kth-(left|right):(\d+)$")


def get_mechanism(name: str) -> Mechanism:
    """Look a mechanism up by its command-line name."""
    if name in _FIXED:
        return _FIXED[name]
    match = _KTH.match(name)
    if match:
        side, k = match.group(1), int(match.group(2))
        return Mechanism(name, lambda inst: kth_peak(inst, k, side))
    raise KeyError(f"unknown mechanism {name!r}; known: {', '.join(MECHANISM_NAMES)}")
