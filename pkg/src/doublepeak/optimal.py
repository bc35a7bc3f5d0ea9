"""Exact minimization of the social and maximum cost over the real line.

Both objectives are piecewise linear in the facility location ``y`` with unit
slopes per agent, so their minima sit on a finite candidate set:

* social cost: the kinks ``x - b_left``, ``x``, ``x + b_right`` of each agent;
* maximum cost: those kinks plus every midpoint of two peaks, which is where a
  falling piece of one agent's cost can cross a rising piece of another's.

:func:`grid_scan` is a deliberately naive oracle over an arithmetic grid and is
only meant for cross-checking the enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable

from .core import (
    Instance,
    Objective,
    RationalLike,
    agent_cost_right_limit,
    as_rational,
    objective_value,
)
from .errors import InvalidRange

__all__ = [
    "OptResult",
    "sc_candidates",
    "mc_candidates",
    "peak_set",
    "optimal_social",
    "optimal_max",
    "optimal",
    "minimize_over",
    "default_grid",
    "grid_scan",
]


@dataclass(frozen=True)
class OptResult:
    """Leftmost minimizer among the examined points.

    ``infimum`` equals ``value`` whenever the minimum is attained.  With
    asymmetric peaks the objective can dip just right of an agent's location
    without attaining the dip; ``infimum`` then records the lower one-sided
    limit found at such a point.
    """

    location: Fraction
    value: Fraction
    candidates_examined: int
    infimum: Fraction | None = None

    def __post_init__(self):
        if self.infimum is None:
            object.__setattr__(self, "infimum", self.value)

    @property
    def attained(self) -> bool:
        return self.infimum == self.value


def peak_set(instance: Instance) -> list[Fraction]:
    p = instance.params
    return sorted({x - p.b_left for x in instance.locations} | {x + p.b_right for x in instance.locations})


def sc_candidates(instance: Instance) -> list[Fraction]:
    p = instance.params
    points: set[Fraction] = set()
    for x in instance.locations:
        points.update((x - p.b_left, x, x + p.b_right))
    return sorted(points)


def mc_candidates(instance: Instance) -> list[Fraction]:
    peaks = peak_set(instance)
    points = set(sc_candidates(instance))
    for i, p in enumerate(peaks):
        for q in peaks[i + 1:]:
            points.add((p + q) / 2)
    return sorted(points)


def minimize_over(instance: Instance, objective: Objective, points: Iterable[Fraction]) -> OptResult:
    """Leftmost minimizer of ``objective`` over ``points``."""
    ordered = sorted(set(points))
    if not ordered:
        raise InvalidRange("no points to minimize over")
    best_y = ordered[0]
    best = objective_value(instance, best_y, objective)
    for y in ordered[1:]:
        value = objective_value(instance, y, objective)
        if value < best:
            best_y, best = y, value
    return OptResult(best_y, best, len(ordered))


def _right_limit(instance: Instance, y: Fraction, objective: Objective) -> Fraction:
    costs = (agent_cost_right_limit(instance.params, x, y) for x in instance.locations)
    if objective is Objective.SC:
        return sum(costs, Fraction(0))
    return max(costs)


def _optimal(instance: Instance, objective: Objective, candidates: list[Fraction]) -> OptResult:
    result = minimize_over(instance, objective, candidates)
    if instance.params.b_right >= instance.params.b_left:
        # the right limit at each location is never below the value there
        return result
    infimum = min(
        [result.value] + [_right_limit(instance, x, objective) for x in set(instance.locations)]
    )
    return OptResult(result.location, result.value, result.candidates_examined, infimum)


def optimal_social(instance: Instance) -> OptResult:
    return _optimal(instance, Objective.SC, sc_candidates(instance))


def optimal_max(instance: Instance) -> OptResult:
    return _optimal(instance, Objective.MC, mc_candidates(instance))


def optimal(instance: Instance, objective: Objective) -> OptResult:
    if Objective.parse(objective) is Objective.SC:
        return optimal_social(instance)
    return optimal_max(instance)


def default_grid(instance: Instance) -> tuple[Fraction, Fraction, Fraction]:
    """``(lo, hi, step)`` covering every peak with margin to spare."""
    spread = instance.params.spread
    lo = instance.locations[0] - 3 * spread
    hi = instance.locations[-1] + 3 * spread
    return lo, hi, spread / 64


def grid_scan(
    instance: Instance,
    objective: Objective,
    lo: RationalLike | None = None,
    hi: RationalLike | None = None,
    step: RationalLike | None = None,
) -> OptResult:
    """Evaluate the objective at ``lo, lo + step, ...`` up to ``hi``."""
    objective = Objective.parse(objective)
    d_lo, d_hi, d_step = default_grid(instance)
    lo = d_lo if lo is None else as_rational(lo)
    hi = d_hi if hi is None else as_rational(hi)
    step = d_step if step is None else as_rational(step)
    if not lo < hi:
        raise InvalidRange(f"need lo < hi, got [{lo}, {hi}]")
    if step <= 0:
        raise InvalidRange(f"step must be positive, got {step}")

    # Scale to a common denominator so the scan runs on plain integers.
    params = instance.params
    scale = lcm(*(q.denominator for q in (lo, step, params.b_left, params.b_right, params.c, *instance.locations)))
    xs = [int(x * scale) for x in instance.locations]
    bl, br, c = int(params.b_left * scale), int(params.b_right * scale), int(params.c * scale)
    combine = sum if objective is Objective.SC else max
    y0, dy = int(lo * scale), int(step * scale)
    steps = int((hi - lo) // step)

    best_k, best = 0, None
    for k in range(steps + 1):
        y = y0 + k * dy
        value = combine([c + abs(x - bl - y) if y <= x else c + abs(x + br - y) for x in xs])
        if best is None or value < best:
            best_k, best = k, value
    return OptResult(lo + best_k * step, Fraction(best, scale), steps + 1)
