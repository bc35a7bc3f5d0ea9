"""Instances and the double-peaked cost model, in exact rational arithmetic.

Every agent sits at a location ``x`` and has two ideal points (peaks) for the
facility, ``x - b_left`` and ``x + b_right``.  Her cost is ``c`` at either peak
and grows with unit slope away from the peak on the same side of ``x``::

    cost(x, y) = c + |x - b_left - y|     if y <= x
                 c + |x + b_right - y|    if y >  x

With ``b_left == b_right`` the cost is continuous; otherwise it jumps by
``|b_left - b_right|`` when ``y`` crosses ``x``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import EmptyInstance, InvalidLottery, InvalidParams, NonSymmetricParams

Rational = Fraction
RationalLike = Union[Fraction, int, str]

__all__ = [
    "Rational",
    "RationalLike",
    "as_rational",
    "format_rational",
    "Objective",
    "CostParams",
    "Instance",
    "Lottery",
    "normalize",
    "agent_cost",
    "agent_cost_right_limit",
    "social_cost",
    "max_cost",
    "expected_cost",
    "expected_objective",
    "objective_value",
]


def as_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, Fractions and text such as ``"7"``, ``"-3/4"`` or ``"3.1"``
    (finite decimals are converted exactly).  Floats are refused because they
    usually carry binary rounding the caller did not intend.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a string or Fraction")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(q: Fraction, decimal: int | None = None) -> str:
    """Render ``q`` as ``p/q`` (or ``p`` for integers).

    With ``decimal`` set, render a rounded decimal with that many digits after
    the point, prefixed by ``~`` so it is never mistaken for an exact value.
    """
    if decimal is None:
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    scaled = round(q * 10**decimal)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**decimal)
    body = f"{whole}.{frac:0{decimal}d}" if decimal > 0 else str(whole)
    return f"~{sign}{body}"


class Objective(str, enum.Enum):
    SC = "sc"
    MC = "mc"

    @classmethod
    def parse(cls, text: Union[str, "Objective"]) -> "Objective":
        if isinstance(text, Objective):
            return text
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown objective {text!r}; expected 'sc' or 'mc'") from None


@dataclass(frozen=True)
class CostParams:
    """Peak offsets and the minimum cost, all strictly positive."""

    b_left: Fraction
    b_right: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("b_left", "b_right", "c"):
            value = as_rational(getattr(self, name))
            if value <= 0:
                raise InvalidParams(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def symmetric(cls, b: RationalLike, c: RationalLike) -> "CostParams":
        return cls(b, b, c)

    @property
    def is_symmetric(self) -> bool:
        return self.b_left == self.b_right

    @property
    def b(self) -> Fraction:
        """The common peak offset; only defined for symmetric params."""
        if not self.is_symmetric:
            raise NonSymmetricParams(
                f"peaks are not equidistant (b_left={self.b_left}, b_right={self.b_right})"
            )
        return self.b_left

    @property
    def spread(self) -> Fraction:
        """Distance between an agent's two peaks."""
        return self.b_left + self.b_right

    def describe(self) -> str:
        if self.is_symmetric:
            return f"b={format_rational(self.b_left)};c={format_rational(self.c)}"
        return (
            f"b_left={format_rational(self.b_left)};"
            f"b_right={format_rational(self.b_right)};c={format_rational(self.c)}"
        )


@dataclass(frozen=True)
class Instance:
    """A location profile, sorted, remembering where each report came from.

    ``origin_index[k]`` is the 0-based input position of the agent occupying
    sorted slot ``k``.  Use :func:`normalize` to build one.
    """

    params: CostParams
    locations: tuple[Fraction, ...]
    origin_index: tuple[int, ...]

    def __post_init__(self):
        if not self.locations:
            raise EmptyInstance("an instance needs at least one agent")
        if len(self.origin_index) != len(self.locations):
            raise ValueError("origin_index must have one entry per location")
        if sorted(self.origin_index) != list(range(len(self.locations))):
            raise ValueError("origin_index must be a permutation of 0..n-1")
        if any(a > b for a, b in zip(self.locations, self.locations[1:])):
            raise ValueError("locations must be nondecreasing")

    @property
    def n(self) -> int:
        return len(self.locations)

    def raw_locations(self) -> tuple[Fraction, ...]:
        """Reports in their original input order."""
        raw: list[Fraction] = [Fraction(0)] * self.n
        for slot, origin in enumerate(self.origin_index):
            raw[origin] = self.locations[slot]
        return tuple(raw)

    def location_of(self, agent: int) -> Fraction:
        """True location of the agent with input position ``agent`` (0-based)."""
        return self.locations[self.origin_index.index(agent)]

    def with_report(self, agent: int, report: RationalLike) -> "Instance":
        """Profile in which input agent ``agent`` reports ``report`` instead."""
        return self.with_reports({agent: report})

    def with_reports(self, reports: dict[int, RationalLike]) -> "Instance":
        raw = list(self.raw_locations())
        for agent, report in reports.items():
            if not 0 <= agent < self.n:
                raise IndexError(f"no agent {agent} in an instance of size {self.n}")
            raw[agent] = as_rational(report)
        return normalize(raw, self.params)

    def shifted(self, t: RationalLike) -> "Instance":
        t = as_rational(t)
        return Instance(self.params, tuple(x + t for x in self.locations), self.origin_index)

    def describe(self) -> str:
        return "(" + ", ".join(format_rational(x) for x in self.raw_locations()) + ")"


def normalize(raw_locations: Iterable[RationalLike], params: CostParams) -> Instance:
    """Sort the reports (stably) and record the permutation."""
    raw = [as_rational(x) for x in raw_locations]
    if not raw:
        raise EmptyInstance("an instance needs at least one agent")
    if not isinstance(params, CostParams):
        raise InvalidParams("params must be a CostParams")
    order = sorted(range(len(raw)), key=lambda i: raw[i])
    return Instance(params, tuple(raw[i] for i in order), tuple(order))


@dataclass(frozen=True)
class Lottery:
    """Finite distribution over facility points.

    Atoms are ``(point, probability)`` pairs with strictly increasing points
    and positive probabilities summing to exactly one.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise InvalidLottery("a lottery needs at least one atom")
        points = [p for p, _ in self.atoms]
        if any(a >= b for a, b in zip(points, points[1:])):
            raise InvalidLottery("atom points must be strictly increasing")
        if any(prob <= 0 for _, prob in self.atoms):
            raise InvalidLottery("atom probabilities must be positive")
        if sum(prob for _, prob in self.atoms) != 1:
            raise InvalidLottery("atom probabilities must sum to 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[RationalLike, RationalLike]]) -> "Lottery":
        """Build a lottery, merging atoms at equal points."""
        merged: dict[Fraction, Fraction] = {}
        for point, prob in pairs:
            point, prob = as_rational(point), as_rational(prob)
            merged[point] = merged.get(point, Fraction(0)) + prob
        return cls(tuple(sorted((p, q) for p, q in merged.items() if q != 0)))

    @classmethod
    def point(cls, y: RationalLike) -> "Lottery":
        return cls(((as_rational(y), Fraction(1)),))

    @property
    def is_deterministic(self) -> bool:
        return len(self.atoms) == 1

    @property
    def support(self) -> tuple[Fraction, ...]:
        return tuple(p for p, _ in self.atoms)

    def shifted(self, t: RationalLike) -> "Lottery":
        t = as_rational(t)
        return Lottery(tuple((p + t, q) for p, q in self.atoms))

    def describe(self, decimal: int | None = None) -> str:
        if self.is_deterministic:
            return format_rational(self.atoms[0][0], decimal)
        return "{" + ", ".join(
            f"{format_rational(p, decimal)} w.p. {format_rational(q)}" for p, q in self.atoms
        ) + "}"


def agent_cost(params: CostParams, x: Fraction, y: Fraction) -> Fraction:
    # y == x is charged on the left branch
    if y <= x:
        return params.c + abs(x - params.b_left - y)
    return params.c + abs(x + params.b_right - y)


def agent_cost_right_limit(params: CostParams, x: Fraction, y: Fraction) -> Fraction:
    """Limit of the cost as the facility approaches ``y`` from the right.

    Differs from :func:`agent_cost` only at ``y == x`` with asymmetric peaks.
    """
    if y < x:
        return params.c + abs(x - params.b_left - y)
    return params.c + abs(x + params.b_right - y)


def social_cost(instance: Instance, y: RationalLike) -> Fraction:
    y = as_rational(y)
    params = instance.params
    return sum((agent_cost(params, x, y) for x in instance.locations), Fraction(0))


def max_cost(instance: Instance, y: RationalLike) -> Fraction:
    y = as_rational(y)
    params = instance.params
    return max(agent_cost(params, x, y) for x in instance.locations)


def objective_value(instance: Instance, y: RationalLike, objective: Objective) -> Fraction:
    if Objective.parse(objective) is Objective.SC:
        return social_cost(instance, y)
    return max_cost(instance, y)


def expected_cost(params: CostParams, x: RationalLike, lottery: Lottery) -> Fraction:
    x = as_rational(x)
    return sum((prob * agent_cost(params, x, point) for point, prob in lottery.atoms), Fraction(0))


def expected_objective(instance: Instance, lottery: Lottery, objective: Objective) -> Fraction:
    objective = Objective.parse(objective)
    return sum(
        (prob * objective_value(instance, point, objective) for point, prob in lottery.atoms),
        Fraction(0),
    )
