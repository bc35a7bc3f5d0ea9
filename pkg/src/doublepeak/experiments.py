"""Adversarial instance families and exact approximation ratios.

Each generator builds one of the extremal profiles used to pin down a
mechanism's worst case, with the leftmost agent at 0.  :func:`ratio` divides a
mechanism's expected objective by the optimum; :func:`sweep` runs it along a
family.
"""

from __future__ import annotations

import csv
import itertools
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    CostParams,
    Instance,
    Objective,
    RationalLike,
    as_rational,
    expected_objective,
    format_rational,
    normalize,
)
from .errors import InvalidParams, NonSymmetricParams
from .mechanisms import Mechanism, median_index
from .optimal import optimal

__all__ = [
    "RatioReport",
    "gen_primary",
    "gen_sc_lb",
    "gen_m1_mc_lb",
    "gen_m2_sc_worst",
    "gen_m2_mc_tight",
    "gen_even_lb",
    "gen_opt_not_sp",
    "gen_mc_two_far",
    "Family",
    "FAMILIES",
    "ratio",
    "sweep",
    "parse_grid",
    "RATIO_CSV_COLUMNS",
    "ratio_rows_to_csv",
]


def _symmetric_b(params: CostParams) -> Fraction:
    if not params.is_symmetric:
        raise NonSymmetricParams("this family is defined for equidistant peaks only")
    return params.b


def _positive(name: str, value: RationalLike) -> Fraction:
    value = as_rational(value)
    if value <= 0:
        raise InvalidParams(f"{name} must be positive, got {value}")
    return value


def gen_primary(params: CostParams, eps: RationalLike) -> Instance:
    """Two agents whose inner peaks are ``b + eps`` apart."""
    b = _symmetric_b(params)
    eps = _positive("eps", eps)
    return normalize([0, 3 * b + eps], params)


def gen_sc_lb(n: int, params: CostParams) -> Instance:
    """``k-1`` agents at 0, the median agent at ``b``, the rest at ``2b``."""
    if n < 3:
        raise InvalidParams(f"need n >= 3, got {n}")
    b = _symmetric_b(params)
    k = median_index(n)
    return normalize([0] * (k - 1) + [b] + [2 * b] * (n - k), params)


def gen_m1_mc_lb(n: int, params: CostParams, d: RationalLike) -> Instance:
    """One agent at 0 and ``n-1`` at ``2(b+d)``: the optimum is ``d`` past the first agent's right peak."""
    if n < 2:
        raise InvalidParams(f"need n >= 2, got {n}")
    b = _symmetric_b(params)
    d = _positive("d", d)
    return normalize([0] + [2 * (b + d)] * (n - 1), params)


def gen_mc_two_far(params: CostParams, d: RationalLike) -> Instance:
    """Two agents with inner peaks ``2d`` apart (optimum midway, ``d`` from each)."""
    return gen_m1_mc_lb(2, params, d)


def gen_m2_sc_worst(n: int, params: CostParams, spread: RationalLike) -> Instance:
    """One agent at 0 far to the left of ``n-1`` agents stacked at ``spread``."""
    if n < 2:
        raise InvalidParams(f"need n >= 2, got {n}")
    spread = _positive("spread", spread)
    return normalize([0] + [spread] * (n - 1), params)


def gen_m2_mc_tight(params: CostParams) -> Instance:
    """Right peak of the first agent coincides with the left peak of the second."""
    b = _symmetric_b(params)
    return normalize([0, 2 * b], params)


def gen_even_lb(n: int, params: CostParams) -> Instance:
    if n < 2 or n % 2:
        raise InvalidParams(f"need a positive even n, got {n}")
    b = _symmetric_b(params)
    return normalize([0] * (n // 2) + [2 * b] * (n // 2), params)


def gen_opt_not_sp(params: CostParams, eps: RationalLike) -> Instance:
    """Three agents where the social optimum can be dragged left by agent 1."""
    b = _symmetric_b(params)
    eps = _positive("eps", eps)
    if eps >= b:
        raise InvalidParams(f"need eps < b, got eps={eps}, b={b}")
    return normalize([-2 * b + eps, 0, 3 * b], params)


def _count(n: RationalLike) -> int:
    n = as_rational(n)
    if n.denominator != 1:
        raise InvalidParams(f"agent count must be an integer, got {n}")
    return int(n)


@dataclass(frozen=True)
class Family:
    """A named generator and the extra parameters it takes (besides params)."""

    id: str
    build: Callable[..., Instance]
    args: tuple[str, ...]

    def __call__(self, params: CostParams, **kwargs) -> Instance:
        missing = [a for a in self.args if a not in kwargs]
        if missing:
            raise InvalidParams(f"family {self.id} needs {', '.join(missing)}")
        extra = set(kwargs) - set(self.args)
        if extra:
            raise InvalidParams(f"family {self.id} does not take {', '.join(sorted(extra))}")
        return self.build(params, **kwargs)


FAMILIES: dict[str, Family] = {
    f.id: f
    for f in (
        Family("primary", lambda p, eps: gen_primary(p, eps), ("eps",)),
        Family("sc-lb", lambda p, n: gen_sc_lb(_count(n), p), ("n",)),
        Family("m1-mc-lb", lambda p, n, d: gen_m1_mc_lb(_count(n), p, d), ("n", "d")),
        Family("mc-two-far", lambda p, d: gen_mc_two_far(p, d), ("d",)),
        Family("m2-sc-worst", lambda p, n, spread: gen_m2_sc_worst(_count(n), p, spread), ("n", "spread")),
        Family("m2-mc-tight", lambda p: gen_m2_mc_tight(p), ()),
        Family("even-lb", lambda p, n: gen_even_lb(_count(n), p), ("n",)),
        Family("opt-not-sp", lambda p, eps: gen_opt_not_sp(p, eps), ("eps",)),
    )
}


@dataclass(frozen=True)
class RatioReport:
    mechanism: str
    objective: Objective
    instance: str
    mech_value: Fraction
    opt_value: Fraction
    ratio: Fraction
    generator: str = ""
    params: str = ""

    def csv_row(self) -> dict[str, str]:
        return {
            "mechanism": self.mechanism,
            "objective": self.objective.value,
            "generator": self.generator,
            "params": self.params,
            "mech_value": format_rational(self.mech_value),
            "opt_value": format_rational(self.opt_value),
            "ratio": format_rational(self.ratio),
        }


RATIO_CSV_COLUMNS = ("mechanism", "objective", "generator", "params", "mech_value", "opt_value", "ratio")


def ratio(
    mech: Mechanism,
    instance: Instance,
    objective: Objective,
    generator: str = "",
    params: str = "",
) -> RatioReport:
    objective = Objective.parse(objective)
    mech_value = expected_objective(instance, mech(instance), objective)
    opt_value = optimal(instance, objective).value
    return RatioReport(
        mechanism=mech.name,
        objective=objective,
        instance=instance.describe(),
        mech_value=mech_value,
        opt_value=opt_value,
        ratio=mech_value / opt_value,
        generator=generator,
        params=params or instance.params.describe(),
    )


def parse_grid(text: str) -> list[dict[str, Fraction]]:
    """Expand ``"n=4,10;b=1,2"`` into the cartesian product, last key fastest."""
    axes: list[tuple[str, list[Fraction]]] = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        key, sep, values = part.partition("=")
        if not sep or not values.strip():
            raise ValueError(f"bad grid axis {part!r}; expected key=v1,v2,...")
        key = key.strip().replace("-", "_")
        if any(key == k for k, _ in axes):
            raise ValueError(f"grid axis {key!r} given twice")
        axes.append((key, [as_rational(v) for v in values.split(",")]))
    if not axes:
        return [{}]
    keys = [k for k, _ in axes]
    return [dict(zip(keys, combo)) for combo in itertools.product(*(v for _, v in axes))]


_PARAM_KEYS = ("b", "b_left", "b_right", "c")


def _split_point(point: Mapping[str, Fraction]) -> tuple[CostParams, dict[str, Fraction]]:
    c = point.get("c", Fraction(1))
    if "b" in point:
        if "b_left" in point or "b_right" in point:
            raise InvalidParams("give either b or b_left/b_right, not both")
        params = CostParams.symmetric(point["b"], c)
    else:
        params = CostParams(point.get("b_left", Fraction(1)), point.get("b_right", Fraction(1)), c)
    return params, {k: v for k, v in point.items() if k not in _PARAM_KEYS}


def _describe_point(point: Mapping[str, Fraction], params: CostParams) -> str:
    family_part = [f"{k}={format_rational(v)}" for k, v in point.items() if k not in _PARAM_KEYS]
    return ";".join(family_part + [params.describe()])


def sweep(
    mech: Mechanism,
    objective: Objective,
    family: str,
    grid: Sequence[Mapping[str, RationalLike]] | str,
) -> list[RatioReport]:
    """One :class:`RatioReport` per grid point, in grid order.

    Grid points hold the family's own arguments plus optional ``b``/``c``
    (or ``b_left``/``b_right``/``c``); missing params default to 1.
    """
    if isinstance(grid, str):
        grid = parse_grid(grid)
    fam = FAMILIES[family]
    reports = []
    for raw_point in grid:
        point = {k: as_rational(v) for k, v in raw_point.items()}
        params, args = _split_point(point)
        instance = fam(params, **args)
        reports.append(ratio(mech, instance, objective, family, _describe_point(point, params)))
    return reports


def ratio_rows_to_csv(reports: Iterable[RatioReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RATIO_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()
