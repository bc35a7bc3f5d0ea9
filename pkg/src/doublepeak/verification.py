"""Black-box incentive and axiom checks for any :class:`Mechanism`.

The searches try misreports from a finite candidate set.  A returned
:class:`ViolationReport` is a certificate: it is re-evaluated from scratch in
exact arithmetic before it leaves this module.  Returning ``None`` only means
that no violation exists *within the candidate set*; it is not a proof of
strategyproofness.

Agents are identified by their 0-based position in the original (unsorted)
report list.  Human-readable and CSV renderings number them from 1.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    CostParams,
    Instance,
    Lottery,
    RationalLike,
    as_rational,
    expected_cost,
    format_rational,
    normalize,
)
from .errors import SearchBudgetExceeded
from .mechanisms import Mechanism

__all__ = [
    "UNILATERAL",
    "COALITION",
    "ANONYMITY",
    "POSITION_INVARIANCE",
    "ViolationReport",
    "CertificateError",
    "CandidateSet",
    "SearchResult",
    "deviation_candidates",
    "search_sp",
    "find_sp_violation",
    "find_gsp_violation",
    "check_anonymity",
    "check_position_invariance",
    "recheck",
    "CONSTANT_ZERO",
    "FIRST_REPORT_DICTATOR",
    "DEFAULT_COALITION_BUDGET",
    "CSV_COLUMNS",
]

UNILATERAL = "unilateral"
COALITION = "coalition"
ANONYMITY = "anonymity"
POSITION_INVARIANCE = "position_invariance"

DEFAULT_COALITION_BUDGET = 10**6

CSV_COLUMNS = (
    "kind",
    "mechanism",
    "params",
    "instance",
    "deviators",
    "misreports",
    "cost_before",
    "cost_after",
    "expected",
    "observed",
    "transform",
)


class CertificateError(AssertionError):
    """A violation report failed its exact recheck (a bug in the search)."""


@dataclass(frozen=True)
class ViolationReport:
    kind: str
    mechanism: str
    instance: Instance
    deviators: tuple[int, ...] = ()
    misreports: dict[int, Fraction] = field(default_factory=dict)
    cost_before: dict[int, Fraction] = field(default_factory=dict)
    cost_after: dict[int, Fraction] = field(default_factory=dict)
    # axiom kinds: the lottery the axiom demands vs. the one produced
    expected: Lottery | None = None
    observed: Lottery | None = None
    permutation: tuple[int, ...] | None = None
    shift: Fraction | None = None

    def transform(self) -> str:
        if self.permutation is not None:
            return "permutation " + " ".join(str(i + 1) for i in self.permutation)
        if self.shift is not None:
            return "shift " + format_rational(self.shift)
        return ""

    def describe(self, decimal: int | None = None) -> str:
        fmt = lambda q: format_rational(q, decimal)  # noqa: E731
        lines = [
            f"VIOLATION ({self.kind}) by mechanism {self.mechanism}",
            f"  params:   {self.instance.params.describe()}",
            f"  instance: {self.instance.describe()}",
        ]
        if self.kind in (UNILATERAL, COALITION):
            for agent in self.deviators:
                lines.append(
                    f"  agent {agent + 1} at {fmt(self.instance.location_of(agent))} "
                    f"reports {fmt(self.misreports[agent])}: "
                    f"cost {fmt(self.cost_before[agent])} -> {fmt(self.cost_after[agent])}"
                )
        else:
            lines.append(f"  transform: {self.transform()}")
            lines.append(f"  expected: {self.expected.describe(decimal)}")
            lines.append(f"  observed: {self.observed.describe(decimal)}")
        return "\n".join(lines)

    def csv_row(self) -> dict[str, str]:
        agents = self.deviators
        join = lambda m: " ".join(f"{a + 1}:{format_rational(m[a])}" for a in agents)  # noqa: E731
        return {
            "kind": self.kind,
            "mechanism": self.mechanism,
            "params": self.instance.params.describe(),
            "instance": " ".join(format_rational(x) for x in self.instance.raw_locations()),
            "deviators": " ".join(str(a + 1) for a in agents),
            "misreports": join(self.misreports) if agents else "",
            "cost_before": join(self.cost_before) if agents else "",
            "cost_after": join(self.cost_after) if agents else "",
            "expected": self.expected.describe() if self.expected else "",
            "observed": self.observed.describe() if self.observed else "",
            "transform": self.transform(),
        }


# ---------------------------------------------------------------------------
# Candidate misreports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CandidateSet:
    structured: tuple[Fraction, ...]
    lo: Fraction
    hi: Fraction
    step: Fraction

    def grid(self) -> list[Fraction]:
        count = math.floor((self.hi - self.lo) / self.step)
        return [self.lo + k * self.step for k in range(count + 1)]

    def points(self) -> list[Fraction]:
        return sorted(set(self.structured).union(self.grid()))


def _structured_points(instance: Instance) -> tuple[Fraction, ...]:
    p = instance.params
    spread = p.spread
    eps0 = spread / 1000
    offsets = {
        Fraction(0),
        p.b_left, -p.b_left,
        p.b_right, -p.b_right,
        spread, -spread,
        2 * p.b_left, -2 * p.b_left,
        2 * p.b_right, -2 * p.b_right,
    }
    base = {x + o for x in set(instance.locations) for o in offsets}
    return tuple(sorted(base | {q + eps0 for q in base} | {q - eps0 for q in base}))


def deviation_candidates(instance: Instance, agent: int | None = None) -> CandidateSet:
    """Misreports worth trying for ``agent``.

    The set is built from every agent's location, so it is the same for all
    agents; ``agent`` is accepted for interface symmetry.
    """
    spread = instance.params.spread
    return CandidateSet(
        structured=_structured_points(instance),
        lo=instance.locations[0] - 3 * spread,
        hi=instance.locations[-1] + 3 * spread,
        step=spread / 32,
    )


# ---------------------------------------------------------------------------
# Unilateral deviations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a deviation search, found or exhausted."""

    violation: ViolationReport | None
    evaluations: int
    agents_searched: int

    @property
    def found(self) -> bool:
        return self.violation is not None

    def describe(self, decimal: int | None = None) -> str:
        if self.violation is not None:
            return self.violation.describe(decimal)
        return (
            f"no violation within candidate set ({self.agents_searched} agents, "
            f"{self.evaluations} mechanism evaluations); this is not a proof"
        )


def search_sp(
    mech: Mechanism,
    instance: Instance,
    candidates: Sequence[RationalLike] | None = None,
) -> SearchResult:
    """Look for a profitable unilateral misreport.

    Agents are scanned in input order.  For the first agent with any
    profitable misreport, the report with the largest exact cost drop is
    returned (ties go to the smallest misreport).
    """
    params = instance.params
    truthful = mech(instance)
    cand_points = None if candidates is None else sorted({as_rational(x) for x in candidates})
    evaluations = 1
    for agent in range(instance.n):
        x = instance.location_of(agent)
        before = expected_cost(params, x, truthful)
        points = cand_points if cand_points is not None else deviation_candidates(instance, agent).points()
        best: tuple[Fraction, Fraction] | None = None  # (cost_after, misreport)
        for report in points:
            if report == x:
                continue
            after = expected_cost(params, x, mech(instance.with_report(agent, report)))
            evaluations += 1
            if after < before and (best is None or after < best[0]):
                best = (after, report)
        if best is not None:
            report = ViolationReport(
                kind=UNILATERAL,
                mechanism=mech.name,
                instance=instance,
                deviators=(agent,),
                misreports={agent: best[1]},
                cost_before={agent: before},
                cost_after={agent: best[0]},
            )
            _certify(report, mech)
            return SearchResult(report, evaluations, agent + 1)
    return SearchResult(None, evaluations, instance.n)


def find_sp_violation(
    mech: Mechanism,
    instance: Instance,
    candidates: Sequence[RationalLike] | None = None,
) -> ViolationReport | None:
    return search_sp(mech, instance, candidates).violation


# ---------------------------------------------------------------------------
# Coalitions
# ---------------------------------------------------------------------------


def find_gsp_violation(
    mech: Mechanism,
    instance: Instance,
    max_coalition: int,
    budget: int = DEFAULT_COALITION_BUDGET,
) -> ViolationReport | None:
    """Search coalitions of size 1..max_coalition for a joint misreport.

    A violation leaves no member worse off and some member strictly better
    off.  Coalitions are tried by size, then lexicographically; within the
    first coalition that admits a violation the report maximizes the total
    cost drop, then prefers the fewest changed reports, then the smallest
    report vector.  Members draw reports from the structured candidate points
    only.  Raises :class:`SearchBudgetExceeded` before starting a coalition
    whose enumeration would overrun ``budget`` mechanism evaluations.
    """
    if not 1 <= max_coalition <= instance.n:
        raise ValueError(f"max_coalition must be in 1..{instance.n}, got {max_coalition}")
    params = instance.params
    truthful = mech(instance)
    points = deviation_candidates(instance).structured
    true_loc = {a: instance.location_of(a) for a in range(instance.n)}
    before = {a: expected_cost(params, true_loc[a], truthful) for a in range(instance.n)}
    spent = 1

    for size in range(1, max_coalition + 1):
        for coalition in itertools.combinations(range(instance.n), size):
            needed = len(points) ** size
            if spent + needed > budget:
                raise SearchBudgetExceeded(budget, spent + needed, tuple(a + 1 for a in coalition))
            best_key = None
            best = None
            for reports in itertools.product(points, repeat=size):
                changed = sum(r != true_loc[a] for a, r in zip(coalition, reports))
                if changed == 0:
                    continue
                lottery = mech(instance.with_reports(dict(zip(coalition, reports))))
                spent += 1
                after = {a: expected_cost(params, true_loc[a], lottery) for a in coalition}
                if any(after[a] > before[a] for a in coalition):
                    continue
                gain = sum(before[a] - after[a] for a in coalition)
                if gain == 0:
                    continue
                key = (-gain, changed, reports)
                if best_key is None or key < best_key:
                    best_key, best = key, (reports, after)
            if best is not None:
                reports, after = best
                report = ViolationReport(
                    kind=COALITION,
                    mechanism=mech.name,
                    instance=instance,
                    deviators=coalition,
                    misreports=dict(zip(coalition, reports)),
                    cost_before={a: before[a] for a in coalition},
                    cost_after=after,
                )
                _certify(report, mech)
                return report
    return None


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------


def check_anonymity(
    mech: Mechanism,
    raw_locations: Iterable[RationalLike],
    params: CostParams,
    samples: int = 500,
    seed: int = 0,
) -> ViolationReport | None:
    """Compare outcomes across reorderings of the raw reports.

    Up to 8 agents every permutation is tried; beyond that ``samples`` random
    permutations from a seeded generator.
    """
    raw = [as_rational(x) for x in raw_locations]
    base_instance = normalize(raw, params)
    base = mech(base_instance)
    n = len(raw)
    if n <= 8:
        perms: Iterable[tuple[int, ...]] = itertools.permutations(range(n))
    else:
        rng = random.Random(seed)
        perms = (tuple(rng.sample(range(n), n)) for _ in range(samples))
    for perm in perms:
        other = mech(normalize([raw[i] for i in perm], params))
        if other != base:
            report = ViolationReport(
                kind=ANONYMITY,
                mechanism=mech.name,
                instance=base_instance,
                expected=base,
                observed=other,
                permutation=tuple(perm),
            )
            _certify(report, mech)
            return report
    return None


def check_position_invariance(
    mech: Mechanism,
    instance: Instance,
    shifts: Iterable[RationalLike],
) -> ViolationReport | None:
    shifts = [as_rational(t) for t in shifts]
    if not shifts:
        raise ValueError("need at least one shift")
    base = mech(instance)
    for t in shifts:
        expected = base.shifted(t)
        observed = mech(instance.shifted(t))
        if observed != expected:
            report = ViolationReport(
                kind=POSITION_INVARIANCE,
                mechanism=mech.name,
                instance=instance,
                expected=expected,
                observed=observed,
                shift=t,
            )
            _certify(report, mech)
            return report
    return None


# ---------------------------------------------------------------------------
# Recheck
# ---------------------------------------------------------------------------


def recheck(report: ViolationReport, mech: Mechanism) -> bool:
    """Re-derive a report from scratch and confirm it is a genuine violation."""
    instance = report.instance
    params = instance.params
    if report.kind in (UNILATERAL, COALITION):
        if not report.deviators:
            return False
        if report.kind == UNILATERAL and len(report.deviators) != 1:
            return False
        truthful = mech(instance)
        deviated = mech(instance.with_reports(dict(report.misreports)))
        strict = False
        for agent in report.deviators:
            x = instance.location_of(agent)
            before = expected_cost(params, x, truthful)
            after = expected_cost(params, x, deviated)
            if before != report.cost_before[agent] or after != report.cost_after[agent]:
                return False
            if after > before:
                return False
            strict = strict or after < before
        return strict
    if report.kind == ANONYMITY:
        raw = instance.raw_locations()
        base = mech(normalize(raw, params))
        other = mech(normalize([raw[i] for i in report.permutation], params))
        return base == report.expected and other == report.observed and base != other
    if report.kind == POSITION_INVARIANCE:
        expected = mech(instance).shifted(report.shift)
        observed = mech(instance.shifted(report.shift))
        return expected == report.expected and observed == report.observed and expected != observed
    return False


def _certify(report: ViolationReport, mech: Mechanism) -> None:
    if not recheck(report, mech):
        raise CertificateError(f"report failed exact recheck:\n{report.describe()}")


# ---------------------------------------------------------------------------
# Fixture mechanisms for self-testing the axiom checkers
# ---------------------------------------------------------------------------

# strategyproof and anonymous, but ignores shifts
CONSTANT_ZERO = Mechanism("constant-zero", lambda inst: Lottery.point(0))

# shifts correctly, but depends on who reported first
FIRST_REPORT_DICTATOR = Mechanism(
    "first-report-dictator",
    lambda inst: Lottery.point(inst.location_of(0) - inst.params.b_left),
)
