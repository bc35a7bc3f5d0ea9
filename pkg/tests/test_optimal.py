from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from doublepeak.core import CostParams, Objective, max_cost, normalize, social_cost
from doublepeak.errors import InvalidRange
from doublepeak.mechanisms import median_index
from doublepeak.optimal import (
    OptResult,
    default_grid,
    grid_scan,
    mc_candidates,
    minimize_over,
    optimal_max,
    optimal_social,
    sc_candidates,
)

from conftest import any_params, instances, rationals

UNIT = CostParams.symmetric(1, 1)


def test_sc_candidates():
    assert sc_candidates(normalize([0], UNIT)) == [-1, 0, 1]
    assert sc_candidates(normalize([0, 2], UNIT)) == [-1, 0, 1, 2, 3]
    assert sc_candidates(normalize([0, 0], UNIT)) == [-1, 0, 1]


def test_mc_candidates():
    assert mc_candidates(normalize([0], UNIT)) == [-1, 0, 1]
    assert 2 in mc_candidates(normalize([0, 4], UNIT))
    assert F(1, 2) in mc_candidates(normalize([0, 1, 2], UNIT))


def test_optimal_social_examples():
    r = optimal_social(normalize([0], UNIT))
    assert (r.location, r.value) == (-1, 1)
    r = optimal_social(normalize([0, 2], UNIT))
    assert (r.location, r.value) == (1, 2)
    r = optimal_social(normalize(["-1.9", 0, 3], UNIT))
    assert (r.location, r.value) == (1, F(59, 10))


def test_optimal_max_examples():
    r = optimal_max(normalize([0, 4], UNIT))
    assert (r.location, r.value) == (2, 2)
    r = optimal_max(normalize([0], UNIT))
    assert (r.location, r.value) == (-1, 1)
    r = optimal_max(normalize([0, 1, 2], UNIT))
    assert (r.location, r.value) == (F(1, 2), F(3, 2))


def test_derived_optima_match_fine_grid():
    # oracle: dense grid containing every candidate
    for locs, fn, obj in [([0, 2], optimal_social, "sc"), ([0, 1, 2], optimal_max, "mc")]:
        inst = normalize(locs, UNIT)
        oracle = grid_scan(inst, obj, -4, 6, F(1, 128))
        assert fn(inst).value == oracle.value
        assert fn(inst).location == oracle.location


def test_grid_scan_examples():
    r = grid_scan(normalize([0, 2], UNIT), Objective.SC, -2, 4, F(1, 4))
    assert (r.location, r.value) == (1, 2)
    assert r.candidates_examined == 25
    r = grid_scan(normalize([0], UNIT), Objective.MC, -2, 2, 1)
    assert (r.location, r.value) == (-1, 1)
    r = grid_scan(normalize([0, 4], UNIT), Objective.MC, 0, 4, F(1, 2))
    assert (r.location, r.value) == (2, 2)


@pytest.mark.parametrize("lo, hi, step", [(1, 1, 1), (2, 1, 1), (0, 1, 0), (0, 1, -1)])
def test_grid_scan_invalid(lo, hi, step):
    with pytest.raises(InvalidRange):
        grid_scan(normalize([0], UNIT), "sc", lo, hi, step)


def test_default_grid():
    assert default_grid(normalize([0], UNIT)) == (-6, 6, F(1, 32))


def test_leftmost_tie_break():
    r = minimize_over(normalize([0], UNIT), Objective.SC, [1, -1, 0])
    assert r.location == -1 and r.candidates_examined == 3


def test_asymmetric_infimum_flagged():
    # b_right < b_left: just right of a location the cost drops below its value there
    p = CostParams(3, 1, 1)
    r = optimal_social(normalize([0], p))
    assert r.value == 1 and r.attained
    inst = normalize([-4, -3, 0], p)
    r = optimal_social(inst)
    assert (r.location, r.value, r.infimum) == (-2, 5, 4)
    assert not r.attained
    # oracle: approaching -3 from the right gets arbitrarily close to 4
    delta = F(1, 1000)
    assert social_cost(inst, -3 + delta) == 4 + delta
    assert social_cost(inst, -3) == 6


@settings(max_examples=60, deadline=None)
@given(instances(max_n=5))
def test_soundness_against_grid(inst):
    _, _, step = default_grid(inst)
    for fn, obj in ((optimal_social, "sc"), (optimal_max, "mc")):
        opt = fn(inst)
        grid = grid_scan(inst, obj)
        assert opt.value <= grid.value
        lipschitz = inst.n if obj == "sc" else 1
        assert grid.value - opt.value <= lipschitz * step / 2


@settings(max_examples=40, deadline=None)
@given(instances(max_n=4))
def test_candidate_completeness(inst):
    # a finer grid aligned so it hits no candidate can never beat the enumeration
    lo, hi, step = default_grid(inst)
    assert optimal_social(inst).location in sc_candidates(inst)
    assert optimal_max(inst).location in mc_candidates(inst)
    assert grid_scan(inst, "sc", lo, hi, step / 3).value >= optimal_social(inst).value
    assert grid_scan(inst, "mc", lo, hi, step / 3).value >= optimal_max(inst).value


@settings(max_examples=80, deadline=None)
@given(instances())
def test_median_interval(inst):
    b = inst.params.b
    x_m = inst.locations[median_index(inst.n) - 1]
    inside = [y for y in sc_candidates(inst) if x_m - b <= y <= x_m + b]
    assert min(social_cost(inst, y) for y in inside) == optimal_social(inst).value


@settings(max_examples=60, deadline=None)
@given(instances(params=any_params), rationals(-5, 5))
def test_translation(inst, t):
    for fn in (optimal_social, optimal_max):
        a, b = fn(inst), fn(inst.shifted(t))
        assert b.location == a.location + t and b.value == a.value


@settings(max_examples=60, deadline=None)
@given(instances(params=any_params))
def test_permutation(inst):
    reversed_inst = normalize(list(reversed(inst.raw_locations())), inst.params)
    assert optimal_social(reversed_inst) == optimal_social(inst)
    assert optimal_max(reversed_inst) == optimal_max(inst)


@settings(max_examples=60, deadline=None)
@given(instances(params=any_params))
def test_result_invariants(inst):
    for fn, obj in ((optimal_social, social_cost), (optimal_max, max_cost)):
        r = fn(inst)
        assert isinstance(r, OptResult)
        assert obj(inst, r.location) == r.value
    assert optimal_social(inst).value >= inst.n * inst.params.c
    assert optimal_max(inst).value >= inst.params.c
