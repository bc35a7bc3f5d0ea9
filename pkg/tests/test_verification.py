from fractions import Fraction as F

import pytest

from doublepeak.core import CostParams, Lottery, normalize
from doublepeak.errors import SearchBudgetExceeded
from doublepeak.experiments import gen_opt_not_sp, gen_primary
from doublepeak.mechanisms import Mechanism, get_mechanism
from doublepeak.verification import (
    ANONYMITY,
    COALITION,
    CONSTANT_ZERO,
    FIRST_REPORT_DICTATOR,
    POSITION_INVARIANCE,
    UNILATERAL,
    CertificateError,
    ViolationReport,
    check_anonymity,
    check_position_invariance,
    deviation_candidates,
    find_gsp_violation,
    find_sp_violation,
    recheck,
    search_sp,
)

UNIT = CostParams.symmetric(1, 1)


class TestCandidates:
    def test_primary_instance(self):
        cs = deviation_candidates(normalize([0, "3.1"], UNIT), 0)
        for q in [-2, -1, 0, 1, 2] + [F(31, 10) + k for k in (-2, -1, 0, 1, 2)]:
            assert q in cs.structured
        assert F(31, 10) + F(2, 1000) in cs.structured

    def test_single_agent(self):
        cs = deviation_candidates(normalize([0], UNIT), 0)
        eps0 = F(2, 1000)
        for q in (-2, -1, 0, 1, 2):
            assert q in cs.structured
            assert q + eps0 in cs.structured and q - eps0 in cs.structured
        assert (cs.lo, cs.hi, cs.step) == (-6, 6, F(1, 16))
        assert len(cs.grid()) == 193
        assert set(cs.structured) <= set(cs.points())


class TestUnilateral:
    def test_opt_sc_manipulable(self):
        inst = gen_opt_not_sp(UNIT, F(1, 10))
        report = find_sp_violation(get_mechanism("opt-sc"), inst)
        assert report.kind == UNILATERAL and report.deviators == (0,)
        assert report.cost_before[0] == F(29, 10)
        assert report.cost_after[0] == F(11, 10)
        # the construction's own misreport gives the same certificate
        direct = find_sp_violation(get_mechanism("opt-sc"), inst, candidates=[F(-5, 2)])
        assert direct.misreports == {0: F(-5, 2)}
        assert (direct.cost_before[0], direct.cost_after[0]) == (F(29, 10), F(11, 10))

    def test_m1_not_manipulable(self):
        assert find_sp_violation(get_mechanism("m1"), normalize([0, 1, 2, 2], UNIT)) is None

    def test_kth_peak_manipulable(self):
        report = find_sp_violation(get_mechanism("kth-right:1"), normalize([0, 1, 5], UNIT))
        assert report.deviators == (1,)
        assert report.misreports == {1: -1}
        assert (report.cost_before[1], report.cost_after[1]) == (2, 1)

    def test_exhaustion_report(self):
        result = search_sp(get_mechanism("m2-left"), normalize([0, 3, 4], UNIT))
        assert not result.found and result.evaluations > 100
        assert "not a proof" in result.describe()

    def test_determinism(self):
        inst = gen_opt_not_sp(UNIT, F(1, 10))
        a = find_sp_violation(get_mechanism("opt-sc"), inst)
        b = find_sp_violation(get_mechanism("opt-sc"), inst)
        assert a == b

    def test_uses_true_location_for_costs(self):
        # misreport changes only the profile: agent 2 still pays from x=1
        report = find_sp_violation(get_mechanism("kth-right:1"), normalize([0, 1, 5], UNIT))
        assert recheck(report, get_mechanism("kth-right:1"))


class TestCoalition:
    def test_primary_instance_m2(self):
        inst = gen_primary(UNIT, F(1, 10))
        report = find_gsp_violation(get_mechanism("m2-left"), inst, 2)
        assert report.kind == COALITION
        assert report.deviators == (0, 1)
        assert report.misreports == {0: 2, 1: F(31, 10)}
        assert report.cost_before == {0: 1, 1: F(41, 10)}
        assert report.cost_after == {0: 1, 1: F(21, 10)}
        assert get_mechanism("m2-left")(inst.with_reports(report.misreports)) == Lottery.point(1)

    def test_single_agent_m1(self):
        assert find_gsp_violation(get_mechanism("m1"), normalize([5], UNIT), 1) is None

    def test_coalition_of_one(self):
        inst = gen_opt_not_sp(UNIT, F(1, 10))
        report = find_gsp_violation(get_mechanism("opt-sc"), inst, 1)
        assert report.deviators == (0,)
        assert (report.cost_before[0], report.cost_after[0]) == (F(29, 10), F(11, 10))

    def test_budget(self):
        inst = normalize([0, 1, 2, 3], UNIT)
        with pytest.raises(SearchBudgetExceeded) as info:
            find_gsp_violation(get_mechanism("m2-left"), inst, 4, budget=10_000)
        assert info.value.budget == 10_000

    def test_bad_coalition_size(self):
        with pytest.raises(ValueError):
            find_gsp_violation(get_mechanism("m1"), normalize([0], UNIT), 2)


class TestAxioms:
    def test_m1_anonymous(self):
        assert check_anonymity(get_mechanism("m1"), [2, 0, 1], UNIT) is None

    def test_dictator_not_anonymous(self):
        report = check_anonymity(FIRST_REPORT_DICTATOR, [2, 0], UNIT)
        assert report.kind == ANONYMITY
        assert report.expected == Lottery.point(1)
        assert report.observed == Lottery.point(-1)

    def test_identical_reports(self):
        assert check_anonymity(get_mechanism("m2-left"), [1, 1], UNIT) is None

    def test_m1_position_invariant(self):
        inst = normalize([0, 1, 2, 2], UNIT)
        assert check_position_invariance(get_mechanism("m1"), inst, [5, F(-7, 3)]) is None

    def test_constant_zero(self):
        report = check_position_invariance(CONSTANT_ZERO, normalize([0, 4], UNIT), [1])
        assert report.kind == POSITION_INVARIANCE
        assert report.observed == Lottery.point(0)
        assert report.expected == Lottery.point(1)

    def test_opt_sc_position_invariant(self):
        assert check_position_invariance(get_mechanism("opt-sc"), normalize([0, 2], UNIT), [10]) is None

    def test_fixtures_fail_exactly_their_axiom(self):
        inst = normalize([2, 0, 5], UNIT)
        assert check_anonymity(CONSTANT_ZERO, inst.raw_locations(), UNIT) is None
        assert check_position_invariance(CONSTANT_ZERO, inst, [1]) is not None
        assert check_anonymity(FIRST_REPORT_DICTATOR, inst.raw_locations(), UNIT) is not None
        assert check_position_invariance(FIRST_REPORT_DICTATOR, inst, [1, F(-7, 3)]) is None
        assert find_sp_violation(CONSTANT_ZERO, inst) is None

    def test_sampled_permutations_for_large_n(self):
        raw = list(range(10))
        assert check_anonymity(get_mechanism("m1"), raw, UNIT, samples=50) is None
        assert check_anonymity(FIRST_REPORT_DICTATOR, raw, UNIT, samples=50) is not None


class TestRecheck:
    def test_forged_report_rejected(self):
        inst = normalize([0, 1, 2, 2], UNIT)
        forged = ViolationReport(
            kind=UNILATERAL,
            mechanism="m1",
            instance=inst,
            deviators=(0,),
            misreports={0: F(-3)},
            cost_before={0: F(2)},
            cost_after={0: F(1)},
        )
        assert not recheck(forged, get_mechanism("m1"))

    def test_broken_mechanism_is_caught(self):
        # outputs drift between calls, so the recheck sees different costs
        calls = []

        def flaky(inst):
            calls.append(1)
            return Lottery.point(100 - len(calls))

        with pytest.raises(CertificateError):
            find_sp_violation(Mechanism("flaky", flaky), normalize([0], UNIT))

    def test_csv_row(self):
        report = find_gsp_violation(get_mechanism("m2-left"), gen_primary(UNIT, F(1, 10)), 2)
        row = report.csv_row()
        assert row["deviators"] == "1 2"
        assert row["misreports"] == "1:2 2:31/10"
        assert row["cost_after"] == "1:1 2:21/10"
        assert "agent 2 at 31/10" in report.describe()
