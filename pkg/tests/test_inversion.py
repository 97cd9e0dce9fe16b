"""Inverters, extraction adversaries, and fiber evidence."""

from fractions import Fraction

import pytest

from oneway.bitcore import pair
from oneway.constructions import (
    bit_select,
    double_injection,
    identity_injection,
    one_way_surjection,
    shift_injection,
    simple_one_way,
    two_to_one_v1,
    two_to_one_v2,
    witness_function,
)
from oneway.enumeration import (
    StagedEnumeration,
    StagedStringEnumeration,
    collatz_toy,
)
from oneway.errors import (
    ConsistencyError,
    DivergenceError,
    HorizonError,
    MeasureThresholdError,
    NotInRangeError,
    NotSingletonError,
)
from oneway.inversion import (
    FiberCount,
    InverterUnderTest,
    extract_randomized,
    extract_simple,
    extract_two_to_one,
    fiber_branch_count,
    inverts_at_finite_stage,
    reference_inverter_simple,
    reference_inverter_surjection,
    reference_inverter_two_to_one,
    unique_path_invert,
)
from oneway.streams import (
    RealFunction,
    evaluate,
    finite,
    interleaved,
    ones,
    output_source,
    random_source,
    representation_of,
    zeros,
)


def enum(pairs, horizon):
    return StagedEnumeration.from_pairs(pairs, horizon=horizon)


class TestUniquePathInvert:
    """Levelwise consensus recovers preimages of injective maps."""

    @pytest.mark.parametrize("build,out_cap", [
        (lambda: bit_select(identity_injection()), None),
        (lambda: witness_function(shift_injection()), None),
        (lambda: witness_function(double_injection()), 80),
    ])
    def test_recovers_32_bits(self, build, out_cap):
        f = build()
        x = random_source(7)
        rep = representation_of(f, 40) if out_cap is None else \
            representation_of(f, 40, out_cap=out_cap)
        got = unique_path_invert(rep, output_source(f, x), 32)
        assert got == "".join(str(x.bit(i)) for i in range(32))
        # round trip through the recovered prefix
        assert evaluate(f, finite(got), 32).output == evaluate(f, x, 32).output

    def test_lost_bits_never_reach_consensus(self):
        # selection along n -> 2n drops every odd input bit
        f = bit_select(double_injection())
        rep = representation_of(f, 16)
        y = output_source(f, random_source(7))
        with pytest.raises(NotSingletonError, match="no 8-bit consensus by depth 16"):
            unique_path_invert(rep, y, 8)

    def test_not_in_range(self):
        # the shift witness always outputs 0 first; 1^ω has no preimage
        rep = representation_of(witness_function(shift_injection()), 8)
        with pytest.raises(NotInRangeError, match="not in range at depth 0"):
            unique_path_invert(rep, ones(), 4)

    def test_depth_cap_over_representation(self):
        rep = representation_of(bit_select(identity_injection()), 8)
        with pytest.raises(ValueError, match="depth cap 9 exceeds"):
            unique_path_invert(rep, zeros(), 4, depth_cap=9)

    def test_survivor_cap(self):
        rep = representation_of(RealFunction("const0", lambda tape, m: 0), 8)
        with pytest.raises(NotSingletonError, match="16 surviving words at depth 4"):
            unique_path_invert(rep, zeros(), 2, survivor_cap=8)


class TestReferenceInverters:
    def test_simple_round_trip(self):
        toy = collatz_toy(16, 10**3)
        f = simple_one_way(toy)
        g = reference_inverter_simple(toy)
        y = output_source(f, random_source(3))
        assert inverts_at_finite_stage(f, g, y, 24).state == "consistent"

    def test_surjection_round_trip(self):
        toy = collatz_toy(16, 10**3)
        f = one_way_surjection(toy)
        g = reference_inverter_surjection(toy)
        y = output_source(f, interleaved(random_source(4), zeros()))
        yr = interleaved(y, random_source(5))
        fx = output_source(f, output_source(g.g, yr))
        assert all(fx.bit(m) == yr.bit(2 * m) for m in range(24))

    def test_two_to_one_round_trip(self):
        w = enum([(3, 5)], 10**5)
        f = two_to_one_v1(w)
        g = reference_inverter_two_to_one(w)
        y = output_source(f, interleaved(random_source(6), random_source(16)))
        assert inverts_at_finite_stage(f, g, y, 24).state == "consistent"


class TestExtractSimple:
    def test_empty_enumeration_all_non_members(self):
        w = enum([], 100)
        g = reference_inverter_simple(w)
        for n in (0, 3, 7):
            v = extract_simple(g, w, n)
            assert v.line() == f"n={n} member=false use=0 stagebound=0"

    def test_single_entry_table(self):
        w = enum([(1, 2)], 100)  # element 2 enters at stage 1
        g = reference_inverter_simple(w)
        lines = [extract_simple(g, w, n).line() for n in range(4)]
        assert lines == [
            "n=0 member=false use=0 stagebound=0",
            "n=1 member=false use=0 stagebound=0",
            "n=2 member=true use=8 stagebound=8",  # reads position ⟨2,1⟩ = 7
            "n=3 member=false use=0 stagebound=0",
        ]

    def test_toy_sweep_matches_membership(self):
        toy = collatz_toy(16, 10**3)
        g = reference_inverter_simple(toy)
        verdicts = [extract_simple(g, toy, n) for n in range(16)]
        assert [v.element for v in verdicts if v.member] == list(range(1, 16))
        assert verdicts[7].line() == "n=7 member=true use=293 stagebound=293"

    def test_use_beyond_horizon(self):
        toy = collatz_toy(16, 25)
        g = reference_inverter_simple(toy)
        with pytest.raises(HorizonError, match="stage 580 beyond horizon 25"):
            extract_simple(g, toy, 15)

    def test_positive_witness_bit(self):
        # a set bit certifies non-membership with no stage bound at all
        g = InverterUnderTest(RealFunction("allones", lambda tape, m: 1))
        v = extract_simple(g, enum([(1, 2)], 100), 3)
        assert v.line() == "n=3 member=false use=0 stagebound=-"
        assert v.evidence == "positive witness bit"

    def test_zero_inversion_validation(self):
        g = InverterUnderTest(RealFunction("allones", lambda tape, m: 1))
        with pytest.raises(ConsistencyError, match="fails on the zero real"):
            extract_simple(g, enum([(1, 2)], 100), 2)

    def test_rejects_binary_inverter(self):
        toy = collatz_toy(16, 10**3)
        with pytest.raises(ValueError, match="unary"):
            extract_simple(reference_inverter_surjection(toy), toy, 2)


class TestExtractRandomized:
    """Dovetail collection over a cylinder, crossing half its measure."""

    def fixture(self):
        w = enum([(1, 2)], 20)
        return reference_inverter_surjection(w), one_way_surjection(w), w

    def test_member_crossing(self):
        g, f, w = self.fixture()
        v = extract_randomized(g, f, "", w, 2)
        assert v.line() == "n=2 member=true use=15 stagebound=15"
        rec = v.evidence
        assert rec.k == 15
        assert rec.words_collected == 16385
        assert rec.measure == Fraction(16385, 32768)
        assert rec.measure > rec.threshold == Fraction(1, 2)
        rec.assert_prefix_free()

    def test_non_member_trivial_crossing(self):
        g, f, w = self.fixture()
        v = extract_randomized(g, f, "", w, 3)
        assert v.line() == "n=3 member=false use=0 stagebound=0"
        assert v.evidence.words_collected == 1
        assert tuple(v.evidence.materialize()) == ("",)

    def test_relativized_cylinder(self):
        g, f, w = self.fixture()
        v = extract_randomized(g, f, "1", w, 2)
        assert v.line() == "n=2 member=true use=15 stagebound=15"
        assert v.evidence.words_collected == 8193
        assert v.evidence.measure == Fraction(8193, 32768)
        assert v.evidence.measure > Fraction(1, 4)

    def test_materialize_cap(self):
        g, f, w = self.fixture()
        rec = extract_randomized(g, f, "", w, 2).evidence
        with pytest.raises(ValueError, match="16385 words, over cap 100"):
            rec.materialize(cap=100)

    def test_tiny_collection_is_literal(self):
        w = enum([(0, 0)], 20)
        v = extract_randomized(reference_inverter_surjection(w),
                               one_way_surjection(w), "", w, 0)
        assert v.line() == "n=0 member=true use=1 stagebound=1"
        wt = v.evidence.materialize()
        assert tuple(wt) == ("0", "1")
        assert wt.intersect_measure("") == Fraction(1)

    def test_measure_never_crosses(self):
        _, f, w = self.fixture()

        def half(tape, m):
            if tape.read(0) == 1:
                raise DivergenceError(m, "spun out")
            return 0

        g = InverterUnderTest(RealFunction("half", half), binary=True)
        with pytest.raises(MeasureThresholdError,
                           match="cover only 1/2 of ⟦ε⟧, never exceeding 1/2"):
            extract_randomized(g, f, "", w, 1, validate=False)

    def test_fork_tree_budget(self):
        _, f, w = self.fixture()

        def deep(tape, m):
            i = 0
            while True:
                tape.read(i)
                i += 1

        g = InverterUnderTest(RealFunction("deep", deep), binary=True)
        with pytest.raises(MeasureThresholdError, match="exceeded 50 nodes"):
            extract_randomized(g, f, "", w, 1, validate=False,
                               node_budget=50, run_budget=10**4)

    def test_validation_against_wrong_function(self):
        g, _, w = self.fixture()
        wrong = one_way_surjection(enum([(0, 0)], 20))
        with pytest.raises(ConsistencyError, match="differs from y at bit 0"):
            extract_randomized(g, wrong, "1", w, 2)

    def test_rejects_unary_inverter(self):
        _, f, w = self.fixture()
        with pytest.raises(ValueError, match="binary inverter"):
            extract_randomized(reference_inverter_simple(w), f, "", w, 2)


class TestExtractTwoToOne:
    def fixture(self):
        w = enum([(3, 5)], 10**5)  # element 5 enters at stage 3
        return reference_inverter_two_to_one(w), w

    def test_verdict_table(self):
        g, w = self.fixture()
        lines = [extract_two_to_one(g, w, n).line() for n in (0, 3, 5, 7)]
        assert lines == [
            "n=0 member=false use=65792 stagebound=65792",
            "n=3 member=false use=67334 stagebound=67334",
            "n=5 member=true use=82 stagebound=82",
            "n=7 member=false use=69418 stagebound=69418",
        ]
        # parked columns pay the full scan: use = 2⟨n,255⟩+2; the released
        # column stops at its halting stage: use = 2⟨4,4⟩+2
        assert 2 * pair(0, 255) + 2 == 65792
        assert 2 * pair(4, 4) + 2 == 82

    def test_relativized_verdicts_agree(self):
        g, w = self.fixture()
        for n in (3, 5, 7):
            plain = extract_two_to_one(g, w, n)
            rel = extract_two_to_one(g, w, n, upsilon="101", zeta="01")
            assert rel.line() == plain.line()

    def test_empty_enumeration(self):
        w = enum([], 10**5)
        g = reference_inverter_two_to_one(w)
        assert extract_two_to_one(g, w, 0).line() == \
            "n=0 member=false use=65792 stagebound=65792"
        assert extract_two_to_one(g, w, 4).line() == \
            "n=4 member=false use=67852 stagebound=67852"

    def test_zeta_guard(self):
        g, w = self.fixture()
        with pytest.raises(ValueError, match="need n > |zeta| = 3, got n = 2"):
            extract_two_to_one(g, w, 2, zeta="011")

    def test_validation_catches_non_inverter(self):
        _, w = self.fixture()
        g = InverterUnderTest(RealFunction("zero", lambda tape, m: 0))
        with pytest.raises(ConsistencyError, match="differs from y at bit 1"):
            extract_two_to_one(g, w, 5)

    def test_rejects_binary_inverter(self):
        _, w = self.fixture()
        toy = collatz_toy(16, 10**3)
        with pytest.raises(ValueError, match="unary"):
            extract_two_to_one(reference_inverter_surjection(toy), w, 5)


class TestFiberBranchCount:
    def test_identity_singleton(self):
        f = bit_select(identity_injection())
        assert fiber_branch_count(f, "1011", 4) == FiberCount(1, 1)

    def test_selection_leaves_odd_bits_free(self):
        f = bit_select(double_injection())
        assert fiber_branch_count(f, "11", 4) == FiberCount(4, 4)

    def test_inconsistent_target(self):
        f = RealFunction("far", lambda tape, m: tape.read(4) * 0 + 1)
        assert fiber_branch_count(f, "0", 2) == FiberCount(0, 4)

    def test_stuck_marker_has_two_branches(self):
        # z = 0^ω parks the marker on 0 forever, so x(0) is never read and
        # the fiber splits exactly there
        w = enum([], 10**6)
        f = two_to_one_v1(w)
        y = evaluate(f, interleaved(random_source(11), zeros()), 30).output
        fc = fiber_branch_count(f, y, 8)
        assert fc == FiberCount(2, 16)

    def test_climbing_marker_pins_everything(self):
        w = enum([], 10**6)
        f = two_to_one_v1(w)
        y = evaluate(f, interleaved(random_source(11), ones()), 68).output
        fc = fiber_branch_count(f, y, 8)
        assert fc == FiberCount(1, 64)

    def test_v2_stuck_marker(self):
        w = enum([], 10**6)
        u = StagedStringEnumeration.from_pairs([], horizon=10**6)
        f = two_to_one_v2(w, u)
        y = evaluate(f, interleaved(random_source(11), zeros()), 94).output
        assert fiber_branch_count(f, y, 16).branches == 2


class TestInvertsAtFiniteStage:
    def test_consistent(self):
        w = enum([(1, 2)], 100)
        out = inverts_at_finite_stage(simple_one_way(w),
                                      reference_inverter_simple(w), zeros(), 16)
        assert out.state == "consistent"
        assert str(out) == "consistent"

    def test_refuted(self):
        # constant-zero claim against a published 1 bit
        w = enum([(1, 2)], 100)
        g = InverterUnderTest(RealFunction("zero", lambda tape, m: 0))
        out = inverts_at_finite_stage(simple_one_way(w), g, finite("00000001"), 16)
        assert (out.state, out.index) == ("refuted", 7)
        assert str(out) == "refuted at bit 7"

    def test_diverged(self):
        w = enum([(1, 2)], 100)

        def spin(tape, m):
            i = 0
            while True:
                tape.read(i)
                i += 1

        g = InverterUnderTest(RealFunction("spin", spin))
        out = inverts_at_finite_stage(simple_one_way(w), g, zeros(), 8, budget=50)
        assert out.state == "diverged"
        assert str(out) == "diverged at bit 2"
