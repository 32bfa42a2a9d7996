from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskaudit import (
    DomainError,
    Instance,
    InvalidAssignmentError,
    InvalidInstanceError,
    Record,
    RecordTable,
    RiskAssignment,
    as_fraction,
    assignment_rows_for,
    derived_stats,
    feature,
    ingest_records,
    require_valid,
    split_by_group,
    validate_instance,
)


class TestAsFraction:
    def test_string_forms(self):
        assert as_fraction("3/4") == F(3, 4)
        assert as_fraction("0.25") == F(1, 4)
        assert as_fraction(" 2 ") == 2
        assert as_fraction("1e-9") == F(1, 10**9)

    def test_float_is_exact_binary(self):
        assert as_fraction(0.5) == F(1, 2)
        assert as_fraction(0.1) == F(0.1)  # binary value, not 1/10
        assert as_fraction(0.1) != F(1, 10)

    def test_rejects(self):
        with pytest.raises(ValueError):
            as_fraction("zero")
        with pytest.raises(TypeError):
            as_fraction(True)
        with pytest.raises(TypeError):
            as_fraction(None)


class TestValidation:
    def test_good_instance(self, balanced):
        rep = validate_instance(balanced)
        assert rep.ok and rep.violations == ()
        assert require_valid(balanced) is balanced

    def test_duplicate_ids(self):
        inst = Instance((feature("a", F(1, 2), 1, 0), feature("a", F(1, 2), 0, 1)))
        rep = validate_instance(inst)
        assert not rep.ok
        assert any("duplicate" in v for v in rep.violations)

    def test_probability_range(self):
        inst = Instance((feature("a", F(3, 2), 1, 1),))
        assert not validate_instance(inst).ok

    def test_negative_mass(self):
        inst = Instance((feature("a", F(1, 2), -1, 1), feature("b", F(1, 2), 1, 1)))
        assert not validate_instance(inst).ok

    def test_empty_group(self):
        inst = Instance((feature("a", F(1, 2), 1, 0),))
        rep = validate_instance(inst)
        assert not rep.ok
        with pytest.raises(InvalidInstanceError):
            require_valid(inst)


class TestDerivedStats:
    def test_skewed_oracle(self, skewed):
        gs = derived_stats(skewed)
        assert gs.population == (2, 4)
        assert gs.positive_mass == (1, 1)
        assert gs.base_rate == (F(1, 2), F(1, 4))
        assert gs.for_group(2) == (4, 1, F(1, 4))


class TestIngest:
    def test_counts_and_pooling(self):
        rows = [
            Record("a", 1, True),
            Record("a", 1, False),
            Record("a", 2, True),
            Record("b", 2, False),
            Record("b", 1, True),
        ]
        inst, div = ingest_records(RecordTable(tuple(rows)))
        assert inst.ids == ("a", "b")
        a = inst.by_id("a")
        assert (a.n1, a.n2, a.p) == (2, 1, F(2, 3))
        b = inst.by_id("b")
        assert (b.n1, b.n2, b.p) == (1, 1, F(1, 2))
        assert div.max_deviation == F(1, 2)
        devs = {(e.feature_id, e.group): e.deviation for e in div.entries}
        assert devs[("a", 1)] == F(1, 6)
        assert devs[("b", 2)] == F(1, 2)

    def test_empty_table_rejected(self):
        with pytest.raises(DomainError):
            RecordTable(())

    def test_missing_group_rejected(self):
        with pytest.raises(DomainError):
            RecordTable((Record("a", 1, True),))


class TestSplitByGroup:
    def test_skewed_split(self, skewed):
        split = split_by_group(skewed)
        assert split.ids == ("s1@1", "s2@2")

    def test_both_sides_kept(self, balanced):
        split = split_by_group(balanced)
        assert split.ids == ("s1@1", "s1@2", "s2@1", "s2@2")

    @given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
    def test_group_stats_invariant(self, a1, a2, b1, b2):
        # splitting features by group never changes any group aggregate
        if a1 + b1 == 0 or a2 + b2 == 0:
            return
        inst = Instance((feature("a", F(1, 3), a1, a2), feature("b", F(2, 3), b1, b2)))
        gs = derived_stats(inst)
        gs2 = derived_stats(split_by_group(inst))
        assert gs == gs2


class TestRiskAssignment:
    def test_row_validation(self):
        with pytest.raises(InvalidAssignmentError):
            RiskAssignment(("a",), (F(1, 2),), ((F(1, 2),),))  # rows must sum to 1
        with pytest.raises(InvalidAssignmentError):
            RiskAssignment(("a",), (F(3, 2),), ((F(1),),))  # score out of range
        with pytest.raises(InvalidAssignmentError):
            RiskAssignment(("a", "a"), (F(1, 2),), ((F(1),), (F(1),)))
        with pytest.raises(InvalidAssignmentError):
            RiskAssignment((), (), ())

    def test_row_lookup(self):
        asg = RiskAssignment(
            ("a", "b"),
            (F(1, 4), F(3, 4)),
            ((F(1, 2), F(1, 2)), (F(0), F(1))),
        )
        assert asg.bin_count == 2
        assert asg.row("b") == (F(0), F(1))

    def test_rows_for_requires_same_ids(self, balanced):
        asg = RiskAssignment(("s1", "zz"), (F(1, 2),), ((F(1),), (F(1),)))
        with pytest.raises(InvalidAssignmentError):
            assignment_rows_for(balanced, asg)

    def test_rows_for_reorders(self, balanced):
        asg = RiskAssignment(
            ("s2", "s1"),
            (F(1, 4), F(3, 4)),
            ((F(1), F(0)), (F(0), F(1))),
        )
        rows = assignment_rows_for(balanced, asg)
        assert rows == ((F(0), F(1)), (F(1), F(0)))
