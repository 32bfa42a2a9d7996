from fractions import Fraction as F

import pytest

from riskaudit import (
    DomainError,
    Instance,
    Partition,
    assignment_from_partition,
    audit_exact,
    feature,
    is_nontrivial,
    solve_integral,
)


class TestAssignmentFromPartition:
    def test_block_scores_are_pooled_rates(self, skewed):
        part = Partition.from_blocks([["s1", "s2"]])
        asg = assignment_from_partition(skewed, part)
        assert asg.scores == (F(1, 3),)

    def test_identity_partition(self, balanced):
        part = Partition.from_blocks([["s1"], ["s2"]])
        asg = assignment_from_partition(balanced, part)
        assert set(asg.scores) == {F(1, 4), F(3, 4)}

    def test_partition_must_cover(self, balanced):
        with pytest.raises(DomainError):
            assignment_from_partition(balanced, Partition.from_blocks([["s1"]]))
        with pytest.raises(DomainError):
            assignment_from_partition(
                balanced, Partition.from_blocks([["s1"], ["s2"], ["zz"]])
            )

    def test_zero_mass_block_folded(self):
        inst = Instance(
            (
                feature("a", F(1, 2), 2, 2),
                feature("ghost", F(9, 10), 0, 0),
            )
        )
        part = Partition.from_blocks([["a"], ["ghost"]])
        asg = assignment_from_partition(inst, part)
        # the massless block cannot carry a pooled rate; it joins the first bin
        assert asg.bin_count == 1
        assert asg.scores == (F(1, 2),)


class TestSolveIntegral:
    def test_balanced_finds_identity(self, balanced):
        res = solve_integral(balanced, "any_fair")
        assert res.status == "found"
        assert res.explored == 2
        assert audit_exact(balanced, res.assignment).fair
        assert is_nontrivial(balanced, res.assignment)

    def test_rigid_has_none(self, rigid):
        res = solve_integral(rigid, "any_fair")
        assert res.status == "none"
        assert res.explored == 5
        assert res.assignment is None

    def test_budget_exceeded(self, rigid):
        res = solve_integral(rigid, "any_fair", cap=2)
        assert res.status == "budget_exceeded"
        assert res.explored == 2

    def test_cap_exactly_enough(self, balanced):
        # the hit arrives within the cap, so the budget never shows
        res = solve_integral(balanced, "any_fair", cap=2)
        assert res.status == "found"

    def test_min_loss_balanced(self, balanced):
        res = solve_integral(balanced, "min_loss")
        assert res.status == "found"
        assert res.loss_report.total == F(3, 2)
        assert res.explored == 2

    def test_min_loss_requires_fairness(self, skewed):
        res = solve_integral(skewed, "min_loss")
        assert res.status == "none"

    def test_unknown_objective(self, balanced):
        with pytest.raises(DomainError):
            solve_integral(balanced, "fastest")

    def test_tolerance_relaxes(self, skewed):
        # with a huge absolute tolerance the skewed identity counts as fair
        res = solve_integral(skewed, "any_fair", tolerance=F(1))
        assert res.status == "found"
