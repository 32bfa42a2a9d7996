"""Reduction construction, equation checks, and the search over pairings.

The small worked example (weights (1, 2), target 3) is fixed as a session
fixture; its expected numbers were derived by hand and are treated as frozen.
"""
from fractions import Fraction as F

import pytest
import warnings

from hypothesis import given, settings
from hypothesis import strategies as st

from riskaudit import (
    DomainError,
    Partition,
    ReductionInfeasibleError,
    SubsetSumInstance,
    check_reduction_equation,
    decode_partition,
    derived_stats,
    encode_solution,
    is_normal_form,
    reduce_subset_sum,
    search_normal_forms,
    solve_subset_sum,
    sum_of_squares_identity,
)


class TestSubsetSumOracle:
    def test_solvable(self):
        assert solve_subset_sum(SubsetSumInstance((1, 2), 3)) == frozenset({1, 2})
        assert solve_subset_sum(SubsetSumInstance((3, 5, 7), 12)) == frozenset({2, 3})

    def test_unsolvable(self):
        assert solve_subset_sum(SubsetSumInstance((2, 3), 4)) is None
        assert solve_subset_sum(SubsetSumInstance((2,), 1)) is None

    def test_validation(self):
        with pytest.raises(DomainError):
            SubsetSumInstance((), 1)
        with pytest.raises(DomainError):
            SubsetSumInstance((0, 1), 1)
        with pytest.raises(DomainError):
            SubsetSumInstance((1, 2), 0)

    def test_smallest_witness_preferred(self):
        # both {1,2} and {3} hit 3; the low-mask witness comes first
        got = solve_subset_sum(SubsetSumInstance((1, 2, 3), 3))
        assert got == frozenset({1, 2})


class TestConstruction:
    def test_frozen_small_example(self, embedded_pair):
        ri = embedded_pair
        assert ri.m == 2
        assert ri.scaled_weights == (F(1, 48), F(1, 24))
        assert ri.required_pos_avg == F(5, 9)
        assert ri.group1_mass == (0, 0, 0, 0, F(1, 2), F(1, 2))
        assert ri.group2_mass == (F(1, 4), F(1, 4), F(1, 4), F(1, 4), 0, 0)
        # anchors: (1 -/+ sqrt(2 * 5/9 - 1)) / 2 = 1/3 and 2/3
        assert ri.rates_exact[4] == F(1, 3)
        assert ri.rates_exact[5] == F(2, 3)

    def test_pair_rates_bracket_centers(self, embedded_pair):
        import sympy as sp

        ri = embedded_pair
        for i in range(ri.m):
            lo, hi = ri.rates_exact[2 * i], ri.rates_exact[2 * i + 1]
            center = F(i + 1, ri.m + 1)
            assert sp.simplify(lo + hi - 2 * sp.Rational(center)) == 0
            gap_sq = sp.expand((hi - lo) ** 2)
            assert sp.Rational(gap_sq) == 2 * ri.scaled_weights[i]

    def test_embedded_instance_base_rates(self, embedded_pair):
        gs = derived_stats(embedded_pair.instance)
        # float embedding: rates are within representation error of 1/2
        for rate in gs.base_rate:
            assert abs(rate - F(1, 2)) < F(1, 10**12)

    def test_symbolic_base_rates_exact(self, embedded_pair):
        import sympy as sp

        ri = embedded_pair
        g1 = sum(sp.Rational(a) * r for a, r in zip(ri.group1_mass, ri.rates_exact))
        g2 = sum(sp.Rational(a) * r for a, r in zip(ri.group2_mass, ri.rates_exact))
        assert sp.expand(g1 - sp.Rational(1, 2)) == 0
        assert sp.expand(g2 - sp.Rational(1, 2)) == 0

    def test_single_weight_infeasible(self):
        with pytest.raises(ReductionInfeasibleError):
            reduce_subset_sum(SubsetSumInstance((1,), 1))

    def test_overweight_items_dropped(self):
        with pytest.warns(UserWarning):
            ri = reduce_subset_sum(SubsetSumInstance((5, 1, 2), 3))
        assert ri.kept_indices == (2, 3)
        assert ri.dropped_indices == (1,)
        assert ri.m == 2

    def test_all_dropped_rejected(self):
        with pytest.raises(DomainError):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                reduce_subset_sum(SubsetSumInstance((9,), 3))

    def test_larger_m_feasible(self):
        ri = reduce_subset_sum(SubsetSumInstance((1, 2, 3, 4), 10))
        assert ri.m == 4
        for r in ri.rates:
            assert 0.0 < r < 1.0


class TestEquation:
    def test_true_pairing(self, embedded_pair):
        part = encode_solution(embedded_pair, [1, 2])
        assert check_reduction_equation(embedded_pair, part)

    def test_all_singletons_false(self, embedded_pair):
        singles = Partition.from_blocks([[i] for i in range(1, 5)])
        assert not check_reduction_equation(embedded_pair, singles)

    def test_partial_pairing_false(self, embedded_pair):
        part = encode_solution(embedded_pair, [1])
        assert not check_reduction_equation(embedded_pair, part)

    def test_non_normal_partition_checked_symbolically(self, embedded_pair):
        # mixing the two pairs is not normal form; the equation fails there
        crossed = Partition.from_blocks([[1, 3], [2, 4]])
        assert not is_normal_form(embedded_pair, crossed)
        assert not check_reduction_equation(embedded_pair, crossed)

    def test_items_must_cover_pair_features(self, embedded_pair):
        with pytest.raises(DomainError):
            check_reduction_equation(
                embedded_pair, Partition.from_blocks([[1, 2]])
            )


class TestEncodingRoundTrip:
    def test_encode_decode(self, embedded_pair):
        part = encode_solution(embedded_pair, [2])
        assert is_normal_form(embedded_pair, part)
        assert decode_partition(embedded_pair, part) == frozenset({2})

    def test_encode_rejects_unknown(self, embedded_pair):
        with pytest.raises(DomainError):
            encode_solution(embedded_pair, [7])

    def test_encode_rejects_dropped(self):
        with pytest.warns(UserWarning):
            ri = reduce_subset_sum(SubsetSumInstance((5, 1, 2), 3))
        with pytest.raises(DomainError):
            encode_solution(ri, [1])
        # kept positions still encode by their original index
        part = encode_solution(ri, [2, 3])
        assert decode_partition(ri, part) == frozenset({2, 3})

    def test_decode_requires_normal_form(self, embedded_pair):
        crossed = Partition.from_blocks([[1, 3], [2, 4]])
        with pytest.raises(DomainError):
            decode_partition(embedded_pair, crossed)


class TestSearch:
    def test_solvable_agrees_with_oracle(self, embedded_pair):
        witness = search_normal_forms(embedded_pair)
        assert witness is not None
        decoded = frozenset(decode_partition(embedded_pair, witness))
        assert decoded == solve_subset_sum(SubsetSumInstance((1, 2), 3))

    def test_unsolvable_finds_nothing(self):
        ri = reduce_subset_sum(SubsetSumInstance((2, 3), 4))
        assert search_normal_forms(ri) is None
        assert solve_subset_sum(SubsetSumInstance((2, 3), 4)) is None


class TestSumOfSquares:
    def test_frozen_values(self):
        assert sum_of_squares_identity([F(1), F(1)]) == (0, 0)
        assert sum_of_squares_identity([F(0), F(1)]) == (F(1, 2), F(1, 2))
        assert sum_of_squares_identity([F(1), F(2), F(3)]) == (2, 2)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.fractions(min_value=-3, max_value=3), min_size=1, max_size=5))
    def test_identity_holds(self, values):
        lhs, rhs = sum_of_squares_identity(values)
        n = len(values)
        mean = sum(values) / n
        direct = sum((v - mean) ** 2 for v in values)
        assert lhs == rhs
        assert lhs == direct
