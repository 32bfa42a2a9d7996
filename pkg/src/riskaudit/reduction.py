"""Subset-sum embedding into the fair-assignment decision problem.

Given positive integer weights w_1..w_m and a target T, the construction
builds a two-group population in which a non-trivial integral fair
assignment exists exactly when some subset of the weights sums to T.

Shape of the construction, for m kept weights:

* scaled weights  ``w_hat_i = w_i / (T * m**4)``
* pair centers    ``c_i = i / (m + 1)`` with half-gaps ``sqrt(w_hat_i / 2)``,
  giving group-2 probabilities ``p(2i-1) = c_i - gap_i`` and
  ``p(2i) = c_i + gap_i``; each pair's two features each hold mass
  ``1 / (2m)`` of group 2
* two anchor features holding half of group 1 each, at probabilities
  ``(1 -+ sqrt(2g - 1)) / 2`` where ``g`` is the positive-class average both
  groups are forced to share; g has the rational closed form
  ``(1/m) * sum_i (2 c_i**2 + w_hat_i) - 1/m**5``

Fair groupings of the group-2 features are characterized by the rational
equation ``sum over blocks q of (1/|q|) * sum over pairs in q of
(p_i - p_j)**2 == 1/m**4``; blocks that keep a pair together contribute
exactly ``w_hat_i``, so subset choices map onto pairings.

Probabilities other than the pair centers are quadratic irrationals, so the
equation checker works symbolically (sympy) and the embedded Instance holds
float approximations meant for tolerance-based search only.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import DocumentError, DomainError, ReductionInfeasibleError
from .model import FeatureVector, Instance, require_valid
from .partitions import Partition


@dataclass(frozen=True)
class SubsetSumInstance:
    """Positive integer weights and a positive integer target."""

    weights: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if not self.weights:
            raise DomainError("at least one weight required")
        for w in self.weights:
            if not isinstance(w, int) or isinstance(w, bool) or w < 1:
                raise DomainError(f"weights must be positive integers, got {w!r}")
        if not isinstance(self.target, int) or self.target < 1:
            raise DomainError(f"target must be a positive integer, got {self.target!r}")


def solve_subset_sum(ss: SubsetSumInstance) -> Optional[frozenset[int]]:
    """Independent exhaustive oracle. Returns 1-based indices of a solving
    subset (smallest bitmask first), or None. Exponential in len(weights)."""
    n = len(ss.weights)
    for mask in range(1, 1 << n):
        total = 0
        for i in range(n):
            if mask >> i & 1:
                total += ss.weights[i]
        if total == ss.target:
            return frozenset(i + 1 for i in range(n) if mask >> i & 1)
    return None


@dataclass(frozen=True)
class ReducedInstance:
    """Output of the construction.

    Exact rational side data lives in `scaled_weights` and
    `required_pos_avg`; `rates_exact` holds the symbolic probabilities of all
    2m + 2 features (pairs first, anchors last), `rates` their float images.
    `instance` embeds the float-mode population: group 1 masses on the two
    anchors, group 2 spread uniformly over the 2m pair features.
    """

    input_weights: tuple[int, ...]
    target: int
    kept_indices: tuple[int, ...]
    dropped_indices: tuple[int, ...]
    m: int
    scaled_weights: tuple[Fraction, ...]
    required_pos_avg: Fraction
    rates_exact: tuple
    rates: tuple[float, ...]
    group1_mass: tuple[Fraction, ...]
    group2_mass: tuple[Fraction, ...]
    instance: Instance

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(self.input_weights[i - 1] for i in self.kept_indices)


def _pair_center(i: int, m: int) -> Fraction:
    return Fraction(i, m + 1)


def _half_gap_squared(w_hat: Fraction) -> Fraction:
    return w_hat / 2


def reduce_subset_sum(ss: SubsetSumInstance) -> ReducedInstance:
    """Run the construction.

    Weights above the target cannot sit in any solution; they are dropped
    with a warning before the embedding. Raises ReductionInfeasibleError when
    the required positive-class average g violates 2g - 1 >= 0 or a derived
    probability would leave [0, 1] (both can only happen at m == 1).
    """
    import sympy as sp

    kept = [i + 1 for i, w in enumerate(ss.weights) if w <= ss.target]
    dropped = [i + 1 for i, w in enumerate(ss.weights) if w > ss.target]
    if dropped:
        warnings.warn(
            f"dropping weights above the target at positions {dropped}", stacklevel=2
        )
    if not kept:
        raise DomainError("no weight is at most the target; nothing to embed")
    m = len(kept)
    T = ss.target
    scale = T * m**4
    w_hat = tuple(Fraction(ss.weights[i - 1], scale) for i in kept)

    g = (
        Fraction(1, m)
        * sum((2 * _pair_center(i, m) ** 2 + w_hat[i - 1] for i in range(1, m + 1)), Fraction(0))
        - Fraction(1, m**5)
    )
    disc = 2 * g - 1
    if disc < 0:
        raise ReductionInfeasibleError(
            f"required positive-class average {g} gives 2g - 1 = {disc} < 0",
            required_pos_avg=g,
        )
    for i in range(1, m + 1):
        c = _pair_center(i, m)
        e = _half_gap_squared(w_hat[i - 1])
        if e > c * c or e > (1 - c) * (1 - c):
            raise ReductionInfeasibleError(
                f"pair {i} would leave [0, 1]", required_pos_avg=g
            )
    if disc > 1:
        raise ReductionInfeasibleError(
            f"required positive-class average {g} exceeds 1", required_pos_avg=g
        )

    rates_exact = []
    for i in range(1, m + 1):
        c = sp.Rational(_pair_center(i, m))
        gap = sp.sqrt(sp.Rational(_half_gap_squared(w_hat[i - 1])))
        rates_exact.append(c - gap)
        rates_exact.append(c + gap)
    root = sp.sqrt(sp.Rational(disc))
    half = sp.Rational(1, 2)
    rates_exact.append(half - root / 2)
    rates_exact.append(half + root / 2)

    rates = tuple(float(r) for r in rates_exact)
    n_pairs = 2 * m
    group1 = tuple(
        Fraction(1, 2) if j >= n_pairs else Fraction(0) for j in range(n_pairs + 2)
    )
    group2 = tuple(
        Fraction(1, 2 * m) if j < n_pairs else Fraction(0) for j in range(n_pairs + 2)
    )
    features = tuple(
        FeatureVector(f"s{j + 1}", Fraction(rates[j]), group1[j], group2[j])
        for j in range(n_pairs + 2)
    )
    instance = require_valid(Instance(features))

    return ReducedInstance(
        input_weights=tuple(ss.weights),
        target=T,
        kept_indices=tuple(kept),
        dropped_indices=tuple(dropped),
        m=m,
        scaled_weights=w_hat,
        required_pos_avg=g,
        rates_exact=tuple(rates_exact),
        rates=rates,
        group1_mass=group1,
        group2_mass=group2,
        instance=instance,
    )


def _require_pair_cover(ri: ReducedInstance, part: Partition) -> None:
    expect = frozenset(range(1, 2 * ri.m + 1))
    if part.members() != expect:
        raise DomainError(
            f"partition must cover the group-2 indices 1..{2 * ri.m} exactly"
        )


def is_normal_form(ri: ReducedInstance, part: Partition) -> bool:
    """True when every block is a singleton or a full pair {2i-1, 2i}."""
    _require_pair_cover(ri, part)
    for block in part.blocks:
        if len(block) == 1:
            continue
        if len(block) == 2 and block[0] % 2 == 1 and block[1] == block[0] + 1:
            continue
        return False
    return True


def check_reduction_equation(ri: ReducedInstance, part: Partition) -> bool:
    """Decide, exactly, whether a grouping of the pair features is fair.

    Normal-form partitions reduce to a rational identity: kept-together pairs
    contribute their scaled weight, singletons contribute nothing. Any other
    partition is expanded symbolically; the difference from the target is a
    rational combination of distinct square-free radicals, which is zero only
    when every coefficient is zero.
    """
    _require_pair_cover(ri, part)
    target = Fraction(1, ri.m**4)

    if is_normal_form(ri, part):
        total = Fraction(0)
        for block in part.blocks:
            if len(block) == 2:
                pair_index = (block[0] + 1) // 2
                total += ri.scaled_weights[pair_index - 1]
        return total == target

    import sympy as sp

    lhs = sp.Integer(0)
    for block in part.blocks:
        inner = sp.Integer(0)
        for a, b in combinations(block, 2):
            diff = ri.rates_exact[a - 1] - ri.rates_exact[b - 1]
            inner += diff * diff
        lhs += sp.Rational(1, len(block)) * inner
    residual = sp.expand(lhs - sp.Rational(target))
    return all(c == 0 for c in residual.as_coefficients_dict().values())


def encode_solution(ri: ReducedInstance, chosen: Iterable[int]) -> Partition:
    """Partition that keeps the chosen weights' pairs together.

    `chosen` uses 1-based positions in the original weight list; positions
    that were dropped (or are out of range) are rejected.
    """
    chosen_set = set(chosen)
    position = {orig: k + 1 for k, orig in enumerate(ri.kept_indices)}
    blocks: list[tuple[int, ...]] = []
    paired: set[int] = set()
    for orig in sorted(chosen_set):
        if orig not in position:
            raise DomainError(
                f"weight position {orig} is not part of the embedding"
            )
        i = position[orig]
        blocks.append((2 * i - 1, 2 * i))
        paired.update(blocks[-1])
    for j in range(1, 2 * ri.m + 1):
        if j not in paired:
            blocks.append((j,))
    return Partition.from_blocks(blocks)


def decode_partition(ri: ReducedInstance, part: Partition) -> frozenset[int]:
    """Read a subset choice off a normal-form partition.

    Returns the original 1-based weight positions whose pairs stay together.
    When the reduction equation holds for `part`, those weights sum to the
    target.
    """
    if not is_normal_form(ri, part):
        raise DomainError("partition is not in paired/singleton normal form")
    out = set()
    for block in part.blocks:
        if len(block) == 2:
            pair_index = (block[0] + 1) // 2
            out.add(ri.kept_indices[pair_index - 1])
    return frozenset(out)


def search_normal_forms(ri: ReducedInstance) -> Optional[Partition]:
    """First normal-form partition satisfying the reduction equation, if any.

    Scans subset choices in increasing bitmask order; deterministic.
    """
    m = ri.m
    for mask in range(1 << m):
        chosen = [ri.kept_indices[i] for i in range(m) if mask >> i & 1]
        part = encode_solution(ri, chosen)
        if check_reduction_equation(ri, part):
            return part
    return None


def sum_of_squares_identity(values: Sequence) -> tuple[Fraction, Fraction]:
    """Both sides of the mean-square spread identity for a rational vector:
    sum of squares minus k times the squared mean, against the normalized sum
    of pairwise squared differences. The two returned values are always
    equal; callers use the pair as a self-check.
    """
    from .model import as_fraction

    z = [as_fraction(v) for v in values]
    if not z:
        raise DomainError("empty vector")
    k = len(z)
    s = sum(z, Fraction(0))
    lhs = sum((x * x for x in z), Fraction(0)) - s * s / k
    rhs = sum(((a - b) ** 2 for a, b in combinations(z, 2)), Fraction(0)) / k
    return lhs, rhs
