from fractions import Fraction as F

import pytest

from riskaudit import Instance, SubsetSumInstance, feature, reduce_subset_sum


@pytest.fixture
def skewed():
    # two features, disjoint groups, unequal base rates (1/2 vs 1/4)
    return Instance(
        (
            feature("s1", F(1, 2), 2, 0),
            feature("s2", F(1, 4), 0, 4),
        )
    )


@pytest.fixture
def balanced():
    # equal base rates on both groups; identity scoring is fair
    return Instance(
        (
            feature("s1", F(1, 4), 1, 1),
            feature("s2", F(3, 4), 1, 1),
        )
    )


@pytest.fixture
def rigid():
    # equal base rates but no non-trivial fair assignment exists
    return Instance(
        (
            feature("s1", F(1, 4), 1, 0),
            feature("s2", F(3, 4), 1, 0),
            feature("s3", F(1, 2), 0, 2),
        )
    )


@pytest.fixture(scope="session")
def embedded_pair():
    # weights (1, 2), target 3: solvable by taking both
    return reduce_subset_sum(SubsetSumInstance((1, 2), 3))
