"""Brute-force oracle: profile enumeration against the partition-number
recurrence, and the permutation structure oracle against the profile route."""

from fractions import Fraction

import pytest

from assemblykit.classes import builtin_class
from assemblykit.errors import EmptySupportError
from assemblykit.moments import completely_additive, general_additive
from assemblykit.oracle import (Profile, oracle_coeff, oracle_moments,
                                oracle_pmf, profiles,
                                structure_oracle_permutations,
                                structure_oracle_pmf_permutations)


def partition_numbers(N):
    """p(0..N) by Euler's pentagonal-number recurrence."""
    p = [0] * (N + 1)
    p[0] = 1
    for n in range(1, N + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > n:
                break
            sign = -1 if k % 2 == 0 else 1
            total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def test_profile_counts_match_partition_numbers():
    p = partition_numbers(40)
    for n in range(41):
        assert sum(1 for _ in profiles(n)) == p[n]


def test_profile_count_spot_large():
    assert sum(1 for _ in profiles(50)) == partition_numbers(50)[50]


def test_profile_stream_order():
    # largest parts first, i.e. reverse lexicographic in the part list
    got = [prof.parts for prof in profiles(4)]
    assert got == [
        ((4, 1),),
        ((1, 1), (3, 1)),
        ((2, 2),),
        ((1, 2), (2, 1)),
        ((1, 4),),
    ]


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile(n=4, parts=((1, 1), (2, 1)))    # sums to 3
    prof = Profile(n=4, parts=((1, 2), (2, 1)))
    assert prof.multiplicity(1) == 2
    assert prof.multiplicity(3) == 0
    assert prof.num_components == 3
    assert prof.dense() == (2, 1, 0, 0)


def test_profile_weight_by_hand():
    cls = builtin_class("permutations")
    # two fixed points and one 2-cycle: (1/1)^2/2! * (1/2)^1/1!
    prof = Profile(n=4, parts=((1, 2), (2, 1)))
    assert prof.weight(cls) == Fraction(1, 2) * Fraction(1, 2)


def test_oracle_coeff_closed_forms():
    perm = builtin_class("permutations")
    for n in range(9):
        assert oracle_coeff(perm, n) == 1
    tr = builtin_class("two_regular_graphs")
    # one triangle on 3 points: Q(3) = lambda_3 = 1/6, so G(3) = 3!/6 = 1
    assert [oracle_coeff(tr, n) for n in (0, 1, 2, 3)] == \
        [1, 0, 0, Fraction(1, 6)]


def test_oracle_pmf_empty_support():
    tr = builtin_class("two_regular_graphs")
    with pytest.raises(EmptySupportError):
        oracle_pmf(tr, 2, 1)


def test_structure_oracle_against_profiles():
    """Averaging over all n! permutations must equal the profile route."""
    perm = builtin_class("permutations")
    w = completely_additive("w", lambda j: Fraction(1))
    for n in range(1, 8):
        assert structure_oracle_permutations(n, w) == oracle_moments(perm, n, w)


def test_structure_oracle_pmf_against_profiles():
    perm = builtin_class("permutations")
    for n in (1, 2, 5, 7):
        for j in (1, 2, 3):
            if j > n:
                continue
            assert structure_oracle_pmf_permutations(n, j) == \
                oracle_pmf(perm, n, j)


def test_oracle_moments_general_function():
    perm = builtin_class("permutations")
    distinct = general_additive("distinct", lambda j, k: Fraction(int(k >= 1)))
    mean, var = oracle_moments(perm, 3, distinct)
    # profiles of 3: (3): w=1/3 distinct=1; (1)(2): w=1/2 d=2; (1^3): w=1/6 d=1
    assert mean == Fraction(1, 3) + 2 * Fraction(1, 2) + Fraction(1, 6)
    second = Fraction(1, 3) + 4 * Fraction(1, 2) + Fraction(1, 6)
    assert var == second - mean * mean


def test_oracle_pmf_sums_to_one():
    for name in ("permutations", "set_partitions", "forests"):
        cls = builtin_class(name)
        for j in (1, 2, 3):
            assert sum(oracle_pmf(cls, 6, j)) == 1
