"""Moments engine: component-count laws, additive-functional moments via
the marked recurrence, and the independent pairwise route."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assemblykit.counting import coeff_table
from assemblykit.errors import EmptySupportError
from assemblykit.families import get_family
from assemblykit.moments import (comp_count_pmf, completely_additive,
                                 general_additive, mean_additive,
                                 moment_table, moments_additive,
                                 second_moment_pairwise, variance_additive)
from assemblykit.oracle import oracle_moments, oracle_pmf

W = completely_additive("w", lambda j: Fraction(1))


def harmonic(n):
    return sum(Fraction(1, i) for i in range(1, n + 1))


# --- component-count laws -----------------------------------------------------

def test_pmf_fixed_points_of_three(perm):
    pm = comp_count_pmf(perm, 3, 1)
    assert pm.probs == (Fraction(1, 3), Fraction(1, 2), Fraction(0), Fraction(1, 6))
    assert pm.p(1) == Fraction(1, 2)
    assert pm.p(17) == 0


def test_pmf_normalization_and_support(classes):
    for cls in classes.values():
        for n in range(1, 31):
            if coeff_table(cls, n).q(n) == 0:
                continue
            for j in range(1, n + 1):
                pm = comp_count_pmf(cls, n, j)
                assert sum(pm.probs) == 1, (cls.name, n, j)
                assert all(p >= 0 for p in pm.probs)


def test_pmf_matches_oracle_spot(classes):
    for cls in classes.values():
        for n, j in ((6, 1), (6, 2), (9, 3)):
            if coeff_table(cls, n).q(n) == 0:
                continue
            assert comp_count_pmf(cls, n, j).probs == oracle_pmf(cls, n, j)


def test_size_weighted_counts_sum_to_order(classes):
    """sum_j j E[k_j] = n: components tile the whole structure."""
    for cls in classes.values():
        for n in range(1, 31):
            if coeff_table(cls, n).q(n) == 0:
                continue
            total = sum(comp_count_pmf(cls, n, j).mean() * j
                        for j in range(1, n + 1))
            assert total == n, (cls.name, n)


def test_pmf_empty_support(classes):
    with pytest.raises(EmptySupportError):
        comp_count_pmf(classes["two_regular_graphs"], 2, 1)


def test_pmf_scaled_mode_close(classes):
    for cls in classes.values():
        exact = comp_count_pmf(cls, 30, 2)
        sc = comp_count_pmf(cls, 30, 2, mode="float")
        for k, p in enumerate(exact.probs):
            assert sc.p(k) == pytest.approx(float(p), rel=1e-11, abs=1e-300)


# --- moments of additive functionals -------------------------------------------

def test_cycle_count_moments_frozen(perm):
    mean, var = moments_additive(perm, 3, W)
    assert (mean, var) == (Fraction(11, 6), Fraction(17, 36))


def test_moments_match_oracle_all_classes(classes):
    distinct = general_additive("distinct",
                                lambda j, k: Fraction(int(k >= 1)))
    for cls in classes.values():
        for n in range(1, 13):
            if coeff_table(cls, n).q(n) == 0:
                continue
            for h in (W, distinct):
                assert moments_additive(cls, n, h) == \
                    oracle_moments(cls, n, h), (cls.name, n, h.name)


def test_mean_and_variance_shortcuts(perm):
    assert mean_additive(perm, 10, W) == harmonic(10)
    assert variance_additive(perm, 10, W) == \
        harmonic(10) - sum(Fraction(1, i * i) for i in range(1, 11))


def test_moment_table_matches_pointwise(classes):
    for cls in classes.values():
        table = moment_table(cls, 20, W)
        for n in range(1, 21):
            if coeff_table(cls, n).q(n) == 0:
                assert table[n] is None
            else:
                assert table[n] == moments_additive(cls, n, W)


def test_mean_route_against_pmf_route(classes):
    """E h = sum_j sum_k h(j,k) P(k_j = k) must hold whatever the engine does."""
    log2 = general_additive("steps", lambda j, k: Fraction(k * (k + 1), 2))
    for cls in classes.values():
        n = 12
        direct = mean_additive(cls, n, log2)
        via_pmf = sum(
            sum(log2.h(j, k) * p for k, p in enumerate(comp_count_pmf(cls, n, j).probs))
            for j in range(1, n + 1))
        assert direct == via_pmf


def _random_rational_h(seed, span):
    rng = random.Random(seed)
    vals = {j: Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            for j in range(1, span + 1)}
    return completely_additive(f"rand{seed}", lambda j: vals.get(j, Fraction(0)))


@pytest.mark.parametrize("n", [8, 13, 21])
def test_pairwise_route_agrees(classes, n):
    """Second moment out of single+pair restricted tables vs the marked DP."""
    h = _random_rational_h(n, n)
    for cls in classes.values():
        if coeff_table(cls, n).q(n) == 0:
            continue
        mean, var = moments_additive(cls, n, h)
        second = second_moment_pairwise(cls, n, h)
        assert second == var + mean * mean, (cls.name, n)


def test_pairwise_route_larger_order(perm):
    h = _random_rational_h(99, 34)
    mean, var = moments_additive(perm, 34, h)
    assert second_moment_pairwise(perm, 34, h) == var + mean * mean


@settings(max_examples=25, deadline=None)
@given(c=st.fractions(min_value=Fraction(-5), max_value=Fraction(5)),
       seed=st.integers(min_value=0, max_value=50))
def test_moment_scaling_and_shift(perm, c, seed):
    h = _random_rational_h(seed, 9)
    scaled = completely_additive("ch", lambda j: c * h.a(j))
    mean, var = moments_additive(perm, 9, h)
    mean_c, var_c = moments_additive(perm, 9, scaled)
    assert mean_c == c * mean
    assert var_c == c * c * var


@settings(max_examples=25, deadline=None)
@given(s1=st.integers(min_value=0, max_value=50),
       s2=st.integers(min_value=51, max_value=99))
def test_mean_is_linear(perm, s1, s2):
    h1 = _random_rational_h(s1, 9)
    h2 = _random_rational_h(s2, 9)
    both = completely_additive("sum", lambda j: h1.a(j) + h2.a(j))
    assert mean_additive(perm, 9, both) == \
        mean_additive(perm, 9, h1) + mean_additive(perm, 9, h2)


def test_scaled_moments_close(classes):
    for cls in classes.values():
        exact = moments_additive(cls, 40, W)
        approx = moments_additive(cls, 40, W, mode="float")
        assert approx[0] == pytest.approx(float(exact[0]), rel=1e-10)
        assert approx[1] == pytest.approx(float(exact[1]), rel=1e-10)


def test_float_only_family_refused_in_exact_mode(perm):
    log_size = get_family("log_size").make(10)
    with pytest.raises(ValueError, match="exact"):
        moments_additive(perm, 10, log_size)
    mean, _ = moments_additive(perm, 10, log_size, mode="float")
    assert isinstance(mean, float)


def test_moments_empty_order(classes):
    with pytest.raises(EmptySupportError):
        moments_additive(classes["two_regular_graphs"], 1, W)


def test_general_h_zero_at_k0():
    f = general_additive("g", lambda j, k: Fraction(j * k + 1))
    assert f.h(3, 0) == 0          # absent size contributes nothing
    assert f.h(3, 2) == 7
    comp = completely_additive("a", lambda j: Fraction(j))
    assert comp.h(4, 3) == 12
    assert comp.a(4) == 4
    with pytest.raises(ValueError, match="not completely additive"):
        f.a(3)
