"""Acceptance gate: one test per promised behavior, run end to end.

Expected values come from in-test oracles (Bell triangle, direct
partition summation, the independent-Bernoulli representation of cycle
counts) or from frozen closed forms; the engines under test never
supply their own expectations.  Tolerances are pinned here and nowhere
else: exact equality in exact mode, 1e-9 relative for scaled floats,
3 standard errors for sampled frequencies, a 5% sup-growth allowance
for the ratio sweeps.
"""

import math
import sys
import time
from fractions import Fraction

from assemblykit import cli
from assemblykit.bounds import (moment_report, tk_ratio_sweep,
                                tk_rhs_complete, tk_rhs_general)
from assemblykit.classes import builtin_class
from assemblykit.conditions import (WeaklyLogParams, check_condition,
                                    suggest_constants)
from assemblykit.counting import assembly_count, coeff_table
from assemblykit.families import FAMILY_NAMES, RATIONAL_FAMILY_NAMES, get_family
from assemblykit.moments import comp_count_pmf, moment_table, moments_additive
from assemblykit.oracle import (oracle_coeff, oracle_moments_bundle,
                                oracle_pmf, structure_oracle_permutations)
from assemblykit.sampler import (SamplerConfig, binomial_stderr,
                                 chi_square_marginal, empirical_pmf_value,
                                 sample_batch)

SEED = 20260814


def _family(name):
    return get_family(name, seed=SEED) if name == "rademacher" else get_family(name)


def _rel_close(got, want, rel=1e-9):
    # below the smallest normal double the format itself cannot hold nine
    # significant digits, so such values only need to agree on being tiny
    if abs(want) < sys.float_info.min:
        return abs(got) < sys.float_info.min
    return got == want or abs(got - want) <= rel * max(abs(got), abs(want))


def test_criterion_01_engines_match_the_enumeration_oracle_to_n40(classes):
    start = time.time()
    fams = [_family(name) for name in RATIONAL_FAMILY_NAMES]
    for cls in classes.values():
        full = coeff_table(cls, 40)
        # one DP pass each for the order-independent functions
        tables = {f.name: moment_table(cls, 40, f.make(40))
                  for f in fams if f.n_independent}
        for n in range(41):
            assert full.q(n) == oracle_coeff(cls, n)
            if full.q(n) == 0:
                continue
            for j in range(1, n + 1):
                got = comp_count_pmf(cls, n, j, table_n=40)
                assert got.probs == oracle_pmf(cls, n, j)
            if n == 0:
                continue
            hs = [f.make(n) for f in fams]
            expected = oracle_moments_bundle(cls, n, hs)
            for f, h, want in zip(fams, hs, expected):
                got = tables[f.name][n] if f.n_independent \
                    else moments_additive(cls, n, h)
                assert got == want, (cls.name, f.name, n)
    assert time.time() - start < 300


def _partitions_parts_ge3(n, max_part):
    # descending parts, every part >= 3
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), 2, -1):
        for rest in _partitions_parts_ge3(n - p, p):
            yield rest + (p,)


def _bell_numbers(N):
    # Bell triangle: each row starts with the previous row's last entry
    row = [1]
    out = [1]
    for _ in range(N):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
        out.append(row[0])
    return out


def test_criterion_02_builtin_counts_match_closed_forms():
    perm = builtin_class("permutations")
    table = coeff_table(perm, 500)
    assert all(table.q(n) == 1 for n in range(501))

    mappings = builtin_class("mappings")
    assert assembly_count(mappings, 0) == 1
    for n in range(1, 26):
        assert assembly_count(mappings, n) == n ** n

    # cycles on >= 3 points: re-derive G(n) by summing over partitions
    two_reg = builtin_class("two_regular_graphs")
    frozen = (1, 0, 0, 1, 3, 12, 70, 465, 3507)
    for n, want in enumerate(frozen):
        q = Fraction(0)
        for parts in _partitions_parts_ge3(n, n):
            w = Fraction(1)
            for j in set(parts):
                s = parts.count(j)
                w *= Fraction(1, 2 * j) ** s / math.factorial(s)
            q += w
        assert math.factorial(n) * q == want
        assert assembly_count(two_reg, n) == want

    bell = _bell_numbers(20)
    setp = builtin_class("set_partitions")
    for n in range(21):
        assert assembly_count(setp, n) == bell[n]


def test_criterion_03_permutation_cycle_count_moments_are_harmonic(perm):
    w = _family("w")
    # the cycle count is a sum of independent Bernoulli(1/i), i <= n;
    # check that representation against raw structure enumeration first
    for n in range(1, 9):
        mean = sum(Fraction(1, i) for i in range(1, n + 1))
        var = sum(Fraction(1, i) - Fraction(1, i * i) for i in range(1, n + 1))
        assert (mean, var) == structure_oracle_permutations(n, w.make(n))
    table = moment_table(perm, 200, w.make(200))
    H = Fraction(0)
    H2 = Fraction(0)
    for n in range(1, 201):
        H += Fraction(1, n)
        H2 += Fraction(1, n * n)
        assert table[n] == (H, H - H2)


def test_criterion_04_complete_bound_on_permutations_is_harmonic(perm):
    w = _family("w").make(200)
    table = moment_table(perm, 200, w)
    H = Fraction(0)
    H2 = Fraction(0)
    for n in range(1, 201):
        H += Fraction(1, n)
        H2 += Fraction(1, n * n)
        rhs2 = tk_rhs_complete(perm, n, w, table_n=200)
        assert rhs2 == H
        _, variance = table[n]
        ratio2 = variance / rhs2
        assert ratio2 == 1 - H2 / H
        assert ratio2 < 1
    # end-to-end report object at one order
    rep = moment_report(perm, 40, w)
    assert rep.rhs2 == sum(Fraction(1, i) for i in range(1, 41))
    assert rep.ratio2 == rep.variance / rep.rhs2 < 1


def test_criterion_05_general_bound_equals_pmf_second_moments(classes):
    fams = [_family(name) for name in RATIONAL_FAMILY_NAMES]
    for cls in classes.values():
        full = coeff_table(cls, 60)
        for n in range(1, 61):
            if full.q(n) == 0:
                continue
            pmfs = [comp_count_pmf(cls, n, j, table_n=60)
                    for j in range(1, n + 1)]
            for fam in fams:
                h = fam.make(n)
                direct = Fraction(0)
                for pmf in pmfs:
                    for k in range(1, len(pmf.probs)):
                        hv = Fraction(h.h(pmf.j, k))
                        if hv:
                            direct += hv * hv * pmf.probs[k]
                assert tk_rhs_general(cls, n, h, table_n=60) == direct, \
                    (cls.name, fam.name, n)


def test_criterion_06_sweep_ratios_finite_and_sup_stable_within_5pct():
    grown = []
    for cname in ("permutations", "mappings", "two_regular_graphs"):
        cls = builtin_class(cname)
        for fname in FAMILY_NAMES:
            sweep = tk_ratio_sweep(cls, _family(fname), (1, 200), mode="float")
            for rep in sweep.reports:
                for which in ("ratio1", "ratio2"):
                    v = getattr(rep, which)
                    assert v is None or math.isfinite(v), \
                        (cname, fname, which, rep.n)
            for which in ("ratio1", "ratio2"):
                sup100 = sweep.sup_ratio(which, n_cap=100)
                sup200 = sweep.sup_ratio(which, n_cap=200)
                if sup100 is None:
                    continue
                if not sup200 <= 1.05 * sup100:
                    grown.append(
                        f"  {cname}/{fname} {which}: "
                        f"sup[1,100]={sup100:.6f} sup[1,200]={sup200:.6f} "
                        f"(+{(sup200 / sup100 - 1) * 100:.2f}%)")
    assert not grown, \
        "sup ratio grew more than 5% when the range doubled:\n" + "\n".join(grown)


def test_criterion_07_scaled_float_mode_tracks_exact_within_1e9(classes):
    for cls in classes.values():
        exact = coeff_table(cls, 200)
        scaled = coeff_table(cls, 200, "float")
        rho = Fraction(cls.rho)
        power = Fraction(1)
        for n in range(201):
            want = float(exact.q(n) * power)
            assert _rel_close(scaled.q(n), want), (cls.name, n)
            power *= rho

        for n, sizes in ((60, range(1, 61)),
                         (200, list(range(1, 11)) + [20, 50, 100, 150, 200])):
            for j in sizes:
                pe = comp_count_pmf(cls, n, j, "exact", table_n=n)
                pf = comp_count_pmf(cls, n, j, "float", table_n=n)
                for ke, kf in zip(pe.probs, pf.probs):
                    assert _rel_close(kf, float(ke)), (cls.name, n, j)

        for fname in ("w", "rademacher", "distinct_sizes"):
            h = _family(fname).make(200)
            te = moment_table(cls, 200, h)
            tf = moment_table(cls, 200, h, "float")
            for n in range(1, 201):
                if te[n] is None:
                    assert tf[n] is None
                    continue
                assert _rel_close(tf[n][0], float(te[n][0])), (cls.name, fname, n)
                assert _rel_close(tf[n][1], float(te[n][1])), (cls.name, fname, n)
        half = _family("half_support")
        for n in (60, 200):
            me, ve = moments_additive(cls, n, half.make(n))
            mf, vf = moments_additive(cls, n, half.make(n), "float")
            assert _rel_close(mf, float(me)) and _rel_close(vf, float(ve))


def test_criterion_08_condition_checker_constants_and_verdicts():
    perm = builtin_class("permutations")
    sug = suggest_constants(perm, Fraction(1), 100)
    assert sug.Theta == 1
    assert sug.theta == 1
    assert sug.n0 == 1
    assert abs(sug.theta_prime - math.exp(-1)) <= 1e-9

    two_reg = builtin_class("two_regular_graphs")
    auto = suggest_constants(two_reg, Fraction(1), 200)
    params = WeaklyLogParams(rho=Fraction(1), Theta=Fraction(1, 2),
                             theta=Fraction(1, 4), n0=4,
                             theta_prime=auto.theta_prime)
    for condition in (2, 3, 4):
        verdict = check_condition(two_reg, params, condition, 200)
        assert verdict.holds, condition

    forests = builtin_class("forests")
    v = check_condition(forests, WeaklyLogParams(rho=forests.rho, theta=0.1, n0=10),
                        "lower_sum", 2000)
    assert not v.holds and v.witness is not None

    setp = builtin_class("set_partitions")
    v = check_condition(setp, WeaklyLogParams(rho=Fraction(1), theta=Fraction(1, 10), n0=10),
                        "lower_sum", 100)
    assert not v.holds and v.witness is not None


def test_criterion_09_sampler_matches_exact_laws():
    start = time.time()
    reps = 100_000
    for cname, n, j in (("permutations", 20, 1), ("two_regular_graphs", 20, 3)):
        cls = builtin_class(cname)
        p0 = float(comp_count_pmf(cls, n, j).p(0))
        batch = sample_batch(cls, n, reps, SamplerConfig(seed=SEED))
        emp = empirical_pmf_value(batch, j, 0)
        assert abs(emp - p0) <= 3 * binomial_stderr(p0, reps), (cname, emp, p0)

    suite = (("permutations", 30, 1), ("mappings", 30, 1),
             ("two_regular_graphs", 30, 3), ("set_partitions", 8, 1),
             ("forests", 6, 1))
    for cname, n, j in suite:
        cls = builtin_class(cname)
        res = chi_square_marginal(cls, n, j, reps, SamplerConfig(seed=SEED))
        assert not res.reject, (cname, res.pvalue)
    assert time.time() - start < 60


def test_criterion_10_cli_reruns_are_byte_identical(capsys):
    commands = (
        ("count", "--class", "permutations", "--n", "8"),
        ("count", "--class", "two_regular_graphs", "--n", "8", "--g",
         "--format", "json"),
        ("pmf", "--class", "set_partitions", "--n", "6", "--j", "2"),
        ("moments", "--class", "mappings", "--n", "12", "--family", "w",
         "--mode", "float"),
        ("tk", "--class", "permutations", "--n", "20",
         "--family", "distinct_sizes"),
        ("sweep", "--class", "two_regular_graphs", "--n-min", "1",
         "--n-max", "40", "--family", "w", "--format", "json"),
        ("check", "--class", "permutations", "--N", "60", "--auto",
         "--format", "json"),
        ("sample", "--class", "permutations", "--n", "15", "--reps", "500",
         "--seed", "99"),
    )
    for argv in commands:
        runs = []
        for extra in ((), (), ("--threads", "4")):
            code = cli.main(list(argv) + list(extra))
            out = capsys.readouterr().out
            assert code == 0, argv
            runs.append(out.encode())
        assert runs[0] == runs[1] == runs[2], argv
