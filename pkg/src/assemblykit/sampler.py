"""Exact sampling of component profiles by conditioned Poisson rejection.

Independent draws Z_j ~ Poisson(lambda_j x^j), conditioned on the event
sum_j j Z_j = n, reproduce the uniform-measure profile law at order n
for any tilt x > 0; the tilt only moves the acceptance rate.  The tuner
solves sum_{j<=n} j lambda_j x^j = n by bisection on (0, rho] (the mean
total is increasing in x) and falls back to x = rho when even that
cannot reach n, which is the typical situation for classes that are not
weakly logarithmic.

All randomness flows from one seed through a named generator
(numpy PCG64).  Draws happen in fixed-size batches consumed in order,
so results depend only on (seed, reps); a parallel layout would give
each worker chunk its own jumped stream and merge in chunk index order,
which keeps that determinism, but sampling here is single-threaded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import stats as _scipy_stats

from .classes import AssemblyClass
from .counting import coeff_table
from .errors import EmptySupportError, RejectionLimitError
from .moments import AdditiveFunction, SpectrumPMF, comp_count_pmf
from .oracle import Profile

_BATCH = 1 << 14
TILT_TOL = 1e-10


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    tilt: Optional[float] = None          # None: tune automatically
    max_rejections: int = 50_000_000

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("sampler needs an explicit seed")
        if self.tilt is not None and not (self.tilt > 0):
            raise ValueError("tilt must be positive")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")


def _mean_total(cls: AssemblyClass, n: int, x: float) -> float:
    # sum_{j<=n} j lambda_j x^j, in log space: weights can overflow floats
    lx = math.log(x)
    total = 0.0
    for j in range(1, n + 1):
        ll = cls.log_lam(j)
        if ll == -math.inf:
            continue
        total += math.exp(ll + math.log(j) + j * lx)
    return total


def tune_tilt(cls: AssemblyClass, n: int, tol: float = TILT_TOL) -> float:
    """Tilt x with mean total size n, or rho when no such x <= rho exists."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if all(cls.lam(j) == 0 for j in range(1, n + 1)):
        raise EmptySupportError(
            f"class {cls.name!r} has no positive weight at sizes <= {n}")
    rho = float(cls.rho)
    if _mean_total(cls, n, rho) < n:
        return rho
    lo, hi = 0.0, rho
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= 0.0 or mid == lo or mid == hi:
            break
        val = _mean_total(cls, n, mid)
        if abs(val - n) <= tol:
            return mid
        if val < n:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _poisson_means(cls: AssemblyClass, n: int, x: float) -> np.ndarray:
    lx = math.log(x)
    means = np.zeros(n)
    for j in range(1, n + 1):
        ll = cls.log_lam(j)
        if ll > -math.inf:
            means[j - 1] = math.exp(ll + j * lx)
    return means


@dataclass
class _DrawStats:
    attempts: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def _sample_counts(cls: AssemblyClass, n: int, x: float, rng, want: int,
                   max_rejections: int):
    """Accepted count-vectors (want x n int array) plus draw statistics."""
    means = _poisson_means(cls, n, x)
    sizes = np.arange(1, n + 1)
    rows = []
    stats = _DrawStats()
    got = 0
    # start small for small requests so the reported rejection count stays
    # close to what a scalar loop would see, then widen for throughput
    width = min(_BATCH, max(4 * want, 64))
    while got < want:
        if stats.attempts - stats.accepted > max_rejections:
            raise RejectionLimitError(
                f"gave up after {stats.attempts} attempts "
                f"(acceptance estimate {stats.acceptance_rate:.3g}) "
                f"for class {cls.name!r} at n={n}",
                attempts=stats.attempts, accepted=stats.accepted)
        batch = rng.poisson(lam=means, size=(width, n))
        totals = batch @ sizes
        hits = batch[totals == n]
        stats.attempts += width
        stats.accepted += len(hits)
        if len(hits):
            rows.append(hits)
        got += len(hits)
        width = min(_BATCH, width * 4)
    counts = np.concatenate(rows)[:want]
    return counts, stats


def _profile_from_counts(n: int, counts) -> Profile:
    parts = tuple((j + 1, int(c)) for j, c in enumerate(counts) if c)
    return Profile(n=n, parts=parts)


def _require_support(cls, n):
    if n < 1:
        raise ValueError("n must be >= 1")
    if coeff_table(cls, n, "float").q(n) <= 0.0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")


def sample_profile(cls: AssemblyClass, n: int, config: SamplerConfig):
    """One exact profile draw; returns (Profile, rejection count)."""
    _require_support(cls, n)
    x = config.tilt if config.tilt is not None else tune_tilt(cls, n)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    counts, stats = _sample_counts(cls, n, x, rng, 1, config.max_rejections)
    return _profile_from_counts(n, counts[0]), stats.attempts - stats.accepted


@dataclass(frozen=True)
class SampleBatch:
    n: int
    reps: int
    seed: int
    tilt: float
    attempts: int        # every Poisson attempt drawn, kept or not
    accepted: int        # every hit, including overshoot past reps
    counts: np.ndarray   # reps x n matrix of component counts

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def sample_batch(cls: AssemblyClass, n: int, reps: int,
                 config: SamplerConfig) -> SampleBatch:
    """reps accepted profiles as a count matrix, deterministic in the seed."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    _require_support(cls, n)
    x = config.tilt if config.tilt is not None else tune_tilt(cls, n)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    counts, stats = _sample_counts(cls, n, x, rng, reps, config.max_rejections)
    return SampleBatch(n=n, reps=reps, seed=config.seed, tilt=x,
                       attempts=stats.attempts, accepted=stats.accepted,
                       counts=counts)


@dataclass(frozen=True)
class EmpiricalMoments:
    mean: float
    variance: float
    stderr: float
    reps: int
    tilt: float
    acceptance_rate: float


def empirical_moments(cls: AssemblyClass, n: int, h: AdditiveFunction,
                      reps: int, config: SamplerConfig) -> EmpiricalMoments:
    """Sample mean/variance of h with the standard error of the mean."""
    if reps < 2:
        raise ValueError("reps must be >= 2 for a variance estimate")
    batch = sample_batch(cls, n, reps, config)
    if h.kind == "completely_additive":
        a = np.array([float(h.a(j)) for j in range(1, n + 1)])
        values = batch.counts @ a
    else:
        values = np.zeros(reps)
        for j in range(1, n + 1):
            col = batch.counts[:, j - 1]
            lookup = np.array([float(h.h(j, k)) for k in range(int(col.max()) + 1)])
            values += lookup[col]
    mean = float(values.mean())
    var = float(values.var(ddof=1))
    return EmpiricalMoments(mean=mean, variance=var,
                            stderr=math.sqrt(var / reps), reps=reps,
                            tilt=batch.tilt, acceptance_rate=batch.acceptance_rate)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    pvalue: float
    level: float
    reject: bool
    bins: tuple   # (label, observed, expected) triples after merging


def chi_square_marginal(cls: AssemblyClass, n: int, j: int, reps: int,
                        config: SamplerConfig, level: float = 1e-4,
                        min_expected: float = 5.0,
                        pmf: Optional[SpectrumPMF] = None,
                        batch: Optional[SampleBatch] = None) -> ChiSquareResult:
    """Pearson test of the empirical k_j marginal against the exact law.

    Cells with expected count below ``min_expected`` merge into the tail.
    """
    if batch is None:
        batch = sample_batch(cls, n, reps, config)
    observed_k = batch.counts[:, j - 1]
    if pmf is None:
        pmf = comp_count_pmf(cls, n, j, mode="exact")
    expected = [float(p) * reps for p in pmf.probs]
    observed = [int((observed_k == k).sum()) for k in range(len(pmf.probs))]
    # merge the sparse upper tail downward until every cell is heavy enough
    cells = []
    acc_o, acc_e, labels = 0, 0.0, []
    for k in range(len(expected) - 1, -1, -1):
        acc_o += observed[k]
        acc_e += expected[k]
        labels.append(k)
        if acc_e >= min_expected:
            cells.append((f"{min(labels)}+" if len(labels) > 1 else str(k), acc_o, acc_e))
            acc_o, acc_e, labels = 0, 0.0, []
    if labels:
        if cells:
            lab, o, e = cells.pop()
            cells.append((f"{min(labels)}+", o + acc_o, e + acc_e))
        else:
            cells.append(("0+", acc_o, acc_e))
    cells.reverse()
    if len(cells) < 2:
        raise ValueError("too few cells for a chi-square test; raise reps")
    stat = sum((o - e) ** 2 / e for _, o, e in cells)
    df = len(cells) - 1
    pvalue = float(_scipy_stats.chi2.sf(stat, df))
    return ChiSquareResult(statistic=stat, df=df, pvalue=pvalue, level=level,
                           reject=pvalue < level, bins=tuple(cells))


def empirical_pmf_value(batch: SampleBatch, j: int, k: int) -> float:
    """Share of sampled profiles with exactly k size-j components."""
    return float((batch.counts[:, j - 1] == k).mean())


def binomial_stderr(p: float, reps: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / reps)
