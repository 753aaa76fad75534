"""Brute-force reference computations by direct profile enumeration.

Nothing here shares code with the engines: coefficients, component-count
laws, and moments are obtained by streaming every integer partition of n
as a component profile and summing its measure.  Exponential in spirit
(p(80) is about 1.6e7), so calls are capped at MAX_ORACLE_N.

For permutations there is an even more primitive route: enumerate all
n! permutations and read off cycle types.  That second oracle checks
the first one, and both check the engines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

from .classes import AssemblyClass
from .errors import EmptySupportError

MAX_ORACLE_N = 80
MAX_STRUCTURE_N = 8


@dataclass(frozen=True)
class Profile:
    """A component profile: s_j parts of size j, total sum j*s_j = n."""

    n: int
    parts: tuple  # ((j, s_j), ...), ascending j, every s_j >= 1

    def __post_init__(self):
        if sum(j * s for j, s in self.parts) != self.n:
            raise ValueError("profile does not sum to n")

    def multiplicity(self, j: int) -> int:
        for size, count in self.parts:
            if size == j:
                return count
        return 0

    def dense(self) -> tuple:
        s = [0] * self.n
        for j, count in self.parts:
            s[j - 1] = count
        return tuple(s)

    @property
    def num_components(self) -> int:
        return sum(count for _, count in self.parts)

    def weight(self, cls: AssemblyClass) -> Fraction:
        w = Fraction(1)
        for j, count in self.parts:
            w *= cls.comp_weight(j, count)
        return w


def _partitions(n: int, max_part: int) -> Iterator[list]:
    # parts in descending order; recursion depth <= n
    if n == 0:
        yield []
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - p, p):
            rest.append(p)
            yield rest


def profiles(n: int) -> Iterator[Profile]:
    """Stream all profiles of order n, reverse-lexicographic in parts."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > MAX_ORACLE_N:
        raise ValueError(f"n={n} beyond the enumeration cap {MAX_ORACLE_N}")
    for parts in _partitions(n, n):
        grouped = []
        for j, run in itertools.groupby(parts):
            grouped.append((j, sum(1 for _ in run)))
        yield Profile(n=n, parts=tuple(grouped))


def oracle_coeff(cls: AssemblyClass, n: int) -> Fraction:
    """Q(n) by direct summation."""
    return sum((p.weight(cls) for p in profiles(n)), Fraction(0))


_TALLY_CACHE: dict = {}


def _tally(cls: AssemblyClass, n: int):
    """One enumeration pass: (Q(n), {j: {k: mass of profiles with s_j = k >= 1}})."""
    key = (cls, n)
    hit = _TALLY_CACHE.get(key)
    if hit is not None:
        return hit
    total = Fraction(0)
    marginals: dict = {}
    for p in profiles(n):
        w = p.weight(cls)
        total += w
        for j, count in p.parts:
            bucket = marginals.setdefault(j, {})
            bucket[count] = bucket.get(count, Fraction(0)) + w
    _TALLY_CACHE[key] = (total, marginals)
    return total, marginals


def oracle_pmf(cls: AssemblyClass, n: int, j: int) -> tuple:
    """Exact law of the size-j component count, probs indexed k = 0..n//j."""
    if j < 1:
        raise ValueError("j must be >= 1")
    total, marginals = _tally(cls, n)
    if total == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    bucket = marginals.get(j, {})
    probs = [Fraction(0)] * (n // j + 1)
    for k, mass in bucket.items():
        probs[k] = mass / total
    probs[0] = 1 - sum(probs[1:], Fraction(0))
    return tuple(probs)


def oracle_moments_bundle(cls: AssemblyClass, n: int, hs: Sequence) -> list:
    """(mean, variance) of each additive function in hs, one shared pass."""
    total = Fraction(0)
    sums = [Fraction(0)] * len(hs)
    sqsums = [Fraction(0)] * len(hs)
    for p in profiles(n):
        w = p.weight(cls)
        total += w
        for i, h in enumerate(hs):
            val = Fraction(0)
            for j, count in p.parts:
                val += Fraction(h.h(j, count))
            sums[i] += w * val
            sqsums[i] += w * val * val
    if total == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    out = []
    for i in range(len(hs)):
        mean = sums[i] / total
        out.append((mean, sqsums[i] / total - mean * mean))
    return out


def oracle_moments(cls: AssemblyClass, n: int, h) -> tuple:
    return oracle_moments_bundle(cls, n, [h])[0]


def structure_oracle_permutations(n: int, h) -> tuple:
    """(mean, variance) of h over all n! permutations, via raw cycle types.

    Independent of the profile enumerator as well: this is the uniform
    measure on actual structures, not on profiles.
    """
    if n > MAX_STRUCTURE_N:
        raise ValueError(f"n={n} beyond the structure cap {MAX_STRUCTURE_N}")
    total = factorial(n)
    acc = Fraction(0)
    acc2 = Fraction(0)
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        counts: dict = {}
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            x = start
            while not seen[x]:
                seen[x] = True
                x = perm[x]
                length += 1
            counts[length] = counts.get(length, 0) + 1
        val = Fraction(0)
        for j, k in counts.items():
            val += Fraction(h.h(j, k))
        acc += val
        acc2 += val * val
    mean = acc / total
    return mean, acc2 / total - mean * mean


def structure_oracle_pmf_permutations(n: int, j: int) -> tuple:
    """Law of the count of j-cycles over all n! permutations."""
    if n > MAX_STRUCTURE_N:
        raise ValueError(f"n={n} beyond the structure cap {MAX_STRUCTURE_N}")
    tallies = [0] * (n // j + 1)
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        kj = 0
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            x = start
            while not seen[x]:
                seen[x] = True
                x = perm[x]
                length += 1
            if length == j:
                kj += 1
        tallies[kj] += 1
    total = factorial(n)
    return tuple(Fraction(t, total) for t in tallies)
