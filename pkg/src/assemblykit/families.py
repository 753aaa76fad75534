"""Built-in additive-function families used by bounds and sweeps.

A family produces, for each order n, the additive function to evaluate
there.  Most families do not depend on n at all; those declare
``n_independent`` so sweeps can reuse a single dynamic-program pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .moments import AdditiveFunction, completely_additive, general_additive


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    name: str
    rational: bool
    n_independent: bool
    completely: bool
    make: Callable[[int], AdditiveFunction]
    description: str = ""


def _constant_family(name, fn, rational, completely, description):
    return FunctionFamily(name=name, rational=rational, n_independent=True,
                          completely=completely, make=lambda n: fn,
                          description=description)


def _w_family():
    fn = completely_additive("w", lambda j: 1)
    return _constant_family("w", fn, True, True, "number of components; a_j = 1")


def _log_size_family():
    fn = completely_additive("log_size", lambda j: math.log(j), rational=False)
    return _constant_family("log_size", fn, False, True,
                            "a_j = log j (float only)")


def _half_support_family():
    def make(n):
        # indicator of j <= n/2, exact: 2j <= n
        return completely_additive("half_support", lambda j: 1 if 2 * j <= n else 0)
    return FunctionFamily(name="half_support", rational=True, n_independent=False,
                          completely=True, make=make,
                          description="a_j = 1 when j <= n/2, else 0")


class _RademacherSigns:
    """Signs a_1, a_2, ... drawn once from a seeded generator.

    a_j depends only on (seed, j): signs are drawn in index order and
    memoized, so any evaluation order sees the same values.
    """

    def __init__(self, seed):
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._signs = []

    def __call__(self, j):
        while len(self._signs) < j:
            self._signs.append(1 if self._rng.integers(0, 2) else -1)
        return self._signs[j - 1]


def _rademacher_family(seed):
    fn = completely_additive(f"rademacher[{seed}]", _RademacherSigns(seed))
    return _constant_family("rademacher", fn, True, True,
                            "a_j = +/-1, seeded")


def _distinct_sizes_family():
    fn = general_additive("distinct_sizes", lambda j, k: 1 if k >= 1 else 0)
    return _constant_family("distinct_sizes", fn, True, False,
                            "number of distinct component sizes; h_j(k) = 1[k >= 1]")


FAMILY_NAMES = ("w", "log_size", "half_support", "rademacher", "distinct_sizes")

RATIONAL_FAMILY_NAMES = ("w", "half_support", "rademacher", "distinct_sizes")


def get_family(name: str, seed: Optional[int] = None) -> FunctionFamily:
    """Look up a family by name; rademacher requires a seed."""
    if name == "w":
        return _w_family()
    if name == "log_size":
        return _log_size_family()
    if name == "half_support":
        return _half_support_family()
    if name == "rademacher":
        if seed is None:
            raise ValueError("family 'rademacher' needs a seed")
        return _rademacher_family(seed)
    if name == "distinct_sizes":
        return _distinct_sizes_family()
    raise ValueError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
