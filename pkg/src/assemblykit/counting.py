"""Coefficient tables Q(n) and their restricted variants.

Q(n) is the order-n coefficient of exp(sum_j lambda_j x^j): the total
measure sum over component profiles (s_1, ..., s_n) with sum j*s_j = n
of prod_j lambda_j^{s_j}/s_j!.  The number of assemblies of order n is
n! * Q(n).  Differentiating the generating function gives the
convolution recurrence used here,

    n Q(n) = sum_{j=1..n} j lambda_j Q(n-j),        Q(0) = 1,

which the test suite validates against direct profile enumeration.

Two arithmetic modes are supported.  Exact mode carries Fractions.
Scaled-float mode carries q(n) = Q(n) rho^n, for which the recurrence
reads n q(n) = sum_j c_j q(n-j) with c_j = rho^j j lambda_j; under the
logarithmic-growth conditions the c_j are bounded, so the scaled values
stay within float range where raw Q(n) would overflow or vanish.
Scaled sums are accumulated with compensated (Kahan) summation in fixed
increasing-j order, so float results are deterministic.

Restricted tables exclude one or two component sizes (lambda_j treated
as zero); they drive the component-count laws.  All tables are cached
per (class, excluded set, mode, rho) and extended in place as longer
prefixes are requested, behind a lock: concurrent readers see only
immutable snapshots.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional, Union

from .classes import AssemblyClass
from .errors import NumericError

EXACT = "exact"
SCALED = "scaled_float"

_MODE_ALIASES = {"exact": EXACT, "float": SCALED, "scaled_float": SCALED}


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; use 'exact' or 'float'") from None


@dataclass(frozen=True)
class CoeffTable:
    """An immutable prefix q(0..n_max) of a coefficient sequence."""

    mode: str
    rho: Optional[Union[Fraction, float]]   # None in exact mode
    excluded: frozenset
    values: tuple

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def q(self, n: int):
        return self.values[n]


class _Entry:
    __slots__ = ("values", "jlam")

    def __init__(self):
        self.values = []
        self.jlam = [None]  # index 0 unused


_CACHE: dict = {}
_LOCK = threading.Lock()


def clear_cache():
    with _LOCK:
        _CACHE.clear()


def _extend_exact(cls, excluded, entry, N):
    jlam = entry.jlam
    for j in range(len(jlam), N + 1):
        jlam.append(Fraction(0) if j in excluded else j * cls.lam(j))
    q = entry.values
    if not q:
        q.append(Fraction(1))
    for n in range(len(q), N + 1):
        acc = Fraction(0)
        for j in range(1, n + 1):
            c = jlam[j]
            if c:
                acc += c * q[n - j]
        q.append(acc / n)


def _extend_scaled(cls, excluded, rho, entry, N):
    series = cls.scaled_series(N, rho=rho, as_float=True)
    c = entry.jlam
    for j in range(len(c), N + 1):
        c.append(0.0 if j in excluded else series[j])
    q = entry.values
    if not q:
        q.append(1.0)
    for n in range(len(q), N + 1):
        # Kahan-compensated sum, fixed increasing-j order
        s = 0.0
        comp = 0.0
        for j in range(1, n + 1):
            term = c[j] * q[n - j]
            y = term - comp
            t = s + y
            comp = (t - s) - y
            s = t
        v = s / n
        if not math.isfinite(v):
            raise NumericError(
                f"nonfinite intermediate in scaled mode at n={n} "
                f"for class {cls.name!r}", n=n)
        q.append(v)


def coeff_table(cls: AssemblyClass, N: int, mode: str = EXACT,
                excluded=(), rho=None) -> CoeffTable:
    """Table of q(0..N); exact Q(n) or scaled Q(n) rho^n by mode.

    ``excluded`` lists component sizes whose weight is zeroed out (the
    restricted tables behind the component-count laws); ``rho`` overrides
    the class radius in scaled mode only.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    mode = normalize_mode(mode)
    if isinstance(excluded, int):
        excluded = (excluded,)
    excl = frozenset(excluded)
    if any(not isinstance(j, int) or j < 1 for j in excl):
        raise ValueError("excluded sizes must be integers >= 1")
    if mode == EXACT:
        if rho is not None:
            raise ValueError("rho override applies to scaled mode only")
        table_rho = None
        rho_key = None
    else:
        table_rho = cls.rho if rho is None else rho
        rho_key = table_rho if isinstance(table_rho, Fraction) else Fraction(table_rho)
        if rho_key <= 0:
            raise ValueError("rho must be positive")

    key = (cls, excl, mode, rho_key)
    with _LOCK:
        entry = _CACHE.get(key)
        if entry is None:
            entry = _Entry()
            _CACHE[key] = entry
        if len(entry.values) <= N:
            if mode == EXACT:
                _extend_exact(cls, excl, entry, N)
            else:
                _extend_scaled(cls, excl, table_rho, entry, N)
        values = tuple(entry.values[:N + 1])
    return CoeffTable(mode=mode, rho=table_rho, excluded=excl, values=values)


def assembly_count(cls: AssemblyClass, n: int):
    """Number of assemblies of order n, n! * Q(n); exact.

    Returns an int when the count is integral (it is whenever the raw
    component counts g_j are integers) and a Fraction otherwise.
    """
    q = coeff_table(cls, n).q(n)
    g = factorial(n) * q
    return int(g) if g.denominator == 1 else g
