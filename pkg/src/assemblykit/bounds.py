"""Turan-Kubilius-type variance bounds and empirical ratio sweeps.

For an additive function h on a weakly logarithmic class, the variance
at order n is controlled by

    rhs1(n) = sum_{j*k <= n} (lambda_j^k h_j(k)^2 / k!)
              * Qexcl_j(n - j*k) / Q(n)
            = sum_j E[h_j(k_j)^2],

and, for completely additive h with h_j(k) = a_j k, by the simpler

    rhs2(n) = sum_{j <= n} lambda_j a_j^2 Q(n - j) / Q(n).

The implied constants are not computed here; sweeps report the
empirical ratios variance/rhs so their boundedness can be observed
directly.  Ratios are 0/0-guarded: a vanishing rhs forces a vanishing
variance (every h_j(k) carrying probability mass is zero), and the
ratio is reported absent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .classes import AssemblyClass
from .counting import EXACT, coeff_table, normalize_mode
from .errors import EmptySupportError
from .families import FunctionFamily
from .moments import AdditiveFunction, _check_exact_ok, _coerce, moments_additive, moment_table


@dataclass(frozen=True)
class MomentReport:
    """Per-order summary: moments, bound RHS values, and their ratios."""

    n: int
    mean: object
    variance: object
    rhs1: object = None
    rhs2: object = None          # None unless h is completely additive
    ratio1: object = None        # None when rhs1 = 0
    ratio2: object = None


def tk_rhs_general(cls: AssemblyClass, n: int, h: AdditiveFunction,
                   mode: str = "exact", table_n: Optional[int] = None):
    """RHS of the general variance bound at order n."""
    mode = normalize_mode(mode)
    _check_exact_ok(h, mode)
    N = max(n, table_n or 0)
    qn = coeff_table(cls, N, mode).q(n)
    if qn == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    total = _coerce(mode, 0)
    if mode != EXACT:
        series = cls.scaled_series(N, as_float=True)
    for j in range(1, n + 1):
        restricted = None
        if mode == EXACT:
            if cls.lam(j) == 0:
                continue
            u = Fraction(1)
        else:
            lam_scaled = series[j] / j
            if lam_scaled == 0.0:
                continue
            u = 1.0
        for k in range(1, n // j + 1):
            u = u * (cls.lam(j) if mode == EXACT else lam_scaled) / k
            hv = _coerce(mode, h.h(j, k))
            if hv == 0:
                continue
            if restricted is None:
                restricted = coeff_table(cls, N, mode, excluded=(j,))
            total += u * hv * hv * restricted.q(n - j * k)
    return total / qn


def tk_rhs_complete(cls: AssemblyClass, n: int, h: AdditiveFunction,
                    mode: str = "exact", table_n: Optional[int] = None):
    """RHS of the completely-additive variance bound at order n."""
    mode = normalize_mode(mode)
    _check_exact_ok(h, mode)
    if h.kind != "completely_additive":
        raise ValueError(f"family {h.name!r} is not completely additive")
    N = max(n, table_n or 0)
    table = coeff_table(cls, N, mode)
    qn = table.q(n)
    if qn == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    total = _coerce(mode, 0)
    if mode == EXACT:
        for j in range(1, n + 1):
            lam = cls.lam(j)
            if lam == 0:
                continue
            aj = Fraction(h.a(j))
            if aj == 0:
                continue
            total += lam * aj * aj * table.q(n - j)
    else:
        series = cls.scaled_series(N, as_float=True)
        for j in range(1, n + 1):
            lam_scaled = series[j] / j
            if lam_scaled == 0.0:
                continue
            aj = float(h.a(j))
            if aj == 0.0:
                continue
            total += lam_scaled * aj * aj * table.q(n - j)
    return total / qn


def _ratio(variance, rhs, mode):
    if rhs is None:
        return None
    if rhs == 0:
        # rhs = 0 forces every mass-carrying h_j(k) to vanish, hence h = 0 a.s.
        if mode == EXACT:
            assert variance == 0, "zero rhs with nonzero variance"
        return None
    return variance / rhs


def moment_report(cls: AssemblyClass, n: int, h: AdditiveFunction,
                  mode: str = "exact", table_n: Optional[int] = None,
                  precomputed: Optional[tuple] = None) -> MomentReport:
    """Full per-order report: moments, both RHS values where defined, ratios."""
    mode = normalize_mode(mode)
    mean, variance = precomputed if precomputed is not None \
        else moments_additive(cls, n, h, mode)
    rhs1 = tk_rhs_general(cls, n, h, mode, table_n=table_n)
    rhs2 = None
    if h.kind == "completely_additive":
        rhs2 = tk_rhs_complete(cls, n, h, mode, table_n=table_n)
    return MomentReport(
        n=n, mean=mean, variance=variance, rhs1=rhs1, rhs2=rhs2,
        ratio1=_ratio(variance, rhs1, mode), ratio2=_ratio(variance, rhs2, mode))


@dataclass(frozen=True)
class SweepResult:
    class_name: str
    family: str
    mode: str
    n_min: int
    n_max: int
    reports: tuple          # MomentReport per non-empty order, ascending n
    skipped: tuple          # orders with Q(n) = 0, noted and left out

    def sup_ratio(self, which: str, n_cap: Optional[int] = None):
        vals = [getattr(r, which) for r in self.reports
                if (n_cap is None or r.n <= n_cap) and getattr(r, which) is not None]
        return max(vals) if vals else None


def tk_ratio_sweep(cls: AssemblyClass, family: FunctionFamily, n_range: tuple,
                   mode: str = "float") -> SweepResult:
    """Reports for every order in [n_min, n_max]; empty orders are skipped.

    For n-independent families the moment DP runs once over the whole
    range; n-dependent families (half_support) rerun it per order.
    """
    mode = normalize_mode(mode)
    n_min, n_max = n_range
    if not (0 <= n_min <= n_max):
        raise ValueError("need 0 <= n_min <= n_max")
    full = coeff_table(cls, n_max, mode)
    table = None
    if family.n_independent:
        table = moment_table(cls, n_max, family.make(n_max), mode)
    reports = []
    skipped = []
    for n in range(n_min, n_max + 1):
        if full.q(n) == 0:
            skipped.append(n)
            continue
        h = family.make(n)
        pre = table[n] if table is not None else None
        reports.append(moment_report(cls, n, h, mode, table_n=n_max, precomputed=pre))
    return SweepResult(class_name=cls.name, family=family.name, mode=mode,
                       n_min=n_min, n_max=n_max,
                       reports=tuple(reports), skipped=tuple(skipped))
