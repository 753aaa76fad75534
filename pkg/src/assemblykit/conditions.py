"""Logarithmic-growth conditions on a class and suggested constants.

Write c_j = rho^j * j * lambda_j and S(n) = sum_{j<=n} c_j.  The four
conditions checked here, each over a finite index range [1, N] (or
[n0, N] where an onset order applies), are

  1. strong:     0 < theta <= c_j <= Theta               for all j
  2. upper:      c_j <= Theta                            for all j
  3. lower_sum:  S(n) >= theta * n                       for n >= n0
  4. q_lower:    n Q(n) rho^n >= theta' * exp(sum_{j<=n} lambda_j rho^j)

Condition (4) involves exp of a rational, so it is always evaluated in
the rho-scaled float representation; (1)-(3) are exact whenever rho and
the supplied bounds are rational.  Orders with Q(n) = 0 carry no
structures at all (the uniform measure does not exist there), so (4)
skips them and reports which; without the skip no positive theta' could
ever pass on classes with gaps in their support, such as 2-regular
graphs, which the weak conditions are expressly meant to admit.

Float comparisons use relative tolerance 1e-12, recorded on the verdict
via ``exact=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .classes import AssemblyClass
from .counting import coeff_table

REL_TOL = 1e-12

CONDITION_NUMBERS = {"strong": 1, "upper": 2, "lower_sum": 3, "q_lower": 4}
_BY_NUMBER = {v: k for k, v in CONDITION_NUMBERS.items()}

# a candidate constant that shrinks below this fraction of its half-range
# value as N doubles is still decaying, not stabilizing
_DEGENERACY_FACTOR = 0.75


@dataclass(frozen=True)
class WeaklyLogParams:
    """The constants (rho, Theta, theta, theta', n0) parametrizing the conditions."""

    rho: Union[Fraction, float]
    Theta: Union[Fraction, float, None] = None
    theta: Union[Fraction, float, None] = None
    theta_prime: Union[Fraction, float, None] = None
    n0: int = 1

    def __post_init__(self):
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")
        for label, v in (("rho", self.rho), ("Theta", self.Theta),
                         ("theta", self.theta), ("theta_prime", self.theta_prime)):
            if v is not None and v <= 0:
                raise ValueError(f"{label} must be positive")


@dataclass(frozen=True)
class Witness:
    """The extremal index: tightest margin when the condition holds,
    worst violation otherwise.  Re-evaluating the inequality there
    reproduces ``value`` against ``bound`` exactly."""

    index: int
    value: object
    bound: object
    side: str = ""


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str
    number: int
    holds: bool
    exact: bool
    checked_range: int
    witness: Optional[Witness]
    skipped: tuple = ()   # q_lower: orders with Q(n) = 0


def _condition_name(condition) -> str:
    if isinstance(condition, int):
        try:
            return _BY_NUMBER[condition]
        except KeyError:
            raise ValueError(f"condition number must be 1..4, got {condition}") from None
    if condition in CONDITION_NUMBERS:
        return condition
    raise ValueError(
        f"unknown condition {condition!r}; known: {', '.join(CONDITION_NUMBERS)}")


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction))


def _ge(value, bound, exact: bool) -> bool:
    if exact:
        return value >= bound
    tol = REL_TOL * max(abs(value), abs(bound))
    return value >= bound - tol


def _le(value, bound, exact: bool) -> bool:
    if exact:
        return value <= bound
    tol = REL_TOL * max(abs(value), abs(bound))
    return value <= bound + tol


def _need(params: WeaklyLogParams, *names):
    for name in names:
        if getattr(params, name) is None:
            raise ValueError(f"condition needs params.{name}")


def _q_lower_ratios(cls: AssemblyClass, rho, N: int):
    """r(n) = n q(n) / exp(sum_{j<=n} lambda_j rho^j) for n = 1..N, floats.

    Entries are None at orders with q(n) = 0 (no structures, or scaled
    underflow); both the check and the suggestion skip exactly these.
    """
    table = coeff_table(cls, N, "float", rho=rho)
    series = cls.scaled_series(N, rho=rho, as_float=True)
    ratios = [None] * (N + 1)
    lam_sum = 0.0
    for n in range(1, N + 1):
        lam_sum += series[n] / n
        qn = table.q(n)
        if qn > 0.0:
            ratios[n] = n * qn / math.exp(lam_sum)
    return ratios


def check_condition(cls: AssemblyClass, params: WeaklyLogParams, condition,
                    N: int, mode: Optional[str] = None) -> ConditionVerdict:
    """Verify one condition over its index range; verdict carries a witness."""
    name = _condition_name(condition)
    number = CONDITION_NUMBERS[name]
    if N < 1:
        raise ValueError("N must be >= 1")

    exactable = _is_rational(params.rho) and name != "q_lower"
    if name in ("strong", "lower_sum"):
        exactable = exactable and _is_rational(params.theta)
    if name in ("strong", "upper"):
        exactable = exactable and _is_rational(params.Theta)
    if mode is None:
        exact = exactable
    elif mode == "exact":
        if not exactable:
            raise ValueError(f"condition {name!r} with these params is not exactly checkable")
        exact = True
    elif mode in ("float", "scaled_float"):
        exact = False
    else:
        raise ValueError(f"unknown mode {mode!r}")

    if name == "q_lower":
        _need(params, "theta_prime")
        ratios = _q_lower_ratios(cls, params.rho, N)
        bound = float(params.theta_prime)
        best = None
        skipped = []
        for n in range(1, N + 1):
            r = ratios[n]
            if r is None:
                skipped.append(n)
                continue
            margin = r - bound
            if best is None or margin < best[0]:
                best = (margin, n, r)
        if best is None:
            # nothing to check: no order in range carries structures
            return ConditionVerdict(condition=name, number=number, holds=False,
                                    exact=False, checked_range=N, witness=None,
                                    skipped=tuple(skipped))
        holds = _ge(best[2], bound, exact=False)
        return ConditionVerdict(condition=name, number=number, holds=holds,
                                exact=False, checked_range=N,
                                witness=Witness(index=best[1], value=best[2], bound=bound),
                                skipped=tuple(skipped))

    series = cls.scaled_series(N, rho=params.rho, as_float=not exact)

    if name in ("strong", "upper"):
        _need(params, *(("theta", "Theta") if name == "strong" else ("Theta",)))
        Theta = params.Theta if exact else float(params.Theta)
        theta = None
        if name == "strong":
            theta = params.theta if exact else float(params.theta)
        best = None  # (margin, j, value, bound, side); lower side wins ties
        for j in range(1, N + 1):
            c = series[j]
            sides = [(Theta - c, "upper", Theta)]
            if theta is not None:
                sides.insert(0, (c - theta, "lower", theta))
            for margin, side, bound in sides:
                if best is None or margin < best[0]:
                    best = (margin, j, c, bound, side)
        _, j, value, bound, side = best
        ok = _le(value, bound, exact) if side == "upper" else _ge(value, bound, exact)
        return ConditionVerdict(condition=name, number=number, holds=ok,
                                exact=exact, checked_range=N,
                                witness=Witness(index=j, value=value, bound=bound, side=side))

    # lower_sum
    _need(params, "theta")
    n0 = params.n0
    if N < n0:
        raise ValueError(f"N={N} below n0={n0}")
    theta = params.theta if exact else float(params.theta)
    s = series[0]
    best = None
    for n in range(1, N + 1):
        s = s + series[n]
        if n < n0:
            continue
        margin = s - theta * n
        if best is None or margin < best[0]:
            best = (margin, n, s, theta * n)
    _, n, value, bound = best
    return ConditionVerdict(condition=name, number=number,
                            holds=_ge(value, bound, exact),
                            exact=exact, checked_range=N,
                            witness=Witness(index=n, value=value, bound=bound))


def check_all_conditions(cls: AssemblyClass, params: WeaklyLogParams, N: int,
                         mode: Optional[str] = None) -> list:
    """Verdicts for every condition whose constants are present in params."""
    out = []
    for name in CONDITION_NUMBERS:
        needed = {"strong": ("theta", "Theta"), "upper": ("Theta",),
                  "lower_sum": ("theta",), "q_lower": ("theta_prime",)}[name]
        if any(getattr(params, f) is None for f in needed):
            continue
        out.append(check_condition(cls, params, name, N, mode=mode))
    return out


def _theta_scan(ratios, N: int):
    """Best (theta, n0): maximize min_{n in [n0, N]} S(n)/n over n0 <= N//2.

    Ties prefer the smallest n0.  ``ratios[n]`` = S(n)/n.
    """
    suffmin = [None] * (N + 2)
    for n in range(N, 0, -1):
        nxt = suffmin[n + 1]
        suffmin[n] = ratios[n] if nxt is None else min(ratios[n], nxt)
    best_theta = None
    best_n0 = None
    for n0 in range(1, max(1, N // 2) + 1):
        t = suffmin[n0]
        if best_theta is None or t > best_theta:
            best_theta = t
            best_n0 = n0
    return best_theta, best_n0


def _suggest_raw(cls: AssemblyClass, rho, N: int):
    """Candidate constants at range N, no stabilization filtering."""
    exact = _is_rational(rho)
    series = cls.scaled_series(N, rho=rho, as_float=not exact)
    Theta = max(series[1:])
    ratios = [None] * (N + 1)
    s = series[0]
    for n in range(1, N + 1):
        s = s + series[n]
        ratios[n] = s / n
    theta, n0 = _theta_scan(ratios, N)
    qratios = _q_lower_ratios(cls, rho, N)
    positive = [r for r in qratios[1:] if r is not None]
    theta_prime = min(positive) if positive else None
    return Theta, theta, n0, theta_prime


def suggest_constants(cls: AssemblyClass, rho, N: int,
                      check_degeneracy: bool = True) -> Optional[WeaklyLogParams]:
    """Tightest constants the data supports, or None when they degenerate.

    Theta is the max of c_j; theta the best sustainable lower slope of
    S(n) (scanned over onsets n0 <= N//2, smallest n0 on ties); theta'
    the min of the q_lower ratio over orders that carry structures.
    A candidate that keeps shrinking as the range doubles (below 3/4 of
    its half-range value) has no positive limit to suggest, so the
    result is absent; so too when any candidate is nonpositive or zero.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if isinstance(rho, int):
        rho = Fraction(rho)
    Theta, theta, n0, theta_prime = _suggest_raw(cls, rho, N)
    if Theta == 0 or theta is None or theta <= 0:
        return None
    if theta_prime is None or theta_prime <= 0.0:
        return None
    if check_degeneracy and N >= 8:
        half_theta, _ = _theta_scan_at_half(cls, rho, N)
        if half_theta is not None and half_theta > 0 \
                and float(theta) < _DEGENERACY_FACTOR * float(half_theta):
            return None
        half_q = [r for r in _q_lower_ratios(cls, rho, N // 2)[1:] if r is not None]
        if half_q and theta_prime < _DEGENERACY_FACTOR * min(half_q):
            return None
    return WeaklyLogParams(rho=rho, Theta=Theta, theta=theta,
                           theta_prime=theta_prime, n0=n0)


def _theta_scan_at_half(cls, rho, N):
    half = N // 2
    exact = _is_rational(rho)
    series = cls.scaled_series(half, rho=rho, as_float=not exact)
    ratios = [None] * (half + 1)
    s = series[0]
    for n in range(1, half + 1):
        s = s + series[n]
        ratios[n] = s / n
    return _theta_scan(ratios, half)
