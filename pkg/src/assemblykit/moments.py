"""Component-count laws and moments of additive functions.

An additive function assigns a structure the value
h = sum_j h_j(k_j), where k_j is the number of size-j components and
h_j(0) = 0.  The completely additive special case is h_j(k) = a_j * k.

The size-j count law under the uniform measure on order-n assemblies is

    P(k_j = k) = (lambda_j^k / k!) * Qexcl_j(n - j*k) / Q(n),

with Qexcl_j the coefficient table that omits size j entirely.  Means
and variances come from a marked dynamic program over component sizes:
three accumulators track, for every partial order m, the total measure
A0(m), the measure-weighted sum A1(m) of h, and A2(m) of h^2.  Folding
in size j with k parts multiplies measure by u_k = lambda_j^k/k! and
shifts h by v_k = h_j(k):

    A2 <- A2 + u_k (A2' + 2 v_k A1' + v_k^2 A0'),   etc.

After all sizes are folded, A0(n) = Q(n), and mean and variance follow.
A slower pairwise expansion of the second moment over two-size
restricted tables is kept as an independent cross-check route; the two
routes must agree exactly and are never merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .classes import AssemblyClass
from .counting import EXACT, SCALED, coeff_table, normalize_mode
from .errors import EmptySupportError

GENERAL = "general"
COMPLETELY_ADDITIVE = "completely_additive"


@dataclass(frozen=True, eq=False)
class AdditiveFunction:
    """h(structure) = sum_j h_j(k_j) with h_j(0) = 0.

    ``rational`` declares that values are exact (int/Fraction); exact-mode
    engines refuse float-valued functions rather than silently round.
    """

    name: str
    kind: str
    fn: Callable
    rational: bool = True

    def h(self, j: int, k: int):
        if k == 0:
            return 0
        if self.kind == COMPLETELY_ADDITIVE:
            return self.fn(j) * k
        return self.fn(j, k)

    def a(self, j: int):
        if self.kind != COMPLETELY_ADDITIVE:
            raise ValueError(f"{self.name!r} is not completely additive")
        return self.fn(j)


def completely_additive(name: str, a: Callable, rational: bool = True) -> AdditiveFunction:
    return AdditiveFunction(name=name, kind=COMPLETELY_ADDITIVE, fn=a, rational=rational)


def general_additive(name: str, h: Callable, rational: bool = True) -> AdditiveFunction:
    return AdditiveFunction(name=name, kind=GENERAL, fn=h, rational=rational)


@dataclass(frozen=True)
class SpectrumPMF:
    """Law of the size-j component count at order n; probs indexed by k."""

    j: int
    n: int
    mode: str
    probs: tuple

    def p(self, k: int):
        return self.probs[k] if 0 <= k < len(self.probs) else type(self.probs[0])(0)

    def mean(self):
        return sum(k * p for k, p in enumerate(self.probs))

    def second_moment(self):
        return sum(k * k * p for k, p in enumerate(self.probs))


def _check_exact_ok(h: AdditiveFunction, mode: str):
    if mode == EXACT and not h.rational:
        raise ValueError(
            f"family {h.name!r} yields float values; exact mode needs rational h")


def _coerce(mode: str, value):
    return Fraction(value) if mode == EXACT else float(value)


def _frexp_fraction(fr: Fraction):
    """fr = man * 2**exp with man a float in [0.5, 1); fr must be positive.

    Correctly rounded for fractions far outside float range, where a
    plain float(fr) would flush to zero or overflow.
    """
    num, den = fr.numerator, fr.denominator
    exp = num.bit_length() - den.bit_length()
    if exp >= 0:
        den <<= exp
    else:
        num <<= -exp
    if num >= den:
        den <<= 1
        exp += 1
    return num / den, exp


def comp_count_pmf(cls: AssemblyClass, n: int, j: int, mode: str = "exact",
                   table_n: Optional[int] = None) -> SpectrumPMF:
    """Exact or scaled-float law of k_j at order n.

    ``table_n`` only enlarges the cached tables (useful when sweeping);
    the law itself depends on n alone.
    """
    mode = normalize_mode(mode)
    if j < 1:
        raise ValueError("j must be >= 1")
    N = max(n, table_n or 0)
    full = coeff_table(cls, N, mode)
    qn = full.q(n)
    if qn == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    restricted = coeff_table(cls, N, mode, excluded=(j,))
    kmax = n // j
    probs = []
    if mode == EXACT:
        for k in range(kmax + 1):
            probs.append(cls.comp_weight(j, k) * restricted.q(n - j * k) / qn)
    else:
        # (lambda_j rho^j)^k / k! as mantissa * 2^exp: both the per-size
        # weight and its powers routinely sit far below float range while
        # the probability itself is normal, because the division by qn
        # (often itself tiny) comes last
        lam_fr = cls.scaled_series(N, as_float=False)[j] / j
        lam_man, lam_exp = _frexp_fraction(lam_fr) if lam_fr > 0 else (0.0, 0)
        man, exp2 = 1.0, 0
        for k in range(kmax + 1):
            if k:
                man, e = math.frexp(man * lam_man / k)
                exp2 += e + lam_exp
            probs.append(math.ldexp(man * restricted.q(n - j * k) / qn, exp2))
    return SpectrumPMF(j=j, n=n, mode=mode, probs=tuple(probs))


def _marked_dp(cls: AssemblyClass, N: int, h: AdditiveFunction, mode: str):
    """Accumulator arrays (A0, A1, A2) over orders 0..N, all sizes folded."""
    zero = Fraction(0) if mode == EXACT else 0.0
    one = Fraction(1) if mode == EXACT else 1.0
    a0 = [zero] * (N + 1)
    a1 = [zero] * (N + 1)
    a2 = [zero] * (N + 1)
    a0[0] = one
    if mode == SCALED:
        series = cls.scaled_series(N, as_float=True)
    for j in range(1, N + 1):
        kmax = N // j
        # u[k] = measure factor for k parts of size j, v[k] = h_j(k)
        u = [one]
        v = [zero]
        if mode == EXACT:
            if cls.lam(j) == 0:
                continue
            for k in range(1, kmax + 1):
                u.append(cls.comp_weight(j, k))
                v.append(_coerce(mode, h.h(j, k)))
        else:
            lam_scaled = series[j] / j
            if lam_scaled == 0.0:
                continue
            uk = 1.0
            for k in range(1, kmax + 1):
                uk = uk * lam_scaled / k
                u.append(uk)
                v.append(float(h.h(j, k)))
        # in-place fold: descending m reads only not-yet-updated entries
        for m in range(N, j - 1, -1):
            acc0 = a0[m]
            acc1 = a1[m]
            acc2 = a2[m]
            for k in range(1, m // j + 1):
                src = m - j * k
                uk = u[k]
                vk = v[k]
                b0 = a0[src]
                b1 = a1[src]
                acc0 = acc0 + uk * b0
                acc1 = acc1 + uk * (b1 + vk * b0)
                acc2 = acc2 + uk * (a2[src] + 2 * vk * b1 + vk * vk * b0)
            a0[m] = acc0
            a1[m] = acc1
            a2[m] = acc2
    return a0, a1, a2


def moments_additive(cls: AssemblyClass, n: int, h: AdditiveFunction,
                     mode: str = "exact") -> tuple:
    """(mean, variance) of h at order n."""
    mode = normalize_mode(mode)
    _check_exact_ok(h, mode)
    a0, a1, a2 = _marked_dp(cls, n, h, mode)
    return _finish_moments(cls, n, a0, a1, a2, mode)


def _finish_moments(cls, n, a0, a1, a2, mode):
    qn = a0[n]
    if qn == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    mean = a1[n] / qn
    var = a2[n] / qn - mean * mean
    if mode == SCALED and var < 0:
        # cancellation guard; a genuinely negative value is a bug upstream
        scale = max(1.0, abs(a2[n] / qn))
        if -var <= 1e-12 * scale:
            var = 0.0
    return mean, var


def mean_additive(cls, n, h, mode="exact"):
    return moments_additive(cls, n, h, mode)[0]


def variance_additive(cls, n, h, mode="exact"):
    return moments_additive(cls, n, h, mode)[1]


def moment_table(cls: AssemblyClass, N: int, h: AdditiveFunction,
                 mode: str = "exact") -> list:
    """[(mean, variance) or None at empty orders] for n = 0..N.

    Valid only for h whose per-size values do not depend on the order n
    (one DP pass serves every n; profiles of order n never contain parts
    larger than n, so folding all sizes up to N is harmless).
    """
    mode = normalize_mode(mode)
    _check_exact_ok(h, mode)
    a0, a1, a2 = _marked_dp(cls, N, h, mode)
    out = []
    for n in range(N + 1):
        if a0[n] == 0:
            out.append(None)
        else:
            out.append(_finish_moments(cls, n, a0, a1, a2, mode))
    return out


def second_moment_pairwise(cls: AssemblyClass, n: int, h: AdditiveFunction,
                           mode: str = "exact"):
    """E[h^2] via the two-size expansion; independent cross-check route.

    E h^2 = sum_j E[h_j(k_j)^2]
          + sum_{i<j} 2 sum_{k,m>=1} h_i(k) h_j(m) u_{i,k} u_{j,m}
                      Qexcl_{i,j}(n - ik - jm) / Q(n).
    """
    mode = normalize_mode(mode)
    _check_exact_ok(h, mode)
    full = coeff_table(cls, n, mode)
    qn = full.q(n)
    if qn == 0:
        raise EmptySupportError(f"Q({n}) = 0 for class {cls.name!r}")
    total = _coerce(mode, 0)

    def weights(j, kmax):
        if mode == EXACT:
            return [cls.comp_weight(j, k) for k in range(kmax + 1)]
        series = cls.scaled_series(n, as_float=True)
        lam_scaled = series[j] / j
        out = [1.0]
        for k in range(1, kmax + 1):
            out.append(out[-1] * lam_scaled / k)
        return out

    for j in range(1, n + 1):
        uj = weights(j, n // j)
        single = coeff_table(cls, n, mode, excluded=(j,))
        for k in range(1, n // j + 1):
            hv = _coerce(mode, h.h(j, k))
            total += uj[k] * hv * hv * single.q(n - j * k)
    for i in range(1, n + 1):
        ui = weights(i, n // i)
        for j in range(i + 1, n + 1 - i):
            uj = weights(j, n // j)
            pair = coeff_table(cls, n, mode, excluded=(i, j))
            for k in range(1, (n - j) // i + 1):
                hi = _coerce(mode, h.h(i, k))
                if hi == 0:
                    continue
                for m in range(1, (n - i * k) // j + 1):
                    hj = _coerce(mode, h.h(j, m))
                    if hj == 0:
                        continue
                    total += 2 * hi * hj * ui[k] * uj[m] * pair.q(n - i * k - j * m)
    return total / qn
