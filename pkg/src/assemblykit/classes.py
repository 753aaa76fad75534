"""Weighted classes of labeled assemblies.

An assembly is a labeled structure that decomposes into connected
components: a permutation into cycles, a forest into trees, a set
partition into blocks.  A class is pinned down by how many connected
structures exist on j labeled points, carried here in normalized form
as exact rational weights

    lambda_j = (number of connected structures on j points) / j!

Everything downstream (coefficient tables, component-count laws,
variance bounds, samplers) consumes a class only through these weights
and through ``rho``, the nominal radius used for scaled arithmetic and
for the logarithmic-growth conditions.  ``rho`` is an exact rational
where the class has one (permutations, set partitions) and a float
otherwise (1/e for mappings and forests).

Weights are computed lazily and memoized per instance; instances are
intended to be shared (the built-in registry hands out singletons) so
that table caches keyed on the instance actually hit.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Callable, Optional, Union

try:
    import tomllib
except ModuleNotFoundError:  # py310
    import tomli as tomllib

from .errors import ClassConfigError

Rational = Union[int, Fraction]


def _round_or_inf(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


class AssemblyClass:
    """A class of labeled assemblies given by component weights lambda_j.

    ``weight_fn(j) -> Fraction`` must be defined for every j >= 1 and
    return a nonnegative rational; at least one weight must be positive
    (validated lazily up to ``positivity_scan`` and eagerly for explicit
    weight lists).
    """

    def __init__(self, name: str, weight_fn: Callable[[int], Fraction],
                 rho: Union[Fraction, float], description: str = "",
                 support_cap: Optional[int] = None):
        if isinstance(rho, int):
            rho = Fraction(rho)
        if isinstance(rho, float) and not math.isfinite(rho):
            raise ClassConfigError("rho must be positive and finite")
        if rho <= 0:
            raise ClassConfigError("rho must be positive")
        self.name = name
        self.rho = rho
        self.description = description
        # largest j with a possibly-positive weight; None means unbounded
        self.support_cap = support_cap
        self._weight_fn = weight_fn
        self._lam = {}
        self._cw = {}        # (j, k) -> lambda_j^k / k!
        self._series = {}    # (rho as Fraction, as_float) -> [c_0..c_m]

    @property
    def rho_exact(self) -> bool:
        return isinstance(self.rho, Fraction)

    def lam(self, j: int) -> Fraction:
        """Exact weight lambda_j; zero outside the support."""
        if j < 1:
            raise ValueError("component sizes start at 1")
        if self.support_cap is not None and j > self.support_cap:
            return Fraction(0)
        v = self._lam.get(j)
        if v is None:
            v = Fraction(self._weight_fn(j))
            if v < 0:
                raise ClassConfigError(
                    f"negative weight at j={j} in class {self.name!r}")
            self._lam[j] = v
        return v

    def lam_float(self, j: int) -> float:
        try:
            return float(self.lam(j))
        except OverflowError:
            return math.inf

    def log_lam(self, j: int) -> float:
        """log lambda_j as a float; -inf where the weight vanishes.

        Safe for weights far outside float range (forests at large j).
        """
        v = self.lam(j)
        if v == 0:
            return -math.inf
        return math.log(v.numerator) - math.log(v.denominator)

    def comp_weight(self, j: int, k: int) -> Fraction:
        """lambda_j^k / k!, the measure a profile gains from k parts of size j."""
        if k == 0:
            return Fraction(1)
        v = self._cw.get((j, k))
        if v is None:
            v = self.comp_weight(j, k - 1) * self.lam(j) / k
            self._cw[(j, k)] = v
        return v

    def scaled_series(self, N: int, rho=None, as_float: bool = True):
        """c_j = rho^j * j * lambda_j for j = 0..N (c_0 = 0).

        Powers are taken in exact rational arithmetic -- a float rho is
        used at its exact binary value -- and rounded once at the end,
        so each float entry is correctly rounded.  This sidesteps the
        cancellation that a log-space route would hit on classes whose
        raw weights overflow float range.
        """
        if rho is None:
            rho = self.rho
        rho_key = rho if isinstance(rho, Fraction) else Fraction(rho)
        if rho_key <= 0:
            raise ValueError("rho must be positive")
        key = (rho_key, as_float)
        series = self._series.get(key)
        if series is None:
            series = [0.0 if as_float else Fraction(0)]
            self._series[key] = series
        if len(series) <= N:
            power = rho_key ** (len(series) - 1) if len(series) > 1 else Fraction(1)
            for j in range(len(series), N + 1):
                power = power * rho_key if j > 1 else rho_key
                c = power * j * self.lam(j)
                series.append(_round_or_inf(c) if as_float else c)
        return series[:N + 1]

    def __repr__(self):
        return f"AssemblyClass({self.name!r}, rho={self.rho!r})"


# ---------------------------------------------------------------------------
# built-in classes

def _lam_permutations(j):
    # cycles on j points: (j-1)!, so lambda_j = (j-1)!/j! = 1/j
    return Fraction(1, j)


def _lam_mappings(j):
    # connected functional graphs on j points: (j-1)! * sum_{k<j} j^k/k!
    return Fraction(1, j) * sum(Fraction(j ** k, factorial(k)) for k in range(j))


def _lam_two_regular(j):
    # undirected cycles on j >= 3 points: (j-1)!/2
    return Fraction(1, 2 * j) if j >= 3 else Fraction(0)


def _lam_set_partitions(j):
    # one block per point set
    return Fraction(1, factorial(j))


def _lam_forests(j):
    # labeled trees on j points: j^(j-2)
    return Fraction(j ** (j - 2) if j >= 2 else 1, factorial(j))


_BUILTIN_SPECS = {
    "permutations": (_lam_permutations, Fraction(1),
                     "cycles; lambda_j = 1/j"),
    "mappings": (_lam_mappings, math.exp(-1),
                 "connected functional graphs; lambda_j = (1/j) sum_{k<j} j^k/k!"),
    "two_regular_graphs": (_lam_two_regular, Fraction(1),
                           "undirected cycles, j >= 3; lambda_j = 1/(2j)"),
    "set_partitions": (_lam_set_partitions, Fraction(1),
                       "blocks; lambda_j = 1/j!"),
    "forests": (_lam_forests, math.exp(-1),
                "labeled trees; lambda_j = j^(j-2)/j!"),
}

_BUILTIN_CACHE = {}

BUILTIN_NAMES = tuple(_BUILTIN_SPECS)


def builtin_class(name: str) -> AssemblyClass:
    """Return the shared instance of a built-in class by name."""
    try:
        spec = _BUILTIN_SPECS[name]
    except KeyError:
        raise ClassConfigError(
            f"unknown class {name!r}; built-ins: {', '.join(BUILTIN_NAMES)}"
        ) from None
    inst = _BUILTIN_CACHE.get(name)
    if inst is None:
        fn, rho, desc = spec
        inst = AssemblyClass(name, fn, rho, description=desc)
        _BUILTIN_CACHE[name] = inst
    return inst


# ---------------------------------------------------------------------------
# user-defined classes from a config document

def _parse_rational(value, where):
    """Exact parse of 'p/q' strings, decimal strings, and ints.

    Floats are rejected: weight arithmetic is exact, and a float here is
    almost always an accidental loss of intent.
    """
    if isinstance(value, bool):
        raise ClassConfigError(f"{where}: expected a rational, got a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ClassConfigError(f"{where}: cannot parse rational {value!r}: {e}")
    raise ClassConfigError(
        f"{where}: expected an int or a string rational 'p/q', got {type(value).__name__}")


def _parse_rho(value):
    if isinstance(value, float):
        if not math.isfinite(value) or value <= 0:
            raise ClassConfigError("rho must be positive and finite")
        return value
    r = _parse_rational(value, "rho")
    if r <= 0:
        raise ClassConfigError("rho must be positive")
    return r


_FORMULAS = ("ewens", "factorial")


def _formula_weight_fn(doc):
    fid = doc.get("id")
    if fid not in _FORMULAS:
        raise ClassConfigError(
            f"unknown formula {fid!r}; known: {', '.join(_FORMULAS)}")
    min_j = doc.get("min_j", 1)
    max_j = doc.get("max_j")
    if not isinstance(min_j, int) or min_j < 1:
        raise ClassConfigError("formula min_j must be an integer >= 1")
    if max_j is not None and (not isinstance(max_j, int) or max_j < min_j):
        raise ClassConfigError("formula max_j must be an integer >= min_j")

    if fid == "ewens":
        kappa = _parse_rational(doc.get("kappa", 1), "formula kappa")
        if kappa <= 0:
            raise ClassConfigError("formula kappa must be positive")
        base = lambda j: kappa / j
    else:
        c = _parse_rational(doc.get("c", 1), "formula c")
        if c <= 0:
            raise ClassConfigError("formula c must be positive")
        base = lambda j: c / factorial(j)

    def fn(j):
        if j < min_j or (max_j is not None and j > max_j):
            return Fraction(0)
        return base(j)

    return fn, max_j


def class_from_config(source) -> AssemblyClass:
    """Build a class from a JSON/TOML document or an equivalent dict.

    The document carries ``name``, ``rho`` (string rational or decimal),
    and either ``weights`` (array of rationals; entry i gives lambda_{i+1},
    zero beyond the end) or ``formula`` (a table with ``id`` and its
    parameters).
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        text = path.read_bytes()
        if path.suffix.lower() == ".toml":
            doc = tomllib.loads(text.decode())
        else:
            doc = json.loads(text)
    elif isinstance(source, dict):
        doc = source
    else:
        raise ClassConfigError("config source must be a path or a dict")

    if not isinstance(doc, dict):
        raise ClassConfigError("config document must be a table/object")
    name = doc.get("name")
    if not name or not isinstance(name, str):
        raise ClassConfigError("missing field: name")
    if "rho" not in doc:
        raise ClassConfigError("missing field: rho")
    rho = _parse_rho(doc["rho"])

    has_weights = "weights" in doc
    has_formula = "formula" in doc
    if has_weights == has_formula:
        raise ClassConfigError("config needs exactly one of: weights, formula")

    if has_weights:
        raw = doc["weights"]
        if not isinstance(raw, (list, tuple)) or not raw:
            raise ClassConfigError("weights must be a nonempty array")
        weights = []
        for i, entry in enumerate(raw):
            v = _parse_rational(entry, f"weights[{i}]")
            if v < 0:
                raise ClassConfigError(f"negative weight at j={i + 1}")
            weights.append(v)
        if all(v == 0 for v in weights):
            raise ClassConfigError("no positive weight")
        cap = len(weights)
        fn = lambda j: weights[j - 1] if j <= cap else Fraction(0)
        return AssemblyClass(name, fn, rho, description=doc.get("description", ""),
                             support_cap=cap)

    fn, max_j = _formula_weight_fn(doc["formula"])
    cls = AssemblyClass(name, fn, rho, description=doc.get("description", ""),
                        support_cap=max_j)
    # formulas above are positive somewhere in [min_j, min_j] by construction,
    # but a max_j below min_j is already rejected; probe one value to be safe
    probe = doc["formula"].get("min_j", 1)
    if cls.lam(probe) <= 0:
        raise ClassConfigError("no positive weight")
    return cls


def resolve_class(spec: str) -> AssemblyClass:
    """Accept a built-in name or a path to a config file."""
    if spec in _BUILTIN_SPECS:
        return builtin_class(spec)
    p = Path(spec)
    if p.exists():
        return class_from_config(p)
    raise ClassConfigError(
        f"unknown class {spec!r}; built-ins: {', '.join(BUILTIN_NAMES)} "
        "(or pass a path to a JSON/TOML config)")
