"""Command-line front end.

Thin orchestration over the library: every subcommand parses flags into
a RunConfig, delegates to one engine call, and serializes the result.
Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 verification
mismatch under --verify.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import click

from . import serialize
from .bounds import MomentReport, moment_report, tk_ratio_sweep
from .classes import BUILTIN_NAMES, builtin_class, resolve_class
from .conditions import WeaklyLogParams, check_all_conditions, suggest_constants
from .counting import EXACT, coeff_table, normalize_mode
from .errors import (ClassConfigError, EmptySupportError, NumericError,
                     RejectionLimitError)
from .families import FAMILY_NAMES, get_family
from .moments import comp_count_pmf, moments_additive
from .oracle import oracle_moments, oracle_pmf, profiles
from .sampler import SamplerConfig, chi_square_marginal, sample_batch

VERIFY_CAP = 40


class VerifyMismatch(Exception):
    """Engine and oracle disagree; message holds the first differing entry."""


@dataclass
class RunConfig:
    cls: object
    mode: str
    fmt: str
    output: Optional[str]
    verify: bool
    seed: Optional[int] = None


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _parse_constant(raw, label):
    if raw is None:
        return None
    try:
        v = serialize.parse_value(raw)
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"{label} must be a number or p/q rational")
    if v is None or not v > 0:
        raise click.UsageError(f"{label} must be positive")
    return v


def _common(fn):
    for deco in (
        click.option("--format", "fmt", type=click.Choice(("csv", "json")),
                     default="csv", show_default=True),
        click.option("--output", type=click.Path(dir_okay=False), default=None,
                     help="write here instead of stdout"),
        click.option("--threads", type=click.IntRange(min=1), default=1,
                     show_default=True,
                     help="cap on internal parallelism; never changes output"),
    ):
        fn = deco(fn)
    return fn


def _class_opt(fn):
    return click.option("--class", "class_spec", required=True,
                        help="built-in name or config file (TOML or JSON)")(fn)


def _mode_opt(default="exact"):
    return click.option("--mode", default=default, show_default=True,
                        type=click.Choice(("exact", "float")))


_verify_opt = click.option("--verify", is_flag=True,
                           help="cross-check against the brute-force oracle")


def _require_exact_verify(mode):
    if mode != EXACT:
        raise click.UsageError("--verify needs --mode exact")


def _load(class_spec):
    try:
        return resolve_class(class_spec)
    except OSError as e:
        raise click.UsageError(f"cannot read class config: {e}")


@click.group()
def cli():
    """Exact and scaled computation over weighted component assemblies."""


# --- classes ----------------------------------------------------------------

@cli.command("classes")
@click.option("--format", "fmt", type=click.Choice(("csv", "json")),
              default="csv", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def cmd_classes(fmt, output):
    """List built-in classes with their weight formulas."""
    rows = [(name, builtin_class(name).rho, builtin_class(name).description)
            for name in BUILTIN_NAMES]
    if fmt == "csv":
        text = serialize._csv_text(("name", "rho", "weights"), rows)
    else:
        text = serialize.dumps_json({"classes": [
            {"name": n, "rho": serialize.json_value(r), "weights": d}
            for n, r, d in rows]})
    _emit(text, output)


# --- count ------------------------------------------------------------------

def _oracle_coeff_excluding(cls, n, excluded):
    total = Fraction(0)
    for prof in profiles(n):
        if any(prof.multiplicity(j) for j in excluded):
            continue
        total += prof.weight(cls)
    return total


def _verify_count(cls, table, excluded):
    for n in range(0, min(table.n_max, VERIFY_CAP) + 1):
        want = _oracle_coeff_excluding(cls, n, excluded)
        if table.values[n] != want:
            raise VerifyMismatch(
                f"count mismatch at n={n}: engine {table.values[n]}, "
                f"oracle {want}")


@cli.command("count")
@_class_opt
@click.option("--n", "nmax", type=click.IntRange(min=1), required=True,
              help="emit orders 1..n")
@_mode_opt()
@click.option("--g", "want_g", is_flag=True,
              help="emit G(n) = n! Q(n) instead of Q(n); exact mode only")
@click.option("--excl", multiple=True, type=click.IntRange(min=1),
              help="component size to exclude; repeatable")
@click.option("--rho", default=None, help="radius override, scaled mode only")
@_verify_opt
@_common
def cmd_count(class_spec, nmax, mode, want_g, excl, rho, verify, fmt, output,
              threads):
    """Emit the coefficient table Q(1..n), or its scaled counterpart."""
    cls = _load(class_spec)
    mode = normalize_mode(mode)
    if want_g and mode != EXACT:
        raise click.UsageError("--g needs --mode exact")
    rho_val = _parse_constant(rho, "--rho")
    table = coeff_table(cls, nmax, mode=mode, excluded=excl, rho=rho_val)
    if verify:
        _require_exact_verify(mode)
        _verify_count(cls, table, excl)

    from math import factorial
    rows = [(n, factorial(n) * table.values[n] if want_g else table.values[n])
            for n in range(1, nmax + 1)]
    if fmt == "csv":
        text = serialize._csv_text(("n", "value"), rows)
    else:
        text = serialize.dumps_json({
            "class": cls.name, "mode": mode,
            "excluded": sorted(table.excluded),
            "rho": serialize.json_value(table.rho),
            "column": "G" if want_g else "Q",
            "rows": [[n, serialize.json_value(v)] for n, v in rows]})
    _emit(text, output)


# --- check ------------------------------------------------------------------

@cli.command("check")
@_class_opt
@click.option("--N", "nmax", type=click.IntRange(min=1), required=True)
@click.option("--rho", default=None,
              help="radius for the scaled series; defaults to the class radius")
@click.option("--auto", is_flag=True, help="derive the constants from the data")
@click.option("--Theta", "Theta", default=None)
@click.option("--theta", "theta", default=None)
@click.option("--theta-prime", "theta_prime", default=None)
@click.option("--n0", type=click.IntRange(min=1), default=1, show_default=True)
@_verify_opt
@_common
def cmd_check(class_spec, nmax, rho, auto, Theta, theta, theta_prime, n0,
              verify, fmt, output, threads):
    """Check the weak-logarithm conditions over orders 1..N."""
    cls = _load(class_spec)
    rho_val = _parse_constant(rho, "--rho")
    if rho_val is None:
        rho_val = cls.rho
    probe = False
    if auto:
        if any(v is not None for v in (Theta, theta, theta_prime)):
            raise click.UsageError("--auto excludes explicit constants")
        params = suggest_constants(cls, rho_val, nmax)
        if params is None:
            # no stable suggestion: probe with half-range candidates, which
            # a genuinely degenerate class will then violate on (N/2, N]
            probe = True
            params = suggest_constants(cls, rho_val, max(2, nmax // 2),
                                       check_degeneracy=False)
        if params is None:
            raise click.UsageError(
                f"no usable constants for class {cls.name!r} at N={nmax}")
    else:
        params = WeaklyLogParams(
            rho=rho_val, Theta=_parse_constant(Theta, "--Theta"),
            theta=_parse_constant(theta, "--theta"),
            theta_prime=_parse_constant(theta_prime, "--theta-prime"), n0=n0)
        if all(v is None for v in (params.Theta, params.theta,
                                   params.theta_prime)):
            raise click.UsageError("give constants to check, or --auto")
    if verify:
        _verify_count(cls, coeff_table(cls, min(nmax, VERIFY_CAP)), ())
    verdicts = check_all_conditions(cls, params, nmax)
    if fmt == "csv":
        text = serialize.verdicts_to_csv(verdicts)
    else:
        text = serialize.dumps_json({
            "class": cls.name, "N": nmax, "auto": auto, "probe": probe,
            "params": serialize.params_to_json(params),
            "verdicts": [serialize.verdict_to_json(v) for v in verdicts]})
    _emit(text, output)


# --- pmf --------------------------------------------------------------------

@cli.command("pmf")
@_class_opt
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--j", type=click.IntRange(min=1), required=True)
@_mode_opt()
@_verify_opt
@_common
def cmd_pmf(class_spec, n, j, mode, verify, fmt, output, threads):
    """Emit the distribution of the number of size-j components at order n."""
    cls = _load(class_spec)
    mode = normalize_mode(mode)
    pmf = comp_count_pmf(cls, n, j, mode=mode)
    if verify:
        _require_exact_verify(mode)
        if n <= VERIFY_CAP:
            want = oracle_pmf(cls, n, j)
            for k, (got, exp) in enumerate(zip(pmf.probs, want)):
                if got != exp:
                    raise VerifyMismatch(
                        f"pmf mismatch at k={k}: engine {got}, oracle {exp}")
    if fmt == "csv":
        text = serialize.pmf_to_csv(pmf)
    else:
        text = serialize.dumps_json(serialize.pmf_to_json(pmf, cls.name))
    _emit(text, output)


# --- moments / tk -----------------------------------------------------------

def _family_opt(fn):
    return click.option("--family", required=True,
                        type=click.Choice(FAMILY_NAMES))(fn)


def _make_h(family, seed, n):
    fam = get_family(family, seed=seed)
    return fam, fam.make(n)


def _verify_moments(cls, n, h, mean, variance):
    if n > VERIFY_CAP:
        return
    want_mean, want_var = oracle_moments(cls, n, h)
    if mean != want_mean:
        raise VerifyMismatch(
            f"mean mismatch at n={n}: engine {mean}, oracle {want_mean}")
    if variance != want_var:
        raise VerifyMismatch(
            f"variance mismatch at n={n}: engine {variance}, "
            f"oracle {want_var}")


def _verify_rhs(cls, n, h, report):
    if n > VERIFY_CAP:
        return
    want1 = Fraction(0)
    for j in range(1, n + 1):
        pm = oracle_pmf(cls, n, j)
        want1 += sum(h.h(j, k) ** 2 * p for k, p in enumerate(pm) if k)
    if report.rhs1 != want1:
        raise VerifyMismatch(
            f"rhs1 mismatch at n={n}: engine {report.rhs1}, oracle {want1}")
    if report.rhs2 is not None:
        from .oracle import oracle_coeff
        qn = oracle_coeff(cls, n)
        want2 = sum(cls.lam(j) * h.a(j) ** 2 * oracle_coeff(cls, n - j)
                    for j in range(1, n + 1)) / qn
        if report.rhs2 != want2:
            raise VerifyMismatch(
                f"rhs2 mismatch at n={n}: engine {report.rhs2}, "
                f"oracle {want2}")


@cli.command("moments")
@_class_opt
@click.option("--n", type=click.IntRange(min=1), required=True)
@_family_opt
@click.option("--seed", type=int, default=None,
              help="needed by seeded families only")
@_mode_opt()
@_verify_opt
@_common
def cmd_moments(class_spec, n, family, seed, mode, verify, fmt, output,
                threads):
    """Mean and variance of an additive functional at one order."""
    cls = _load(class_spec)
    mode = normalize_mode(mode)
    _, h = _make_h(family, seed, n)
    mean, variance = moments_additive(cls, n, h, mode=mode)
    if verify:
        _require_exact_verify(mode)
        _verify_moments(cls, n, h, mean, variance)
    _emit_report(MomentReport(n=n, mean=mean, variance=variance),
                 cls, family, mode, fmt, output)


def _emit_report(report, cls, family, mode, fmt, output):
    if fmt == "csv":
        text = serialize.reports_to_csv([report])
    else:
        text = serialize.dumps_json({
            "class": cls.name, "family": family, "mode": mode,
            "report": {f: serialize.json_value(getattr(report, f))
                       for f in serialize.REPORT_FIELDS}})
    _emit(text, output)


@cli.command("tk")
@_class_opt
@click.option("--n", type=click.IntRange(min=1), required=True)
@_family_opt
@click.option("--seed", type=int, default=None)
@_mode_opt()
@_verify_opt
@_common
def cmd_tk(class_spec, n, family, seed, mode, verify, fmt, output, threads):
    """Variance bound right-hand sides and their ratios at one order."""
    cls = _load(class_spec)
    mode = normalize_mode(mode)
    _, h = _make_h(family, seed, n)
    report = moment_report(cls, n, h, mode=mode)
    if verify:
        _require_exact_verify(mode)
        _verify_moments(cls, n, h, report.mean, report.variance)
        _verify_rhs(cls, n, h, report)
    _emit_report(report, cls, family, mode, fmt, output)


# --- sweep --------------------------------------------------------------------

@cli.command("sweep")
@_class_opt
@click.option("--n-min", type=click.IntRange(min=1), default=1,
              show_default=True)
@click.option("--n-max", type=click.IntRange(min=1), required=True)
@_family_opt
@click.option("--seed", type=int, default=None)
@_mode_opt(default="float")
@_verify_opt
@_common
def cmd_sweep(class_spec, n_min, n_max, family, seed, mode, verify, fmt,
              output, threads):
    """Bound ratios over a range of orders; empty orders are skipped."""
    if n_max < n_min:
        raise click.UsageError("--n-max must be >= --n-min")
    cls = _load(class_spec)
    mode = normalize_mode(mode)
    fam = get_family(family, seed=seed)
    result = tk_ratio_sweep(cls, fam, (n_min, n_max), mode=mode)
    if verify:
        _require_exact_verify(mode)
        for rep in result.reports:
            if rep.n <= VERIFY_CAP:
                _verify_moments(cls, rep.n, fam.make(rep.n), rep.mean,
                                rep.variance)
    if fmt == "csv":
        text = serialize.reports_to_csv(result.reports)
    else:
        text = serialize.dumps_json(serialize.sweep_to_json(result))
    _emit(text, output)


# --- sample -------------------------------------------------------------------

@cli.command("sample")
@_class_opt
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--reps", type=click.IntRange(min=1), default=1,
              show_default=True)
@click.option("--seed", type=int, required=True,
              help="PRNG seed; required, sampling is never silently random")
@click.option("--tilt", type=float, default=None,
              help="Poisson tilt point; tuned to the order when omitted")
@click.option("--max-rejections", type=click.IntRange(min=1),
              default=50_000_000, show_default=True)
@click.option("--dump", type=click.Path(dir_okay=False), default=None,
              help="also write the raw profiles here as sparse CSV")
@click.option("--j", "verify_j", type=click.IntRange(min=1), default=None,
              help="marginal to test under --verify")
@_verify_opt
@_common
def cmd_sample(class_spec, n, reps, seed, tilt, max_rejections, dump,
               verify_j, verify, fmt, output, threads):
    """Draw exact component profiles by rejection from tilted Poissons."""
    cls = _load(class_spec)
    config = SamplerConfig(seed=seed, tilt=tilt, max_rejections=max_rejections)
    batch = sample_batch(cls, n, reps, config)
    if dump:
        with open(dump, "w", newline="") as f:
            f.write(serialize.samples_to_csv(batch))
    meta = serialize.sample_meta_json(cls.name, batch)
    if verify:
        j = verify_j if verify_j is not None else _first_supported(cls, n)
        res = chi_square_marginal(cls, n, j, reps, config, batch=batch)
        meta["chi_square"] = {"j": j, "statistic": res.statistic,
                              "df": res.df, "pvalue": res.pvalue,
                              "level": res.level}
        if res.reject:
            worst = max(res.bins, key=lambda b: (b[1] - b[2]) ** 2 / b[2])
            raise VerifyMismatch(
                f"marginal k_{j} fails chi-square at level {res.level:g}: "
                f"p={res.pvalue:.3g}, worst cell k={worst[0]} observed "
                f"{worst[1]} expected {worst[2]:.1f}")
    if fmt == "csv":
        rows = []
        for k, v in meta.items():
            # nested tables (the chi-square block) flatten to dotted fields
            if isinstance(v, dict):
                rows.extend((f"{k}.{kk}", vv) for kk, vv in v.items())
            else:
                rows.append((k, v))
        text = serialize._csv_text(("field", "value"), rows)
    else:
        text = serialize.dumps_json(meta)
    _emit(text, output)


def _first_supported(cls, n):
    for j in range(1, n + 1):
        if cls.lam(j) > 0:
            return j
    raise EmptySupportError(f"class {cls.name!r} has no weight up to {n}")


# --- entry points -------------------------------------------------------------

def main(argv=None) -> int:
    """Run the CLI; returns the exit code instead of raising SystemExit."""
    try:
        cli.main(args=argv, prog_name="assemblykit", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return 1
    except (ClassConfigError, EmptySupportError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (NumericError, RejectionLimitError, OverflowError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 2
    except VerifyMismatch as e:
        print(f"verification mismatch: {e}", file=sys.stderr)
        return 3
    return 0


def entry():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
