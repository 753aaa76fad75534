"""Value formatting and CSV/JSON emission with round-trip parsers.

Exact rationals travel as 'p/q' in lowest terms (bare integers where
q = 1); floats as 17-significant-digit decimals, which round-trip, with
a trailing '.0' forced so the parser can tell the two kinds apart.
Empty fields are absent values.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (Fraction, int)):
        return str(Fraction(v))
    s = format(float(v), ".17g")
    if not any(c in s for c in ".eEnf"):   # nan/inf keep their letters
        s += ".0"
    return s


def parse_value(s: str):
    s = s.strip()
    if not s:
        return None
    if any(c in s for c in ".eEnf"):
        return float(s)
    return Fraction(s)


def json_value(v):
    """JSON payload for a possibly-exact value: exact -> 'p/q' string."""
    if v is None or isinstance(v, (float, int)) and not isinstance(v, bool):
        return v if not isinstance(v, float) else float(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def from_json_value(v):
    if v is None or isinstance(v, float):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return parse_value(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_value(v) for v in row])
    return buf.getvalue()


def _csv_rows(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[parse_value(c) for c in row] for row in rows[1:]]


# --- coefficient tables -----------------------------------------------------

def table_to_csv(table, start: int = 0) -> str:
    rows = [(n, table.values[n]) for n in range(start, table.n_max + 1)]
    return _csv_text(("n", "value"), rows)


def table_from_csv(text: str):
    _, rows = _csv_rows(text)
    return [(int(n), v) for n, v in rows]


# --- component-count laws ---------------------------------------------------

def pmf_to_csv(pmf) -> str:
    return _csv_text(("k", "prob"), list(enumerate(pmf.probs)))


def pmf_from_csv(text: str):
    _, rows = _csv_rows(text)
    return [(int(k), p) for k, p in rows]


def pmf_to_json(pmf, class_name: str) -> dict:
    return {"class": class_name, "n": pmf.n, "j": pmf.j, "mode": pmf.mode,
            "probs": [json_value(p) for p in pmf.probs]}


# --- moment reports and sweeps ----------------------------------------------

REPORT_FIELDS = ("n", "mean", "variance", "rhs1", "rhs2", "ratio1", "ratio2")


def report_row(report):
    return tuple(getattr(report, f) for f in REPORT_FIELDS)


def reports_to_csv(reports) -> str:
    return _csv_text(REPORT_FIELDS, [report_row(r) for r in reports])


def reports_from_csv(text: str):
    header, rows = _csv_rows(text)
    assert tuple(header) == REPORT_FIELDS
    return [dict(zip(REPORT_FIELDS, [int(r[0])] + r[1:])) for r in rows]


def sweep_to_json(result) -> dict:
    return {
        "class": result.class_name,
        "family": result.family,
        "mode": result.mode,
        "n_min": result.n_min,
        "n_max": result.n_max,
        "skipped": list(result.skipped),
        "reports": [
            {f: json_value(getattr(r, f)) for f in REPORT_FIELDS}
            for r in result.reports
        ],
        "sup_ratio1": json_value(result.sup_ratio(("ratio1"))),
        "sup_ratio2": json_value(result.sup_ratio(("ratio2"))),
    }


def sweep_reports_from_json(doc: dict):
    return [{f: (row[f] if f == "n" else from_json_value(row[f]))
             for f in REPORT_FIELDS} for row in doc["reports"]]


# --- condition verdicts -----------------------------------------------------

VERDICT_FIELDS = ("condition", "number", "holds", "exact", "checked_range",
                  "index", "value", "bound", "side", "skipped")


def verdict_row(v):
    w = v.witness
    return (v.condition, v.number, int(v.holds), int(v.exact), v.checked_range,
            w.index if w else None, w.value if w else None,
            w.bound if w else None, (w.side if w else "") or None,
            len(v.skipped) or None)


def verdicts_to_csv(verdicts) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(VERDICT_FIELDS)
    for v in verdicts:
        row = verdict_row(v)
        w.writerow([row[0]] + [fmt_value(x) if not isinstance(x, str) else x
                               for x in row[1:]])
    return buf.getvalue()


def verdict_to_json(v) -> dict:
    w = v.witness
    return {
        "condition": v.condition, "number": v.number, "holds": v.holds,
        "exact": v.exact, "checked_range": v.checked_range,
        "witness": None if w is None else {
            "index": w.index, "value": json_value(w.value),
            "bound": json_value(w.bound), "side": w.side},
        "skipped": list(v.skipped),
    }


def params_to_json(params) -> dict:
    return {"rho": json_value(params.rho), "Theta": json_value(params.Theta),
            "theta": json_value(params.theta),
            "theta_prime": json_value(params.theta_prime), "n0": params.n0}


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# --- sample dumps -------------------------------------------------------------

def samples_to_csv(batch) -> str:
    """Sparse profile dump: one row per (sample, size) with a positive count."""
    rows = []
    for i in range(batch.reps):
        row = batch.counts[i]
        for j in range(batch.n):
            if row[j]:
                rows.append((i, j + 1, int(row[j])))
    return _csv_text(("sample", "j", "s_j"), rows)


def sample_meta_json(cls_name: str, batch) -> dict:
    return {"class": cls_name, "n": batch.n, "reps": batch.reps,
            "seed": batch.seed, "tilt": batch.tilt,
            "attempts": batch.attempts, "accepted": batch.accepted,
            "acceptance_rate": batch.acceptance_rate}
