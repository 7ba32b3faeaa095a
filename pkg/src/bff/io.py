"""CSV and JSON serialization for curves, meta-analyses and simulation reports.

Floats are written with ``repr`` so every value survives a round trip
exactly. CSV files have a header row of lowercase snake_case names.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .curve import BFFCurve

__all__ = [
    "write_table",
    "read_table",
    "curve_rows",
    "curve_to_dict",
    "curve_from_dict",
    "dump_curve",
    "load_curve",
    "meta_to_dict",
    "dump_meta",
    "sim_to_dict",
    "dump_sim",
    "dump_scatter",
    "load_sim_rows",
]


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def write_table(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(text: str) -> list[dict]:
    """Parse a CSV written by :func:`write_table`; numbers come back as numbers."""
    reader = csv.DictReader(io.StringIO(text))
    return [{k: _parse_cell(v) for k, v in row.items()} for row in reader]


def _json_float(x):
    # NaN and infinities have no JSON literal
    x = float(x)
    return x if math.isfinite(x) else None


def _float_or_nan(x):
    return math.nan if x is None else float(x)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


def curve_rows(curve: BFFCurve):
    return zip(curve.omega.tolist(), curve.log_bf10.tolist())


def curve_to_dict(curve: BFFCurve) -> dict:
    return {
        "omega": [float(w) for w in curve.omega],
        "log_bf10": [_json_float(v) for v in curve.log_bf10],
        "omega_min": float(curve.omega_min),
        "max_omega": float(curve.max_omega),
        "max_log_bf10": float(curve.max_log_bf10),
        "evidence": curve.band.label,
        "nu": float(curve.nu),
        "meta": curve.meta,
        "failures": [list(f) for f in curve.failures],
    }


def curve_from_dict(data: dict) -> BFFCurve:
    return BFFCurve(
        np.array(data["omega"], dtype=float),
        np.array([_float_or_nan(v) for v in data["log_bf10"]]),
        float(data["omega_min"]),
        float(data["max_omega"]),
        float(data["max_log_bf10"]),
        float(data.get("nu", 9.0)),
        dict(data.get("meta", {})),
        [tuple(f) for f in data.get("failures", [])],
    )


def dump_curve(curve: BFFCurve, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(curve_to_dict(curve), indent=2) + "\n"
    return write_table(["omega", "log_bf10"], curve_rows(curve))


def load_curve(text: str, fmt: str = "csv"):
    """A :class:`BFFCurve` from JSON, or (omega, log_bf10) arrays from CSV."""
    if fmt == "json":
        return curve_from_dict(json.loads(text))
    rows = read_table(text)
    omega = np.array([r["omega"] for r in rows], dtype=float)
    values = np.array([_float_or_nan(r["log_bf10"]) for r in rows], dtype=float)
    return omega, values


# ---------------------------------------------------------------------------
# meta-analysis
# ---------------------------------------------------------------------------


def meta_to_dict(result) -> dict:
    from .meta import fisher_z

    studies = []
    for s, c in zip(result.studies, result.per_study):
        studies.append(
            {
                "r": float(s.r_hat),
                "n": int(s.n),
                "z": fisher_z(s),
                "omega_min": float(c.omega_min),
                "max_omega": float(c.max_omega),
                "max_log_bf10": float(c.max_log_bf10),
                "evidence": c.band.label,
                "log_bf10": [_json_float(v) for v in c.log_bf10],
            }
        )
    return {
        "nu": float(result.nu),
        "total_n": int(result.total_n),
        "omega": [float(w) for w in result.combined.omega],
        "studies": studies,
        "combined": curve_to_dict(result.combined),
    }


def dump_meta(result, fmt: str = "csv") -> str:
    """Long-format curves: one row per (study, omega); study "combined" is the sum."""
    if fmt == "json":
        return json.dumps(meta_to_dict(result), indent=2) + "\n"
    rows = []
    for i, c in enumerate(result.per_study, start=1):
        rows.extend((str(i), w, v) for w, v in curve_rows(c))
    rows.extend(("combined", w, v) for w, v in curve_rows(result.combined))
    return write_table(["study", "omega", "log_bf10"], rows)


# ---------------------------------------------------------------------------
# simulation reports
# ---------------------------------------------------------------------------

SIM_COLUMNS = ["method", "n", "omega", "mean_woe", "se", "replicates", "failures", "diff_vs_ideal"]


def sim_to_dict(report) -> dict:
    cfg = report.config_dict()
    rows = []
    for r in report.rows:
        values = _sim_tuple(r)
        rows.append({k: _json_float(v) if isinstance(v, float) else v for k, v in zip(SIM_COLUMNS, values)})
    return {"config": cfg, "rows": rows}


def _sim_tuple(r):
    return (r.method, r.n, r.omega, r.mean_woe, r.se, r.replicates, r.failures, r.diff_vs_ideal)


def dump_sim(report, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(sim_to_dict(report), indent=2) + "\n"
    return write_table(SIM_COLUMNS, (_sim_tuple(r) for r in report.rows))


def load_sim_rows(text: str, fmt: str = "csv") -> list[dict]:
    if fmt == "json":
        rows = json.loads(text)["rows"]
    else:
        rows = read_table(text)
    out = []
    for r in rows:
        r = dict(r)
        for k in ("omega", "mean_woe", "se", "diff_vs_ideal"):
            r[k] = _float_or_nan(r[k])
        out.append(r)
    return out


def dump_scatter(report) -> str:
    """Per-replicate (ideal, bff_max) pairs for every simulated cell."""
    rows = []
    for (n, omega), (ideal, best) in report.scatter.items():
        for i, (a, b) in enumerate(zip(ideal.tolist(), best.tolist())):
            rows.append((n, omega, i, a, b))
    return write_table(["n", "omega", "replicate", "ideal_woe", "bff_max_woe"], rows)

