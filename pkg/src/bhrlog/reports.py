"""Machine-readable reports: versioned JSON and fixed-column CSV.

Serialization is deterministic: identical inputs produce byte-identical
files (sorted keys, shortest-roundtrip float repr, no timestamps), and files
are written atomically via a same-directory temporary plus rename, so a
crashed run never leaves a partial report behind.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Optional

from .params import ProblemParams
from .quadrature import QuadResult
from .sharpness import SharpnessSweep
from .verifier import VerificationReport

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "params_dict",
    "report_dict",
    "sweep_dict",
    "render_json",
    "render_csv",
    "emit_report",
]

SCHEMA_VERSION = 1

# one wide fixed schema; rows leave inapplicable cells empty
CSV_COLUMNS = (
    "kind", "m", "l", "N", "alpha", "side", "variant", "d", "rho", "anchor",
    "function", "lhs", "rhs_total", "slack", "error_budget", "residual",
    "tolerance", "eps", "ratio", "error_bar", "fit_limit", "fit_slope",
    "status", "note",
)


def params_dict(p: Optional[ProblemParams]) -> dict:
    if p is None:
        return {}
    return {
        "m": p.m,
        "l": p.l,
        "N": "inf" if p.depth is None else p.depth,
        "alpha": str(p.alpha),
        "rho": str(p.rho),
        "anchor": str(p.anchor),
        "side": p.side,
        "variant": p.variant,
        "d": p.d,
    }


def _quad_dict(q: QuadResult) -> dict:
    return {
        "value": q.value,
        "abs_error_estimate": q.abs_error_estimate,
        "subdivisions": q.subdivisions,
    }


def report_dict(r: VerificationReport) -> dict:
    return {
        "kind": r.kind,
        "params": params_dict(r.params),
        "function": r.function,
        "lhs": _quad_dict(r.lhs),
        "rhs_terms": [{"label": lbl, **_quad_dict(q)} for lbl, q in r.rhs_terms],
        "rhs_total": r.rhs_total,
        "slack": r.slack,
        "error_budget": r.error_budget,
        "status": r.status,
        "note": r.note,
    }


def sweep_dict(s: SharpnessSweep) -> dict:
    return {
        "kind": "sharpness",
        "l": s.l,
        "m": s.m,
        "alpha": s.alpha,
        "rho": s.rho,
        "step_variant": s.step_variant,
        "eps_grid": list(s.eps_grid),
        "ratios": [{"eps": e, "ratio": r, "error_bar": b} for e, r, b in s.ratios],
        "bounded_products": list(s.bounded_products()),
        "fit": {
            "limit": s.fit_limit,
            "slope": s.fit_slope,
            "max_residual": s.fit_max_residual,
        },
    }


def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _csv_row_from_result(res: dict) -> dict:
    row = {c: "" for c in CSV_COLUMNS}
    row["kind"] = res.get("kind", "")
    p = res.get("params", {}) or {}
    for key in ("m", "l", "N", "alpha", "side", "variant", "d", "rho", "anchor"):
        if key in p:
            row[key] = p[key]
    for key in ("m", "l", "alpha", "rho"):  # flat fields used by identity rows
        if key in res and row[key] == "":
            row[key] = res[key]
    if "function" in res and res["function"]:
        row["function"] = json.dumps(res["function"], sort_keys=True)
    if "lhs" in res:
        row["lhs"] = repr(res["lhs"]["value"])
    for key, col in (("rhs_total", "rhs_total"), ("slack", "slack"),
                     ("error_budget", "error_budget"), ("residual", "residual"),
                     ("tolerance", "tolerance"), ("eps", "eps"), ("ratio", "ratio"),
                     ("error_bar", "error_bar"), ("fit_limit", "fit_limit"),
                     ("fit_slope", "fit_slope")):
        if key in res:
            row[col] = repr(float(res[key]))
    row["status"] = res.get("status", "")
    row["note"] = res.get("note", "")
    return row


def render_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for res in payload.get("results", []):
        if res.get("kind") == "sharpness":
            base = {k: res[k] for k in ("kind", "m", "l", "alpha", "rho", "status")
                    if k in res}
            for point in res["ratios"]:
                row = dict(base)
                row.update(point)
                row["fit_limit"] = res["fit"]["limit"]
                row["fit_slope"] = res["fit"]["slope"]
                writer.writerow(_csv_row_from_result(row))
        else:
            writer.writerow(_csv_row_from_result(res))
    return buf.getvalue()


def emit_report(payload: dict, fmt: str, path: str) -> None:
    """Atomically write the report; partial files are never left behind."""
    if fmt == "json":
        text = render_json(payload)
    elif fmt == "csv":
        text = render_csv(payload)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bhrlog-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
