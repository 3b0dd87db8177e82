"""File formats: polynomial/MFD JSON input, factor/solvent/report output.

All numeric output is rendered with 17 significant digits through a single
formatter so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
import time

import numpy as np

from .decoupler import MFDSystem
from .polynomial import MatrixPolynomial, SolventSet, SpectralFactorChain

FORMAT_VERSION = "1"
TOOL_VERSION = "0.1.0"


class FileFormatError(ValueError):
    """Raised for malformed input files; mapped to CLI exit code 1."""


def _fmt_number(x) -> str:
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        return json.dumps(str(x))
    s = format(x, ".17g")
    # keep valid JSON: ensure a decimal form, not "nan"/"inf"
    return s


def dumps_canonical(obj, indent=0) -> str:
    """JSON text with floats fixed at 17 significant digits, sorted keys."""
    pad = "  " * indent
    pad2 = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _fmt_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps_canonical(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join(pad2 + dumps_canonical(v, indent + 1) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            items.append(
                pad2 + json.dumps(str(key)) + ": "
                + dumps_canonical(obj[key], indent + 1)
            )
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)}")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(obj) + "\n")


def _matrix_from_json(data, m, what):
    arr = np.asarray(data, dtype=float)
    if arr.shape != (m, m):
        raise FileFormatError(f"{what}: expected a {m}x{m} array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FileFormatError(f"{what}: non-finite entries")
    return arr


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc


def load_polynomial(path) -> MatrixPolynomial:
    """Read a PolynomialFile: order, degree, coefficients A_0 first."""
    data = _load_json(path)
    for key in ("order", "degree", "coefficients"):
        if key not in data:
            raise FileFormatError(f"{path}: missing key '{key}'")
    m = int(data["order"])
    l = int(data["degree"])
    coeffs = data["coefficients"]
    if len(coeffs) != l + 1:
        raise FileFormatError(
            f"{path}: degree {l} needs {l + 1} coefficients, got {len(coeffs)}"
        )
    mats = []
    for i, c in enumerate(coeffs):
        try:
            mats.append(_matrix_from_json(c, m, f"coefficient {i}"))
        except ValueError as exc:
            raise FileFormatError(f"{path}: coefficient {i}: {exc}") from exc
    return MatrixPolynomial(mats)


def save_polynomial(path, p: MatrixPolynomial):
    write_json(path, {
        "format_version": FORMAT_VERSION,
        "order": p.m,
        "degree": p.l,
        "coefficients": [c.tolist() for c in p.coeffs],
    })


def load_mfd(path) -> MFDSystem:
    """Read an MFD file: ascending numerator/denominator coefficient lists."""
    data = _load_json(path)
    for key in ("order", "numerator", "denominator"):
        if key not in data:
            raise FileFormatError(f"{path}: missing key '{key}'")
    m = int(data["order"])
    num = [_matrix_from_json(c, m, f"numerator[{i}]")
           for i, c in enumerate(data["numerator"])]
    den = [_matrix_from_json(c, m, f"denominator[{i}]")
           for i, c in enumerate(data["denominator"])]
    try:
        return MFDSystem(num, den)
    except Exception as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def load_factors(path) -> SpectralFactorChain:
    data = _load_json(path)
    if "factors" not in data:
        raise FileFormatError(f"{path}: missing key 'factors'")
    m = int(data.get("order") or len(data["factors"][0]))
    mats = [_matrix_from_json(f, m, f"factor {i}")
            for i, f in enumerate(data["factors"])]
    return SpectralFactorChain(mats)


def load_solvents(path) -> SolventSet:
    data = _load_json(path)
    if "solvents" not in data or "side" not in data:
        raise FileFormatError(f"{path}: missing 'solvents' or 'side'")
    m = int(data.get("order") or len(data["solvents"][0]))
    mats = [_matrix_from_json(s, m, f"solvent {i}")
            for i, s in enumerate(data["solvents"])]
    return SolventSet(data["side"], mats)


def save_factors(path, chain: SpectralFactorChain):
    write_json(path, {
        "format_version": FORMAT_VERSION,
        "order": chain.m,
        "convention": "rightmost-first",
        "factors": [f.tolist() for f in chain.factors],
    })


def save_solvents(path, s: SolventSet):
    write_json(path, {
        "format_version": FORMAT_VERSION,
        "order": s.solvents[0].shape[0] if s.solvents else 0,
        "side": s.side,
        "solvents": [x.tolist() for x in s.solvents],
    })


def report_to_dict(report) -> dict:
    d = {
        "per_factor_residuals": list(report.per_factor_residuals),
        "per_solvent_residuals": list(report.per_solvent_residuals),
        "reconstruction_error": report.reconstruction_error,
        "rightmost_residual": report.rightmost_residual,
        "leftmost_residual": report.leftmost_residual,
        "warnings": list(report.warnings),
    }
    if report.completeness is not None:
        c = report.completeness
        d["completeness"] = {
            "complete": c.complete,
            "spectrum_union_matches": c.spectrum_union_matches,
            "pairwise_disjoint": c.pairwise_disjoint,
            "vandermonde_det": c.vandermonde_det,
            "vandermonde_cond": c.vandermonde_cond,
        }
    return d


def save_report(path, report):
    write_json(path, report_to_dict(report))


def save_trace_csv(path, traces):
    """trace.csv with standardized columns across all methods.

    ``traces`` is a list of (label, ConvergenceTrace-like) pairs; Q.D. traces
    are adapted by the caller into the same column layout.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "iteration", "delta_pct", "residual", "aux"])
        for label, rows in traces:
            for row in rows:
                writer.writerow([label] + [
                    format(v, ".17g") if isinstance(v, float) else v for v in row
                ])


def iter_trace_rows(trace):
    """Rows for a ConvergenceTrace."""
    rows = []
    for i, (d, r) in enumerate(zip(trace.deltas, trace.residuals)):
        aux = trace.ratios[i] if i < len(trace.ratios) else float("nan")
        rows.append([i, float(d), float(r), float(aux)])
    return rows


def qd_trace_rows(trace):
    """Rows for a QDTrace: aux column carries the per-block E norms."""
    rows = []
    for sweep, rel, blocks in zip(trace.sweeps, trace.max_relative_e,
                                  trace.e_block_norms):
        rows.append([sweep, float("nan"), float(rel),
                     ";".join(format(b, ".17g") for b in blocks)])
    return rows


def save_manifest(out_dir, command, input_path, overrides, seed=0):
    ts = os.environ.get("SOURCE_DATE_EPOCH")
    timestamp = (
        time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(int(ts)))
        if ts else time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    )
    write_json(os.path.join(out_dir, "manifest.json"), {
        "command": command,
        "input": str(input_path),
        "overrides": overrides,
        "seed": seed,
        "tool_version": TOOL_VERSION,
        "timestamp": timestamp,
    })
