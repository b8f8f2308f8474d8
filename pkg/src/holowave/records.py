"""JSON / JSONL / CSV serialization of profiles, branches and reports.

Floats are written with ``repr`` (shortest round-trip form), so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

import numpy as np

from .certificate import CertificateReport
from .continuation import SQRT2, BranchPoint, SearchReport, coeffs_to_field, field_to_coeffs
from .errors import ConfigError
from .spectral import PeriodicGrid
from .steady import WaveParameters, log_reduce, reconstruct_surface


def _clean(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, ensure_ascii=False)


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def write_jsonl(path, rows: Iterable) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(dumps(row) + "\n")


def read_jsonl(path) -> list:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def params_dict(p: WaveParameters) -> dict:
    return {"g": p.g, "sigma": p.sigma, "h": p.h, "c": p.c}


def grid_dict(g: PeriodicGrid) -> dict:
    return {"n": g.n_points, "L": g.length}


# --- profiles ---------------------------------------------------------------


def profile_record(pt: BranchPoint) -> dict:
    """Profile object: full-equation parameters and cosine coefficients of ``Re W_alpha``.

    Profiles computed in the sinh formulation also carry ``u_coeffs`` (the
    cosine coefficients of ``U``) so they reload exactly.
    """
    prof = pt.steady_profile()
    rec = {
        "params": params_dict(pt.full_params()),
        "grid": grid_dict(pt.grid),
        "re_w_alpha_coeffs": field_to_coeffs(pt.grid, prof.value.real),
        "formulation": pt.kind,
    }
    if pt.kind == "sinh":
        rec["u_coeffs"] = pt.coeffs
    return rec


def load_profile(path):
    """Return ``(grid, params, u)``: sinh-form parameters and the log-amplitude ``U``."""
    try:
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
        grid = PeriodicGrid(int(rec["grid"]["n"]), float(rec["grid"]["L"]))
        pf = rec["params"]
        params = WaveParameters(pf["g"], pf["sigma"], pf["h"], pf["c"])
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from exc
    sinh_params = params.with_c(params.c / SQRT2)
    if "u_coeffs" in rec:
        return grid, sinh_params, coeffs_to_field(grid, np.asarray(rec["u_coeffs"], dtype=float))
    from .steady import SteadyProfile

    re = coeffs_to_field(grid, np.asarray(rec["re_w_alpha_coeffs"], dtype=float))
    lp = log_reduce(SteadyProfile.from_real(grid, re, params.h))
    return grid, sinh_params, lp.u


def write_surface_csv(path, pt: BranchPoint) -> None:
    surf = reconstruct_surface(pt.steady_profile())
    order = np.argsort(surf.alpha, kind="stable")
    with open(path, "w", encoding="utf-8") as f:
        f.write("alpha,re_Z,im_Z\n")
        for j in order:
            z = surf.z[j]
            f.write(f"{float(surf.alpha[j])!r},{float(z.real)!r},{float(z.imag)!r}\n")


# --- branch points and reports ------------------------------------------------


def certificate_record(rep: CertificateReport) -> dict:
    return asdict(rep)


def point_record(pt: BranchPoint, index: int = 0) -> dict:
    return {
        "index": index,
        "formulation": pt.kind,
        "grid": grid_dict(pt.grid),
        "params": params_dict(pt.params),
        "residual_norm": pt.residual_norm,
        "amplitude": pt.amplitude,
        "overhang": pt.overhang,
        "u_sup": pt.u_sup,
        "iterations": pt.iterations,
        "arclength": pt.arclength,
        "coeffs": pt.coeffs,
        "certificate": certificate_record(pt.certificate) if pt.certificate is not None else None,
    }


def point_from_record(rec: dict) -> BranchPoint:
    grid = PeriodicGrid(int(rec["grid"]["n"]), float(rec["grid"]["L"]))
    pf = rec["params"]
    return BranchPoint(
        kind=rec["formulation"],
        grid=grid,
        coeffs=np.asarray(rec["coeffs"], dtype=float),
        params=WaveParameters(pf["g"], pf["sigma"], pf["h"], pf["c"]),
        residual_norm=float(rec["residual_norm"]),
        amplitude=float(rec["amplitude"]),
        overhang=bool(rec["overhang"]),
        u_sup=float(rec["u_sup"]),
        iterations=int(rec["iterations"]),
        arclength=float(rec["arclength"]),
    )


def search_summary(rep: SearchReport) -> dict:
    outcomes = {}
    for c in rep.cells:
        outcomes[c.outcome] = outcomes.get(c.outcome, 0) + 1
    return {
        "params": params_dict(rep.params),
        "lengths": list(rep.lengths),
        "outcomes": dict(sorted(outcomes.items())),
        "max_nonzero_amplitude": {repr(k): v for k, v in rep.max_nonzero_amplitude.items()},
        "max_localized_amplitude": {repr(k): v for k, v in rep.max_localized_amplitude.items()},
        "persistent_nonzero": rep.persistent_nonzero,
        "monotone": rep.monotone,
        "uncertified_stagnations": rep.uncertified_stagnations,
        "consistent_with_nonexistence": rep.consistent_with_nonexistence,
    }


def search_cells(rep: SearchReport) -> list:
    rows = []
    for c in rep.cells:
        rows.append(
            {
                "L": c.length,
                "n": c.n_points,
                "seed_index": c.seed_index,
                "seed": asdict(c.seed),
                "outcome": c.outcome,
                "u_sup": c.u_sup,
                "residual_norm": c.residual_norm,
                "full_residual_norm": c.full_residual_norm,
                "iterations": c.iterations,
                "localized": c.localized,
                "certificate": certificate_record(c.certificate) if c.certificate is not None else None,
            }
        )
    return rows
