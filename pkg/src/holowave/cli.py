"""Command-line workbench: ``holowave <command> [config.ini] [--set section.key=value ...]``.

Commands: selftest, dispersion, solve, continue, certify, search.  Every run
writes into its own directory a snapshot of the resolved configuration, a
``report.json`` and the command's data files.

The speed ``params.c`` is always the physical speed of the full equation;
runs in the sinh formulation use ``c / sqrt(2)`` internally.

Exit codes: 0 success, 2 configuration or usage error, 3 degenerate profile,
4 convergence failure, 5 failed self-test.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import records
from .certificate import DEFAULT_MARGIN, decay_scan, nonexistence_certificate
from .continuation import (
    SQRT2,
    BranchPoint,
    ContinuationConfig,
    NewtonConfig,
    SeedSpec,
    continue_branch,
    newton_solve,
    random_seeds,
    seed_from_dispersion,
    solitary_search,
    solve_seed,
)
from .errors import ConfigError, DegeneracyError, NewtonFailure, ParameterError, SeamWarning, UsageError
from .selftest import run_selftest
from .spectral import PeriodicGrid
from .steady import WaveParameters, dispersion_speed

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_CONVERGENCE, EXIT_SELFTEST = 0, 2, 3, 4, 5
COMMANDS = ("selftest", "dispersion", "solve", "continue", "certify", "search")


# --- configuration ----------------------------------------------------------


def _opt_float(s: str) -> Optional[float]:
    return None if s.strip().lower() in ("", "none") else float(s)


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> tuple:
    return tuple(float(v) for v in s.replace(",", " ").split())


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


SCHEMA: dict[str, dict[str, tuple[Callable, Any]]] = {
    "run": {"out_dir": (str, ""), "seed": (int, 0), "workers": (int, 1)},
    "params": {"g": (float, 0.0), "sigma": (float, 1.0), "h": (float, 1.0), "c": (float, 1.0)},
    "grid": {"n": (int, 128), "L": (float, 2 * math.pi)},
    "newton": {
        "max_iters": (int, 40),
        "abs_tol": (float, 1e-10),
        "rel_tol": (float, 1e-13),
        "damping": (float, 1.0),
        "linear_solver": (str, "auto"),
        "krylov_maxiter": (int, 400),
        "krylov_tol": (float, 1e-12),
    },
    "continuation": {
        "ds": (float, 0.02),
        "ds_min": (float, 1e-5),
        "ds_max": (float, 0.1),
        "max_points": (int, 200),
        "target_amplitude": (_opt_float, None),
        "c_min": (_opt_float, None),
        "c_max": (_opt_float, None),
        "detect_folds": (_bool, True),
        "max_folds": (int, 2),
        "stop_on_overhang": (_bool, True),
    },
    "seed": {
        "kind": (str, "dispersion"),
        "formulation": (str, "auto"),
        "k": (float, 1.0),
        "amplitude": (float, 1e-3),
        "width": (float, 2.0),
    },
    "certificate": {
        "profile": (str, ""),
        "margin": (float, DEFAULT_MARGIN),
        "bump_amplitude": (float, 0.3),
        "bump_width": (float, 8.0),
        "radii": (_floats, ()),
    },
    "search": {
        "lengths": (_floats, (64.0, 128.0, 256.0)),
        "n_seeds": (int, 10),
        "points_per_length": (float, 4.0),
        "monotone_tol": (float, 0.1),
    },
    "selftest": {"n_random": (int, 20)},
    "dispersion": {"k_min": (float, 0.1), "k_max": (float, 10.0), "n_k": (int, 100)},
}

SEED_KINDS = ("zero", "dispersion", "sech2", "gaussian")


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def section(self, name: str) -> dict:
        return self.values[name]

    def params(self) -> WaveParameters:
        p = self.values["params"]
        return WaveParameters(p["g"], p["sigma"], p["h"], p["c"])

    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.values["grid"]["n"], self.values["grid"]["L"])

    def newton(self) -> NewtonConfig:
        return NewtonConfig(**self.values["newton"])

    def continuation(self) -> ContinuationConfig:
        return ContinuationConfig(**self.values["continuation"])

    def formulation(self) -> str:
        f = self.values["seed"]["formulation"]
        if f == "auto":
            p = self.values["params"]
            return "sinh" if p["g"] == 0 and p["sigma"] > 0 else "full"
        return f

    def snapshot(self) -> str:
        lines = []
        for sec in SCHEMA:
            lines.append(f"[{sec}]")
            for key in SCHEMA[sec]:
                lines.append(f"{key} = {_fmt(self.values[sec][key])}")
            lines.append("")
        return "\n".join(lines)


def load_config(path: Optional[str], overrides: list) -> RunConfig:
    """Parse INI text plus ``section.key=value`` overrides; unknown keys are rejected."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if path:
        try:
            with open(path, encoding="utf-8") as f:
                cp.read_file(f)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        lhs, val = item.split("=", 1)
        sec, key = lhs.strip().split(".", 1)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key.strip(), val.strip())
    values = {}
    for sec, keys in SCHEMA.items():
        values[sec] = {k: default for k, (_, default) in keys.items()}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{key}")
            conv = SCHEMA[sec][key][0]
            try:
                values[sec][key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {sec}.{key}: {raw!r} ({exc})") from exc
    cfg = RunConfig(values)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Check every referenced invariant before any computation."""
    try:
        cfg.params()
        cfg.grid()
        cfg.newton()
        cfg.continuation()
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    s = cfg["seed"]
    if s["kind"] not in SEED_KINDS:
        raise ConfigError(f"seed.kind must be one of {SEED_KINDS}")
    if s["formulation"] not in ("auto", "full", "sinh"):
        raise ConfigError("seed.formulation must be auto, full or sinh")
    if s["k"] <= 0 or s["width"] <= 0:
        raise ConfigError("seed.k and seed.width must be positive")
    if cfg.formulation() == "sinh" and (cfg["params"]["g"] != 0 or cfg["params"]["sigma"] <= 0):
        raise ConfigError("the sinh formulation needs g = 0 and sigma > 0")
    c = cfg["certificate"]
    if c["margin"] <= 0 or c["bump_width"] <= 0:
        raise ConfigError("certificate.margin and certificate.bump_width must be positive")
    sr = cfg["search"]
    if sr["n_seeds"] < 1 or sr["points_per_length"] <= 0 or sr["monotone_tol"] < 0:
        raise ConfigError("invalid [search] block")
    if not sr["lengths"] or any(v <= 0 for v in sr["lengths"]):
        raise ConfigError("search.lengths must be positive")
    if cfg["selftest"]["n_random"] < 1:
        raise ConfigError("selftest.n_random must be at least 1")
    if cfg["run"]["workers"] < 1:
        raise ConfigError("run.workers must be at least 1")


# --- helpers ----------------------------------------------------------------


def _out_dir(cfg: RunConfig, command: str) -> Path:
    d = Path(cfg["run"]["out_dir"] or f"runs/{command}")
    d.mkdir(parents=True, exist_ok=True)
    (d / "config.ini").write_text(cfg.snapshot(), encoding="utf-8")
    return d


def _internal_params(cfg: RunConfig, kind: str) -> WaveParameters:
    p = cfg.params()
    return p.with_c(p.c / SQRT2) if kind == "sinh" else p


def _solve_from_seed(cfg: RunConfig) -> BranchPoint:
    grid, kind, ncfg = cfg.grid(), cfg.formulation(), cfg.newton()
    s = cfg["seed"]
    params = _internal_params(cfg, kind)
    if s["kind"] == "zero":
        return newton_solve(kind, grid, np.zeros(grid.n_points), params, ncfg)
    if s["kind"] == "dispersion":
        try:
            sd = seed_from_dispersion(grid, s["k"], s["amplitude"], params, kind=kind)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc
        if s["amplitude"] == 0:
            return newton_solve(kind, grid, sd.field, sd.params, ncfg)
        return solve_seed(sd, ncfg)
    a = grid.centered_nodes
    if s["kind"] == "sech2":
        if kind != "full" or params.g <= 0:
            raise ConfigError("sech2 seeds are long-wave gravity seeds: need g > 0 and the full formulation")
        amp, h = s["amplitude"], params.h
        kappa = math.sqrt(3 * amp / (4 * h**3))
        c = math.sqrt(params.g * h * (1 + amp / h))
        return newton_solve("full", grid, (amp / h) / np.cosh(kappa * a) ** 2, params.with_c(c), ncfg)
    guess = SeedSpec(s["amplitude"], s["width"]).sample(grid)
    return newton_solve(kind, grid, guess, params, ncfg)


# --- commands ---------------------------------------------------------------


def cmd_selftest(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "selftest")
    results = run_selftest(cfg["run"]["seed"], cfg["selftest"]["n_random"])
    passed = all(r.passed for r in results)
    records.write_json(out / "report.json", {
        "seed": cfg["run"]["seed"],
        "n_random": cfg["selftest"]["n_random"],
        "passed": passed,
        "checks": [r.as_dict() for r in results],
    })
    failed = [r.name for r in results if not r.passed]
    print(f"selftest: {len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_OK if passed else EXIT_SELFTEST


def cmd_dispersion(cfg: RunConfig) -> int:
    d = cfg["dispersion"]
    if d["n_k"] < 1 or not 0 < d["k_min"] <= d["k_max"]:
        raise UsageError("empty wavenumber range")
    out = _out_dir(cfg, "dispersion")
    p = cfg.params()
    ks = np.linspace(d["k_min"], d["k_max"], d["n_k"]) if d["n_k"] > 1 else np.array([d["k_min"]])
    c2 = np.atleast_1d(dispersion_speed(ks, p))
    with open(out / "dispersion.csv", "w", encoding="utf-8") as f:
        f.write("k,c2\n")
        for k, v in zip(ks, c2):
            f.write(f"{float(k)!r},{float(v)!r}\n")
    records.write_json(out / "report.json", {"params": records.params_dict(p), "rows": len(ks)})
    print(f"dispersion: {len(ks)} rows written to {out / 'dispersion.csv'}")
    return EXIT_OK


def _write_point_files(out: Path, pt: BranchPoint, stem: str) -> None:
    records.write_json(out / f"{stem}.json", records.profile_record(pt))
    records.write_surface_csv(out / f"surface_{stem}.csv", pt)


def cmd_solve(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "solve")
    pt = _solve_from_seed(cfg)
    records.write_jsonl(out / "branch.jsonl", [records.point_record(pt, 0)])
    _write_point_files(out, pt, "profile")
    records.write_json(out / "report.json", {
        "formulation": pt.kind,
        "params_full": records.params_dict(pt.full_params()),
        "residual_norm": pt.residual_norm,
        "amplitude": pt.amplitude,
        "u_sup": pt.u_sup,
        "overhang": pt.overhang,
        "iterations": pt.iterations,
    })
    print(f"solve: {pt.kind} residual {pt.residual_norm:.3e}, amplitude {pt.amplitude:.6g}, c = {pt.full_params().c:.10g}")
    return EXIT_OK


def cmd_continue(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "continue")
    seed = _solve_from_seed(cfg)
    certify = seed.kind == "sinh"
    seed_pt = replace(seed, certificate=nonexistence_certificate(seed.grid, seed.field, seed.params)) if certify else seed
    s = cfg["seed"]
    branch = continue_branch(
        seed_pt, cfg.continuation(), cfg.newton(), certify=certify, seed_meta={"k": s["k"], "amplitude": s["amplitude"], "kind": s["kind"]}
    )
    records.write_jsonl(out / "branch.jsonl", [records.point_record(p, i) for i, p in enumerate(branch.points)])
    _write_point_files(out, branch.points[0], "first")
    _write_point_files(out, branch.points[-1], "last")
    onset = next((i for i, p in enumerate(branch.points) if p.overhang), None)
    cs = [p.full_params().c for p in branch.points]
    records.write_json(out / "report.json", {
        "formulation": seed.kind,
        "seed": branch.seed,
        "termination": branch.termination,
        "points": len(branch.points),
        "folds": branch.folds,
        "overhang_onset_index": onset,
        "c_full_range": [min(cs), max(cs)],
        "max_residual_norm": max(p.residual_norm for p in branch.points),
        "max_amplitude": max(p.amplitude for p in branch.points),
    })
    print(f"continue: {len(branch.points)} points, termination {branch.termination}, overhang onset {onset}")
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    c = cfg["certificate"]
    if c["profile"]:
        grid, params, u = records.load_profile(c["profile"])
    else:
        grid = cfg.grid()
        params = _internal_params(cfg, "sinh")
        u = SeedSpec(c["bump_amplitude"], c["bump_width"]).sample(grid)
    if params.g != 0:
        raise UsageError("certify applies to the pure-capillary problem (g = 0)")
    out = _out_dir(cfg, "certify")
    rep = nonexistence_certificate(grid, u, params, margin=c["margin"])
    radii = c["radii"] or tuple(grid.length / d for d in (64, 32, 16, 8))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SeamWarning)
        fit = decay_scan(grid, u, radii, params)
    seam_warnings = sum(1 for w in caught if issubclass(w.category, SeamWarning))
    records.write_json(out / "certificate.json", records.certificate_record(rep))
    records.write_json(out / "report.json", {
        "certificate": records.certificate_record(rep),
        "decay_exponent": fit.exponent,
        "decay_fit_residual": fit.fit_residual,
        "decay_radii": list(fit.radii),
        "decay_rhs": list(fit.rhs),
        "seam_warnings": seam_warnings,
    })
    print(f"certify: verdict {rep.verdict}, energy {rep.energy:.6g}, residual {rep.residual_norm:.3e}, decay exponent {fit.exponent:.3f}")
    return EXIT_OK


def cmd_search(cfg: RunConfig) -> int:
    sr = cfg["search"]
    params = _internal_params(cfg, "sinh")
    if params.g != 0:
        raise UsageError("search is the pure-capillary problem (g = 0)")
    out = _out_dir(cfg, "search")
    seeds = random_seeds(np.random.default_rng(cfg["run"]["seed"]), sr["n_seeds"])
    rep = solitary_search(
        params, sr["lengths"], seeds, cfg.newton(), sr["points_per_length"],
        monotone_tol=sr["monotone_tol"], workers=cfg["run"]["workers"],
    )
    summary = records.search_summary(rep)
    records.write_json(out / "report.json", summary)
    records.write_jsonl(out / "cells.jsonl", records.search_cells(rep))
    print(
        f"search: {len(rep.cells)} cells, outcomes {summary['outcomes']}, "
        f"consistent with non-existence: {rep.consistent_with_nonexistence}"
    )
    return EXIT_OK


HANDLERS = {
    "selftest": cmd_selftest,
    "dispersion": cmd_dispersion,
    "solve": cmd_solve,
    "continue": cmd_continue,
    "certify": cmd_certify,
    "search": cmd_search,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holowave", description="Spectral workbench for travelling water waves in holomorphic coordinates.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("config", nargs="?", default=None, help="INI configuration file")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        return HANDLERS[args.command](cfg)
    except (ConfigError, UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneracyError as exc:
        print(f"degenerate profile: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NewtonFailure as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
