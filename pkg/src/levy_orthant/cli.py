"""Command-line driver: ``levy-orthant analyze|estimate|fit --config run.json``.

Exit status: 0 on success, 2 when ``flags.require_conditions`` is set and
condition C3 does not hold, 1 on any error. C1 verdicts are reported but do not
gate: they are often ``unknown`` and can be overridden.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .asympt import fit_a0
from .conditions import ConditionReport, check_conditions
from .errors import ConfigError, LevyOrthantError
from .model import LevyModel, model_from_dict
from .rates import OrthantTarget, ToleranceProfile
from .sim import HitEstimate, SimConfig, simulate_hitting_crude, simulate_hitting_is, write_chunk_csv

log = logging.getLogger("levy_orthant")

CSV_COLUMNS = ["s", "method", "delta", "n", "p_hat", "std_err", "ci_lo", "ci_hi", "seed"]
METHODS = ("crude", "importance")
EXIT_OK, EXIT_ERROR, EXIT_CONDITIONS = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    model: LevyModel
    target: OrthantTarget
    s_grid: list
    sim: SimConfig
    methods: list
    tolerances: ToleranceProfile = field(default_factory=ToleranceProfile)
    require_conditions: bool = False
    assume_c1: bool = False
    report_path: str = "report.json"
    csv_path: str = "estimates.csv"
    fit_path: Optional[str] = None
    chunk_csv_path: Optional[str] = None

    @property
    def fit_output(self) -> str:
        if self.fit_path:
            return self.fit_path
        root, _ = os.path.splitext(self.report_path)
        return root + "_fit.json"


def _check_writable(path: str, key: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(key, f"directory of {path!r} is not writable")


def config_from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if "model" not in d:
        raise ConfigError("model", "missing")
    model = model_from_dict(d["model"])

    tgt = d.get("target")
    if not isinstance(tgt, dict) or "g" not in tgt:
        raise ConfigError("target.g", "missing")
    try:
        g = np.asarray(tgt["g"], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("target.g", "must be a list of numbers") from None
    if g.shape != (model.dim,):
        raise ConfigError("target.g", f"must have length {model.dim}")
    if not np.all(g > 0):
        raise ConfigError("target.g", "all components must be strictly positive")
    target = OrthantTarget(g)

    s_grid = d.get("s_grid", [1.0])
    if not isinstance(s_grid, list) or not s_grid:
        raise ConfigError("s_grid", "must be a nonempty list")
    try:
        s_grid = [float(s) for s in s_grid]
    except (TypeError, ValueError):
        raise ConfigError("s_grid", "must contain numbers") from None
    if any(s <= 0 for s in s_grid) or any(b <= a for a, b in zip(s_grid, s_grid[1:])):
        raise ConfigError("s_grid", "must be positive and strictly increasing")

    sim = SimConfig.from_dict(d.get("sim"))

    methods = d.get("methods", ["importance"])
    if not isinstance(methods, list) or not methods or any(m not in METHODS for m in methods):
        raise ConfigError("methods", f"must be a nonempty subset of {list(METHODS)}")

    try:
        tol = ToleranceProfile.from_dict(d.get("tolerances"))
    except TypeError as e:
        raise ConfigError("tolerances", str(e)) from None

    flags = d.get("flags", {}) or {}
    for k in flags:
        if k not in ("require_conditions", "assume_c1"):
            raise ConfigError(f"flags.{k}", "unknown flag")
        if not isinstance(flags[k], bool):
            raise ConfigError(f"flags.{k}", "must be a boolean")

    out = d.get("output", {}) or {}
    cfg = RunConfig(
        model=model,
        target=target,
        s_grid=s_grid,
        sim=sim,
        methods=list(methods),
        tolerances=tol,
        require_conditions=flags.get("require_conditions", False),
        assume_c1=flags.get("assume_c1", False),
        report_path=out.get("report_path", "report.json"),
        csv_path=out.get("csv_path", "estimates.csv"),
        fit_path=out.get("fit_path"),
        chunk_csv_path=out.get("chunk_csv_path"),
    )
    _check_writable(cfg.report_path, "output.report_path")
    _check_writable(cfg.csv_path, "output.csv_path")
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("--config", f"file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("--config", f"invalid JSON: {e}") from None
    return config_from_dict(raw)


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _conditions(cfg: RunConfig) -> ConditionReport:
    return check_conditions(cfg.model, cfg.target, cfg.tolerances, assume_c1=cfg.assume_c1)


def _gated(cfg: RunConfig, report: ConditionReport) -> bool:
    return cfg.require_conditions and report.c3.overall != "holds"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_analyze(cfg: RunConfig, workers=None) -> int:
    report = _conditions(cfg)
    _write_json(cfg.report_path, report.to_dict())
    print(json.dumps(report.to_dict()))
    if _gated(cfg, report):
        log.error("condition C3 does not hold (%s): %s", report.c3.overall, report.c3.reason)
        return EXIT_CONDITIONS
    return EXIT_OK


def format_row(est: HitEstimate) -> list:
    row = est.to_row()
    return [repr(row[c]) if isinstance(row[c], float) else str(row[c]) for c in CSV_COLUMNS]


def cmd_estimate(cfg: RunConfig, workers=None) -> int:
    report = _conditions(cfg)
    if _gated(cfg, report):
        _write_json(cfg.report_path, report.to_dict())
        log.error("condition C3 does not hold; refusing to estimate")
        return EXIT_CONDITIONS
    new_file = not os.path.exists(cfg.csv_path) or os.path.getsize(cfg.csv_path) == 0
    with open(cfg.csv_path, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new_file:
            writer.writerow(CSV_COLUMNS)
        for s in cfg.s_grid:
            for method in cfg.methods:
                if method == "crude":
                    est = simulate_hitting_crude(cfg.model, cfg.target, s, cfg.sim, workers=workers)
                else:
                    est = simulate_hitting_is(
                        cfg.model, cfg.target, s, cfg.sim, workers=workers, report=report, tol=cfg.tolerances
                    )
                writer.writerow(format_row(est))
                fh.flush()
                log.info("s=%g %s p_hat=%.6g se=%.3g", s, method, est.p_hat, est.std_err)
                if cfg.chunk_csv_path:
                    root, ext = os.path.splitext(cfg.chunk_csv_path)
                    write_chunk_csv(f"{root}_s{s:g}_{method}{ext or '.csv'}", est)
    return EXIT_OK


def read_estimates(path: str, method: Optional[str] = None) -> list:
    """Read CSV rows back into :class:`HitEstimate` records (last row per ``s`` wins)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except FileNotFoundError:
        raise ConfigError("output.csv_path", f"estimates file not found: {path}") from None
    if rows and set(CSV_COLUMNS) - set(rows[0]):
        raise ConfigError("output.csv_path", f"CSV must have columns {','.join(CSV_COLUMNS)}")
    if method is None:
        present = {r["method"] for r in rows}
        method = "importance" if "importance" in present else "crude"
    by_s = {}
    for r in rows:
        if r["method"] != method:
            continue
        s = float(r["s"])
        by_s[s] = HitEstimate(
            s=s,
            method=method,
            p_hat=float(r["p_hat"]),
            std_err=float(r["std_err"]),
            ci95=(float(r["ci_lo"]), float(r["ci_hi"])),
            n_paths=int(r["n"]),
            n_hits=0,
            delta=float(r["delta"]),
            truncation_bias_flag=method == "crude",
            seed=int(r["seed"]),
        )
    return [by_s[s] for s in sorted(by_s)]


def cmd_fit(cfg: RunConfig, workers=None, method: Optional[str] = None) -> int:
    report = _conditions(cfg)
    if _gated(cfg, report):
        log.error("condition C3 does not hold; refusing to fit")
        return EXIT_CONDITIONS
    if not math.isfinite(report.d_of_g):
        raise LevyOrthantError(f"D(G) unavailable: {report.c3.reason}")
    records = read_estimates(cfg.csv_path, method)
    fit = fit_a0(records, report.d_of_g, cfg.model.dim)
    _write_json(cfg.fit_output, fit.to_dict())
    print(json.dumps(fit.to_dict()))
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "estimate": cmd_estimate, "fit": cmd_fit}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levy-orthant", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--workers", type=int, default=None, help="worker threads (default: $LEVY_ORTHANT_WORKERS or 1)")
    p.add_argument("--override-c1", action="store_true", help="treat condition C1 as satisfied")
    p.add_argument("--method", choices=METHODS, default=None, help="estimates used by `fit`")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.override_c1:
            cfg = replace(cfg, assume_c1=True)
        if args.command == "fit":
            return cmd_fit(cfg, args.workers, args.method)
        return COMMANDS[args.command](cfg, args.workers)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (LevyOrthantError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
