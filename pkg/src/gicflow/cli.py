"""Command-line batch studies: ``gicflow {solve,compare,identify-gsus,viz}``."""
from __future__ import annotations

import argparse
import csv
import enum
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .field import FieldScenario
from .grid import GridModel
from .gridio import GridFormatError, load_grid, solution_tables
from .gsu import GsuReport, GsuSearchConfig, gsu_count_histogram, identify_gsus, synchronize_gsu_status
from .metrics import (DeltaDistribution, DeltaQuantity, ScenarioDiff, compare_scenarios,
                      delta_distribution, format_pct, threshold_boundary, threshold_report)
from .solver import GicSolution, NetworkError, solve_scenario
from .viz import VizConfig, VizMode, render_diff, render_solution

log = logging.getLogger("gicflow")

FIXED_STAMP = "1970-01-01T00:00:00+00:00"


class GsuMode(str, enum.Enum):
    IN = "in"
    OUT = "out"
    BOTH = "both"


@dataclass
class StudyConfig:
    grid: Path
    out: Path
    scenario: FieldScenario = field(default_factory=lambda: FieldScenario(8.0, 90.0))
    gsu_search: GsuSearchConfig = field(default_factory=GsuSearchConfig)
    gsu_mode: GsuMode = GsuMode.IN
    deterministic: bool = False
    viz_mode: VizMode = VizMode.GROUND_GIC
    oval_scale: float = 1.0
    arrow_scale: float = 0.25


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GICFLOW_THREADS", "2")))
    except ValueError:
        return 1


class _Outputs:
    """Collects files for one output directory and writes them in one place."""

    def __init__(self, root: Path):
        self.root = root
        self.files: dict[str, str] = {}

    def add(self, rel: str, text: str) -> None:
        self.files[rel] = text

    def add_csv(self, rel: str, header: Sequence[str], rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.add(rel, buf.getvalue())

    def add_solution(self, prefix: str, sol: GicSolution) -> None:
        for name, text in solution_tables(sol).items():
            self.add(f"{prefix}{name}", text)

    def write(self) -> list[str]:
        for rel in sorted(self.files):
            p = self.root / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(self.files[rel], encoding="utf-8", newline="")
        return sorted(self.files)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(cfg: StudyConfig, command: str, outputs: list[str], t0: float, started: str) -> str:
    det = cfg.deterministic
    return _json({
        "tool": "gicflow",
        "version": __version__,
        "command": command,
        "inputs": {"grid": str(cfg.grid), "grid_sha256": _sha256(cfg.grid)},
        "parameters": {
            "field_vpkm": cfg.scenario.magnitude,
            "field_dir_deg": cfg.scenario.direction_deg,
            "alpha": cfg.scenario.alpha,
            "beta": cfg.scenario.beta,
            "min_kv": cfg.gsu_search.min_transmission_kv,
            "max_bus_counter": cfg.gsu_search.max_bus_counter,
            "gsu_mode": cfg.gsu_mode.value,
        },
        "outputs": outputs,
        "started": FIXED_STAMP if det else started,
        "wall_time_s": 0.0 if det else round(time.perf_counter() - t0, 6),
    })


def _scenario_models(model: GridModel, cfg: StudyConfig) -> tuple[GsuReport, GridModel]:
    report = identify_gsus(model, cfg.gsu_search)
    return report, synchronize_gsu_status(model, report)


def _solve_pair(m_in: GridModel, m_out: GridModel, scenario: FieldScenario):
    if _threads() > 1:
        with ThreadPoolExecutor(max_workers=2) as ex:
            fa = ex.submit(solve_scenario, m_in, scenario)
            fb = ex.submit(solve_scenario, m_out, scenario)
            return fa.result(), fb.result()
    return solve_scenario(m_in, scenario), solve_scenario(m_out, scenario)


def _hist_rows(d: DeltaDistribution):
    return [(f"{lo:g}", f"{lo + d.bin_width:g}", n) for lo, n in zip(d.bin_edges, d.counts)]


def _f6(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def comparison_files(out: _Outputs, diff: ScenarioDiff, sol_in: GicSolution, sol_out: GicSolution,
                     report: Optional[GsuReport] = None) -> None:
    """Comparison tables laid out like the loss, area and threshold tables of a study."""
    out.add_csv("table_qloss.csv", ("row", "qloss_mvar"), [
        ("GSUs in", _f6(diff.qloss_in)),
        ("GSUs out", _f6(diff.qloss_out)),
        ("Difference", _f6(diff.qloss_difference)),
        ("% Error", format_pct(diff.qloss_error_pct)),
    ])
    out.add_csv("table_area_error.csv", ("area", "qloss_in_mvar", "qloss_out_mvar", "error_pct"),
                [(a, _f6(q[0]), _f6(q[1]), format_pct(diff.per_area_error_pct[a]))
                 for a, q in diff.per_area_qloss.items()])
    out.add_csv("table_threshold.csv", ("scenario", "transformers_above_75a", "transformers_at_75a"), [
        ("GSUs in", diff.threshold_count_in, len(threshold_boundary(sol_in))),
        ("GSUs out", diff.threshold_count_out, len(threshold_boundary(sol_out))),
    ])
    nd = delta_distribution(sol_in, sol_out, DeltaQuantity.NEUTRAL_GIC)
    bd = delta_distribution(sol_in, sol_out, DeltaQuantity.BRANCH_GIC)
    out.add_csv("neutral_delta_hist.csv", ("abs_delta_low_a", "abs_delta_high_a", "count"), _hist_rows(nd))
    out.add_csv("branch_delta_hist.csv", ("abs_delta_low_a_per_phase", "abs_delta_high_a_per_phase", "count"),
                _hist_rows(bd))

    def stats(s):
        return {"mean_abs": s.mean_abs, "std_abs": s.std_abs, "max_abs": s.max_abs, "count": s.count}

    doc = {
        "common_transformers": sorted(diff.common_transformers),
        "qloss_in_mvar": diff.qloss_in,
        "qloss_out_mvar": diff.qloss_out,
        "qloss_difference_mvar": diff.qloss_difference,
        "qloss_error_pct": diff.qloss_error_pct,
        "qloss_error_display": format_pct(diff.qloss_error_pct),
        "per_area_error_pct": dict(diff.per_area_error_pct),
        "threshold_count_in": diff.threshold_count_in,
        "threshold_count_out": diff.threshold_count_out,
        "above_threshold_in": threshold_report(sol_in),
        "above_threshold_out": threshold_report(sol_out),
        "at_threshold_in": threshold_boundary(sol_in),
        "at_threshold_out": threshold_boundary(sol_out),
        "neutral_delta_stats": stats(diff.neutral_delta_stats),
        "branch_delta_stats": stats(diff.branch_delta_stats),
    }
    if report is not None:
        doc["gsu_audit"] = report.audit_notes()
        doc["gsus_opened"] = sorted(t for t in report.gsu_ids()
                                    if t in sol_in.transformer_in_service
                                    and sol_in.transformer_in_service[t]
                                    and not sol_out.transformer_in_service[t])
    out.add("comparison.json", _json(doc))


def gsu_report_files(out: _Outputs, report: GsuReport) -> None:
    gens = []
    for g in report.generators:
        gens.append({"generator_id": g.generator_id, "bus": g.bus,
                     "classification": g.classification.value,
                     "gsu_transformer_ids": sorted(g.gsu_transformer_ids),
                     "buses_visited": g.buses_visited})
    out.add("gsu_report.json", _json({
        "config": {"min_transmission_kv": report.config.min_transmission_kv,
                   "max_bus_counter": report.config.max_bus_counter},
        "generators": gens,
        "shared_gsus": {t: list(g) for t, g in report.shared.items() if len(g) > 1},
        "audit": report.audit_notes(),
    }))
    out.add_csv("gsu_report.csv",
                ("generator_id", "bus", "classification", "gsu_count", "gsu_transformer_ids", "buses_visited"),
                [(g["generator_id"], g["bus"], g["classification"], len(g["gsu_transformer_ids"]),
                  ";".join(g["gsu_transformer_ids"]), g["buses_visited"]) for g in gens])
    hist = gsu_count_histogram(report)
    out.add_csv("gsu_histogram.csv", ("gsu_count", "generators"), sorted(hist.counts.items()))
    out.add_csv("gsu_classification.csv", ("classification", "generators"),
                sorted((c.value, n) for c, n in hist.tallies.items()))


def cmd_solve(cfg: StudyConfig) -> int:
    t0, started = time.perf_counter(), datetime.now(timezone.utc).isoformat()
    model = load_grid(cfg.grid)
    if cfg.gsu_mode is GsuMode.BOTH:
        raise ValueError("solve takes --gsu-mode in or out; use compare for both")
    if cfg.gsu_mode is GsuMode.OUT:
        _, model = _scenario_models(model, cfg)
    sol = solve_scenario(model, cfg.scenario)
    out = _Outputs(cfg.out)
    out.add_solution("", sol)
    if sol.warnings:
        out.add("warnings.txt", "\n".join(sol.warnings) + "\n")
    names = sorted(out.files) + ["manifest.json"]
    out.add("manifest.json", _manifest(cfg, "solve", names, t0, started))
    out.write()
    return 0


def cmd_compare(cfg: StudyConfig) -> int:
    t0, started = time.perf_counter(), datetime.now(timezone.utc).isoformat()
    model = load_grid(cfg.grid)
    report, m_out = _scenario_models(model, cfg)
    sol_in, sol_out = _solve_pair(model, m_out, cfg.scenario)
    diff = compare_scenarios(sol_in, sol_out, model, m_out)
    out = _Outputs(cfg.out)
    out.add_solution("gsus_in/", sol_in)
    out.add_solution("gsus_out/", sol_out)
    comparison_files(out, diff, sol_in, sol_out, report)
    names = sorted(out.files) + ["manifest.json"]
    out.add("manifest.json", _manifest(cfg, "compare", names, t0, started))
    out.write()
    return 0


def cmd_identify_gsus(cfg: StudyConfig) -> int:
    t0, started = time.perf_counter(), datetime.now(timezone.utc).isoformat()
    model = load_grid(cfg.grid)
    out = _Outputs(cfg.out)
    gsu_report_files(out, identify_gsus(model, cfg.gsu_search))
    names = sorted(out.files) + ["manifest.json"]
    out.add("manifest.json", _manifest(cfg, "identify-gsus", names, t0, started))
    out.write()
    return 0


def cmd_viz(cfg: StudyConfig) -> int:
    t0, started = time.perf_counter(), datetime.now(timezone.utc).isoformat()
    model = load_grid(cfg.grid)
    out = _Outputs(cfg.out)
    if cfg.gsu_mode is GsuMode.BOTH:
        _, m_out = _scenario_models(model, cfg)
        sol_in, sol_out = _solve_pair(model, m_out, cfg.scenario)
        vc = VizConfig(mode=VizMode.DIFF, diff_quantity=cfg.viz_mode,
                       oval_scale=cfg.oval_scale, arrow_scale=cfg.arrow_scale)
        r = render_diff(model, sol_in, sol_out, vc)
    else:
        if cfg.gsu_mode is GsuMode.OUT:
            _, model = _scenario_models(model, cfg)
        sol = solve_scenario(model, cfg.scenario)
        vc = VizConfig(mode=cfg.viz_mode, oval_scale=cfg.oval_scale, arrow_scale=cfg.arrow_scale)
        r = render_solution(model, sol, vc)
    out.add("gic_map.svg", r.svg)
    out.add("gic_map.geojson", r.geojson_text())
    names = sorted(out.files) + ["manifest.json"]
    out.add("manifest.json", _manifest(cfg, "viz", names, t0, started))
    out.write()
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "compare": cmd_compare,
    "identify-gsus": cmd_identify_gsus,
    "viz": cmd_viz,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gicflow", description=__doc__)
    p.add_argument("--version", action="version", version=f"gicflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--grid", required=True, type=Path)
        s.add_argument("--out", required=True, type=Path)
        s.add_argument("--field-vpkm", type=float, default=8.0)
        s.add_argument("--field-dir-deg", type=float, default=90.0,
                       help="degrees clockwise from north (90 = eastward)")
        s.add_argument("--alpha", type=float, default=1.0)
        s.add_argument("--beta", type=float, default=1.0)
        s.add_argument("--min-kv", type=float, default=40.0)
        s.add_argument("--max-bus-counter", type=int, default=20)
        s.add_argument("--gsu-mode", choices=[m.value for m in GsuMode],
                       default="both" if name == "compare" else "in")
        s.add_argument("--deterministic", action="store_true",
                       help="fixed manifest timestamp for byte-identical output trees")
        s.add_argument("-v", "--verbose", action="store_true")
        if name == "viz":
            s.add_argument("--viz-mode", choices=["ground", "qloss"], default="ground")
            s.add_argument("--oval-scale", type=float, default=1.0, help="km^2 per A or per Mvar")
            s.add_argument("--arrow-scale", type=float, default=0.25, help="km per A")
    return p


def config_from_args(args: argparse.Namespace) -> StudyConfig:
    viz_mode = {"ground": VizMode.GROUND_GIC, "qloss": VizMode.SUBSTATION_QLOSS}[getattr(args, "viz_mode", "ground")]
    return StudyConfig(
        grid=args.grid,
        out=args.out,
        scenario=FieldScenario(args.field_vpkm, args.field_dir_deg, args.alpha, args.beta),
        gsu_search=GsuSearchConfig(args.min_kv, args.max_bus_counter),
        gsu_mode=GsuMode(args.gsu_mode),
        deterministic=args.deterministic,
        viz_mode=viz_mode,
        oval_scale=getattr(args, "oval_scale", 1.0),
        arrow_scale=getattr(args, "arrow_scale", 0.25),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "compare" and cfg.gsu_mode is not GsuMode.BOTH:
            raise ValueError("compare always runs both scenarios; drop --gsu-mode or pass both")
        if not cfg.grid.is_file():
            raise FileNotFoundError(f"grid file not found: {cfg.grid}")
        return COMMANDS[args.command](cfg)
    except (FileNotFoundError, GridFormatError, NetworkError, ValueError, OSError) as exc:
        print(f"gicflow {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
