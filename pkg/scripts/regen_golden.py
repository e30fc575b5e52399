"""Rebuild the golden result tables under tests/golden/ from the dense oracle.

The CSV tables come from the dense oracle, not the package solver, so they stay
an independent reference. The SVG map is a render regression snapshot of the
package's own output. Run from the repository root:

    python3 scripts/regen_golden.py
"""
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracle import oracle_tables  # noqa: E402

from gicflow.field import FieldScenario, induced_emfs  # noqa: E402
from gicflow.fixtures import six_bus  # noqa: E402
from gicflow.solver import solve_scenario  # noqa: E402
from gicflow.viz import VizConfig, render_solution  # noqa: E402

CASES = {
    "six_bus_east": (six_bus, FieldScenario(8.0, 90.0)),
    "six_bus_north": (six_bus, FieldScenario(8.0, 0.0)),
}


def main() -> None:
    for name, (build, scenario) in CASES.items():
        model = build()
        emfs = {e.branch_id: e.emf_volts for e in induced_emfs(model, scenario)}
        out = ROOT / "tests" / "golden" / name
        out.mkdir(parents=True, exist_ok=True)
        for fname, text in oracle_tables(model, emfs).items():
            (out / fname).write_text(text, encoding="utf-8", newline="")
            print(out / fname)
    m = six_bus()
    svg = render_solution(m, solve_scenario(m, FieldScenario(8.0, 90.0)), VizConfig(oval_scale=2.0)).svg
    target = ROOT / "tests" / "golden" / "six_bus_east.svg"
    target.write_text(svg, encoding="utf-8", newline="")
    print(target)


if __name__ == "__main__":
    main()
