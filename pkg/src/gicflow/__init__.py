"""GIC network analysis with generator step-up transformer status modeling."""
from .field import BranchEmf, FieldScenario, geodesic_lengths, induced_emfs
from .grid import (Branch, Bus, Generator, GridModel, Substation, Transformer,
                   TransformerConfig, ValidationReport, connected_components, validate)
from .gridio import load_grid, parse_grid, save_grid, serialize_grid, write_solution_csv
from .gsu import (GsuClass, GsuReport, GsuSearchConfig, gsu_count_histogram, identify_gsus,
                  synchronize_gsu_status)
from .metrics import (ScenarioDiff, compare_scenarios, delta_distribution, effective_gic, qloss,
                      threshold_report)
from .solver import DcNetwork, GicSolution, build_network, solve, solve_scenario

__version__ = "0.1.0"

__all__ = [
    "BranchEmf", "FieldScenario", "geodesic_lengths", "induced_emfs",
    "Branch", "Bus", "Generator", "GridModel", "Substation", "Transformer", "TransformerConfig",
    "ValidationReport", "connected_components", "validate",
    "load_grid", "parse_grid", "save_grid", "serialize_grid", "write_solution_csv",
    "GsuClass", "GsuReport", "GsuSearchConfig", "gsu_count_histogram", "identify_gsus",
    "synchronize_gsu_status",
    "ScenarioDiff", "compare_scenarios", "delta_distribution", "effective_gic", "qloss",
    "threshold_report",
    "DcNetwork", "GicSolution", "build_network", "solve", "solve_scenario",
]
