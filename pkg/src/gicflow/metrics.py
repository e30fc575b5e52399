"""Transformer effective GIC, reactive losses and GSUs-in/GSUs-out comparison."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

from .grid import GridModel, Transformer, TransformerConfig

if TYPE_CHECKING:
    from .solver import GicSolution

NERC_THRESHOLD_A = 75.0


def effective_gic(transformer: Transformer, winding_currents: Sequence[float],
                  bus_kvs: Sequence[float]) -> float:
    """Per-phase effective GIC from three-phase winding totals.

    ``winding_currents`` is ``(high, low)`` for two-winding units and
    ``(series, common)`` for autotransformers; ``bus_kvs`` is
    ``(kv_high, kv_low)``.
    """
    i_h, i_l = winding_currents
    kv_h, kv_l = bus_kvs
    cfg = TransformerConfig(transformer.configuration)
    if cfg in (TransformerConfig.GWYE_DELTA, TransformerConfig.GWYE_DELTA_GSU):
        return abs(i_h) / 3.0
    if cfg is TransformerConfig.GWYE_GWYE:
        ratio = kv_h / kv_l
        return abs(i_h + i_l / ratio) / 3.0
    if cfg is TransformerConfig.AUTO:
        return abs((kv_h - kv_l) * i_h + kv_l * i_l) / (3.0 * kv_h)
    if cfg is TransformerConfig.DELTA_DELTA:
        return 0.0
    raise ValueError(f"unknown transformer configuration {transformer.configuration!r}")


def qloss(transformer: Transformer, effective_gic_a: float, v_pu: float = 1.0) -> float:
    """GIC-driven reactive loss in Mvar: ``k * v_pu * I_eff``."""
    if transformer.k_factor < 0:
        raise ValueError(f"transformer {transformer.id!r} has negative k_factor {transformer.k_factor}")
    return transformer.k_factor * v_pu * effective_gic_a


def threshold_report(solution: "GicSolution", threshold: float = NERC_THRESHOLD_A) -> list[str]:
    """Transformers whose per-phase effective GIC strictly exceeds ``threshold``."""
    return sorted(t for t, i in solution.effective_gic_per_phase.items() if i > threshold)


def threshold_boundary(solution: "GicSolution", threshold: float = NERC_THRESHOLD_A) -> list[str]:
    """Transformers sitting exactly on the threshold (excluded by the strict rule)."""
    return sorted(t for t, i in solution.effective_gic_per_phase.items() if i == threshold)


def percent_error(value_in: float, value_out: float) -> float:
    """Error of the GSUs-in value relative to the GSUs-out (correct) value."""
    if value_out == 0:
        return 0.0 if value_in == 0 else math.nan
    return 100.0 * (value_out - value_in) / value_out


def format_pct(pct: float, decimals: int = 1) -> str:
    """Half-up decimal rounding for table presentation."""
    if math.isnan(pct):
        return "nan%"
    q = Decimal(1).scaleb(-decimals)
    return f"{Decimal(repr(pct)).quantize(q, rounding=ROUND_HALF_UP)}%"


@dataclass(frozen=True)
class DeltaStats:
    mean_abs: float = 0.0
    std_abs: float = 0.0
    max_abs: float = 0.0
    count: int = 0

    @classmethod
    def of(cls, values: Iterable[float]) -> "DeltaStats":
        a = np.abs(np.asarray(list(values), dtype=float))
        if a.size == 0:
            return cls()
        # sample standard deviation, as pandas reports it
        std = float(np.std(a, ddof=1)) if a.size > 1 else 0.0
        return cls(float(np.mean(a)), std, float(np.max(a)), int(a.size))


class DeltaQuantity(str, enum.Enum):
    NEUTRAL_GIC = "NeutralGic"
    BRANCH_GIC = "BranchGic"


@dataclass(frozen=True)
class DeltaDistribution:
    quantity: DeltaQuantity
    bin_width: float
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    stats: DeltaStats
    abs_deltas: Mapping[str, float] = field(default_factory=dict)


def _values(sol: "GicSolution", quantity: DeltaQuantity) -> Mapping[str, float]:
    if quantity is DeltaQuantity.NEUTRAL_GIC:
        return sol.neutral_gic
    return sol.branch_gic_per_phase


def delta_distribution(sol_a: "GicSolution", sol_b: "GicSolution",
                       quantity: DeltaQuantity = DeltaQuantity.NEUTRAL_GIC,
                       bin_width: float = 1.0) -> DeltaDistribution:
    """Histogram and statistics of ``|b - a|`` over matching ids.

    Bins are half-open ``[k*w, (k+1)*w)``; a zero difference lands in bin 0.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    quantity = DeltaQuantity(quantity)
    va, vb = _values(sol_a, quantity), _values(sol_b, quantity)
    if set(va) != set(vb):
        missing = sorted(set(va) ^ set(vb))
        raise ValueError(f"id sets differ for {quantity.value}: {missing[:5]}")
    ids = sorted(va)
    deltas = {i: abs(vb[i] - va[i]) for i in ids}
    arr = np.array([deltas[i] for i in ids], dtype=float)
    nbins = int(math.floor(arr.max() / bin_width)) + 1 if arr.size else 0
    counts = [0] * nbins
    for x in arr:
        counts[int(math.floor(x / bin_width))] += 1
    edges = tuple(k * bin_width for k in range(nbins + 1))
    return DeltaDistribution(quantity, bin_width, edges, tuple(counts), DeltaStats.of(arr), deltas)


@dataclass(frozen=True)
class ScenarioDiff:
    common_transformers: frozenset[str]
    qloss_in: float
    qloss_out: float
    qloss_error_pct: float
    per_area_error_pct: Mapping[str, float]
    per_area_qloss: Mapping[str, tuple[float, float]]
    threshold_count_in: int
    threshold_count_out: int
    neutral_delta_stats: DeltaStats
    branch_delta_stats: DeltaStats

    @property
    def qloss_difference(self) -> float:
        return self.qloss_out - self.qloss_in


def qloss_totals_diff(qloss_in: float, qloss_out: float) -> tuple[float, float]:
    """``(difference, percent error)`` for a pair of loss totals."""
    return qloss_out - qloss_in, percent_error(qloss_in, qloss_out)


def _grid_identity(model: GridModel) -> tuple:
    return (tuple(sorted(b.id for b in model.buses)),
            tuple(sorted(b.id for b in model.branches)),
            tuple(sorted(t.id for t in model.transformers)))


def compare_scenarios(sol_gsus_in: "GicSolution", sol_gsus_out: "GicSolution",
                      model_in: GridModel, model_out: GridModel,
                      threshold: float = NERC_THRESHOLD_A) -> ScenarioDiff:
    """Compare a GSUs-in solution to its GSUs-out counterpart.

    Loss totals only cover transformers in service in both models, so that
    removing a GSU does not count as an error by itself. Per-area figures
    are attributed to the area of each transformer's high-side bus.
    """
    if _grid_identity(model_in) != _grid_identity(model_out):
        raise ValueError("scenarios come from different grids")
    in_a = {t.id for t in model_in.transformers if t.in_service}
    in_b = {t.id for t in model_out.transformers if t.in_service}
    common = frozenset(in_a & in_b)

    ids = sorted(common)
    q_in = math.fsum(sol_gsus_in.qloss_mvar[t] for t in ids)
    q_out = math.fsum(sol_gsus_out.qloss_mvar[t] for t in ids)

    buses = model_in.bus_by_id
    by_area: dict[str, tuple[list[float], list[float]]] = {}
    for t in ids:
        area = buses[model_in.transformer_by_id[t].bus_high].area
        a, b = by_area.setdefault(str(area), ([], []))
        a.append(sol_gsus_in.qloss_mvar[t])
        b.append(sol_gsus_out.qloss_mvar[t])
    area_q = {k: (math.fsum(a), math.fsum(b)) for k, (a, b) in sorted(by_area.items())}
    area_err = {k: percent_error(a, b) for k, (a, b) in area_q.items()}

    return ScenarioDiff(
        common_transformers=common,
        qloss_in=q_in,
        qloss_out=q_out,
        qloss_error_pct=percent_error(q_in, q_out),
        per_area_error_pct=area_err,
        per_area_qloss=area_q,
        threshold_count_in=len(threshold_report(sol_gsus_in, threshold)),
        threshold_count_out=len(threshold_report(sol_gsus_out, threshold)),
        neutral_delta_stats=delta_distribution(sol_gsus_in, sol_gsus_out, DeltaQuantity.NEUTRAL_GIC).stats,
        branch_delta_stats=delta_distribution(sol_gsus_in, sol_gsus_out, DeltaQuantity.BRANCH_GIC).stats,
    )
