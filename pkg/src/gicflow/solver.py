"""DC network assembly and sparse nodal solve for GIC flows.

Everything is solved in lumped three-phase form: a line of per-phase
resistance ``R`` is a single edge of conductance ``3/R`` and carries the
three-phase total current. Branch and effective GICs are reported per
phase (total / 3); neutral and ground currents are reported as totals.

Sign conventions
----------------
* branch GIC: positive flowing ``from_bus -> to_bus``
* wye winding GIC: positive flowing from its bus towards the neutral
* series (auto) winding GIC: positive flowing ``bus_high -> bus_low``
* neutral and substation ground GIC: positive flowing into the earth
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .field import BranchEmf, FieldScenario, induced_emfs
from .grid import GridModel, TransformerConfig
from . import metrics

log = logging.getLogger(__name__)

EARTH = -1
KCL_RTOL = 1e-9


class NetworkError(ValueError):
    """The grid cannot be turned into a DC network."""


@dataclass(frozen=True)
class DcEdge:
    a: int
    b: int  # EARTH for the neutral-earth connection
    conductance: float
    kind: str  # "line", "winding_high", "winding_low", "series", "common", "ground"
    owner: str  # branch, transformer or substation id


@dataclass
class DcNetwork:
    model: GridModel
    nodes: list[tuple[str, str]]  # (kind, id), kind is "bus" or "neutral"
    edges: list[DcEdge]
    node_index: dict[tuple[str, str], int] = field(default_factory=dict)
    line_edge: dict[str, int] = field(default_factory=dict)

    def edges_owned_by(self, owner: str) -> list[DcEdge]:
        return [e for e in self.edges if e.owner == owner]

    def conductance_matrix(self) -> sp.csc_matrix:
        n = len(self.nodes)
        rows, cols, vals = [], [], []
        for e in self.edges:
            g = e.conductance
            rows.append(e.a); cols.append(e.a); vals.append(g)
            if e.b != EARTH:
                rows += [e.b, e.a, e.b]
                cols += [e.b, e.b, e.a]
                vals += [g, -g, -g]
        return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()


@dataclass
class GicSolution:
    node_voltages: dict[tuple[str, str], float]
    branch_gic_per_phase: dict[str, float]
    branch_ends: dict[str, tuple[str, str]]
    winding_gic: dict[str, tuple[float, float]]  # (high/series, low/common), totals
    neutral_gic: dict[str, float]
    substation_ground_gic: dict[str, float]
    effective_gic_per_phase: dict[str, float]
    qloss_mvar: dict[str, float]
    transformer_in_service: dict[str, bool]
    floating_components: list[list[tuple[str, str]]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def total_qloss(self) -> float:
        return math.fsum(self.qloss_mvar.values())


def build_network(model: GridModel) -> DcNetwork:
    """Conductance network of ``model`` without any sources attached."""
    buses = model.bus_by_id
    nodes: list[tuple[str, str]] = []
    index: dict[tuple[str, str], int] = {}

    def node(kind: str, nid: str) -> int:
        key = (kind, nid)
        if key not in index:
            index[key] = len(nodes)
            nodes.append(key)
        return index[key]

    def live(bid: str) -> bool:
        return bid in buses and buses[bid].in_service

    edges: list[DcEdge] = []
    line_edge: dict[str, int] = {}
    for br in sorted(model.branches, key=lambda b: b.id):
        if not (br.in_service and live(br.from_bus) and live(br.to_bus)):
            continue
        line_edge[br.id] = len(edges)
        edges.append(DcEdge(node("bus", br.from_bus), node("bus", br.to_bus),
                            3.0 / br.resistance_per_phase, "line", br.id))

    grounded_subs: set[str] = set()
    for xf in sorted(model.transformers, key=lambda t: t.id):
        if not (xf.in_service and live(xf.bus_high) and live(xf.bus_low)):
            continue
        cfg = xf.configuration
        if not cfg.conducts_dc:
            continue
        sub_id = model.neutral_substation_of(xf)
        sub = model.substation_by_id[sub_id]
        # a zero grounding resistance ties the neutral straight to earth
        solid = sub.grounding_resistance == 0

        def neutral() -> int:
            return EARTH if solid else node("neutral", sub_id)

        def need(r: Optional[float], which: str) -> float:
            if r is None:
                raise NetworkError(f"transformer {xf.id!r}: {which} winding conducts DC but has no resistance")
            return 3.0 / r

        if cfg.grounded_high:
            a = node("bus", xf.bus_high)
            edges.append(DcEdge(a, neutral(), need(xf.r_winding_high, "high"), "winding_high", xf.id))
        if cfg.grounded_low:
            a = node("bus", xf.bus_low)
            edges.append(DcEdge(a, neutral(), need(xf.r_winding_low, "low"), "winding_low", xf.id))
        if cfg is TransformerConfig.AUTO:
            edges.append(DcEdge(node("bus", xf.bus_high), node("bus", xf.bus_low),
                                need(xf.r_winding_high, "series"), "series", xf.id))
            edges.append(DcEdge(node("bus", xf.bus_low), neutral(),
                                need(xf.r_winding_low, "common"), "common", xf.id))
        if sub_id not in grounded_subs and not solid and sub.grounded:
            grounded_subs.add(sub_id)
            edges.append(DcEdge(node("neutral", sub_id), EARTH,
                                1.0 / sub.grounding_resistance, "ground", sub_id))
    return DcNetwork(model, nodes, edges, index, line_edge)


def _edge_currents(net: DcNetwork, v: np.ndarray, emf: np.ndarray) -> np.ndarray:
    """Current through every edge, flowing a -> b (b may be earth)."""
    out = np.empty(len(net.edges))
    for k, e in enumerate(net.edges):
        vb = 0.0 if e.b == EARTH else v[e.b]
        out[k] = e.conductance * (v[e.a] - vb + emf[k])
    return out


def solve(network: DcNetwork, emfs: Sequence[BranchEmf]) -> GicSolution:
    """Nodal solve of ``network`` driven by branch ``emfs``.

    Each EMF becomes a Norton pair (``-g*emf`` at the from-node, ``+g*emf``
    at the to-node). Components without any earth path are referenced by
    pinning their first node to 0 V and are reported as floating.
    """
    n = len(network.nodes)
    edge_emf = np.zeros(len(network.edges))
    for e in emfs:
        if e.branch_id not in network.line_edge:
            raise NetworkError(f"EMF given for branch {e.branch_id!r} which is not an in-service line")
        edge_emf[network.line_edge[e.branch_id]] = e.emf_volts

    inj = np.zeros(n)
    for k, e in enumerate(network.edges):
        if edge_emf[k] != 0.0:
            j = e.conductance * edge_emf[k]
            inj[e.a] -= j
            inj[e.b] += j

    v = np.zeros(n)
    floating: list[list[tuple[str, str]]] = []
    warnings: list[str] = []
    if n:
        G = network.conductance_matrix()
        ncomp, labels = connected_components(G, directed=False)
        to_earth = np.zeros(ncomp, dtype=bool)
        for e in network.edges:
            if e.b == EARTH:
                to_earth[labels[e.a]] = True
        keep = np.ones(n, dtype=bool)
        for c in np.flatnonzero(~to_earth):
            members = np.flatnonzero(labels == c)
            keep[members[0]] = False
            floating.append([network.nodes[i] for i in members])
            if np.any(inj[members] != 0.0):
                msg = (f"component with {len(members)} node(s) starting at {network.nodes[members[0]]} "
                       "has no ground path; referenced to 0 V")
                warnings.append(msg)
                log.warning(msg)
        idx = np.flatnonzero(keep)
        if idx.size:
            Gr = G[idx][:, idx].tocsc()
            v[idx] = splu(Gr).solve(inj[idx])
    return _assemble(network, v, edge_emf, floating, warnings)


def _assemble(net: DcNetwork, v: np.ndarray, edge_emf: np.ndarray,
              floating, warnings) -> GicSolution:
    model = net.model
    cur = _edge_currents(net, v, edge_emf).tolist()

    branch_gic = {b.id: 0.0 for b in model.branches}
    for bid, k in net.line_edge.items():
        branch_gic[bid] = cur[k] / 3.0

    winding = {t.id: [0.0, 0.0] for t in model.transformers}
    neutral = {t.id: 0.0 for t in model.transformers}
    ground = {s.id: 0.0 for s in model.substations}
    for k, e in enumerate(net.edges):
        if e.kind in ("winding_high", "series"):
            winding[e.owner][0] = cur[k]
        elif e.kind in ("winding_low", "common"):
            winding[e.owner][1] = cur[k]
        if e.kind in ("winding_high", "winding_low", "common"):
            neutral[e.owner] += cur[k]
            ground[model.neutral_substation_of(model.transformer_by_id[e.owner])] += cur[k]

    buses = model.bus_by_id
    eff: dict[str, float] = {}
    q: dict[str, float] = {}
    for xf in model.transformers:
        hi, lo = winding[xf.id]
        kvs = (buses[xf.bus_high].nominal_kv, buses[xf.bus_low].nominal_kv)
        i_eff = metrics.effective_gic(xf, (hi, lo), kvs)
        eff[xf.id] = i_eff
        q[xf.id] = metrics.qloss(xf, i_eff, buses[xf.bus_high].voltage_pu)

    return GicSolution(
        node_voltages=dict(zip(net.nodes, v.tolist())),
        branch_gic_per_phase=branch_gic,
        branch_ends={b.id: (b.from_bus, b.to_bus) for b in model.branches},
        winding_gic={k: (w[0], w[1]) for k, w in winding.items()},
        neutral_gic=neutral,
        substation_ground_gic=ground,
        effective_gic_per_phase=eff,
        qloss_mvar=q,
        transformer_in_service={t.id: t.in_service for t in model.transformers},
        floating_components=floating,
        warnings=warnings,
    )


def solve_scenario(model: GridModel, scenario: FieldScenario) -> GicSolution:
    return solve(build_network(model), induced_emfs(model, scenario))


def kcl_residuals(network: DcNetwork, emfs: Sequence[BranchEmf],
                  solution: GicSolution) -> tuple[np.ndarray, float]:
    """Net current leaving every non-earth node, and the scale it is judged against.

    The scale is the largest absolute Norton injection, floored at 1 A.
    """
    n = len(network.nodes)
    edge_emf = np.zeros(len(network.edges))
    for e in emfs:
        edge_emf[network.line_edge[e.branch_id]] = e.emf_volts
    v = np.array([solution.node_voltages[nid] for nid in network.nodes]) if n else np.zeros(0)
    cur = _edge_currents(network, v, edge_emf)
    res = np.zeros(n)
    inj = np.zeros(n)
    for k, e in enumerate(network.edges):
        res[e.a] += cur[k]
        if e.b != EARTH:
            res[e.b] -= cur[k]
        j = e.conductance * edge_emf[k]
        inj[e.a] -= j
        if e.b != EARTH:
            inj[e.b] += j
    scale = max(float(np.max(np.abs(inj))) if n else 0.0, 1.0)
    return res, scale
