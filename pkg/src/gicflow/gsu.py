"""Generator step-up transformer identification and status synchronization.

Power-flow cases rarely flag GSUs, so they are found from topology: a
bounded breadth-first search from each generator bus over in-service
branches and transformers, stopping at transmission-level buses.
"""
from __future__ import annotations

import enum
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .grid import GridModel


class GsuClass(str, enum.Enum):
    DIRECT_TRANSMISSION = "DirectTransmission"
    GSUS_FOUND = "GsusFound"
    NO_PATH_WITHIN_BOUND = "NoPathWithinBound"


@dataclass(frozen=True)
class GsuSearchConfig:
    min_transmission_kv: float = 40.0
    max_bus_counter: int = 20

    def __post_init__(self) -> None:
        if not self.min_transmission_kv > 0:
            raise ValueError("min_transmission_kv must be > 0")
        if not self.max_bus_counter > 0:
            raise ValueError("max_bus_counter must be > 0")


@dataclass(frozen=True)
class GeneratorGsus:
    generator_id: str
    bus: str
    classification: GsuClass
    gsu_transformer_ids: frozenset[str]
    buses_visited: int


@dataclass(frozen=True)
class GsuReport:
    config: GsuSearchConfig
    generators: tuple[GeneratorGsus, ...]
    # transformer id -> generator ids whose GSU set contains it
    shared: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def by_generator(self) -> dict[str, GeneratorGsus]:
        return {g.generator_id: g for g in self.generators}

    def gsu_ids(self) -> frozenset[str]:
        out: set[str] = set()
        for g in self.generators:
            out |= g.gsu_transformer_ids
        return frozenset(out)

    def audit_notes(self) -> list[str]:
        notes = [f"transformer {t} serves generators {', '.join(g)}; opened only if all are offline"
                 for t, g in sorted(self.shared.items()) if len(g) > 1]
        notes.append("GSU sets include every transformer on a shortest path from the generator bus "
                     "to a transmission-level bus reached within the bus counter")
        return notes


def _adjacency(model: GridModel) -> dict[str, list[tuple[str, str, str]]]:
    """bus -> sorted [(neighbor, kind, element id)] over in-service elements."""
    buses = model.bus_by_id
    adj: dict[str, list[tuple[str, str, str]]] = {b: [] for b in buses}
    for br in model.branches:
        if br.in_service and br.from_bus in buses and br.to_bus in buses:
            adj[br.from_bus].append((br.to_bus, "branch", br.id))
            adj[br.to_bus].append((br.from_bus, "branch", br.id))
    for xf in model.transformers:
        if xf.in_service and xf.bus_high in buses and xf.bus_low in buses:
            adj[xf.bus_high].append((xf.bus_low, "transformer", xf.id))
            adj[xf.bus_low].append((xf.bus_high, "transformer", xf.id))
    for lst in adj.values():
        lst.sort(key=lambda e: (e[1], e[2], e[0]))
    return adj


def _search(start: str, kv: dict[str, float], adj, cfg: GsuSearchConfig) -> tuple[frozenset[str], int, bool]:
    """Bounded BFS from ``start``; returns (transformers, buses dequeued, reached)."""
    threshold = cfg.min_transmission_kv
    dist = {start: 0}
    preds: dict[str, list[tuple[str, str, str]]] = {start: []}
    hits: list[tuple[str, str, str]] = []  # (bus, kind, element) stepping onto transmission
    queue = deque([start])
    dequeued = 0
    while queue and dequeued < cfg.max_bus_counter:
        u = queue.popleft()
        dequeued += 1
        for v, kind, eid in adj[u]:
            if kv[v] >= threshold:
                hits.append((u, kind, eid))
                continue
            if v not in dist:
                dist[v] = dist[u] + 1
                preds[v] = []
                queue.append(v)
            if dist[v] == dist[u] + 1:
                preds[v].append((u, kind, eid))
    found: set[str] = set()
    seen: set[str] = set()
    stack = []
    for u, kind, eid in hits:
        if kind == "transformer":
            found.add(eid)
        stack.append(u)
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        for p, kind, eid in preds[u]:
            if kind == "transformer":
                found.add(eid)
            stack.append(p)
    return frozenset(found), dequeued, bool(hits)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GICFLOW_THREADS", "1")))
    except ValueError:
        return 1


def identify_gsus(model: GridModel, config: GsuSearchConfig = GsuSearchConfig()) -> GsuReport:
    """Classify every generator and collect its step-up transformers."""
    kv = {b.id: b.nominal_kv for b in model.buses}
    adj = _adjacency(model)

    def one(gen) -> GeneratorGsus:
        if kv[gen.bus] >= config.min_transmission_kv:
            return GeneratorGsus(gen.id, gen.bus, GsuClass.DIRECT_TRANSMISSION, frozenset(), 0)
        found, visited, reached = _search(gen.bus, kv, adj, config)
        if found:
            cls = GsuClass.GSUS_FOUND
        else:
            # reaching transmission over a plain branch finds no transformer
            cls = GsuClass.NO_PATH_WITHIN_BOUND
            found = frozenset()
        return GeneratorGsus(gen.id, gen.bus, cls, found, visited)

    gens = sorted(model.generators, key=lambda g: g.id)
    workers = _threads()
    if workers > 1 and len(gens) > 256:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, gens))
    else:
        results = [one(g) for g in gens]

    shared: dict[str, list[str]] = {}
    for r in results:
        for t in r.gsu_transformer_ids:
            shared.setdefault(t, []).append(r.generator_id)
    return GsuReport(config, tuple(results), {t: tuple(sorted(g)) for t, g in sorted(shared.items())})


@dataclass(frozen=True)
class GsuHistogram:
    counts: dict[int, int]
    tallies: dict[GsuClass, int]


def gsu_count_histogram(report: GsuReport) -> GsuHistogram:
    counts: dict[int, int] = {}
    tallies: dict[GsuClass, int] = {}
    for g in report.generators:
        n = len(g.gsu_transformer_ids)
        counts[n] = counts.get(n, 0) + 1
        tallies[g.classification] = tallies.get(g.classification, 0) + 1
    return GsuHistogram(dict(sorted(counts.items())), tallies)


def synchronize_gsu_status(model: GridModel, report: GsuReport) -> GridModel:
    """Open every identified GSU whose generators are all offline.

    Identified transformers are flagged ``is_gsu``. A GSU that is already
    open stays open; nothing else changes.
    """
    gens = model.generator_by_id
    online: dict[str, bool] = {}
    for t, gids in report.shared.items():
        online[t] = any(gens[g].in_service for g in gids if g in gens)
    xfs = []
    for xf in model.transformers:
        if xf.id in online:
            xf = replace(xf, is_gsu=True, in_service=xf.in_service and online[xf.id])
        xfs.append(xf)
    return replace(model, transformers=tuple(xfs))
