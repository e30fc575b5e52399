"""In-memory grid representation shared by every analysis.

All records are frozen dataclasses; a :class:`GridModel` is never mutated
after construction. Status changes (e.g. taking GSUs out of service) go
through :func:`dataclasses.replace` and produce a new model.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc


class TransformerConfig(str, enum.Enum):
    GWYE_DELTA = "GwyeDelta"
    GWYE_GWYE = "GwyeGwye"
    DELTA_DELTA = "DeltaDelta"
    AUTO = "Auto"
    GWYE_DELTA_GSU = "GwyeDeltaGsu"

    @property
    def grounded_high(self) -> bool:
        return self in (TransformerConfig.GWYE_DELTA, TransformerConfig.GWYE_GWYE,
                        TransformerConfig.GWYE_DELTA_GSU)

    @property
    def grounded_low(self) -> bool:
        return self is TransformerConfig.GWYE_GWYE

    @property
    def conducts_dc(self) -> bool:
        return self is not TransformerConfig.DELTA_DELTA


@dataclass(frozen=True)
class Substation:
    id: str
    name: str
    latitude: float
    longitude: float
    # math.inf marks an ungrounded substation (no earth path)
    grounding_resistance: float = math.inf
    area: Optional[str] = None
    extra: Mapping[str, Any] = field(default_factory=dict, compare=True)

    @property
    def grounded(self) -> bool:
        return math.isfinite(self.grounding_resistance)


@dataclass(frozen=True)
class Bus:
    id: str
    substation_id: str
    nominal_kv: float
    area: str
    voltage_pu: float = 1.0
    in_service: bool = True
    extra: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Branch:
    id: str
    from_bus: str
    to_bus: str
    resistance_per_phase: float
    in_service: bool = True
    length_north_km: Optional[float] = None
    length_east_km: Optional[float] = None
    extra: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Transformer:
    """Two-winding or auto transformer.

    For ``Auto`` the high winding resistance is the series winding and the
    low winding resistance is the common winding. ``neutral_substation``
    defaults to the substation of ``bus_high`` when omitted.
    """

    id: str
    bus_high: str
    bus_low: str
    configuration: TransformerConfig
    r_winding_high: Optional[float] = None
    r_winding_low: Optional[float] = None
    neutral_substation: Optional[str] = None
    k_factor: float = 0.0
    in_service: bool = True
    is_gsu: bool = False
    extra: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Generator:
    id: str
    bus: str
    mw_capacity: float = 0.0
    in_service: bool = True
    extra: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class GridModel:
    substations: tuple[Substation, ...] = ()
    buses: tuple[Bus, ...] = ()
    branches: tuple[Branch, ...] = ()
    transformers: tuple[Transformer, ...] = ()
    generators: tuple[Generator, ...] = ()
    name: str = ""
    source: str = ""
    extra: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for attr in ("substations", "buses", "branches", "transformers", "generators"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    @cached_property
    def substation_by_id(self) -> dict[str, Substation]:
        return {s.id: s for s in self.substations}

    @cached_property
    def bus_by_id(self) -> dict[str, Bus]:
        return {b.id: b for b in self.buses}

    @cached_property
    def branch_by_id(self) -> dict[str, Branch]:
        return {b.id: b for b in self.branches}

    @cached_property
    def transformer_by_id(self) -> dict[str, Transformer]:
        return {t.id: t for t in self.transformers}

    @cached_property
    def generator_by_id(self) -> dict[str, Generator]:
        return {g.id: g for g in self.generators}

    def neutral_substation_of(self, xf: Transformer) -> str:
        if xf.neutral_substation is not None:
            return xf.neutral_substation
        return self.bus_by_id[xf.bus_high].substation_id

    def canonical(self) -> "GridModel":
        """Same model with every collection sorted by id."""
        def srt(items):
            return tuple(sorted(items, key=lambda r: r.id))
        return GridModel(srt(self.substations), srt(self.buses), srt(self.branches),
                         srt(self.transformers), srt(self.generators),
                         self.name, self.source, self.extra)

    def equivalent(self, other: "GridModel") -> bool:
        """Structural equality ignoring collection order."""
        return self.canonical() == other.canonical()


@dataclass(frozen=True)
class Violation:
    kind: str
    collection: str
    record_id: str
    message: str

    def __str__(self) -> str:
        return f"{self.collection}[{self.record_id}] {self.kind}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __len__(self) -> int:
        return len(self.violations)

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


def _duplicates(ids: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    dup: set[str] = set()
    for i in ids:
        if i in seen:
            dup.add(i)
        seen.add(i)
    return sorted(dup)


def _bad_number(x: Optional[float]) -> bool:
    return x is None or isinstance(x, bool) or not isinstance(x, (int, float)) or math.isnan(x)


def validate(model: GridModel) -> ValidationReport:
    """Collect every invariant violation of ``model``.

    Violations are sorted, so the report does not depend on the order of the
    input collections.
    """
    out: list[Violation] = []

    def add(kind: str, coll: str, rid: str, msg: str) -> None:
        out.append(Violation(kind, coll, str(rid), msg))

    for coll in ("substations", "buses", "branches", "transformers", "generators"):
        for d in _duplicates(r.id for r in getattr(model, coll)):
            add("duplicate-id", coll, d, f"id {d!r} appears more than once")

    subs = {s.id for s in model.substations}
    buses = model.bus_by_id

    for s in model.substations:
        if _bad_number(s.grounding_resistance) or s.grounding_resistance < 0:
            add("bad-grounding", "substations", s.id,
                f"grounding_resistance must be >= 0, got {s.grounding_resistance!r}")
        if _bad_number(s.latitude) or not -90.0 <= s.latitude <= 90.0:
            add("bad-coordinate", "substations", s.id, f"latitude {s.latitude!r} out of range")
        if _bad_number(s.longitude) or not -180.0 <= s.longitude <= 180.0:
            add("bad-coordinate", "substations", s.id, f"longitude {s.longitude!r} out of range")

    for b in model.buses:
        if _bad_number(b.nominal_kv) or b.nominal_kv <= 0:
            add("non-positive-kv", "buses", b.id, f"nominal_kv must be > 0, got {b.nominal_kv!r}")
        if b.substation_id not in subs:
            add("dangling-reference", "buses", b.id, f"unknown substation {b.substation_id!r}")

    for br in model.branches:
        for end in (br.from_bus, br.to_bus):
            if end not in buses:
                add("dangling-reference", "branches", br.id, f"unknown bus {end!r}")
        if br.from_bus == br.to_bus:
            add("self-loop", "branches", br.id, "from_bus equals to_bus")
        if br.in_service and (_bad_number(br.resistance_per_phase) or br.resistance_per_phase <= 0):
            add("non-positive-resistance", "branches", br.id,
                f"in-service branch needs resistance_per_phase > 0, got {br.resistance_per_phase!r}")
        explicit = br.length_north_km is not None and br.length_east_km is not None
        if not explicit and br.from_bus in buses and br.to_bus in buses:
            for end in (br.from_bus, br.to_bus):
                if buses[end].substation_id not in subs:
                    add("missing-geometry", "branches", br.id,
                        f"no explicit lengths and bus {end!r} has no located substation")

    for xf in model.transformers:
        ends_ok = True
        for end in (xf.bus_high, xf.bus_low):
            if end not in buses:
                add("dangling-reference", "transformers", xf.id, f"unknown bus {end!r}")
                ends_ok = False
        if xf.neutral_substation is not None and xf.neutral_substation not in subs:
            add("dangling-reference", "transformers", xf.id,
                f"unknown neutral substation {xf.neutral_substation!r}")
        if xf.bus_high == xf.bus_low:
            add("self-loop", "transformers", xf.id, "bus_high equals bus_low")
        for name in ("r_winding_high", "r_winding_low"):
            r = getattr(xf, name)
            if r is not None and (_bad_number(r) or r <= 0):
                add("non-positive-resistance", "transformers", xf.id, f"{name} must be > 0, got {r!r}")
        if ends_ok and buses[xf.bus_high].nominal_kv < buses[xf.bus_low].nominal_kv:
            add("kv-order", "transformers", xf.id, "bus_high nominal kV below bus_low nominal kV")

    for g in model.generators:
        if g.bus not in buses:
            add("dangling-reference", "generators", g.id, f"unknown bus {g.bus!r}")
        if _bad_number(g.mw_capacity) or g.mw_capacity < 0:
            add("negative-capacity", "generators", g.id, f"mw_capacity must be >= 0, got {g.mw_capacity!r}")

    out.sort(key=lambda v: (v.collection, v.record_id, v.kind, v.message))
    return ValidationReport(tuple(out))


def dc_edges(model: GridModel) -> list[tuple[str, str]]:
    """Node-pair edges of the DC path graph (earth excluded).

    Node labels are ``"bus:<id>"`` and ``"neutral:<substation id>"``. A device
    conducts only if it and all of its terminal buses are in service.
    """
    buses = model.bus_by_id

    def live(bid: str) -> bool:
        return bid in buses and buses[bid].in_service

    edges: list[tuple[str, str]] = []
    for br in model.branches:
        if br.in_service and live(br.from_bus) and live(br.to_bus):
            edges.append((f"bus:{br.from_bus}", f"bus:{br.to_bus}"))
    for xf in model.transformers:
        if not (xf.in_service and live(xf.bus_high) and live(xf.bus_low)):
            continue
        cfg = xf.configuration
        neutral = f"neutral:{model.neutral_substation_of(xf)}"
        if cfg.grounded_high:
            edges.append((f"bus:{xf.bus_high}", neutral))
        if cfg.grounded_low:
            edges.append((f"bus:{xf.bus_low}", neutral))
        if cfg is TransformerConfig.AUTO:
            edges.append((f"bus:{xf.bus_high}", f"bus:{xf.bus_low}"))
            edges.append((f"bus:{xf.bus_low}", neutral))
    return edges


def connected_components(model: GridModel) -> list[frozenset[str]]:
    """Partition in-service buses by DC connectivity.

    Buses sharing a substation neutral through grounded windings are
    connected; delta windings join nothing. Components are returned as
    frozensets of bus ids, ordered by their smallest id.
    """
    live = sorted(b.id for b in model.buses if b.in_service)
    labels = [f"bus:{b}" for b in live]
    index = {lab: i for i, lab in enumerate(labels)}
    edges = dc_edges(model)
    for a, b in edges:
        for n in (a, b):
            if n not in index:
                index[n] = len(index)
    n = len(index)
    if n == 0:
        return []
    rows = [index[a] for a, _ in edges]
    cols = [index[b] for _, b in edges]
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, comp = _cc(adj, directed=False)
    groups: dict[int, set[str]] = {}
    for bid in live:
        groups.setdefault(int(comp[index[f"bus:{bid}"]]), set()).add(bid)
    return sorted((frozenset(g) for g in groups.values()), key=min)
