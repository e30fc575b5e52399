"""Geographic data views of GIC solutions as SVG and GeoJSON.

Each substation gets an oval whose *area* is proportional to the encoded
quantity; each branch gets an arrow whose length is proportional to its
per-phase GIC and which points in the flow direction. SVG user units are
kilometres on an equirectangular projection, so glyph geometry can be read
back directly in km and km^2.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

from .grid import GridModel
from .solver import GicSolution

GREEN = "#1a9850"
RED = "#d73027"
ARROW = "#000000"


class VizMode(str, enum.Enum):
    GROUND_GIC = "GroundGic"
    SUBSTATION_QLOSS = "SubstationQloss"
    DIFF = "Diff"


@dataclass(frozen=True)
class VizConfig:
    mode: VizMode = VizMode.GROUND_GIC
    oval_scale: float = 1.0  # km^2 per A (or per Mvar)
    arrow_scale: float = 0.25  # km per A
    # quantity differenced by render_diff
    diff_quantity: VizMode = VizMode.GROUND_GIC
    center_lat: Optional[float] = None
    center_lon: Optional[float] = None
    km_per_degree: float = 111.2
    min_value: float = 0.1  # glyphs below this magnitude are omitted
    margin_km: float = 50.0

    def __post_init__(self) -> None:
        if not (self.oval_scale > 0 and self.arrow_scale > 0 and self.km_per_degree > 0):
            raise ValueError("scales must be positive")


@dataclass(frozen=True)
class Rendering:
    svg: str
    geojson: dict

    def geojson_text(self) -> str:
        return json.dumps(self.geojson, indent=2, sort_keys=True) + "\n"


class _Projection:
    def __init__(self, model: GridModel, cfg: VizConfig):
        lats = [s.latitude for s in model.substations]
        lons = [s.longitude for s in model.substations]
        self.lat0 = cfg.center_lat if cfg.center_lat is not None else (
            0.5 * (min(lats) + max(lats)) if lats else 0.0)
        self.lon0 = cfg.center_lon if cfg.center_lon is not None else (
            0.5 * (min(lons) + max(lons)) if lons else 0.0)
        self.kx = cfg.km_per_degree * math.cos(math.radians(self.lat0))
        self.ky = cfg.km_per_degree

    def __call__(self, lat: float, lon: float) -> tuple[float, float]:
        # SVG y grows downwards
        return (lon - self.lon0) * self.kx, -(lat - self.lat0) * self.ky

    def inverse(self, x: float, y: float) -> tuple[float, float]:
        return -y / self.ky + self.lat0, x / self.kx + self.lon0


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def substation_qloss(model: GridModel, sol: GicSolution) -> dict[str, float]:
    """Reactive loss summed by the substation of each transformer's high-side bus."""
    buses = model.bus_by_id
    out = {s.id: 0.0 for s in model.substations}
    for xf in sorted(model.transformers, key=lambda t: t.id):
        out[buses[xf.bus_high].substation_id] += sol.qloss_mvar.get(xf.id, 0.0)
    return out


def _quantity(model: GridModel, sol: GicSolution, mode: VizMode) -> dict[str, float]:
    if mode is VizMode.SUBSTATION_QLOSS:
        return substation_qloss(model, sol)
    return dict(sol.substation_ground_gic)


def _render(model: GridModel, cfg: VizConfig, quantity: str, values: dict[str, float],
            colors: dict[str, str], flows: dict[str, float], title: str) -> Rendering:
    subs = sorted(model.substation_by_id.values(), key=lambda s: s.id)
    for s in subs:
        if s.latitude is None or s.longitude is None:
            raise ValueError(f"substation {s.id!r} has no coordinates")
    proj = _Projection(model, cfg)
    pts = {s.id: proj(s.latitude, s.longitude) for s in subs}

    ovals = []
    for s in subs:
        v = values.get(s.id, 0.0)
        if abs(v) < cfg.min_value:
            continue
        area = abs(v) * cfg.oval_scale
        r = math.sqrt(area / math.pi)
        ovals.append((s, pts[s.id], r, area, v, colors[s.id]))

    buses = model.bus_by_id
    arrows = []
    for bid in sorted(flows):
        i = flows[bid]
        if abs(i) < cfg.min_value:
            continue
        br = model.branch_by_id[bid]
        (x1, y1) = pts[buses[br.from_bus].substation_id]
        (x2, y2) = pts[buses[br.to_bus].substation_id]
        dx, dy = x2 - x1, y2 - y1
        d = math.hypot(dx, dy)
        if d == 0:
            continue
        ux, uy = dx / d, dy / d
        if i < 0:
            ux, uy = -ux, -uy
        length = abs(i) * cfg.arrow_scale
        mx, my = 0.5 * (x1 + x2), 0.5 * (y1 + y2)
        tail = (mx - 0.5 * length * ux, my - 0.5 * length * uy)
        head = (mx + 0.5 * length * ux, my + 0.5 * length * uy)
        arrows.append((bid, tail, head, length, i))

    xs = [p[0] for p in pts.values()] or [0.0]
    ys = [p[1] for p in pts.values()] or [0.0]
    m = cfg.margin_km + max([o[2] for o in ovals], default=0.0)
    x0, y0 = min(xs) - m, min(ys) - m
    w, h = max(xs) - min(xs) + 2 * m, max(ys) - min(ys) + 2 * m

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(w)} {_f(h)}" width="{_f(w)}" height="{_f(h)}">',
        f"<title>{title}</title>",
        '<defs><marker id="head" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="4" '
        f'markerHeight="4" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{ARROW}"/></marker></defs>',
        '<g id="branches" stroke="#999999" stroke-width="0.5">',
    ]
    for br in sorted(model.branches, key=lambda b: b.id):
        a = pts[buses[br.from_bus].substation_id]
        b = pts[buses[br.to_bus].substation_id]
        lines.append(f'<line id="branch-{br.id}" x1="{_f(a[0])}" y1="{_f(a[1])}" '
                     f'x2="{_f(b[0])}" y2="{_f(b[1])}"/>')
    lines.append("</g>")
    lines.append('<g id="ovals" fill-opacity="0.7">')
    for s, (x, y), r, area, v, color in ovals:
        lines.append(f'<ellipse id="sub-{s.id}" class="{"green" if color == GREEN else "red"}" '
                     f'cx="{_f(x)}" cy="{_f(y)}" rx="{r!r}" ry="{r!r}" fill="{color}" '
                     f'data-value="{v!r}"/>')
    lines.append("</g>")
    lines.append(f'<g id="arrows" stroke="{ARROW}" stroke-width="1.5">')
    for bid, t, hd, length, i in arrows:
        lines.append(f'<line id="arrow-{bid}" x1="{_f(t[0])}" y1="{_f(t[1])}" x2="{_f(hd[0])}" '
                     f'y2="{_f(hd[1])}" marker-end="url(#head)" data-value="{i!r}"/>')
    lines.append("</g>")
    lines.append("</svg>")

    features = []
    for s, (x, y), r, area, v, color in ovals:
        features.append({
            "type": "Feature",
            "id": f"sub-{s.id}",
            "geometry": {"type": "Point", "coordinates": [s.longitude, s.latitude]},
            "properties": {"quantity": quantity, "value": v, "area_km2": area, "radius_km": r,
                           "color_class": "green" if color == GREEN else "red",
                           "substation": s.id},
        })
    for bid, t, hd, length, i in arrows:
        lt, ln = proj.inverse(*t)
        lh, lnh = proj.inverse(*hd)
        features.append({
            "type": "Feature",
            "id": f"arrow-{bid}",
            "geometry": {"type": "LineString", "coordinates": [[ln, lt], [lnh, lh]]},
            "properties": {"quantity": "branch_gic_a_per_phase", "value": i,
                           "length_km": length, "branch": bid},
        })
    return Rendering("\n".join(lines) + "\n", {"type": "FeatureCollection", "features": features})


def render_solution(model: GridModel, solution: GicSolution, config: VizConfig = VizConfig()) -> Rendering:
    """Absolute view: ground GIC (green into ground, red out) or substation Qloss."""
    mode = VizMode(config.mode)
    if mode is VizMode.DIFF:
        raise ValueError("use render_diff for difference views")
    values = _quantity(model, solution, mode)
    if mode is VizMode.GROUND_GIC:
        colors = {k: GREEN if v >= 0 else RED for k, v in values.items()}
        name = "ground_gic_a"
    else:
        colors = {k: RED for k in values}
        name = "substation_qloss_mvar"
    return _render(model, config, name, values, colors, solution.branch_gic_per_phase, name)


def render_diff(model: GridModel, sol_in: GicSolution, sol_out: GicSolution,
                config: VizConfig = VizConfig(mode=VizMode.DIFF)) -> Rendering:
    """Change from GSUs-in to GSUs-out on the same size scale as the absolute view.

    Oval size encodes the change in magnitude of the chosen quantity; green
    marks a decrease, red an increase. Arrows show the signed change in
    branch flow.
    """
    if set(sol_in.substation_ground_gic) != set(sol_out.substation_ground_gic) or \
            set(sol_in.branch_gic_per_phase) != set(sol_out.branch_gic_per_phase):
        raise ValueError("solutions are not comparable")
    q = VizMode(config.diff_quantity)
    a, b = _quantity(model, sol_in, q), _quantity(model, sol_out, q)
    values = {k: abs(b[k]) - abs(a[k]) for k in a}
    colors = {k: GREEN if v < 0 else RED for k, v in values.items()}
    flows = {k: sol_out.branch_gic_per_phase[k] - sol_in.branch_gic_per_phase[k]
             for k in sol_in.branch_gic_per_phase}
    name = ("ground_gic_a" if q is VizMode.GROUND_GIC else "substation_qloss_mvar") + "_change"
    return _render(model, config, name, values, colors, flows, name)
