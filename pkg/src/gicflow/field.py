"""Uniform geoelectric field scenarios and the branch EMFs they induce.

Directions are degrees clockwise from geographic north, so 0 is a
northward field and 90 an eastward one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import Branch, GridModel


class GeometryError(ValueError):
    """A branch has neither explicit lengths nor locatable endpoints."""


@dataclass(frozen=True)
class FieldScenario:
    magnitude: float  # V/km
    direction_deg: float = 90.0
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.magnitude) or self.magnitude < 0:
            raise ValueError(f"field magnitude must be finite and >= 0, got {self.magnitude}")
        object.__setattr__(self, "direction_deg", self.direction_deg % 360.0)

    @property
    def scale(self) -> float:
        return self.alpha * self.beta * self.magnitude


@dataclass(frozen=True)
class BranchEmf:
    branch_id: str
    emf_volts: float  # positive drives current from_bus -> to_bus


def km_per_degree(mean_lat_deg: float) -> tuple[float, float]:
    """Northward and eastward km per degree at a mean latitude."""
    phi = math.radians(mean_lat_deg)
    north = 111.133 - 0.56 * math.cos(2.0 * phi)
    east = (111.5065 - 0.1872 * math.cos(2.0 * phi)) * math.cos(phi)
    return north, east


def geodesic_lengths(model: GridModel, branch: Branch) -> tuple[float, float]:
    """(north_km, east_km) displacement of the to-end relative to the from-end."""
    if branch.length_north_km is not None and branch.length_east_km is not None:
        return float(branch.length_north_km), float(branch.length_east_km)
    try:
        a = model.substation_by_id[model.bus_by_id[branch.from_bus].substation_id]
        b = model.substation_by_id[model.bus_by_id[branch.to_bus].substation_id]
    except KeyError as exc:
        raise GeometryError(f"branch {branch.id!r}: cannot locate endpoint {exc}") from None
    if any(v is None for v in (a.latitude, a.longitude, b.latitude, b.longitude)):
        raise GeometryError(f"branch {branch.id!r}: endpoint substation lacks coordinates")
    d_lat = b.latitude - a.latitude
    d_lon = (b.longitude - a.longitude + 180.0) % 360.0 - 180.0
    kn, ke = km_per_degree(0.5 * (a.latitude + b.latitude))
    return kn * d_lat, ke * d_lon


def induced_emfs(model: GridModel, scenario: FieldScenario) -> list[BranchEmf]:
    """EMF on every in-service branch, in model order.

    Transformers get no EMF; their windings have no geographic extent.
    """
    theta = math.radians(scenario.direction_deg)
    c, s = math.cos(theta), math.sin(theta)
    # exact values on the axes keep orthogonal branches at exactly 0 V
    if scenario.direction_deg in (90.0, 270.0):
        c = 0.0
    if scenario.direction_deg in (0.0, 180.0):
        s = 0.0
    scale = scenario.scale
    out = []
    for br in model.branches:
        if not br.in_service:
            continue
        ln, le = geodesic_lengths(model, br)
        out.append(BranchEmf(br.id, scale * (c * ln + s * le)))
    return out
