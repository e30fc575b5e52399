"""Small hand-built grids used by tests, scripts and the bundled data file."""
from __future__ import annotations

import math

from .grid import Branch, Bus, Generator, GridModel, Substation, Transformer, TransformerConfig as C


def two_substation_loop(grounding: float = 0.2, winding: float = 0.3,
                        line: float = 3.0, east_km: float = 100.0) -> GridModel:
    """One east-west line between two grounded GwyeGwye transformers.

    With 8 V/km eastward the loop EMF is 800 V against
    ``line/3 + 2*winding/3 + 2*grounding`` = 1.6 ohm, i.e. 500 A.
    """
    subs = (Substation("A", "West", 35.0, -90.0, grounding, area="1"),
            Substation("B", "East", 35.0, -88.9, grounding, area="1"))
    buses = (Bus("A1", "A", 345.0, "1"), Bus("A2", "A", 138.0, "1"),
             Bus("B1", "B", 345.0, "1"), Bus("B2", "B", 138.0, "1"))
    branches = (Branch("L1", "A1", "B1", line, length_north_km=0.0, length_east_km=east_km),)
    xfs = (Transformer("TA", "A1", "A2", C.GWYE_GWYE, winding, winding, "A", k_factor=1.0),
           Transformer("TB", "B1", "B2", C.GWYE_GWYE, winding, winding, "B", k_factor=1.0))
    return GridModel(subs, buses, branches, xfs, (), name="two-substation loop")


def six_bus() -> GridModel:
    """Three 345 kV substations, two GSUs (one unit offline) and an autotransformer."""
    subs = (
        Substation("S1", "Westfield", 32.0, -97.0, 0.25, area="West"),
        Substation("S2", "Midvale", 32.4, -96.4, 0.40, area="West"),
        Substation("S3", "Eastport", 32.1, -95.7, 0.15, area="East"),
    )
    buses = (
        Bus("1", "S1", 345.0, "West"),
        Bus("2", "S2", 345.0, "West", voltage_pu=1.02),
        Bus("3", "S3", 345.0, "East", voltage_pu=0.99),
        Bus("4", "S3", 138.0, "East"),
        Bus("5", "S1", 13.8, "West"),
        Bus("6", "S2", 20.0, "West"),
    )
    branches = (
        Branch("L12", "1", "2", 2.1),
        Branch("L23", "2", "3", 2.4),
        Branch("L13", "1", "3", 3.9),
    )
    xfs = (
        Transformer("T15", "1", "5", C.GWYE_DELTA_GSU, 0.35, 0.02, "S1", k_factor=1.1),
        Transformer("T26", "2", "6", C.GWYE_DELTA_GSU, 0.30, 0.02, "S2", k_factor=1.3),
        Transformer("T34", "3", "4", C.AUTO, 0.12, 0.20, "S3", k_factor=0.9),
    )
    gens = (
        Generator("G5", "5", 600.0, True),
        Generator("G6", "6", 400.0, False),
    )
    return GridModel(subs, buses, branches, xfs, gens, name="six-bus fixture",
                     source="gicflow.fixtures.six_bus")


def gsu_case(pocket_size: int = 25) -> GridModel:
    """Twelve transmission/generator buses plus an isolated distribution ring.

    Generators and their expected GSU sets:

    ========  =====================  =====================
    GA        345 kV bus             direct connection
    GB        13.8 kV, offline       {TB}
    GC        18 kV                  {TC1, TC2} (parallel)
    GD        0.69 kV via collector  {TD1, TD2} (chain)
    GE        69 kV bus              direct connection
    GP        12.47 kV ring          none, bus counter hit
    ========  =====================  =====================
    """
    subs = (
        Substation("S1", "Alder", 31.0, -99.0, 0.2, area="North"),
        Substation("S2", "Birch", 31.3, -98.2, 0.3, area="North"),
        Substation("S3", "Cedar", 30.6, -97.4, 0.25, area="South"),
        Substation("S4", "Dogwood", 30.2, -96.8, 0.5, area="South"),
        Substation("S5", "Elm", 30.0, -98.5, math.inf, area="South"),
    )
    buses = [
        Bus("HV1", "S1", 345.0, "North"),
        Bus("HV2", "S2", 345.0, "North"),
        Bus("HV2L", "S2", 230.0, "North"),
        Bus("HV3", "S3", 230.0, "South"),
        Bus("HV3L", "S3", 138.0, "South"),
        Bus("HV5", "S4", 138.0, "South"),
        Bus("HV5L", "S4", 69.0, "South"),
        Bus("GB", "S1", 13.8, "North"),
        Bus("AUX", "S1", 4.16, "North"),
        Bus("GC", "S3", 18.0, "South"),
        Bus("GD", "S2", 0.69, "North"),
        Bus("CD", "S2", 34.5, "North"),
    ]
    branches = [
        Branch("L1-2", "HV1", "HV2", 2.5),
        Branch("L2-3", "HV2L", "HV3", 3.1),
        Branch("L3-5", "HV3L", "HV5", 4.2),
    ]
    xfs = [
        Transformer("TA2", "HV2", "HV2L", C.AUTO, 0.10, 0.15, "S2", k_factor=0.8),
        Transformer("T3", "HV3", "HV3L", C.GWYE_GWYE, 0.20, 0.25, "S3", k_factor=0.9),
        Transformer("T5", "HV5", "HV5L", C.GWYE_DELTA, 0.40, 0.05, "S4", k_factor=0.6),
        Transformer("TB", "HV1", "GB", C.GWYE_DELTA_GSU, 0.30, 0.01, "S1", k_factor=1.2),
        Transformer("TAUX", "GB", "AUX", C.DELTA_DELTA, None, None, "S1", k_factor=0.0),
        Transformer("TC1", "HV3", "GC", C.GWYE_DELTA_GSU, 0.45, 0.01, "S3", k_factor=1.0),
        Transformer("TC2", "HV3", "GC", C.GWYE_DELTA_GSU, 0.45, 0.01, "S3", k_factor=1.0),
        Transformer("TD2", "HV2", "CD", C.GWYE_DELTA_GSU, 0.60, 0.05, "S2", k_factor=0.7),
        Transformer("TD1", "CD", "GD", C.DELTA_DELTA, None, None, "S2", k_factor=0.0),
    ]
    gens = [
        Generator("GA", "HV1", 300.0, True),
        Generator("GB", "GB", 569.0, False),
        Generator("GC", "GC", 250.0, True),
        Generator("GD", "GD", 80.0, True),
        Generator("GE", "HV5L", 40.0, True),
    ]
    if pocket_size:
        ring = [f"P{i:02d}" for i in range(pocket_size)]
        buses += [Bus(b, "S5", 12.47, "South") for b in ring]
        branches += [Branch(f"PL{i:02d}", ring[i], ring[(i + 1) % pocket_size], 0.8,
                            length_north_km=0.0, length_east_km=0.0)
                     for i in range(pocket_size)]
        gens.append(Generator("GP", ring[0], 5.0, True))
    return GridModel(tuple(subs), tuple(buses), tuple(branches), tuple(xfs), tuple(gens),
                     name="gsu identification fixture")
