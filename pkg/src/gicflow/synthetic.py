"""Random synthetic grids for property tests and scale runs."""
from __future__ import annotations

import math

import numpy as np

from .field import km_per_degree
from .grid import Branch, Bus, Generator, GridModel, Substation, Transformer, TransformerConfig as C

OHM_PER_KM = {345.0: 0.012, 230.0: 0.025, 138.0: 0.06}


def random_grid(n_buses: int, seed: int = 0, *, offline_fraction: float = 0.35,
                ungrounded_fraction: float = 0.05, extra_line_prob: float = 0.3,
                lat0: float = 32.0, lon0: float = -100.0, spacing_deg: float = 0.35) -> GridModel:
    """Lattice-based grid of roughly ``n_buses`` buses.

    Substations sit on a jittered lattice. Each has a 345 kV bus tied to its
    lattice neighbours by a spanning tree plus random extra lines, and may
    carry a 138 kV bus (auto or grounded-wye/grounded-wye), one or two
    generator buses with one or two GSUs, and a 34.5 kV feed through a
    delta-delta or grounded-wye/delta unit.
    """
    rng = np.random.default_rng(seed)
    target_subs = max(1, math.ceil(n_buses / 2.6))
    cols = max(1, int(math.ceil(math.sqrt(target_subs))))

    subs: list[Substation] = []
    buses: list[Bus] = []
    branches: list[Branch] = []
    xfs: list[Transformer] = []
    gens: list[Generator] = []
    main: dict[int, str] = {}
    sub_of_bus: dict[str, str] = {}
    low: dict[int, str] = {}

    def add_bus(bid: str, sid: str, kv: float, area: str) -> None:
        buses.append(Bus(bid, sid, kv, area, voltage_pu=float(np.round(rng.uniform(0.95, 1.05), 4))))
        sub_of_bus[bid] = sid

    k = 0
    while len(buses) < n_buses:
        r, c = divmod(k, cols)
        sid = f"S{k}"
        lat = lat0 + r * spacing_deg + float(rng.uniform(-0.1, 0.1)) * spacing_deg
        lon = lon0 + c * spacing_deg + float(rng.uniform(-0.1, 0.1)) * spacing_deg
        u = rng.uniform()
        rg = math.inf if u < ungrounded_fraction else float(np.round(rng.uniform(0.05, 1.5), 4))
        area = f"A{(r // 4) * 100 + c // 4}"
        subs.append(Substation(sid, f"Sub {k}", round(lat, 6), round(lon, 6), rg, area=area))
        hv = f"B{k}H"
        add_bus(hv, sid, 345.0, area)
        main[k] = hv
        if rng.uniform() < 0.4 and len(buses) < n_buses:
            lv = f"B{k}L"
            add_bus(lv, sid, 138.0, area)
            low[k] = lv
            cfg = C.AUTO if rng.uniform() < 0.6 else C.GWYE_GWYE
            xfs.append(Transformer(f"T{k}HL", hv, lv, cfg, float(np.round(rng.uniform(0.05, 0.4), 4)),
                                   float(np.round(rng.uniform(0.05, 0.4), 4)), sid,
                                   k_factor=float(np.round(rng.uniform(0.3, 1.5), 3))))
        for g in range(int(rng.integers(0, 3))):
            if len(buses) >= n_buses:
                break
            gb = f"B{k}G{g}"
            add_bus(gb, sid, float(rng.choice([13.8, 18.0, 20.0, 22.0])), area)
            for p in range(1 if rng.uniform() < 0.85 else 2):
                xfs.append(Transformer(f"T{k}G{g}{'ab'[p]}", hv, gb, C.GWYE_DELTA_GSU,
                                       float(np.round(rng.uniform(0.1, 0.8), 4)), 0.01, sid,
                                       k_factor=float(np.round(rng.uniform(0.5, 2.0), 3))))
            gens.append(Generator(f"G{k}_{g}", gb, float(np.round(rng.uniform(20, 900), 1)),
                                  bool(rng.uniform() >= offline_fraction)))
        if rng.uniform() < 0.2 and len(buses) < n_buses:
            tb = f"B{k}D"
            add_bus(tb, sid, 34.5, area)
            if rng.uniform() < 0.5:
                xfs.append(Transformer(f"T{k}D", hv, tb, C.DELTA_DELTA, None, None, sid, k_factor=0.0))
            else:
                xfs.append(Transformer(f"T{k}D", hv, tb, C.GWYE_DELTA, float(np.round(rng.uniform(0.2, 0.9), 4)),
                                       0.02, sid, k_factor=float(np.round(rng.uniform(0.3, 1.2), 3))))
        k += 1

    by_rc = {divmod(i, cols): i for i in range(k)}
    sub_pos = {s.id: (s.latitude, s.longitude) for s in subs}

    def line(i: int, j: int, a: str, b: str, kv: float) -> None:
        la, oa = sub_pos[sub_of_bus[a]]
        lb, ob = sub_pos[sub_of_bus[b]]
        kn, ke = km_per_degree(0.5 * (la + lb))
        km = math.hypot(kn * (lb - la), ke * (ob - oa))
        res = max(0.05, OHM_PER_KM[kv] * km * float(rng.uniform(0.8, 1.2)))
        branches.append(Branch(f"L{i}_{j}{'' if kv == 345.0 else 'L'}", a, b, round(res, 6)))

    # rows chained left to right and joined down column 0 form a spanning tree
    for i in range(k):
        r, c = divmod(i, cols)
        right, down = by_rc.get((r, c + 1)), by_rc.get((r + 1, c))
        if right is not None:
            line(i, right, main[i], main[right], 345.0)
        if down is not None and (c == 0 or rng.uniform() < extra_line_prob):
            line(i, down, main[i], main[down], 345.0)
        for j in (right, down):
            if j is not None and i in low and j in low and rng.uniform() < 0.5:
                line(i, j, low[i], low[j], 138.0)
    return GridModel(tuple(subs), tuple(buses), tuple(branches), tuple(xfs), tuple(gens),
                     name=f"random grid n={n_buses} seed={seed}", source="gicflow.synthetic")
