import math
import random
from dataclasses import replace

from hypothesis import given, settings, strategies as st

from gicflow.grid import (Branch, Bus, GridModel, Substation, Transformer, TransformerConfig as C,
                          connected_components, validate)


def two_islands():
    subs = (Substation("S", "s", 30.0, -90.0, 0.5),)
    buses = tuple(Bus(b, "S", 345.0, "1") for b in ("a", "b", "c", "d"))
    branches = (Branch("ab", "a", "b", 1.0), Branch("cd", "c", "d", 1.0))
    return GridModel(subs, buses, branches)


def test_well_formed_fixture_has_empty_report(loop_model):
    assert validate(loop_model).ok
    assert len(validate(loop_model)) == 0


def test_dangling_to_bus_is_reported_once(loop_model):
    bad = replace(loop_model, branches=(replace(loop_model.branches[0], to_bus="nowhere"),))
    report = validate(bad)
    assert report.kinds() == ["dangling-reference"]


def test_zero_resistance_in_service_line_is_reported(loop_model):
    bad = replace(loop_model, branches=(replace(loop_model.branches[0], resistance_per_phase=0.0),))
    assert validate(bad).kinds() == ["non-positive-resistance"]


def test_zero_resistance_is_fine_when_out_of_service(loop_model):
    ok = replace(loop_model, branches=(replace(loop_model.branches[0], resistance_per_phase=0.0,
                                                in_service=False),))
    assert validate(ok).ok


def test_other_invariants():
    subs = (Substation("S", "s", 95.0, -190.0, -1.0),)
    buses = (Bus("a", "S", 345.0, "1"), Bus("a", "S", 0.0, "1"), Bus("b", "X", 138.0, "1"))
    xfs = (Transformer("t", "b", "a", C.GWYE_DELTA, -0.1, None),)
    kinds = set(validate(GridModel(subs, buses, (), xfs)).kinds())
    assert {"bad-coordinate", "bad-grounding", "duplicate-id", "non-positive-kv",
            "dangling-reference", "non-positive-resistance"} <= kinds


def test_kv_order_checked():
    subs = (Substation("S", "s", 30.0, -90.0, 0.5),)
    buses = (Bus("h", "S", 138.0, "1"), Bus("l", "S", 345.0, "1"))
    xfs = (Transformer("t", "h", "l", C.GWYE_GWYE, 0.1, 0.1),)
    assert validate(GridModel(subs, buses, (), xfs)).kinds() == ["kv-order"]


def test_ungrounded_substation_is_valid():
    s = Substation("S", "s", 30.0, -90.0, math.inf)
    assert not s.grounded
    assert validate(GridModel((s,))).ok


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_validate_is_order_independent_and_idempotent(rnd: random.Random):
    from gicflow.fixtures import gsu_case
    m = gsu_case()
    broken = replace(m, branches=m.branches + (Branch("x", "HV1", "ghost", 0.0),
                                               Branch("y", "HV1", "HV1", 1.0)))
    r1 = validate(broken)
    cols = {}
    for name in ("substations", "buses", "branches", "transformers", "generators"):
        items = list(getattr(broken, name))
        rnd.shuffle(items)
        cols[name] = tuple(items)
    assert validate(GridModel(**cols)) == r1
    assert validate(broken) == r1


def test_two_islands_are_two_components():
    comps = connected_components(two_islands())
    assert comps == [frozenset({"a", "b"}), frozenset({"c", "d"})]


def test_radial_feeder_is_one_component():
    subs = (Substation("S", "s", 30.0, -90.0, 0.5),)
    buses = tuple(Bus(f"b{i}", "S", 138.0, "1") for i in range(5))
    branches = tuple(Branch(f"l{i}", f"b{i}", f"b{i+1}", 1.0) for i in range(4))
    comps = connected_components(GridModel(subs, buses, branches))
    assert len(comps) == 1 and len(comps[0]) == 5


def test_delta_delta_does_not_join_islands():
    # hand-drawn conductance graph: {a-b} and {c-d} with only a delta-delta unit b-c,
    # which stamps no conductance at all
    m = two_islands()
    m = replace(m, transformers=(Transformer("dd", "b", "c", C.DELTA_DELTA),))
    assert len(connected_components(m)) == 2
    # a grounded-wye pair sharing the neutral does conduct between b and c
    m2 = replace(m, transformers=(Transformer("yy", "b", "c", C.GWYE_GWYE, 0.1, 0.1, "S"),))
    assert len(connected_components(m2)) == 1


def test_gsu_delta_side_is_its_own_component(loop_model):
    m = replace(loop_model, transformers=tuple(replace(t, configuration=C.GWYE_DELTA)
                                                 for t in loop_model.transformers))
    comps = connected_components(m)
    assert frozenset({"A1", "B1"}) in comps
    assert frozenset({"A2"}) in comps and frozenset({"B2"}) in comps


def test_out_of_service_bus_excluded(loop_model):
    m = replace(loop_model, buses=tuple(replace(b, in_service=b.id != "B2") for b in loop_model.buses))
    assert all("B2" not in c for c in connected_components(m))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_components_invariant_under_relabeling(seed):
    from gicflow.synthetic import random_grid
    m = random_grid(40, seed)
    rnd = random.Random(seed)
    ids = [b.id for b in m.buses]
    new = ids[:]
    rnd.shuffle(new)
    ren = dict(zip(ids, (f"x{n}" for n in new)))
    relabeled = replace(
        m,
        buses=tuple(replace(b, id=ren[b.id]) for b in m.buses),
        branches=tuple(replace(b, from_bus=ren[b.from_bus], to_bus=ren[b.to_bus]) for b in m.branches),
        transformers=tuple(replace(t, bus_high=ren[t.bus_high], bus_low=ren[t.bus_low])
                           for t in m.transformers),
        generators=tuple(replace(g, bus=ren[g.bus]) for g in m.generators),
    )
    a = {frozenset(ren[b] for b in c) for c in connected_components(m)}
    b = set(connected_components(relabeled))
    assert a == b
