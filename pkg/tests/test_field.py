import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from gicflow.field import FieldScenario, GeometryError, geodesic_lengths, induced_emfs, km_per_degree
from gicflow.grid import Branch, Bus, GridModel, Substation
from gicflow.synthetic import random_grid


def haversine_km(lat1, lon1, lat2, lon2, radius=6371.0):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * radius * math.asin(math.sqrt(a))


def line_model(lat1, lon1, lat2, lon2, **branch_kw):
    subs = (Substation("A", "a", lat1, lon1, 0.1), Substation("B", "b", lat2, lon2, 0.1))
    buses = (Bus("1", "A", 345.0, "x"), Bus("2", "B", 345.0, "x"))
    return GridModel(subs, buses, (Branch("L", "1", "2", 1.0, **branch_kw),))


def test_coincident_endpoints():
    m = line_model(35.0, -90.0, 35.0, -90.0)
    assert geodesic_lengths(m, m.branches[0]) == (0.0, 0.0)


def test_explicit_lengths_pass_through():
    m = line_model(35.0, -90.0, 36.0, -91.0, length_north_km=10.0, length_east_km=-5.0)
    assert geodesic_lengths(m, m.branches[0]) == (10.0, -5.0)


def test_east_length_against_great_circle():
    m = line_model(30.0, -90.0, 30.0, -89.0)
    ln, le = geodesic_lengths(m, m.branches[0])
    assert ln == 0.0
    assert le == pytest.approx((111.5065 - 0.1872 * 0.5) * math.cos(math.radians(30.0)))
    assert abs(le / haversine_km(30.0, -90.0, 30.0, -89.0) - 1) < 0.005


@pytest.mark.parametrize("lat", [25.0, 40.0, 55.0])
def test_north_length_against_great_circle(lat):
    m = line_model(lat - 0.5, -90.0, lat + 0.5, -90.0)
    ln, le = geodesic_lengths(m, m.branches[0])
    assert le == 0.0
    assert abs(ln / haversine_km(lat - 0.5, -90.0, lat + 0.5, -90.0) - 1) < 0.005


def test_antimeridian_wraps():
    m = line_model(10.0, 179.5, 10.0, -179.5)
    _, le = geodesic_lengths(m, m.branches[0])
    assert le == pytest.approx(km_per_degree(10.0)[1])


def test_missing_geometry_raises():
    m = line_model(30.0, -90.0, 30.0, -89.0)
    m = replace(m, buses=(m.buses[0], replace(m.buses[1], substation_id="nope")))
    with pytest.raises(GeometryError):
        geodesic_lengths(m, m.branches[0])


def test_eastward_8vpkm_on_100km():
    m = line_model(0, 0, 0, 0, length_north_km=37.0, length_east_km=100.0)
    (e,) = induced_emfs(m, FieldScenario(8.0, 90.0))
    assert e.emf_volts == 800.0


def test_eastward_field_on_north_south_line_is_exactly_zero():
    m = line_model(30.0, -90.0, 31.0, -90.0)
    (e,) = induced_emfs(m, FieldScenario(8.0, 90.0))
    assert e.emf_volts == 0.0


def test_zero_magnitude():
    m = random_grid(30, 3)
    assert all(e.emf_volts == 0.0 for e in induced_emfs(m, FieldScenario(0.0, 45.0)))


def test_alpha_beta_scale():
    m = line_model(0, 0, 0, 0, length_north_km=0.0, length_east_km=100.0)
    (e,) = induced_emfs(m, FieldScenario(8.0, 90.0, alpha=0.5, beta=0.25))
    assert e.emf_volts == 100.0


def test_out_of_service_branch_gets_no_emf():
    m = line_model(30.0, -90.0, 30.0, -89.0, in_service=False)
    assert induced_emfs(m, FieldScenario(8.0, 90.0)) == []


def test_direction_normalized():
    assert FieldScenario(1.0, -90.0).direction_deg == 270.0
    with pytest.raises(ValueError):
        FieldScenario(-1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1000), st.floats(0.5, 50.0), st.integers(1, 64))
def test_linearity_exact(seed, mag, c):
    m = random_grid(30, seed)
    base = induced_emfs(m, FieldScenario(mag, 30.0))
    scaled = induced_emfs(m, FieldScenario(mag * c, 30.0))
    for a, b in zip(base, scaled):
        assert b.emf_volts == pytest.approx(c * a.emf_volts, rel=1e-15, abs=0)
    doubled = induced_emfs(m, FieldScenario(mag * 2, 30.0))
    assert all(d.emf_volts == 2 * a.emf_volts for a, d in zip(base, doubled))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1000), st.floats(0, 360, exclude_max=True))
def test_direction_decomposition(seed, theta):
    m = random_grid(30, seed)
    n = induced_emfs(m, FieldScenario(5.0, 0.0))
    e = induced_emfs(m, FieldScenario(5.0, 90.0))
    t = induced_emfs(m, FieldScenario(5.0, theta))
    c, s = math.cos(math.radians(theta)), math.sin(math.radians(theta))
    for a, b, x in zip(n, e, t):
        exp = c * a.emf_volts + s * b.emf_volts
        assert abs(x.emf_volts - exp) <= 1e-12 * max(abs(a.emf_volts), abs(b.emf_volts), 1e-300)


def test_reversing_branch_negates_emf():
    m = line_model(30.0, -90.0, 31.2, -88.7)
    rev = replace(m, branches=(replace(m.branches[0], from_bus="2", to_bus="1"),))
    sc = FieldScenario(8.0, 63.0)
    assert induced_emfs(rev, sc)[0].emf_volts == -induced_emfs(m, sc)[0].emf_volts
