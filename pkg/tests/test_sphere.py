import numpy as np
import pytest
from hypothesis import given, strategies as st

from epchiral.sphere import (
    INFINITY, MICROCAVITY_EPS_PLANE, MICROCAVITY_EPS_SPHERE, PlanePoint, SpherePoint,
    great_circle_arc, plane_csv, project, project_array, project_curve, sphere_csv,
    unproject, unproject_array,
)

coord = st.floats(-10, 10, allow_nan=False)


def test_poles():
    assert project(SpherePoint(0, 0, -1)) == PlanePoint(0, 0)
    assert project(SpherePoint(0, 0, 1)) is INFINITY
    assert str(INFINITY) == "inf"
    assert unproject(PlanePoint(0, 0)) == SpherePoint(0, 0, -1)


def test_sphere_point_invariant():
    with pytest.raises(ValueError):
        SpherePoint(0.636, 0.145, 0.758)
    with pytest.raises(ValueError):
        PlanePoint(np.inf, 0)
    with pytest.raises(ValueError):
        unproject((np.nan, 0))


def test_published_plane_to_sphere():
    for q, expected in zip(MICROCAVITY_EPS_PLANE, MICROCAVITY_EPS_SPHERE):
        p = unproject(q)
        assert np.max(np.abs(p.as_array() - np.array(expected))) < 1e-3


def test_published_sphere_to_plane():
    # the published sphere point is rounded, so project its unit normalisation
    p = np.array(MICROCAVITY_EPS_SPHERE[0])
    q = project(p / np.linalg.norm(p))
    assert q.n == pytest.approx(2.6257, abs=5e-3)
    assert q.chi == pytest.approx(0.6001, abs=5e-3)


@given(coord, coord)
def test_roundtrip_plane(n, chi):
    p = unproject((n, chi))
    assert abs(np.sum(p.as_array() ** 2) - 1) < 1e-12
    q = project(p)
    assert abs(q.n - n) < 1e-12 * max(1, abs(n)) and abs(q.chi - chi) < 1e-12 * max(1, abs(chi))


def test_roundtrip_vectorised_random():
    rng = np.random.default_rng(0)
    q = rng.uniform(-10, 10, size=(10_000, 2))
    xyz = unproject_array(q)
    assert np.max(np.abs(np.sum(xyz ** 2, axis=1) - 1)) < 1e-12
    assert np.max(np.abs(project_array(xyz) - q)) < 1e-12


def test_roundtrip_sphere_side():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(1000, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    v = v[v[:, 2] < 0.99]
    assert np.max(np.abs(unproject_array(project_array(v)) - v)) < 1e-12


def test_project_array_north_pole_is_nan():
    out = project_array(np.array([[0, 0, 1.0], [0, 0, -1.0]]))
    assert np.all(np.isnan(out[0])) and np.allclose(out[1], 0)


def test_curve_through_pole_splits():
    arc = great_circle_arc((1, 0, 0), (-1, 0.0, 1e-9), n=200, through=(0, 0, 1))
    out = project_curve(arc)
    assert len(out.branches) == 2


def test_curve_sample_on_pole_splits():
    arc = great_circle_arc((1, 0, 0), (-1, 0.0, 1e-9), n=201, through=(0, 0, 1))
    arc = [SpherePoint(0, 0, 1) if abs(p.xit - 1) < 1e-6 else p for p in arc]
    out = project_curve(arc)
    assert any(q is INFINITY for q in out.points)
    assert len(out.branches) == 2


def test_curve_avoiding_pole():
    arc = great_circle_arc((1, 0, 0), (0, 1, 0), n=50)
    out = project_curve(arc)
    assert len(out.branches) == 1 and len(out.branches[0]) == 50


def test_empty_curve():
    out = project_curve([])
    assert out.points == [] and out.branches == []


def test_csv_infinity_rows():
    text = plane_csv([PlanePoint(1, 2), INFINITY])
    assert text.splitlines() == ["n,chi", "1,2", "inf,inf"]
    assert sphere_csv([SpherePoint(0, 0, -1)]).splitlines() == ["nt,chit,xit", "0,0,-1"]


def test_arc_through_must_be_on_circle():
    with pytest.raises(ValueError):
        great_circle_arc((1, 0, 0), (0, 1, 0), through=(0, 0, 1))
