import copy
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycusp import builders
from polycusp.errors import DegenerateTriangleError, SurfaceError
from polycusp.surface import (
    check_acute_vertex_condition,
    cone_angles,
    parse_surface,
    surface_document,
    triangle_angles,
    triangle_angles_array,
    validate,
)


def _angle_oracle(a, b, c):
    """Angle opposite ``a`` measured between tangent vectors in R^3."""
    A = np.array([0.0, 0.0, 1.0])
    B = np.array([math.sin(c), 0.0, math.cos(c)])
    z = math.cos(b)
    x = (math.cos(a) - z * math.cos(c)) / math.sin(c)
    C = np.array([x, math.sqrt(1.0 - x * x - z * z), z])
    u, v = B - (B @ A) * A, C - (C @ A) * A
    return math.acos(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


# parsing ---------------------------------------------------------------


def test_one_vertex_torus_counts():
    s = builders.grid_torus(1, 1, 1.0)
    assert (s.n_vertices, s.n_edges, s.n_triangles) == (1, 3, 2)


def test_grid_counts():
    s = builders.octant_grid()
    assert (s.n_vertices, s.n_edges, s.n_triangles) == (4, 12, 8)


def test_parse_accepts_text_and_bytes():
    doc = builders.grid_torus_document(2)
    a = parse_surface(json.dumps(doc))
    b = parse_surface(json.dumps(doc).encode())
    assert a.triangulation.canonical_form() == b.triangulation.canonical_form()


def test_document_round_trip():
    s = builders.random_grid(3, 1.0, 1.4, seed=5)
    t = parse_surface(surface_document(s))
    assert t.triangulation.canonical_form() == s.triangulation.canonical_form()
    np.testing.assert_array_equal(t.triangulation.edge_length, s.triangulation.edge_length)


def _reuse_edge(doc, target):
    """Make triangle 1 use edge ``target`` on one side."""
    doc = copy.deepcopy(doc)
    corners = doc["triangles"][1]["corners"]
    corners[0]["edge_next"] = target
    corners[1]["edge_prev"] = target
    return doc


def test_three_incidences_is_non_manifold():
    doc = builders.grid_torus_document(2)
    first = doc["edges"][0]["id"]
    with pytest.raises(SurfaceError, match="non-manifold edge"):
        parse_surface(_reuse_edge(doc, first))


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.pop("edges"), "edges"),
        (lambda d: d["triangles"][0]["corners"].pop(), "3 corners"),
        (lambda d: d["triangles"][0]["corners"][0].update(vertex=99), "dangling vertex"),
        (lambda d: d["triangles"][0]["corners"][0].update(edge_next="nope"), "dangling edge"),
        (lambda d: d["edges"].append(dict(d["edges"][0])), "duplicate edge"),
        (lambda d: d["vertices"].append(4), "Euler"),
        (lambda d: d["edges"][0].update(length="1"), "finite number"),
        (lambda d: d["triangles"][0]["corners"][1].update(edge_prev="v0_0"), "edge_prev"),
    ],
)
def test_schema_errors(mutate, message):
    doc = builders.grid_torus_document(2)
    mutate(doc)
    with pytest.raises(SurfaceError, match=message):
        parse_surface(doc)


def test_malformed_json():
    with pytest.raises(SurfaceError, match="invalid JSON"):
        parse_surface("{")


def test_inconsistent_orientation_rejected():
    doc = builders.grid_torus_document(2)
    tri = doc["triangles"][0]["corners"]
    # reverse the triangle: corners in the opposite order with prev/next swapped
    doc["triangles"][0]["corners"] = [
        {"vertex": c["vertex"], "edge_prev": c["edge_next"], "edge_next": c["edge_prev"]}
        for c in reversed(tri)
    ]
    with pytest.raises(SurfaceError):
        parse_surface(doc)


def test_surface_is_immutable():
    s = builders.octant_grid()
    with pytest.raises(ValueError):
        s.triangulation.edge_length[0] = 1.0


# triangle angles -------------------------------------------------------


def test_octant_triangle():
    np.testing.assert_allclose(triangle_angles(*(3 * [math.pi / 2])), 3 * [math.pi / 2], atol=1e-15)


def test_small_triangle_tends_to_euclidean():
    for a in (1e-2, 1e-4, 1e-6):
        np.testing.assert_allclose(triangle_angles(a, a, a), 3 * [math.pi / 3], atol=a)


def test_unit_equilateral_against_vector_oracle():
    expected = _angle_oracle(1.0, 1.0, 1.0)
    assert expected == pytest.approx(1.212395849774586, abs=1e-14)
    np.testing.assert_allclose(triangle_angles(1.0, 1.0, 1.0), 3 * [expected], atol=1e-14)


@pytest.mark.parametrize("sides", [(0.1, 0.1, 1.0), (2.0, 2.0, 2.3), (0.5, 0.5, 1.0), (0.0, 1.0, 1.0)])
def test_degenerate_triangles_raise(sides):
    with pytest.raises(DegenerateTriangleError):
        triangle_angles(*sides)


sides_strategy = st.tuples(*3 * [st.floats(0.05, 2.0)]).filter(
    lambda s: min(s[0] + s[1] - s[2], s[1] + s[2] - s[0], s[0] + s[2] - s[1]) > 1e-3
    and sum(s) < 2 * math.pi - 1e-3
)


@settings(max_examples=200, deadline=None)
@given(sides_strategy)
def test_triangle_angles_properties(sides):
    a, b, c = sides
    ga, gb, gc = triangle_angles(a, b, c)
    assert ga == pytest.approx(_angle_oracle(a, b, c), abs=1e-7)
    # permutation covariance
    gb2, gc2, ga2 = triangle_angles(b, c, a)
    np.testing.assert_allclose((ga2, gb2, gc2), (ga, gb, gc), atol=1e-13)
    # spherical excess is positive
    assert ga + gb + gc > math.pi
    # vectorised version agrees; corner 0 sits between sides 2 and 0
    arr = triangle_angles_array(np.array([[c, a, b]]))
    np.testing.assert_allclose(arr[0], (ga, gb, gc), atol=1e-13)


# cone angles and validation --------------------------------------------


def test_octant_cone_angle_is_three_pi():
    assert all(th == pytest.approx(3 * math.pi, abs=1e-13) for th in cone_angles(builders.octant_grid()).values())


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 2.0))
def test_one_vertex_cone_angle(a):
    s = builders.grid_torus(1, 1, a)
    (theta,) = cone_angles(s).values()
    assert theta == pytest.approx(6 * triangle_angles(a, a, a)[0], abs=1e-12)
    assert theta > 2 * math.pi


@pytest.mark.parametrize("seed", range(5))
def test_excess_double_counting(seed):
    s = builders.random_grid(3, 0.9, 1.5, seed)
    theta = np.array(list(cone_angles(s).values()))
    gamma = s.triangulation.corner_angles()
    assert np.sum(theta - 2 * math.pi) == pytest.approx(np.sum(gamma.sum(axis=1) - math.pi), abs=1e-10)


def test_validate_octant_warns_only():
    report = validate(builders.octant_grid())
    assert report.status != "error"
    assert [v.kind for v in report.violations] == ["geodesic condition"]
    assert "NOT verified" in report.violations[0].message


def test_validate_triangle_inequality():
    arr = np.ones((2, 2, 3))
    arr[0, 0] = (0.1, 1.0, 1.0)  # h(0,0), v(0,0), d(0,0)
    arr[0, 1, 1] = 0.1  # v(1,0), second side of the lower triangle at (0,0)
    report = validate(builders.grid_torus(2, 2, arr))
    assert report.status == "error"
    assert any(v.kind == "spherical triangle inequality" and v.location == "triangle 0" for v in report.violations)


def test_validate_cone_angle():
    # short edges: spherical excess too small to push cone angles above 2 pi somewhere
    s = builders.random_grid(3, 0.3, 0.5, seed=0)
    report = validate(s)
    bad = [v for v in report.violations if v.kind == "cone angle"]
    assert report.status == "error" and bad
    assert all("not greater than 2*pi" in v.message for v in bad)


def test_validate_is_pure():
    s = builders.random_grid(3, 0.9, 1.5, 1)
    before = s.triangulation.edge_length.copy()
    assert validate(s) == validate(s)
    np.testing.assert_array_equal(before, s.triangulation.edge_length)


@pytest.mark.parametrize(
    "length, flag, margin",
    [(math.pi / 2, True, math.pi / 2), (2.0, True, 2 * math.pi - 6.0), (0.4, False, 2 * math.pi - 1.2)],
)
def test_acute_vertex_condition(length, flag, margin):
    r = check_acute_vertex_condition(builders.grid_torus(2, 2, length))
    assert r.holds
    assert r.all_lengths_at_least_half_pi is flag
    np.testing.assert_allclose(r.margins, margin, atol=1e-13)
