import math

import numpy as np
import pytest
from conftest import random_corner
from hypothesis import given, settings
from hypothesis import strategies as st

from polycusp import kite
from polycusp.errors import GeometryError
from polycusp.kite import (
    corner_geometry,
    d_link_angle_d_height,
    edge_foot_height,
    flipped_edge_length,
    foot_height,
    link_angle,
)
from polycusp.surface import triangle_angles

OCTANT_FOOT = math.asinh(1.0)
OCTANT_EDGE_FOOT = math.asinh(1.0 / math.sqrt(2.0))


def test_foot_height_unit():
    assert foot_height(0.0, 0.0, math.pi / 2) == pytest.approx(0.881373587019543, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(0.01, math.pi - 0.01))
def test_foot_height_equal_heights(h, alpha):
    assert foot_height(h, h, alpha) == pytest.approx(math.asinh(math.tan(alpha / 2)), rel=1e-12, abs=1e-12)


def test_foot_height_large_gap_tends_to_limit():
    value = foot_height(0.0, -20.0, 1.0)
    assert value == pytest.approx(-0.6045824, abs=1e-7)
    assert abs(value - math.asinh(-1.0 / math.tan(1.0))) < 1e-8


@pytest.mark.parametrize("alpha", [0.0, math.pi, -0.1, 4.0])
def test_foot_height_rejects_degenerate_side(alpha):
    with pytest.raises(GeometryError):
        foot_height(0.0, 0.0, alpha)


def test_foot_height_overflow_is_an_error():
    with pytest.raises(GeometryError):
        foot_height(0.0, 800.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5))
def test_edge_foot_right_angle(x):
    assert edge_foot_height(x, x, math.pi / 2) == pytest.approx(math.asinh(math.tanh(x)), abs=1e-13)


def test_edge_foot_octant():
    assert edge_foot_height(OCTANT_FOOT, OCTANT_FOOT, math.pi / 2) == pytest.approx(0.6584789484624084, abs=1e-14)


def test_edge_foot_near_flat_angle_rejected():
    # the -cos(gamma) term dominates: large, finite, and signed like sinh(h_ij)
    assert 10 < edge_foot_height(0.5, 0.5, math.pi - 1e-6) < 20
    assert -20 < edge_foot_height(-0.5, -0.5, math.pi - 1e-6) < -10
    with pytest.raises(GeometryError):
        edge_foot_height(0.5, 0.5, math.pi - 1e-10)


def test_link_angle_octant():
    assert link_angle(OCTANT_FOOT, OCTANT_FOOT, math.pi / 2) == pytest.approx(math.pi / 3, abs=1e-15)


def test_link_angle_corrupt_input():
    with pytest.raises(GeometryError):
        link_angle(float("nan"), 0.0, 1.0)


def test_link_angle_matches_acos_form():
    rng = np.random.default_rng(11)
    for _ in range(200):
        x, y = rng.uniform(-3, 3, size=2)
        g = rng.uniform(0.1, math.pi - 0.1)
        assert link_angle(x, y, g) == pytest.approx(math.acos(kite.link_angle_cosine(x, y, g)), abs=1e-9)


def test_corner_identities_random():
    rng = np.random.default_rng(0)
    for _ in range(300):
        h, a = random_corner(rng)
        cg = corner_geometry(tuple(h), tuple(a))
        assert abs(cg.omega_i + cg.omega_j + cg.omega_k - math.pi) < 1e-10
        # edge foot on line ij computed from j's kite
        assert abs(cg.h_ijk - edge_foot_height(cg.h_ji, cg.h_jk, cg.gamma_j)) < 1e-10


def test_degeneration_limits():
    rng = np.random.default_rng(2)
    for _ in range(20):
        _, a = random_corner(rng)
        aij, ajk, aki = a
        far = corner_geometry((20.0, 0.0, 0.0), (aij, ajk, aki))
        assert abs(far.omega_i - ajk) < 1e-6
        low = corner_geometry((20.0, 20.0, 0.0), (aij, ajk, aki))
        assert abs(low.omega_k) < 1e-6


def test_derivative_octant():
    value = d_link_angle_d_height(OCTANT_EDGE_FOOT, OCTANT_FOOT, OCTANT_FOOT, math.pi / 2)
    assert value == pytest.approx(-1.0 / (2.0 * math.sqrt(3.0)), abs=1e-15)


def _omega_i(h, a, gamma):
    hi, hj, hk = h
    aij, _, aki = a
    return link_angle(foot_height(hi, hj, aij), foot_height(hi, hk, aki), gamma[0])


def test_derivative_against_finite_differences():
    rng = np.random.default_rng(3)
    step = 1e-5
    for _ in range(100):
        h, a = random_corner(rng)
        cg = corner_geometry(tuple(h), tuple(a))
        gamma = (cg.gamma_i, cg.gamma_j, cg.gamma_k)
        hp, hm = h.copy(), h.copy()
        hp[1] += step
        hm[1] -= step
        fd = (_omega_i(hp, a, gamma) - _omega_i(hm, a, gamma)) / (2 * step)
        an = d_link_angle_d_height(cg.h_ijk, cg.h_ij, cg.h_ji, a[0])
        assert abs(an - fd) <= 1e-6 * max(1.0, abs(an))
        assert (an <= 0) == (cg.h_ijk >= 0)


def test_flipped_edge_right_angles():
    assert flipped_edge_length(math.pi / 2, math.pi / 2, math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-15)


def test_flipped_edge_reproduces_third_side():
    rng = np.random.default_rng(4)
    for _ in range(50):
        _, (a, b, c) = random_corner(rng)
        ga, _, _ = triangle_angles(a, b, c)
        assert flipped_edge_length(b, c, ga) == pytest.approx(a, abs=1e-10)


def test_flipped_edge_against_vectors():
    # develop j at the north pole, k and l at distance 2 separated by angle 3
    j = np.array([0.0, 0.0, 1.0])
    k = np.array([math.sin(2.0), 0.0, math.cos(2.0)])
    l = np.array([math.sin(2.0) * math.cos(3.0), math.sin(2.0) * math.sin(3.0), math.cos(2.0)])
    expected = math.acos(k @ l)
    assert flipped_edge_length(2.0, 2.0, 3.0) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(2.2723028, abs=1e-7)


def test_flipped_edge_not_shorter_than_pi():
    with pytest.raises(GeometryError):
        flipped_edge_length(math.pi / 2, math.pi / 2, math.pi)
    with pytest.raises(GeometryError):
        flipped_edge_length(1.0, 1.0, 0.0)
