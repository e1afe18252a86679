import math

import numpy as np
import pytest
from conftest import random_convex_state

from polycusp import builders
from polycusp.cusp import CuspState, build_state, curvatures
from polycusp.solver import (
    CONVERGED,
    DOMAIN_ERROR,
    MAX_ITER,
    SolveOptions,
    gauge_fix,
    newton_solve,
    newton_step,
    ricci_flow_solve,
    solve,
)

UNREACHABLE = np.array([7.0, -7.0 / 3, -7.0 / 3, -7.0 / 3])  # kappa < 2 pi always


def test_gauge_fix():
    np.testing.assert_array_equal(gauge_fix([1.0, 1.0, 1.0, 1.0]), np.zeros(4))
    h = np.array([0.3, -1.2, 2.0, 0.5])
    np.testing.assert_allclose(gauge_fix(gauge_fix(h)), gauge_fix(h), atol=1e-15)
    s = builders.equilateral_grid(1.0)
    k1 = curvatures(build_state(s, h=h * 0.1))
    k2 = curvatures(build_state(s, h=gauge_fix(h * 0.1)))
    np.testing.assert_allclose(k1, k2, atol=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"method": "bfgs"},
        {"tol_kappa": 0.0},
        {"max_iterations": 0},
        {"flow_step": -1.0},
        {"target_curvatures": [1.0, 0.0, 0.0, 0.0]},
    ],
)
def test_invalid_options(kwargs):
    with pytest.raises(ValueError):
        SolveOptions(**kwargs)


def test_default_budgets():
    assert SolveOptions().iteration_budget == 100
    assert SolveOptions(method="flow").iteration_budget == 100_000


def test_target_length_checked(octant):
    opts = SolveOptions(target_curvatures=[0.5, -0.5])
    with pytest.raises(ValueError):
        newton_solve(octant, options=opts)


def test_newton_octant_random_starts(octant):
    rng = np.random.default_rng(0)
    for _ in range(10):
        r = newton_solve(octant, h0=rng.uniform(-1, 1, 4))
        assert r.status == CONVERGED and r.converged
        assert r.residual < 1e-10 and r.iterations <= 20
        np.testing.assert_allclose(r.heights, 0.0, atol=1e-10)
        assert r.state.is_convex()


def test_newton_history_monotone():
    s = builders.random_grid(3, 1.0, 1.4, 3)
    r = newton_solve(s, h0=np.random.default_rng(1).uniform(-0.3, 0.3, 9))
    assert r.converged
    assert np.all(np.diff(r.history) < 0)


@pytest.mark.parametrize("surface_seed", [0, 1, 2])
def test_round_trip(surface_seed):
    rng = np.random.default_rng(100 + surface_seed)
    s = builders.random_grid(3, 1.0, 1.4, surface_seed)
    generator = random_convex_state(s, rng, spread=0.5)
    target = curvatures(generator)
    r = newton_solve(s, options=SolveOptions(target_curvatures=target - target.mean()))
    assert r.converged
    np.testing.assert_allclose(r.heights, gauge_fix(generator.h), atol=1e-8)


def test_acute_instance_keeps_triangulation():
    s = builders.random_grid(2, 1.7, 2.0, 0)
    r = newton_solve(s)
    assert r.converged and r.flips == 0
    assert r.dual.is_triangulation
    assert r.state.tri.canonical_form() == s.triangulation.canonical_form()
    assert all(0 < a < math.pi / 2 for a in r.dihedral.values())


def test_flow_agrees_with_newton(octant):
    h0 = np.random.default_rng(2).uniform(-1, 1, 4)
    n = newton_solve(octant, h0=h0)
    f = ricci_flow_solve(octant, h0=h0)
    assert f.converged and f.iterations > n.iterations
    np.testing.assert_allclose(f.heights, n.heights, atol=1e-8)


def test_flow_on_random_surface():
    s = builders.random_grid(3, 1.0, 1.4, 5)
    h0 = gauge_fix(np.random.default_rng(3).uniform(-0.5, 0.5, 9))
    n = newton_solve(s, h0=h0)
    f = ricci_flow_solve(s, h0=h0)
    assert n.converged and f.converged
    np.testing.assert_allclose(f.heights, n.heights, atol=1e-7)
    # the flow keeps the sum of heights (no gauge drift)
    assert abs(f.gauge_shift) < 1e-10
    assert np.all(np.diff(f.history) < 0)


def test_max_iter_status(octant):
    r = newton_solve(octant, h0=[0.9, -0.9, 0.5, 0.1], options=SolveOptions(max_iterations=1))
    assert r.status == MAX_ITER and r.iterations == 1
    f = ricci_flow_solve(octant, h0=[0.9, -0.9, 0.5, 0.1], options=SolveOptions(method="flow", max_iterations=3))
    assert f.status == MAX_ITER


def test_unreachable_target_is_domain_error(octant):
    for method in ("newton", "flow"):
        r = solve(octant, options=SolveOptions(method=method, target_curvatures=UNREACHABLE, max_iterations=2000))
        assert r.status == DOMAIN_ERROR
        assert r.residual > 0.5


def test_inadmissible_start_is_domain_error(equilateral):
    r = newton_solve(equilateral, h0=[1.0, 1.0, 0.0, 0.0])
    assert r.status == DOMAIN_ERROR and r.state is None


def test_deterministic():
    s = builders.random_grid(3, 1.0, 1.4, 4)
    h0 = np.random.default_rng(4).uniform(-0.5, 0.5, 9)
    a, b = newton_solve(s, h0=h0), newton_solve(s, h0=h0)
    np.testing.assert_array_equal(a.heights, b.heights)
    assert a.history == b.history and a.flips == b.flips


def test_singular_system_is_flagged():
    s = builders.punctured_square()
    state = CuspState(s, s.triangulation.copy(), [0.0, math.log(math.cos(1.0))])
    step, singular = newton_step(state, curvatures(state))
    assert singular and np.all(np.isfinite(step))
    _, regular = newton_step(build_state(builders.octant_grid()), np.zeros(4))
    assert not regular
