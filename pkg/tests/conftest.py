import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

sys.path.insert(0, str(Path(__file__).parent))

from polycusp import builders, kernels  # noqa: E402
from polycusp.cusp import CuspState, build_state, make_convex  # noqa: E402
from polycusp.errors import DomainError, GeometryError  # noqa: E402

HALF_PI = 0.5 * math.pi


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.backend_name()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.fixture
def octant():
    return builders.octant_grid()


@pytest.fixture
def equilateral():
    return builders.equilateral_grid(1.0)


def random_convex_state(surface, rng, spread=0.6, tries=50):
    """A convex state at random heights, retrying when ``h`` is inadmissible."""
    for _ in range(tries):
        h = rng.uniform(-spread, spread, size=surface.n_vertices)
        try:
            return make_convex(build_state(surface, h=h))
        except (DomainError, GeometryError):
            continue
    raise RuntimeError("no admissible random heights found")


def zero_edge_state(surface, vertex=0, t_max=3.0, level=0.0):
    """Raise one height until the first edge reaches length ``level``.

    The triangulation is held fixed, so with ``level = 0`` the result has
    one edge with ``ell = 0`` up to root-finding accuracy.
    """
    T = surface.triangulation

    def h_of(t):
        h = np.zeros(surface.n_vertices)
        h[vertex] = t
        return h

    def min_ell(t):
        return CuspState(surface, T.copy(), h_of(t)).ell.min() - level

    ts = np.linspace(0.0, t_max, 61)
    for a, b in zip(ts, ts[1:]):
        if min_ell(b) < 0:
            t = brentq(min_ell, a, b, xtol=1e-15)
            return CuspState(surface, T.copy(), h_of(t))
    raise RuntimeError("no edge reached zero length")


def fd_jacobian(surface, state, step=1e-5):
    """Central differences of the curvatures with the triangulation held fixed."""
    from polycusp.cusp import curvatures

    n = surface.n_vertices
    J = np.empty((n, n))
    for j in range(n):
        hp, hm = state.h.copy(), state.h.copy()
        hp[j] += step
        hm[j] -= step
        kp = curvatures(CuspState(surface, state.tri.copy(), hp))
        km = curvatures(CuspState(surface, state.tri.copy(), hm))
        J[:, j] = (kp - km) / (2 * step)
    return J


def random_corner(rng, low=0.2, high=math.pi - 0.2, h_range=3.0):
    """Heights and side lengths ``(a_ij, a_jk, a_ki)`` of a valid random corner."""
    while True:
        a = rng.uniform(low, high, size=3)
        slack = min(a[0] + a[1] - a[2], a[1] + a[2] - a[0], a[0] + a[2] - a[1], 2 * math.pi - a.sum())
        if slack > 1e-3:
            return rng.uniform(-h_range, h_range, size=3), a


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
