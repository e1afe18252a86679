"""Truncated cusps glued from corners: edge lengths, curvatures and flips.

A :class:`CuspState` pairs a triangulation of the cone surface with a
height per vertex.  Gluing the truncated corners of adjacent triangles
produces a cusp edge of signed length ``ell[e]``; the state is convex when
no ``ell`` is negative.  The flip algorithm repairs concave edges by
replacing them with the other diagonal of their quadrilateral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DegenerateTriangleError, DomainError, FlipBudgetError, FlipError, GeometryError
from .kite import flipped_edge_length
from .surface import SphericalConeTorus, Triangulation, triangle_angles, triangle_angles_array

#: absolute threshold below which a cusp edge length counts as zero
EPS_EDGE = 1e-9
#: flip budget per edge for :func:`make_convex`
FLIPS_PER_EDGE = 100


class CuspState:
    """A triangulated truncated cusp ``(T, h)`` with cached corner quantities.

    Attributes
    ----------
    surface : SphericalConeTorus
        The Gauss image (fixed metric).
    tri : Triangulation
        Current triangulation, owned by this state.
    h : ndarray
        Height of every vertex.
    gamma, side_alpha : ndarray
        Corner angles and side lengths, shape ``(F, 3)``.
    foot_next, foot_prev, edge_foot, omega : ndarray
        Per-corner kite quantities (see :mod:`polycusp._kernels_py`).
    ell : ndarray
        Cusp edge length for every edge.
    flips : int
        Number of flips performed since the state was built.
    """

    def __init__(self, surface: SphericalConeTorus, tri: Triangulation, h):
        h = np.array(h, dtype=float).reshape(-1)
        if h.shape[0] != surface.n_vertices:
            raise ValueError(f"need {surface.n_vertices} heights, got {h.shape[0]}")
        if not np.all(np.isfinite(h)):
            raise GeometryError("heights must be finite")
        self.surface = surface
        self.tri = tri
        self.h = h
        self.flips = 0
        self.side_alpha = tri.side_lengths()
        self.gamma = triangle_angles_array(self.side_alpha)
        self.foot_next, self.foot_prev, self.edge_foot, self.omega = kernels.corner_geometry(
            self.h, tri.tri_vertex, self.side_alpha, self.gamma
        )
        self.ell = np.empty(tri.n_edges)
        self._update_ell(range(tri.n_edges))

    def _update_ell(self, edges) -> None:
        es = self.tri.edge_sides
        for e in edges:
            (t0, c0), (t1, c1) = es[e]
            self.ell[e] = self.edge_foot[t0, c0] + self.edge_foot[t1, c1]

    def _refresh_triangles(self, ts) -> None:
        ts = np.asarray(sorted(set(int(t) for t in ts)), dtype=np.int64)
        tri = self.tri
        self.side_alpha[ts] = tri.edge_length[tri.tri_edge[ts]]
        self.gamma[ts] = triangle_angles_array(self.side_alpha[ts])
        fn, fp, ef, om = kernels.corner_geometry(
            self.h, tri.tri_vertex[ts], self.side_alpha[ts], self.gamma[ts]
        )
        self.foot_next[ts], self.foot_prev[ts], self.edge_foot[ts], self.omega[ts] = fn, fp, ef, om
        self._update_ell(set(int(e) for e in tri.tri_edge[ts].ravel()))

    def copy(self) -> "CuspState":
        new = object.__new__(CuspState)
        new.surface = self.surface
        new.tri = self.tri.copy()
        new.h = self.h.copy()
        new.flips = self.flips
        for name in ("side_alpha", "gamma", "foot_next", "foot_prev", "edge_foot", "omega", "ell"):
            setattr(new, name, getattr(self, name).copy())
        return new

    @property
    def n_vertices(self) -> int:
        return self.surface.n_vertices

    @property
    def kappa(self) -> np.ndarray:
        return curvatures(self)

    def is_convex(self, eps: float = EPS_EDGE) -> bool:
        return bool(np.all(self.ell >= -eps))

    def __repr__(self) -> str:
        return (
            f"CuspState(V={self.n_vertices}, E={self.tri.n_edges}, "
            f"min_ell={self.ell.min():.3g}, flips={self.flips})"
        )


def build_state(surface: SphericalConeTorus, T: Optional[Triangulation] = None, h=None) -> CuspState:
    """Glue the truncated corners of ``(T, h)``; ``T`` defaults to the surface's own."""
    T = surface.triangulation if T is None else T
    h = np.zeros(surface.n_vertices) if h is None else h
    return CuspState(surface, T.copy(), h)


def curvatures(state: CuspState) -> np.ndarray:
    """``kappa_i = 2 pi`` minus the total link angle around vertex ``i``."""
    omega_sum = np.bincount(
        state.tri.tri_vertex.ravel(), weights=state.omega.ravel(), minlength=state.n_vertices
    )
    return 2.0 * math.pi - omega_sum


def edge_is_bad(state: CuspState, edge: int, eps: float = EPS_EDGE) -> bool:
    return bool(state.ell[edge] < -eps)


def bad_edges(state: CuspState, eps: float = EPS_EDGE) -> np.ndarray:
    return np.flatnonzero(state.ell < -eps)


@dataclass(frozen=True)
class _Quad:
    t: int
    c: int
    t2: int
    c2: int
    angle_i: float
    angle_j: float


def _quad(state: CuspState, edge: int) -> _Quad:
    (t, c), (t2, c2) = (tuple(int(x) for x in s) for s in state.tri.edge_sides[edge])
    g = state.gamma
    return _Quad(t, c, t2, c2, g[t, c] + g[t2, (c2 + 1) % 3], g[t, (c + 1) % 3] + g[t2, c2])


def _flipped_length(state: CuspState, q: _Quad) -> float:
    a = state.side_alpha
    alpha_ki = a[q.t, (q.c + 2) % 3]
    alpha_il = a[q.t2, (q.c2 + 1) % 3]
    return flipped_edge_length(alpha_ki, alpha_il, q.angle_i)


def flip_feasible(state: CuspState, edge: int) -> bool:
    """Whether the arc ``kl`` exists inside the quadrilateral and is shorter than pi."""
    q = _quad(state, edge)
    if q.t == q.t2:
        return False
    if not (q.angle_i < math.pi and q.angle_j < math.pi):
        return False
    try:
        beta = _flipped_length(state, q)
        a = state.side_alpha
        triangle_angles(a[q.t, (q.c + 2) % 3], a[q.t2, (q.c2 + 1) % 3], beta)
        triangle_angles(a[q.t2, (q.c2 + 2) % 3], a[q.t, (q.c + 1) % 3], beta)
    except (GeometryError, DegenerateTriangleError):
        return False
    return True


def flip(state: CuspState, edge: int) -> CuspState:
    """Replace ``edge`` by the other diagonal of its quadrilateral.

    Heights are unchanged; only the two affected triangles are recomputed.
    The edge keeps its index and receives the new arc's length.
    """
    if not flip_feasible(state, edge):
        raise FlipError(f"edge {edge} cannot be flipped")
    q = _quad(state, edge)
    beta = _flipped_length(state, q)
    new = state.copy()
    tri = new.tri
    tv, te = tri.tri_vertex, tri.tri_edge
    t, c, t2, c2 = q.t, q.c, q.t2, q.c2
    c1, cm = (c + 1) % 3, (c + 2) % 3
    d1, dm = (c2 + 1) % 3, (c2 + 2) % 3
    i, j, k, l = tv[t, c], tv[t, c1], tv[t, cm], tv[t2, dm]
    e_jk, e_ki, e_il, e_lj = te[t, c1], te[t, cm], te[t2, d1], te[t2, dm]

    side_map = {
        (t, cm): (t, 0),
        (t2, d1): (t, 1),
        (t2, dm): (t2, 0),
        (t, c1): (t2, 1),
    }
    affected = {int(e_jk), int(e_ki), int(e_il), int(e_lj)}
    old_sides = {e: [tuple(int(x) for x in s) for s in tri.edge_sides[e]] for e in affected}
    for e_aff, sides in old_sides.items():
        tri.edge_sides[e_aff] = [side_map.get(s, s) for s in sides]
    tri.edge_sides[edge] = [(t, 2), (t2, 2)]

    tv[t] = (k, i, l)
    te[t] = (e_ki, e_il, edge)
    tv[t2] = (l, j, k)
    te[t2] = (e_lj, e_jk, edge)
    tri.edge_length[edge] = beta

    new._refresh_triangles((t, t2))
    new.flips += 1
    return new


def make_convex(
    state: CuspState,
    eps: float = EPS_EDGE,
    max_flips: Optional[int] = None,
    on_flip: Optional[Callable[[CuspState, int, CuspState], None]] = None,
) -> CuspState:
    """Flip bad edges, most negative first, until the state is convex.

    Raises
    ------
    DomainError
        A bad edge cannot be flipped: the heights are outside the
        admissible domain.
    FlipBudgetError
        More than ``100 E`` flips were needed.
    """
    budget = FLIPS_PER_EDGE * state.tri.n_edges if max_flips is None else max_flips
    cur = state
    done = 0
    while True:
        bad = bad_edges(cur, eps)
        if bad.size == 0:
            return cur
        e = int(bad[np.argmin(cur.ell[bad])])
        if done >= budget:
            raise FlipBudgetError(f"non-termination guard: {done} flips without reaching convexity")
        if not flip_feasible(cur, e):
            raise DomainError(
                f"outside admissible domain: bad edge {e} (ell={cur.ell[e]:.3e}) cannot be flipped"
            )
        nxt = flip(cur, e)
        if on_flip is not None:
            on_flip(cur, e, nxt)
        cur = nxt
        done += 1


# ---------------------------------------------------------------------------
# dual tesselation


@dataclass(frozen=True)
class DualFace:
    """A face of the dual tesselation: triangles merged across erased edges.

    ``boundary`` holds the boundary cycles as lists of ``(edge, from, to)``;
    ``angles`` holds, for each cycle, the face angle at the start vertex of
    each boundary side.
    """

    triangles: tuple[int, ...]
    boundary: tuple[tuple[tuple[int, int, int], ...], ...]
    angles: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class DualTesselation:
    erased: tuple[int, ...]
    kept: tuple[int, ...]
    faces: tuple[DualFace, ...]
    components: int

    @property
    def connected(self) -> bool:
        return self.components == 1

    @property
    def is_triangulation(self) -> bool:
        return not self.erased


def _components(n: int, pairs) -> int:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(x) for x in range(n)})


def dual_tesselation(state: CuspState, eps: float = EPS_EDGE) -> DualTesselation:
    """Erase edges with ``|ell| <= eps`` and assemble the remaining faces."""
    tri = state.tri
    erased_mask = np.abs(state.ell) <= eps
    erased = tuple(int(e) for e in np.flatnonzero(erased_mask))
    kept = tuple(int(e) for e in np.flatnonzero(~erased_mask))

    # triangles merged across erased edges
    F = tri.n_triangles
    parent = list(range(F))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in erased:
        (t0, _), (t1, _) = tri.edge_sides[e]
        r0, r1 = find(int(t0)), find(int(t1))
        if r0 != r1:
            parent[r0] = r1
    groups: dict[int, list[int]] = {}
    for t in range(F):
        groups.setdefault(find(t), []).append(t)

    faces = []
    for members in groups.values():
        cycles, angles = _boundary_cycles(state, set(members), erased_mask)
        faces.append(DualFace(tuple(members), cycles, angles))

    pairs = []
    for e in kept:
        u, v = tri.edge_vertices(e)
        pairs.append((u, v))
    return DualTesselation(erased, kept, tuple(faces), _components(state.n_vertices, pairs))


def _other_side(tri: Triangulation, t: int, c: int) -> tuple[int, int]:
    (t0, c0), (t1, c1) = tri.edge_sides[tri.tri_edge[t, c]]
    if (int(t0), int(c0)) == (t, c):
        return int(t1), int(c1)
    return int(t0), int(c0)


def _boundary_cycles(state: CuspState, members: set, erased_mask):
    tri = state.tri
    sides = [
        (t, c) for t in sorted(members) for c in range(3) if not erased_mask[tri.tri_edge[t, c]]
    ]
    remaining = set(sides)
    cycles, all_angles = [], []
    for start in sides:
        if start not in remaining:
            continue
        cyc, angs = [], []
        cur = start
        while True:
            remaining.discard(cur)
            t, c = cur
            cyc.append(
                (int(tri.tri_edge[t, c]), int(tri.tri_vertex[t, c]), int(tri.tri_vertex[t, (c + 1) % 3]))
            )
            # rotate around the end vertex inside the face until a kept side
            tt, cc = t, (c + 1) % 3
            angle = state.gamma[tt, cc]
            while erased_mask[tri.tri_edge[tt, cc]]:
                tn, cn = _other_side(tri, tt, cc)
                tt, cc = tn, (cn + 1) % 3
                angle += state.gamma[tt, cc]
            angs.append(float(angle))
            cur = (tt, cc)
            if cur == start:
                break
        # angles were recorded at the end vertex of each side; shift to start vertices
        cycles.append(tuple(cyc))
        all_angles.append(tuple(angs[-1:] + angs[:-1]))
    return tuple(cycles), tuple(all_angles)


def dihedral_angles(state: CuspState, eps: float = EPS_EDGE) -> dict[int, float]:
    """Dihedral angle ``pi - length`` of the cusp at every surviving edge."""
    tri = state.tri
    return {
        int(e): math.pi - float(tri.edge_length[e])
        for e in np.flatnonzero(np.abs(state.ell) > eps)
    }
