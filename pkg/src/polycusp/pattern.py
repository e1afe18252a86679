"""The link of a cusp as a circle pattern on a flat torus.

Every vertex ``i`` carries a circle of radius ``r_i = exp(-h_i)``; circles
joined by an edge of length ``alpha`` meet at angle ``pi - alpha``.  The
centres of the three circles of a corner span its link triangle, whose
angles are the link angles ``omega``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cusp import EPS_EDGE, CuspState, curvatures
from .errors import LayoutError

#: link triangle angles must reproduce ``omega`` to this accuracy
CROSS_CHECK_TOL = 1e-8
#: maximal curvature for which the development is expected to close
LAYOUT_KAPPA_TOL = 1e-8
#: accepted closure mismatch of the developed fundamental domain
CLOSURE_TOL = 1e-7


@dataclass(frozen=True)
class LinkTriangles:
    """Euclidean link triangles.

    ``sides[t, c]`` is the distance between the centres at corners ``c`` and
    ``c + 1``; ``angles[t, c]`` is the Euclidean angle at corner ``c``.
    """

    sides: np.ndarray
    angles: np.ndarray
    omega: np.ndarray

    @property
    def max_discrepancy(self) -> float:
        return float(np.abs(self.angles - self.omega).max())


def link_triangles(state: CuspState, tol: float = CROSS_CHECK_TOL) -> LinkTriangles:
    """Side lengths from the circle radii, angles checked against ``omega``."""
    tri = state.tri
    r = np.exp(-state.h)
    ri = r[tri.tri_vertex]
    rj = np.roll(ri, -1, axis=1)
    d = np.sqrt(ri**2 + rj**2 - 2.0 * ri * rj * np.cos(state.side_alpha))
    # angle at corner c lies between sides c and c + 2, opposite side c + 1
    a, b, opp = d, np.roll(d, 1, axis=1), np.roll(d, -1, axis=1)
    angles = np.arccos(np.clip((a**2 + b**2 - opp**2) / (2.0 * a * b), -1.0, 1.0))
    link = LinkTriangles(d, angles, state.omega.copy())
    if link.max_discrepancy > tol:
        raise LayoutError(
            f"link triangle angles disagree with link angles by {link.max_discrepancy:.3e}"
        )
    return link


def _rotate(v, angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def lattice_basis(vectors, tol: float = 1e-7) -> np.ndarray:
    """Reduced basis of the planar lattice generated by ``vectors``.

    Raises :class:`LayoutError` when the vectors do not generate a rank-two
    lattice (a degenerate torus or an inconsistent development).
    """
    gens = [np.asarray(v, dtype=float) for v in vectors if np.linalg.norm(v) > tol]
    if not gens:
        raise LayoutError("no nonzero translations")
    scale = max(np.linalg.norm(v) for v in gens)
    cands = list(gens)
    k = len(gens)
    if k <= 6:
        for coeffs in product(range(-2, 3), repeat=k):
            cands.append(sum(c * g for c, g in zip(coeffs, gens)))
    else:
        for a, b in product(range(k), repeat=2):
            cands.append(gens[a] + gens[b])
            cands.append(gens[a] - gens[b])
    cands = [v for v in cands if np.linalg.norm(v) > tol * scale]
    b1 = min(cands, key=lambda v: (round(float(np.linalg.norm(v)), 12), tuple(np.round(v, 12))))
    transverse = [v for v in cands if abs(_cross(b1, v)) > tol * scale * scale]
    if not transverse:
        raise LayoutError("translations are collinear: degenerate flat torus")
    b2 = min(transverse, key=lambda v: (round(abs(_cross(b1, v)), 10), round(float(np.linalg.norm(v)), 12)))
    # Lagrange-Gauss reduction
    for _ in range(100):
        if np.dot(b2, b2) < np.dot(b1, b1):
            b1, b2 = b2, b1
        mu = round(float(np.dot(b1, b2) / np.dot(b1, b1)))
        if mu == 0:
            break
        b2 = b2 - mu * b1
    if _cross(b1, b2) < 0:
        b2 = -b2
    basis = np.array([b1, b2])
    coeffs = np.linalg.solve(basis.T, np.array(gens).T)
    if np.abs(coeffs - np.round(coeffs)).max() > 1e-6:
        raise LayoutError("translations do not form a lattice")
    return basis


@dataclass(frozen=True)
class CirclePattern:
    """A circle pattern developed into the plane.

    Attributes
    ----------
    radii : ndarray
        ``exp(-h)`` per vertex.
    link : LinkTriangles
    triangle_positions : ndarray
        Shape ``(F, 3, 2)``: placed centre of every corner.
    vertex_positions : ndarray
        Shape ``(V, 2)``: first placed copy of every vertex.
    holonomy : ndarray
        Shape ``(2, 2)``: rows are the translations generating the torus.
    intersection_angles : ndarray
        Measured angle between the two circles of every edge.
    target_angles : ndarray
        ``pi - alpha`` per edge.
    angle_sums : ndarray
        Sum of the placed angles around every vertex.
    closure_residual : float
        Largest mismatch of glued sides after removing their translation.
    """

    radii: np.ndarray
    link: LinkTriangles
    triangle_positions: np.ndarray
    vertex_positions: np.ndarray
    holonomy: np.ndarray
    intersection_angles: np.ndarray
    target_angles: np.ndarray
    angle_sums: np.ndarray
    closure_residual: float
    edge_vertices: tuple
    edge_positions: np.ndarray = field(repr=False)
    erased: tuple = ()

    @property
    def n_vertices(self) -> int:
        return self.radii.shape[0]

    def as_dict(self) -> dict:
        return {
            "radii": self.radii.tolist(),
            "centers": self.vertex_positions.tolist(),
            "holonomy": self.holonomy.tolist(),
            "intersection_angles": self.intersection_angles.tolist(),
            "closure_residual": self.closure_residual,
        }


def layout(state: CuspState, kappa_tol: float = LAYOUT_KAPPA_TOL) -> CirclePattern:
    """Develop the link triangles breadth-first from triangle 0."""
    kappa = curvatures(state)
    if np.abs(kappa).max() > kappa_tol:
        raise LayoutError(
            f"curvatures not zero (max |kappa| = {np.abs(kappa).max():.3e}); the link does not close"
        )
    link = link_triangles(state)
    tri = state.tri
    F = tri.n_triangles
    d, om = link.sides, link.omega

    pos = np.full((F, 3, 2), np.nan)

    def place(t, c, p, q):
        # corners c, c+1 at p, q; the third follows counter-clockwise
        c1, c2 = (c + 1) % 3, (c + 2) % 3
        pos[t, c], pos[t, c1] = p, q
        u = (q - p) / np.linalg.norm(q - p)
        pos[t, c2] = p + d[t, c2] * _rotate(u, om[t, c])

    place(0, 0, np.zeros(2), np.array([d[0, 0], 0.0]))
    tree_edges = set()
    queue = deque([0])
    seen = {0}
    while queue:
        t = queue.popleft()
        for c in range(3):
            e = int(tri.tri_edge[t, c])
            (t0, c0), (t1, c1) = tri.edge_sides[e]
            tn, cn = (int(t1), int(c1)) if (int(t0), int(c0)) == (t, c) else (int(t0), int(c0))
            if tn in seen:
                continue
            seen.add(tn)
            tree_edges.add(e)
            place(tn, cn, pos[t, (c + 1) % 3], pos[t, c])
            queue.append(tn)

    translations, closure = [], 0.0
    for e in range(tri.n_edges):
        if e in tree_edges:
            continue
        (t0, c0), (t1, c1) = ((int(a), int(b)) for a, b in tri.edge_sides[e])
        tau_a = pos[t0, c0] - pos[t1, (c1 + 1) % 3]
        tau_b = pos[t0, (c0 + 1) % 3] - pos[t1, c1]
        closure = max(closure, float(np.linalg.norm(tau_a - tau_b)))
        translations.append(0.5 * (tau_a + tau_b))
    if closure > CLOSURE_TOL:
        raise LayoutError(f"development does not close (mismatch {closure:.3e})")
    holonomy = lattice_basis(translations)

    V = state.n_vertices
    vpos = np.full((V, 2), np.nan)
    for t in range(F):
        for c in range(3):
            v = tri.tri_vertex[t, c]
            if np.isnan(vpos[v, 0]):
                vpos[v] = pos[t, c]

    r = np.exp(-state.h)
    E = tri.n_edges
    measured = np.empty(E)
    epos = np.empty((E, 2, 2))
    ends = []
    for e in range(E):
        t, c = (int(x) for x in tri.edge_sides[e][0])
        i, j = int(tri.tri_vertex[t, c]), int(tri.tri_vertex[t, (c + 1) % 3])
        p, q = pos[t, c], pos[t, (c + 1) % 3]
        dist = float(np.linalg.norm(q - p))
        cos_phi = (dist**2 - r[i] ** 2 - r[j] ** 2) / (2.0 * r[i] * r[j])
        measured[e] = math.acos(max(-1.0, min(1.0, cos_phi)))
        epos[e] = (p, q)
        ends.append((i, j))

    # angles at the placed corners, measured from the coordinates
    placed_angles = np.empty((F, 3))
    for t in range(F):
        for c in range(3):
            a = pos[t, (c + 1) % 3] - pos[t, c]
            b = pos[t, (c + 2) % 3] - pos[t, c]
            placed_angles[t, c] = math.atan2(_cross(a, b), float(np.dot(a, b)))
    sums = np.bincount(tri.tri_vertex.ravel(), weights=placed_angles.ravel(), minlength=V)

    return CirclePattern(
        radii=r,
        link=link,
        triangle_positions=pos,
        vertex_positions=vpos,
        holonomy=holonomy,
        intersection_angles=measured,
        target_angles=math.pi - tri.edge_length.copy(),
        angle_sums=sums,
        closure_residual=closure,
        edge_vertices=tuple(ends),
        edge_positions=epos,
        erased=tuple(int(e) for e in np.flatnonzero(np.abs(state.ell) <= EPS_EDGE)),
    )


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def emit_svg(pattern: CirclePattern, scale: float = 100.0) -> str:
    """SVG of one fundamental domain: parallelogram, circles, link edges.

    Circle centres are reduced into the parallelogram spanned by the
    holonomy vectors at the origin; each link edge is drawn from its first
    endpoint's reduced copy.  Output depends only on the pattern and scale.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    B = pattern.holonomy
    Binv = np.linalg.inv(B.T)

    def reduce(p):
        frac = Binv @ p
        shift = np.floor(frac + 1e-12)
        return p - B.T @ shift, B.T @ shift

    corners = np.array([[0.0, 0.0], B[0], B[0] + B[1], B[1]])
    pts = [corners]
    circles = []
    for v in range(pattern.n_vertices):
        c, _ = reduce(pattern.vertex_positions[v])
        circles.append((c, pattern.radii[v]))
        pts.append(np.array([c - pattern.radii[v], c + pattern.radii[v]]))
    segments = []
    erased = set(pattern.erased)
    for e, (p, q) in enumerate(pattern.edge_positions):
        if e in erased:
            continue
        _, shift = reduce(p)
        segments.append((p - shift, q - shift))
        pts.append(np.array([p - shift, q - shift]))
    allp = np.vstack(pts) * scale
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 0.05 * float(max(hi - lo))
    x0, y0 = lo[0] - pad, -hi[1] - pad
    w, h = hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad

    def xy(p):
        return _fmt(p[0] * scale), _fmt(-p[1] * scale)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        '<polygon class="domain" fill="none" stroke="black" points="'
        + " ".join(",".join(xy(p)) for p in corners)
        + '"/>',
    ]
    for p, q in segments:
        (x1, y1), (x2, y2) = xy(p), xy(q)
        lines.append(f'<line class="edge" stroke="gray" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    for c, r in circles:
        cx, cy = xy(c)
        lines.append(f'<circle fill="none" stroke="blue" cx="{cx}" cy="{cy}" r="{_fmt(r * scale)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
