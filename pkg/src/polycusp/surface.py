"""Spherical cone metrics on the torus, given as edge-length triangulations.

A triangulation is stored corner-wise.  Triangle ``t`` has corners
``0, 1, 2`` in counter-clockwise order; ``tri_vertex[t, c]`` is the vertex
at corner ``c`` and ``tri_edge[t, c]`` is the edge running from corner ``c``
to corner ``c + 1`` (the *side* ``c``).  Edges are first-class records, so
loops and parallel edges are represented without ambiguity.  Every edge
has exactly two sides, ``edge_sides[e] = ((t0, c0), (t1, c1))``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Hashable, Mapping, Sequence

import numpy as np

from .errors import DegenerateTriangleError, SurfaceError

TWO_PI = 2.0 * math.pi

#: absolute slack required by the strict spherical triangle inequalities
TRIANGLE_SLACK = 1e-12

GEODESIC_WARNING = (
    "contractible closed geodesics longer than 2*pi: condition NOT verified"
)


@dataclass
class Triangulation:
    """Combinatorics plus spherical edge lengths of one triangulation."""

    tri_vertex: np.ndarray
    tri_edge: np.ndarray
    edge_length: np.ndarray
    edge_sides: np.ndarray

    @property
    def n_triangles(self) -> int:
        return self.tri_vertex.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_length.shape[0]

    def copy(self) -> "Triangulation":
        return Triangulation(
            self.tri_vertex.copy(),
            self.tri_edge.copy(),
            self.edge_length.copy(),
            self.edge_sides.copy(),
        )

    def side_lengths(self) -> np.ndarray:
        """Spherical length of every side, shape ``(F, 3)``."""
        return self.edge_length[self.tri_edge]

    def corner_angles(self) -> np.ndarray:
        """Angle of the spherical triangle at every corner, shape ``(F, 3)``."""
        return triangle_angles_array(self.side_lengths())

    def edge_vertices(self, e: int) -> tuple[int, int]:
        t, c = self.edge_sides[e, 0]
        return int(self.tri_vertex[t, c]), int(self.tri_vertex[t, (c + 1) % 3])

    def is_loop(self, e: int) -> bool:
        u, v = self.edge_vertices(e)
        return u == v

    def canonical_form(self) -> list[tuple[tuple[int, int], ...]]:
        """Triangles as cyclic (vertex, edge) words, rotation-normalised and sorted.

        Two triangulations with equal canonical forms have the same
        combinatorics and edge labels.
        """
        words = []
        for t in range(self.n_triangles):
            w = [(int(self.tri_vertex[t, c]), int(self.tri_edge[t, c])) for c in range(3)]
            words.append(min(tuple(w[r:] + w[:r]) for r in range(3)))
        return sorted(words)


@dataclass(frozen=True)
class SphericalConeTorus:
    """A spherical cone metric on the torus with a chosen geodesic triangulation."""

    vertex_ids: tuple[Hashable, ...]
    triangulation: Triangulation
    edge_ids: tuple[Hashable, ...] = ()
    index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.index:
            self.index.update({v: i for i, v in enumerate(self.vertex_ids)})
        if not self.edge_ids:
            object.__setattr__(self, "edge_ids", tuple(range(self.triangulation.n_edges)))
        tr = self.triangulation
        for arr in (tr.tri_vertex, tr.tri_edge, tr.edge_length, tr.edge_sides):
            arr.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return self.triangulation.n_edges

    @property
    def n_triangles(self) -> int:
        return self.triangulation.n_triangles


# ---------------------------------------------------------------------------
# spherical trigonometry of one triangle


def _check_sides(a: float, b: float, c: float) -> None:
    slack = min(b + c - a, a + c - b, a + b - c, TWO_PI - (a + b + c))
    if not (min(a, b, c) > 0.0 and max(a, b, c) < math.pi and slack > TRIANGLE_SLACK):
        raise DegenerateTriangleError(
            f"spherical triangle inequality violated for sides ({a!r}, {b!r}, {c!r})"
        )


def triangle_angles(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Angles of the spherical triangle with sides ``a, b, c``.

    The angle opposite side ``a`` comes first.  Uses the half-angle form of
    the spherical law of cosines, which stays accurate for small triangles.

    Raises
    ------
    DegenerateTriangleError
        If a strict triangle inequality or ``a + b + c < 2 pi`` fails by
        less than ``1e-12``.
    """
    _check_sides(a, b, c)
    s = 0.5 * (a + b + c)
    ss, sa, sb, sc = math.sin(s), math.sin(s - a), math.sin(s - b), math.sin(s - c)
    ga = 2.0 * math.atan2(math.sqrt(sb * sc), math.sqrt(ss * sa))
    gb = 2.0 * math.atan2(math.sqrt(sa * sc), math.sqrt(ss * sb))
    gc = 2.0 * math.atan2(math.sqrt(sa * sb), math.sqrt(ss * sc))
    return ga, gb, gc


def triangle_angles_array(sides: np.ndarray) -> np.ndarray:
    """Vectorised corner angles for an ``(F, 3)`` array of side lengths.

    ``sides[:, c]`` joins corner ``c`` to corner ``c + 1``; the returned
    ``angles[:, c]`` is the angle at corner ``c`` (opposite side ``c + 1``).
    """
    sides = np.asarray(sides, dtype=float)
    a0, a1, a2 = sides[:, 0], sides[:, 1], sides[:, 2]
    slack = np.minimum.reduce(
        [a1 + a2 - a0, a0 + a2 - a1, a0 + a1 - a2, TWO_PI - (a0 + a1 + a2)]
    )
    bad = (slack <= TRIANGLE_SLACK) | (sides.min(axis=1) <= 0) | (sides.max(axis=1) >= math.pi)
    if np.any(bad):
        t = int(np.flatnonzero(bad)[0])
        raise DegenerateTriangleError(
            f"spherical triangle inequality violated in triangle {t}: sides {sides[t].tolist()}"
        )
    s = 0.5 * sides.sum(axis=1)
    ss = np.sin(s)
    # sin(s - side opposite corner c) where corner c is opposite side c+1
    s_minus = np.sin(s[:, None] - sides)
    out = np.empty_like(sides)
    for c in range(3):
        opp = (c + 1) % 3
        adj1, adj2 = c, (c + 2) % 3
        out[:, c] = 2.0 * np.arctan2(
            np.sqrt(s_minus[:, adj1] * s_minus[:, adj2]), np.sqrt(ss * s_minus[:, opp])
        )
    return out


# ---------------------------------------------------------------------------
# parsing


def _side_list(doc_triangles) -> list[list[dict]]:
    out = []
    for n, tri in enumerate(doc_triangles):
        corners = tri.get("corners") if isinstance(tri, Mapping) else None
        if not isinstance(corners, Sequence) or len(corners) != 3:
            raise SurfaceError(f"triangle {n}: expected exactly 3 corners")
        for corner in corners:
            if not isinstance(corner, Mapping) or not {"vertex", "edge_prev", "edge_next"} <= set(corner):
                raise SurfaceError(
                    f"triangle {n}: corner must have 'vertex', 'edge_prev', 'edge_next'"
                )
        out.append(list(corners))
    return out


def parse_surface(document: str | bytes | Mapping[str, Any]) -> SphericalConeTorus:
    """Build a :class:`SphericalConeTorus` from a JSON document.

    The document has the shape::

        {"vertices": [id, ...],
         "edges": [{"id": id, "length": float}, ...],
         "triangles": [{"corners": [{"vertex": id, "edge_prev": id,
                                     "edge_next": id}, x3]}, ...]}

    Only combinatorics is checked here; metric conditions are reported by
    :func:`validate`.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SurfaceError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise SurfaceError("document must be a JSON object")
    for key in ("vertices", "edges", "triangles"):
        if not isinstance(document.get(key), list):
            raise SurfaceError(f"missing or non-list field '{key}'")

    vertex_ids = tuple(document["vertices"])
    vindex: dict = {}
    for v in vertex_ids:
        if not isinstance(v, (int, str)) or isinstance(v, bool):
            raise SurfaceError(f"vertex id {v!r} must be an integer or string")
        if v in vindex:
            raise SurfaceError(f"duplicate vertex id {v!r}")
        vindex[v] = len(vindex)

    edge_ids = []
    lengths = []
    eindex: dict = {}
    for rec in document["edges"]:
        if not isinstance(rec, Mapping) or "id" not in rec or "length" not in rec:
            raise SurfaceError("edge records need 'id' and 'length'")
        eid, length = rec["id"], rec["length"]
        if eid in eindex:
            raise SurfaceError(f"duplicate edge id {eid!r}")
        if isinstance(length, bool) or not isinstance(length, (int, float)) or not math.isfinite(length):
            raise SurfaceError(f"edge {eid!r}: length must be a finite number")
        eindex[eid] = len(edge_ids)
        edge_ids.append(eid)
        lengths.append(float(length))

    corners = _side_list(document["triangles"])
    F = len(corners)
    tri_vertex = np.empty((F, 3), dtype=np.int64)
    tri_edge = np.empty((F, 3), dtype=np.int64)
    for t, cs in enumerate(corners):
        for c, corner in enumerate(cs):
            v, ep, en = corner["vertex"], corner["edge_prev"], corner["edge_next"]
            if v not in vindex:
                raise SurfaceError(f"triangle {t}: dangling vertex reference {v!r}")
            for ref in (ep, en):
                if ref not in eindex:
                    raise SurfaceError(f"triangle {t}: dangling edge reference {ref!r}")
            tri_vertex[t, c] = vindex[v]
            tri_edge[t, c] = eindex[en]
        for c in range(3):
            if eindex[cs[(c + 1) % 3]["edge_prev"]] != tri_edge[t, c]:
                raise SurfaceError(
                    f"triangle {t}: corner {(c + 1) % 3} edge_prev does not match "
                    f"corner {c} edge_next"
                )

    E = len(edge_ids)
    incid: list[list[tuple[int, int]]] = [[] for _ in range(E)]
    for t in range(F):
        for c in range(3):
            incid[tri_edge[t, c]].append((t, c))
    for e, sides in enumerate(incid):
        if len(sides) != 2:
            kind = "non-manifold edge" if len(sides) > 2 else "boundary or unused edge"
            raise SurfaceError(f"{kind}: edge {edge_ids[e]!r} has {len(sides)} triangle incidences")
        (t0, c0), (t1, c1) = sides
        a0, b0 = tri_vertex[t0, c0], tri_vertex[t0, (c0 + 1) % 3]
        a1, b1 = tri_vertex[t1, c1], tri_vertex[t1, (c1 + 1) % 3]
        if (a0, b0) != (b1, a1):
            raise SurfaceError(
                f"edge {edge_ids[e]!r}: endpoints disagree or triangles inconsistently oriented"
            )
    edge_sides = np.array(incid, dtype=np.int64).reshape(E, 2, 2)

    V = len(vertex_ids)
    if V - E + F != 0 or F != 2 * V or E != 3 * V:
        raise SurfaceError(
            f"non-torus Euler characteristic: V={V}, E={E}, F={F} (need V - E + F = 0)"
        )

    tr = Triangulation(tri_vertex, tri_edge, np.array(lengths, dtype=float), edge_sides)
    _check_vertex_links(tr, V, vertex_ids)
    return SphericalConeTorus(vertex_ids, tr, tuple(edge_ids))


def _next_corner_around_vertex(tr: Triangulation, t: int, c: int) -> tuple[int, int]:
    """Corner across the outgoing side of corner ``(t, c)``, at the same vertex."""
    e = tr.tri_edge[t, c]
    (t0, c0), (t1, c1) = tr.edge_sides[e]
    if (t0, c0) == (t, c):
        tn, cn = t1, c1
    else:
        tn, cn = t0, c0
    return int(tn), (int(cn) + 1) % 3


def vertex_corner_cycles(tr: Triangulation) -> dict[int, list[list[tuple[int, int]]]]:
    """Group the corners at each vertex into rotation cycles."""
    seen = np.zeros(tr.tri_vertex.shape, dtype=bool)
    cycles: dict[int, list] = {}
    for t in range(tr.n_triangles):
        for c in range(3):
            if seen[t, c]:
                continue
            cyc = []
            tt, cc = t, c
            while not seen[tt, cc]:
                seen[tt, cc] = True
                cyc.append((tt, cc))
                tt, cc = _next_corner_around_vertex(tr, tt, cc)
            cycles.setdefault(int(tr.tri_vertex[t, c]), []).append(cyc)
    return cycles


def _check_vertex_links(tr: Triangulation, V: int, vertex_ids) -> None:
    cycles = vertex_corner_cycles(tr)
    for v in range(V):
        n = len(cycles.get(v, []))
        if n != 1:
            raise SurfaceError(
                f"vertex {vertex_ids[v]!r}: corners form {n} rotation cycles (need exactly 1)"
            )


def load_surface(path: str | Path) -> SphericalConeTorus:
    return parse_surface(Path(path).read_text())


def surface_document(surface: SphericalConeTorus) -> dict:
    """Inverse of :func:`parse_surface`."""
    tr = surface.triangulation
    vid, eid = surface.vertex_ids, surface.edge_ids
    tris = []
    for t in range(tr.n_triangles):
        corners = []
        for c in range(3):
            corners.append(
                {
                    "vertex": vid[tr.tri_vertex[t, c]],
                    "edge_prev": eid[tr.tri_edge[t, (c + 2) % 3]],
                    "edge_next": eid[tr.tri_edge[t, c]],
                }
            )
        tris.append({"corners": corners})
    return {
        "vertices": list(vid),
        "edges": [{"id": eid[e], "length": float(tr.edge_length[e])} for e in range(tr.n_edges)],
        "triangles": tris,
    }


# ---------------------------------------------------------------------------
# metric quantities


def cone_angles_array(tr: Triangulation, n_vertices: int) -> np.ndarray:
    gamma = tr.corner_angles()
    return np.bincount(tr.tri_vertex.ravel(), weights=gamma.ravel(), minlength=n_vertices)


def cone_angles(surface: SphericalConeTorus) -> dict:
    """Cone angle at each vertex: the sum of the corner angles incident to it."""
    theta = cone_angles_array(surface.triangulation, surface.n_vertices)
    return {v: float(theta[i]) for i, v in enumerate(surface.vertex_ids)}


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" | "warning"
    kind: str
    location: str
    message: str

    def as_dict(self) -> dict:
        return {
            "severity": self.severity,
            "kind": self.kind,
            "location": self.location,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    status: str  # "ok" | "warning" | "error"
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return self.status != "error"

    def as_dict(self) -> dict:
        return {"status": self.status, "violations": [v.as_dict() for v in self.violations]}


def validate(surface: SphericalConeTorus) -> ValidationReport:
    """Check the metric hypotheses that can be checked.

    Hard errors: edge lengths outside ``(0, pi)``, strict triangle
    inequalities, perimeter below ``2 pi``, and cone angles above ``2 pi``.
    The contractible-geodesic condition is never verified; a warning says so.
    """
    tr = surface.triangulation
    out: list[Violation] = []
    for e in range(tr.n_edges):
        a = tr.edge_length[e]
        if not 0.0 < a < math.pi:
            out.append(
                Violation("error", "edge length", f"edge {surface.edge_ids[e]!r}",
                          f"length {a!r} not in (0, pi)")
            )
    sides = tr.side_lengths()
    geometric_ok = True
    for t in range(tr.n_triangles):
        a0, a1, a2 = (float(x) for x in sides[t])
        if min(a1 + a2 - a0, a0 + a2 - a1, a0 + a1 - a2) <= TRIANGLE_SLACK:
            geometric_ok = False
            out.append(
                Violation("error", "spherical triangle inequality", f"triangle {t}",
                          f"sides ({a0!r}, {a1!r}, {a2!r}) violate a strict triangle inequality")
            )
        if a0 + a1 + a2 >= TWO_PI - TRIANGLE_SLACK:
            geometric_ok = False
            out.append(
                Violation("error", "spherical triangle perimeter", f"triangle {t}",
                          f"perimeter {a0 + a1 + a2!r} not less than 2*pi")
            )
    if geometric_ok and all(v.kind != "edge length" for v in out):
        theta = cone_angles_array(tr, surface.n_vertices)
        for i, th in enumerate(theta):
            if not th > TWO_PI:
                out.append(
                    Violation("error", "cone angle", f"vertex {surface.vertex_ids[i]!r}",
                              f"cone angle not greater than 2*pi: {th!r}")
                )
    out.append(Violation("warning", "geodesic condition", "surface", GEODESIC_WARNING))
    status = "error" if any(v.severity == "error" for v in out) else "warning"
    return ValidationReport(status, tuple(out))


@dataclass(frozen=True)
class AcuteReport:
    """Vertex condition for dihedral angles ``pi - length`` at each dual vertex."""

    holds: bool
    margins: tuple[float, ...]  # per triangle: sum(pi - a) - pi
    all_lengths_at_least_half_pi: bool

    def as_dict(self) -> dict:
        return {
            "holds": self.holds,
            "margins": list(self.margins),
            "all_lengths_at_least_half_pi": self.all_lengths_at_least_half_pi,
        }


def check_acute_vertex_condition(surface: SphericalConeTorus) -> AcuteReport:
    tr = surface.triangulation
    sides = tr.side_lengths()
    margins = (3.0 * math.pi - sides.sum(axis=1)) - math.pi
    return AcuteReport(
        holds=bool(np.all(margins > 0.0)),
        margins=tuple(float(m) for m in margins),
        all_lengths_at_least_half_pi=bool(np.all(tr.edge_length >= 0.5 * math.pi)),
    )
