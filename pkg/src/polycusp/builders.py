"""Ready-made torus triangulations used by the tests, benchmarks and docs."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .surface import SphericalConeTorus, parse_surface


def grid_torus_document(
    n: int,
    m: int | None = None,
    lengths: float | Callable[[str, int, int], float] | np.ndarray = 0.5 * math.pi,
) -> dict:
    """``n x m`` grid with one diagonal per cell, glued into a torus.

    Vertex ``(x, y)`` has id ``y * n + x``.  Each cell contributes a
    horizontal edge ``h{x}_{y}``, a vertical edge ``v{x}_{y}`` and a
    diagonal ``d{x}_{y}``.  ``lengths`` is a constant, a callable
    ``(kind, x, y) -> length`` with kind in ``"hvd"``, or an array of
    ``3 n m`` lengths in the order (h, v, d) per cell, row-major.
    ``grid_torus_document(1)`` is the one-vertex torus.
    """
    m = n if m is None else m
    if callable(lengths):
        length_of = lengths
    elif np.ndim(lengths) == 0:
        value = float(lengths)

        def length_of(kind, x, y):
            return value
    else:
        arr = np.asarray(lengths, dtype=float).reshape(m, n, 3)

        def length_of(kind, x, y):
            return float(arr[y, x, "hvd".index(kind)])

    def vid(x, y):
        return (y % m) * n + (x % n)

    def eid(kind, x, y):
        return f"{kind}{x % n}_{y % m}"

    edges = []
    for y in range(m):
        for x in range(n):
            for kind in "hvd":
                edges.append({"id": eid(kind, x, y), "length": length_of(kind, x, y)})

    tris = []
    for y in range(m):
        for x in range(n):
            # lower triangle (x,y) -> (x+1,y) -> (x+1,y+1)
            verts = [vid(x, y), vid(x + 1, y), vid(x + 1, y + 1)]
            sides = [eid("h", x, y), eid("v", x + 1, y), eid("d", x, y)]
            tris.append(_triangle(verts, sides))
            # upper triangle (x,y) -> (x+1,y+1) -> (x,y+1)
            verts = [vid(x, y), vid(x + 1, y + 1), vid(x, y + 1)]
            sides = [eid("d", x, y), eid("h", x, y + 1), eid("v", x, y)]
            tris.append(_triangle(verts, sides))
    return {"vertices": list(range(n * m)), "edges": edges, "triangles": tris}


def _triangle(verts, sides) -> dict:
    return {
        "corners": [
            {"vertex": verts[c], "edge_prev": sides[(c + 2) % 3], "edge_next": sides[c]}
            for c in range(3)
        ]
    }


def grid_torus(n: int, m: int | None = None, lengths=0.5 * math.pi) -> SphericalConeTorus:
    return parse_surface(grid_torus_document(n, m, lengths))


def octant_grid() -> SphericalConeTorus:
    """2x2 grid torus with every edge of length pi/2 (octant triangles)."""
    return grid_torus(2, 2, 0.5 * math.pi)


def equilateral_grid(length: float = 1.0, n: int = 2) -> SphericalConeTorus:
    return grid_torus(n, n, length)


def random_grid(n: int, low: float, high: float, seed: int) -> SphericalConeTorus:
    rng = np.random.default_rng(seed)
    return grid_torus(n, n, rng.uniform(low, high, size=3 * n * n))


def punctured_square_document(spoke: float = 1.0, apex_angle: float = 1.8) -> dict:
    """Square torus with a centre vertex joined to the (single) corner vertex.

    The four spokes have length ``spoke``; the two loops (square sides)
    have the length making the angle at the centre equal ``apex_angle``.
    With heights ``h_centre = b``, ``h_corner = log cos(spoke) + b`` all
    four spokes have zero cusp-edge length, so the dual tesselation is a
    single punctured face and its 1-skeleton is disconnected.
    """
    cos_side = math.cos(spoke) ** 2 + math.sin(spoke) ** 2 * math.cos(apex_angle)
    side = math.acos(cos_side)
    edges = [
        {"id": "s0", "length": spoke},  # centre -> corner (0,0)
        {"id": "s1", "length": spoke},  # centre -> corner (1,0)
        {"id": "s2", "length": spoke},  # centre -> corner (1,1)
        {"id": "s3", "length": spoke},  # centre -> corner (0,1)
        {"id": "bottom", "length": side},  # (0,0)->(1,0), same loop as top
        {"id": "left", "length": side},  # (0,0)->(0,1), same loop as right
    ]
    C, P = "c", "p"
    tris = [
        _triangle([C, P, P], ["s0", "bottom", "s1"]),  # c, (0,0), (1,0)
        _triangle([C, P, P], ["s1", "left", "s2"]),  # c, (1,0), (1,1): right side = left loop
        _triangle([C, P, P], ["s2", "bottom", "s3"]),  # c, (1,1), (0,1): top = bottom loop
        _triangle([C, P, P], ["s3", "left", "s0"]),  # c, (0,1), (0,0)
    ]
    return {"vertices": [C, P], "edges": edges, "triangles": tris}


def punctured_square(spoke: float = 1.0, apex_angle: float = 1.8) -> SphericalConeTorus:
    return parse_surface(punctured_square_document(spoke, apex_angle))
