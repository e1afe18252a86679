"""Trigonometry of a single truncated corner.

A corner is the Gauss triangle ``ijk`` (side lengths ``alpha``, angles
``gamma``) together with heights ``h_i, h_j, h_k`` of its three face planes
above a horosphere.  The brick over the corner has kite-shaped faces whose
edges are the *foot heights* ``h_ij`` (from the foot on ``L_i`` to the line
``L_i & L_j``) and the *edge-foot heights* ``h_ijk`` (along ``L_i & L_j``
to the corner vertex).  ``omega_i`` is the angle of the Euclidean link
triangle at ``q_i``.

All lengths are signed hyperbolic lengths; all angles are in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError

#: a cosine is snapped to [-1, 1] when it overshoots by less than this
COS_CLAMP = 1e-9
#: angles within this distance of 0 or pi are rejected
ANGLE_EPS = 1e-9


def _finite(x: float, what: str) -> float:
    if not math.isfinite(x):
        raise GeometryError(f"non-finite {what}")
    return x


def _check_angle(a: float, what: str) -> None:
    if not (ANGLE_EPS < a < math.pi - ANGLE_EPS):
        raise GeometryError(f"{what} {a!r} must lie in (0, pi)")


def foot_height(h_i: float, h_j: float, alpha_ij: float) -> float:
    """``h_ij`` from ``sinh h_ij = (exp(h_j - h_i) - cos alpha) / sin alpha``."""
    _check_angle(alpha_ij, "side length")
    try:
        q = (math.exp(h_j - h_i) - math.cos(alpha_ij)) / math.sin(alpha_ij)
    except OverflowError as exc:
        raise GeometryError("height gap too large") from exc
    return _finite(math.asinh(q), "foot height")


def edge_foot_height(h_ij: float, h_ik: float, gamma_i: float) -> float:
    """``h_ijk`` from the kite in ``L_i``: distance from the foot on ``L_i & L_j``
    to the corner vertex, along that line."""
    _check_angle(gamma_i, "corner angle")
    q = (-math.cos(gamma_i) * math.sinh(h_ij) + math.sinh(h_ik)) / (
        math.sin(gamma_i) * math.cosh(h_ij)
    )
    return _finite(math.asinh(q), "edge foot height")


def link_angle_cosine(h_ij: float, h_ik: float, gamma_i: float) -> float:
    """The raw quotient ``(sinh h_ij sinh h_ik + cos gamma) / (cosh h_ij cosh h_ik)``."""
    return (math.sinh(h_ij) * math.sinh(h_ik) + math.cos(gamma_i)) / (
        math.cosh(h_ij) * math.cosh(h_ik)
    )


def link_angle(h_ij: float, h_ik: float, gamma_i: float) -> float:
    """Angle ``omega_i`` of the link triangle at ``q_i``.

    Evaluated through the half-angle identities
    ``1 -+ cos omega = (cosh(h_ij -+ h_ik) -+ cos gamma) / (cosh h_ij cosh h_ik)``,
    which avoid the loss of precision of ``acos`` near 0 and pi.
    """
    _check_angle(gamma_i, "corner angle")
    cq = link_angle_cosine(h_ij, h_ik, gamma_i)
    if not (-1.0 - COS_CLAMP <= cq <= 1.0 + COS_CLAMP):
        raise GeometryError(f"link angle cosine {cq!r} outside [-1, 1]: corrupted corner")
    cg = math.cos(gamma_i)
    num = math.cosh(h_ij - h_ik) - cg
    den = math.cosh(h_ij + h_ik) + cg
    return _finite(2.0 * math.atan(math.sqrt(num / den)), "link angle")


def d_link_angle_d_height(h_ijk: float, h_ij: float, h_ji: float, alpha_ij: float) -> float:
    """``d omega_i / d h_j`` for the corner at ``i`` and its side ``ij``.

    Only the foot height ``h_ij`` depends on ``h_j``, so the derivative is
    ``-tanh h_ijk / (sin alpha_ij cosh h_ij cosh h_ji)``.
    """
    return -math.tanh(h_ijk) / (math.sin(alpha_ij) * math.cosh(h_ij) * math.cosh(h_ji))


def flipped_edge_length(alpha_jk: float, alpha_jl: float, gamma_sum: float) -> float:
    """Length of the arc ``kl`` across a quadrilateral, seen from vertex ``j``.

    ``gamma_sum`` is the total angle at ``j`` between the sides ``jk`` and
    ``jl``.  Raises :class:`GeometryError` when the arc would not be shorter
    than pi.
    """
    if not 0.0 < gamma_sum < 2.0 * math.pi:
        raise GeometryError(f"angle sum {gamma_sum!r} must lie in (0, 2 pi)")
    cb = math.cos(alpha_jk) * math.cos(alpha_jl) + math.sin(alpha_jk) * math.sin(alpha_jl) * math.cos(
        gamma_sum
    )
    if cb <= -1.0 + 1e-12:
        raise GeometryError("flipped arc not shorter than pi")
    return math.acos(min(1.0, cb))


@dataclass(frozen=True)
class CornerGeometry:
    """All brick quantities of one truncated corner ``(i, j, k)``.

    Pair-indexed fields follow the corner order: ``h_ij`` is the foot height
    in ``L_i`` towards ``L_j`` and so on; ``h_ijk`` is the edge-foot height
    on the line ``L_i & L_j``.
    """

    h_i: float
    h_j: float
    h_k: float
    h_ij: float
    h_ik: float
    h_ji: float
    h_jk: float
    h_ki: float
    h_kj: float
    h_ijk: float
    h_jki: float
    h_kij: float
    omega_i: float
    omega_j: float
    omega_k: float
    gamma_i: float
    gamma_j: float
    gamma_k: float


def corner_geometry(
    h: tuple[float, float, float],
    alpha: tuple[float, float, float],
    gamma: tuple[float, float, float] | None = None,
) -> CornerGeometry:
    """Evaluate a corner from heights and Gauss-triangle sides.

    ``alpha = (alpha_ij, alpha_jk, alpha_ki)``; ``gamma`` is computed from
    ``alpha`` when omitted.
    """
    from .surface import triangle_angles

    hi, hj, hk = h
    aij, ajk, aki = alpha
    if gamma is None:
        # angle at i is opposite jk, at j opposite ki, at k opposite ij
        gi, gj, gk = triangle_angles(ajk, aki, aij)
    else:
        gi, gj, gk = gamma
    h_ij, h_ik = foot_height(hi, hj, aij), foot_height(hi, hk, aki)
    h_ji, h_jk = foot_height(hj, hi, aij), foot_height(hj, hk, ajk)
    h_ki, h_kj = foot_height(hk, hi, aki), foot_height(hk, hj, ajk)
    return CornerGeometry(
        hi, hj, hk,
        h_ij, h_ik, h_ji, h_jk, h_ki, h_kj,
        edge_foot_height(h_ij, h_ik, gi),
        edge_foot_height(h_jk, h_ji, gj),
        edge_foot_height(h_ki, h_kj, gk),
        link_angle(h_ij, h_ik, gi),
        link_angle(h_ji, h_jk, gj),
        link_angle(h_ki, h_kj, gk),
        gi, gj, gk,
    )
