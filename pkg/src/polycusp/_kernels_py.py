"""Pure numpy implementation of the per-corner kernels.

Array conventions (``F`` triangles, corners ``c = 0, 1, 2``):

* ``side_alpha[t, c]`` -- length of the side from corner ``c`` to ``c + 1``
* ``gamma[t, c]`` -- Gauss-triangle angle at corner ``c``
* ``foot_next[t, c]`` -- foot height from corner ``c`` towards corner ``c + 1``
* ``foot_prev[t, c]`` -- foot height from corner ``c`` towards corner ``c + 2``
* ``edge_foot[t, c]`` -- edge-foot height on side ``c``, from corner ``c``'s kite
* ``omega[t, c]`` -- link angle at corner ``c``
"""

import numpy as np

NAME = "python"

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_BAD_COSINE = 2


def corner_geometry(h, tri_vertex, side_alpha, gamma):
    """Return ``(foot_next, foot_prev, edge_foot, omega, status)``."""
    hv = h[tri_vertex]
    h_next = np.roll(hv, -1, axis=1)
    h_prev = np.roll(hv, 1, axis=1)
    alpha_prev = np.roll(side_alpha, 1, axis=1)
    sin_a, cos_a = np.sin(side_alpha), np.cos(side_alpha)
    sin_ap, cos_ap = np.sin(alpha_prev), np.cos(alpha_prev)
    with np.errstate(over="ignore", invalid="ignore"):
        foot_next = np.arcsinh((np.exp(h_next - hv) - cos_a) / sin_a)
        foot_prev = np.arcsinh((np.exp(h_prev - hv) - cos_ap) / sin_ap)
        sg, cg = np.sin(gamma), np.cos(gamma)
        ch_n = np.cosh(foot_next)
        ch_p = np.cosh(foot_prev)
        sh_n = np.sinh(foot_next)
        sh_p = np.sinh(foot_prev)
        edge_foot = np.arcsinh((-cg * sh_n + sh_p) / (sg * ch_n))
        cq = (sh_n * sh_p + cg) / (ch_n * ch_p)
        num = np.cosh(foot_next - foot_prev) - cg
        den = np.cosh(foot_next + foot_prev) + cg
        omega = 2.0 * np.arctan(np.sqrt(num / den))
    status = STATUS_OK
    if not (
        np.all(np.isfinite(foot_next))
        and np.all(np.isfinite(foot_prev))
        and np.all(np.isfinite(edge_foot))
        and np.all(np.isfinite(omega))
    ):
        status = STATUS_NONFINITE
    elif np.any(np.abs(cq) > 1.0 + 1e-9):
        status = STATUS_BAD_COSINE
    return foot_next, foot_prev, edge_foot, omega, status


def side_weights(side_alpha, foot_next, foot_prev, edge_foot):
    """Off-diagonal Hessian contribution of every side, shape ``(F, 3)``.

    For side ``c`` (corner ``i = c`` to ``j = c + 1``) this is
    ``tanh h_ijk / (sin alpha_ij cosh h_ij cosh h_ji)``.
    """
    foot_back = np.roll(foot_prev, -1, axis=1)  # from corner c+1 back to corner c
    return np.tanh(edge_foot) / (np.sin(side_alpha) * np.cosh(foot_next) * np.cosh(foot_back))
