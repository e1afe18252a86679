"""The concave functional V on heights: gradient, Hessian, value, diagnostics.

``V`` is only needed up to an additive constant, so :func:`value` returns
the difference ``V(h) - V(reference)`` obtained by integrating the gradient
``kappa`` along the straight segment between the two height vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.optimize import brentq

from . import kernels
from .cusp import EPS_EDGE, CuspState, curvatures, dual_tesselation, make_convex
from .errors import DomainError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
#: equispaced probes per remaining segment when locating triangulation changes
_PROBES = 32
_MAX_PIECES = 10_000


@dataclass(frozen=True)
class CurvatureHessian:
    """Symmetric matrix of ``d kappa_i / d h_j``.

    Off-diagonal entries collect one term per side of every non-loop edge
    between ``i`` and ``j``; the diagonal is minus the off-diagonal row sum.
    """

    matrix: scipy.sparse.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, x):
        return self.matrix @ x

    def __getitem__(self, ij):
        return self.matrix[ij]


def gradient(state: CuspState) -> np.ndarray:
    """``dV/dh = kappa``."""
    return curvatures(state)


def edge_weights(state: CuspState) -> np.ndarray:
    """Contribution of every edge to ``H[i, j]``; vanishes when ``ell = 0``.

    Loop edges get their formal value although they never enter ``H``.
    """
    w = kernels.side_weights(state.side_alpha, state.foot_next, state.foot_prev, state.edge_foot)
    return np.bincount(state.tri.tri_edge.ravel(), weights=w.ravel(), minlength=state.tri.n_edges)


def hessian(state: CuspState) -> CurvatureHessian:
    tri = state.tri
    w = kernels.side_weights(state.side_alpha, state.foot_next, state.foot_prev, state.edge_foot)
    vi = tri.tri_vertex.ravel()
    vj = np.roll(tri.tri_vertex, -1, axis=1).ravel()
    w = w.ravel()
    keep = vi != vj  # loops do not couple
    vi, vj, w = vi[keep], vj[keep], w[keep]
    n = state.n_vertices
    off = scipy.sparse.coo_matrix(
        (np.concatenate([w, w]), (np.concatenate([vi, vj]), np.concatenate([vj, vi]))), shape=(n, n)
    ).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    return CurvatureHessian((off + scipy.sparse.diags(diag)).tocsr())


def _state_at(state: CuspState, tri, h) -> CuspState:
    return CuspState(state.surface, tri.copy(), h)


def _min_ell(state: CuspState, tri, h) -> float:
    return float(_state_at(state, tri, h).ell.min())


def value(state: CuspState, reference_h, eps: float = EPS_EDGE) -> float:
    """``V(state.h) - V(reference_h)`` by Gauss-Legendre quadrature of ``<kappa, dh>``.

    The segment is split wherever the current triangulation stops being
    convex; each smooth piece gets 32 nodes.

    Raises
    ------
    DomainError
        If the segment leaves the admissible domain.
    """
    h1 = np.asarray(state.h, dtype=float)
    h0 = np.asarray(reference_h, dtype=float).reshape(h1.shape)
    d = h1 - h0
    if not np.any(d):
        return 0.0

    def h_at(s):
        return h0 + s * d

    tri = make_convex(_state_at(state, state.tri, h0), eps=eps).tri
    s0, total = 0.0, 0.0
    for _ in range(_MAX_PIECES):
        s1 = 1.0
        probes = s0 + (1.0 - s0) * np.arange(1, _PROBES + 1) / _PROBES
        prev = s0
        for s in probes:
            m = _min_ell(state, tri, h_at(s))
            if m < -eps:
                s1 = brentq(lambda u: _min_ell(state, tri, h_at(u)) + eps, prev, s, xtol=1e-14)
                break
            prev = s
        mid, half = 0.5 * (s0 + s1), 0.5 * (s1 - s0)
        for x, wt in zip(_GL_NODES, _GL_WEIGHTS):
            k = curvatures(_state_at(state, tri, h_at(mid + half * x)))
            total += half * wt * float(k @ d)
        if s1 >= 1.0:
            return total
        # step just past the break and repair the triangulation there
        nudge = min(1.0, s1 + 1e-9 * max(1.0, 1.0 - s1))
        tri = make_convex(_state_at(state, tri, h_at(nudge)), eps=eps).tri
        s0 = s1
    raise DomainError("quadrature did not reach the end of the segment")


@dataclass(frozen=True)
class ConcavityReport:
    """Spectral summary of the Hessian on a convex state.

    ``restricted_eigenvalues`` are those of ``H`` on the hyperplane
    ``sum(x) = 0``.  ``flexible`` marks a kernel of dimension above one.
    """

    restricted_eigenvalues: np.ndarray = field(repr=False)
    max_restricted_eigenvalue: float
    kernel_dimension: int
    components: int
    connected: bool
    flexible: bool

    def as_dict(self) -> dict:
        return {
            "max_restricted_eigenvalue": self.max_restricted_eigenvalue,
            "kernel_dimension": self.kernel_dimension,
            "components": self.components,
            "connected": self.connected,
            "flexible": self.flexible,
        }


def sum_zero_basis(n: int) -> np.ndarray:
    """Orthonormal basis of ``{x : sum(x) = 0}`` as columns."""
    return scipy.linalg.null_space(np.ones((1, n)))


def concavity_report(state: CuspState, kernel_tol: float = 1e-9) -> ConcavityReport:
    H = hessian(state).dense()
    n = H.shape[0]
    if n > 1:
        Q = sum_zero_basis(n)
        restricted = np.linalg.eigvalsh(Q.T @ H @ Q)
    else:
        restricted = np.zeros(0)
    full = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.abs(full).max()))
    kdim = int(np.sum(np.abs(full) <= kernel_tol * scale))
    comps = dual_tesselation(state).components
    return ConcavityReport(
        restricted_eigenvalues=restricted,
        max_restricted_eigenvalue=float(restricted.max()) if restricted.size else -math.inf,
        kernel_dimension=kdim,
        components=comps,
        connected=comps == 1,
        flexible=kdim > 1,
    )
