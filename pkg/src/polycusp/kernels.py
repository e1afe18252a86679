"""Backend selection for the per-corner kernels.

The compiled extension ``polycusp._kernels`` is used when it was built;
otherwise the numpy implementation in ``polycusp._kernels_py`` is used.
Both expose ``corner_geometry`` and ``side_weights`` with identical
contracts (see ``_kernels_py`` for the array conventions).
"""

from __future__ import annotations

import numpy as np

from . import _kernels_py
from .errors import GeometryError

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_active = _compiled if _compiled is not None else _kernels_py


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def backend_name() -> str:
    return _active.NAME


def use_backend(name: str) -> None:
    """Switch the process-wide backend (``"cython"`` or ``"python"``)."""
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None


def corner_geometry(h, tri_vertex, side_alpha, gamma):
    """Per-corner foot heights, edge-foot heights and link angles.

    Returns ``(foot_next, foot_prev, edge_foot, omega)``; raises
    :class:`GeometryError` on non-finite intermediates.
    """
    fn, fp, ef, om, status = _active.corner_geometry(
        np.ascontiguousarray(h, dtype=np.float64),
        np.ascontiguousarray(tri_vertex, dtype=np.int64),
        np.ascontiguousarray(side_alpha, dtype=np.float64),
        np.ascontiguousarray(gamma, dtype=np.float64),
    )
    if status == _kernels_py.STATUS_NONFINITE:
        raise GeometryError("non-finite corner quantity (height gap too large?)")
    if status == _kernels_py.STATUS_BAD_COSINE:
        raise GeometryError("link angle cosine outside [-1, 1]: corrupted corner")
    return fn, fp, ef, om


def side_weights(side_alpha, foot_next, foot_prev, edge_foot):
    return _active.side_weights(
        np.ascontiguousarray(side_alpha, dtype=np.float64),
        np.ascontiguousarray(foot_next, dtype=np.float64),
        np.ascontiguousarray(foot_prev, dtype=np.float64),
        np.ascontiguousarray(edge_foot, dtype=np.float64),
    )
