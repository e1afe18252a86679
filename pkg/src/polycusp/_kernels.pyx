# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-corner kernels; same contract as ``_kernels_py``."""

import numpy as np
from libc.math cimport sin, cos, exp, cosh, tanh, asinh, atan, sqrt, isfinite, fabs

NAME = "cython"

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_BAD_COSINE = 2


def corner_geometry(const double[::1] h, const long[:, ::1] tri_vertex,
                    const double[:, ::1] side_alpha, const double[:, ::1] gamma):
    cdef Py_ssize_t F = tri_vertex.shape[0]
    fn_arr = np.empty((F, 3))
    fp_arr = np.empty((F, 3))
    ef_arr = np.empty((F, 3))
    om_arr = np.empty((F, 3))
    cdef double[:, ::1] fn = fn_arr
    cdef double[:, ::1] fp = fp_arr
    cdef double[:, ::1] ef = ef_arr
    cdef double[:, ::1] om = om_arr
    cdef Py_ssize_t t
    cdef int c, cp
    cdef double ex, sa, ca, qn, qp, x, y, sg, cg, chn, chp, cq, num, den, e
    # q_fwd[c]: sinh of the foot from corner c towards c+1; q_bwd[c]: from c+1 towards c
    cdef double q_fwd[3]
    cdef double q_bwd[3]
    cdef int status = STATUS_OK
    for t in range(F):
        for c in range(3):
            ex = exp(h[tri_vertex[t, (c + 1) % 3]] - h[tri_vertex[t, c]])
            sa = sin(side_alpha[t, c])
            ca = cos(side_alpha[t, c])
            q_fwd[c] = (ex - ca) / sa
            q_bwd[c] = (1.0 / ex - ca) / sa
        for c in range(3):
            cp = (c + 2) % 3
            qn = q_fwd[c]
            qp = q_bwd[cp]
            x = asinh(qn)
            y = asinh(qp)
            chn = sqrt(1.0 + qn * qn)
            chp = sqrt(1.0 + qp * qp)
            sg = sin(gamma[t, c])
            cg = cos(gamma[t, c])
            fn[t, c] = x
            fp[t, c] = y
            e = asinh((-cg * qn + qp) / (sg * chn))
            ef[t, c] = e
            num = cosh(x - y) - cg
            den = cosh(x + y) + cg
            om[t, c] = 2.0 * atan(sqrt(num / den))
            if not (isfinite(x) and isfinite(y) and isfinite(e) and isfinite(om[t, c])):
                status = STATUS_NONFINITE
            elif status == STATUS_OK:
                cq = (qn * qp + cg) / (chn * chp)
                if fabs(cq) > 1.0 + 1e-9:
                    status = STATUS_BAD_COSINE
    return fn_arr, fp_arr, ef_arr, om_arr, status


def side_weights(const double[:, ::1] side_alpha, const double[:, ::1] foot_next,
                 const double[:, ::1] foot_prev, const double[:, ::1] edge_foot):
    cdef Py_ssize_t F = side_alpha.shape[0]
    w_arr = np.empty((F, 3))
    cdef double[:, ::1] w = w_arr
    cdef Py_ssize_t t
    cdef int c
    for t in range(F):
        for c in range(3):
            w[t, c] = tanh(edge_foot[t, c]) / (
                sin(side_alpha[t, c]) * cosh(foot_next[t, c]) * cosh(foot_prev[t, (c + 1) % 3])
            )
    return w_arr
