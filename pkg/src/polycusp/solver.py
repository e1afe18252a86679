"""Drive the curvatures to a target: damped Newton ascent and Ricci flow.

Both methods keep the state convex by running :func:`make_convex` after
every trial step.  A trial step that cannot be repaired is rejected and
shortened; when no step survives the solve stops with ``domain_error``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cusp import (
    CuspState,
    DualTesselation,
    build_state,
    curvatures,
    dihedral_angles,
    dual_tesselation,
    make_convex,
)
from .errors import DomainError, GeometryError
from .functional import hessian
from .surface import SphericalConeTorus, Triangulation

log = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITER = "max_iter"
DOMAIN_ERROR = "domain_error"


@dataclass
class SolveOptions:
    """Solver settings.

    Parameters
    ----------
    method : {"newton", "flow"}
    tol_kappa : float
        Stop once ``max |kappa - target| <= tol_kappa``.
    max_iterations : int, optional
        Defaults to 100 for Newton and 100000 for the flow.
    flow_step : float
        Initial Euler step of the flow.
    target_curvatures : array_like, optional
        Prescribed curvatures; must sum to zero.  Default all zero.
    trust_radius : float
        Cap on ``max |dh|`` of a single Newton step.
    min_step : float
        Smallest backtracking fraction tried before giving up.
    tikhonov : float
        Regularization used when the reduced Newton system is singular.
    """

    method: str = "newton"
    tol_kappa: float = 1e-10
    max_iterations: Optional[int] = None
    flow_step: float = 0.1
    target_curvatures: Optional[np.ndarray] = None
    trust_radius: float = 5.0
    min_step: float = 2.0**-20
    tikhonov: float = 1e-12

    def __post_init__(self):
        if self.method not in ("newton", "flow"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.tol_kappa > 0:
            raise ValueError("tol_kappa must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.flow_step > 0:
            raise ValueError("flow_step must be positive")
        if self.target_curvatures is not None:
            t = np.asarray(self.target_curvatures, dtype=float).reshape(-1)
            if abs(t.sum()) > 1e-12 * max(1.0, np.abs(t).sum()):
                raise ValueError(f"target curvatures must sum to 0 (sum = {t.sum():.3e})")
            self.target_curvatures = t

    @property
    def iteration_budget(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 100 if self.method == "newton" else 100_000

    def target(self, n: int) -> np.ndarray:
        if self.target_curvatures is None:
            return np.zeros(n)
        if self.target_curvatures.shape != (n,):
            raise ValueError(f"need {n} target curvatures, got {self.target_curvatures.shape[0]}")
        return self.target_curvatures


@dataclass
class SolveResult:
    heights: np.ndarray
    curvatures: np.ndarray
    residual: float
    iterations: int
    flips: int
    status: str
    state: Optional[CuspState] = field(default=None, repr=False)
    dual: Optional[DualTesselation] = field(default=None, repr=False)
    dihedral: dict = field(default_factory=dict, repr=False)
    history: list = field(default_factory=list, repr=False)
    flexible: bool = False
    message: str = ""
    #: mean of the raw heights, removed by the final gauge fix
    gauge_shift: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def gauge_fix(h) -> np.ndarray:
    """Shift ``h`` so that it sums to zero."""
    h = np.asarray(h, dtype=float)
    return h - h.mean()


def _residual(state: CuspState, target: np.ndarray) -> np.ndarray:
    return curvatures(state) - target


def _repair(state: CuspState, h) -> CuspState:
    """Convex state at heights ``h`` reached from the current triangulation."""
    return make_convex(CuspState(state.surface, state.tri.copy(), h))


def _finish(state, target, iterations, flips, status, history, flexible=False, message=""):
    if state is None:
        return SolveResult(
            np.array([]), np.array([]), math.inf, iterations, flips, status,
            history=history, message=message,
        )
    fixed = CuspState(state.surface, state.tri.copy(), gauge_fix(state.h))
    k = curvatures(fixed)
    return SolveResult(
        heights=fixed.h,
        curvatures=k,
        residual=float(np.abs(k - target).max()),
        iterations=iterations,
        flips=flips,
        status=status,
        state=fixed,
        dual=dual_tesselation(fixed),
        dihedral=dihedral_angles(fixed),
        history=history,
        flexible=flexible,
        message=message,
        gauge_shift=float(np.mean(state.h)),
    )


def _start(surface, T0, h0):
    state = build_state(surface, T0, h0)
    return make_convex(state)


def newton_step(state: CuspState, r: np.ndarray, tikhonov: float = 1e-12):
    """Newton direction on ``{sum(x) = 0}`` and whether regularization was needed."""
    H = hessian(state).dense()
    n = H.shape[0]
    A = H - np.ones((n, n)) / n
    singular = np.linalg.cond(A) > 1.0 / tikhonov
    if singular:
        step = np.linalg.solve(A.T @ A + tikhonov * np.eye(n), -A.T @ r)
    else:
        step = np.linalg.solve(A, -r)
    return step - step.mean(), singular


def newton_solve(
    surface: SphericalConeTorus,
    T0: Optional[Triangulation] = None,
    h0=None,
    options: Optional[SolveOptions] = None,
) -> SolveResult:
    """Damped Newton iteration for ``kappa(h) = target``."""
    opts = options or SolveOptions()
    target = opts.target(surface.n_vertices)
    history: list[float] = []
    try:
        state = _start(surface, T0, h0)
    except (DomainError, GeometryError) as exc:
        return _finish(None, target, 0, 0, DOMAIN_ERROR, history, message=str(exc))
    flips = state.flips
    flexible = False
    r = _residual(state, target)
    res = float(np.abs(r).max())
    history.append(res)
    for it in range(opts.iteration_budget + 1):
        if res <= opts.tol_kappa:
            return _finish(state, target, it, flips, CONVERGED, history, flexible)
        if it == opts.iteration_budget:
            break
        step, singular = newton_step(state, r, opts.tikhonov)
        flexible = flexible or singular
        big = np.abs(step).max()
        if big > opts.trust_radius:
            step *= opts.trust_radius / big
        t = 1.0
        while t >= opts.min_step:
            try:
                trial = _repair(state, state.h + t * step)
            except (DomainError, GeometryError):
                t *= 0.5
                continue
            r_trial = _residual(trial, target)
            res_trial = float(np.abs(r_trial).max())
            if res_trial < res:
                break
            t *= 0.5
        else:
            log.info("newton: no acceptable step at iteration %d (residual %.3e)", it, res)
            return _finish(
                state, target, it, flips, DOMAIN_ERROR, history, flexible,
                message="no acceptable step: hypotheses on the surface are likely violated",
            )
        state, r, res = trial, r_trial, res_trial
        flips += trial.flips
        history.append(res)
        log.debug("newton %d: t=%g residual=%.3e", it, t, res)
    return _finish(state, target, opts.iteration_budget, flips, MAX_ITER, history, flexible)


def ricci_flow_solve(
    surface: SphericalConeTorus,
    T0: Optional[Triangulation] = None,
    h0=None,
    options: Optional[SolveOptions] = None,
) -> SolveResult:
    """Explicit Euler integration of ``dh/dt = kappa - target``.

    A step is halved when the repaired state cannot be built or when the
    Euclidean residual would grow.
    """
    opts = options or SolveOptions(method="flow")
    target = opts.target(surface.n_vertices)
    history: list[float] = []
    try:
        state = _start(surface, T0, h0)
    except (DomainError, GeometryError) as exc:
        return _finish(None, target, 0, 0, DOMAIN_ERROR, history, message=str(exc))
    flips = state.flips
    r = _residual(state, target)
    res2 = float(np.linalg.norm(r))
    history.append(res2)
    for it in range(opts.iteration_budget + 1):
        if np.abs(r).max() <= opts.tol_kappa:
            return _finish(state, target, it, flips, CONVERGED, history)
        if it == opts.iteration_budget:
            break
        dt = opts.flow_step
        while dt >= opts.flow_step * opts.min_step:
            try:
                trial = _repair(state, state.h + dt * r)
            except (DomainError, GeometryError):
                dt *= 0.5
                continue
            r_trial = _residual(trial, target)
            if np.linalg.norm(r_trial) < res2:
                break
            dt *= 0.5
        else:
            return _finish(
                state, target, it, flips, DOMAIN_ERROR, history,
                message="flow step could not be repaired",
            )
        state, r = trial, r_trial
        res2 = float(np.linalg.norm(r))
        flips += trial.flips
        history.append(res2)
    return _finish(state, target, opts.iteration_budget, flips, MAX_ITER, history)


def solve(surface, T0=None, h0=None, options: Optional[SolveOptions] = None) -> SolveResult:
    """Dispatch on ``options.method``."""
    opts = options or SolveOptions()
    if opts.method == "flow":
        return ricci_flow_solve(surface, T0, h0, opts)
    return newton_solve(surface, T0, h0, opts)
