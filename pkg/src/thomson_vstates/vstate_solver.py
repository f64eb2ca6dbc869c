"""Newton continuation in ``eps`` for rotating patch configurations.

Unknowns are the shape coefficients ``a_1..a_M``; the residual is the
vector of sine coefficients ``f_2..f_{M+1}`` of the contour functional after
the rotation-speed closure, matching the ``a_n -> sin((n+1) theta)`` pairing
of the linearization.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence, TextIO

import numpy as np

from .euler_patch import PatchOverlapError, disjointness_radius, evaluate_euler
from .harmonic_core import (
    CircleGrid,
    FloatArray,
    FourierShape,
    PolygonModel,
    make_grid,
)
from .sqg_patch import Quadrature, TaylorRadiusError, evaluate_sqg

__all__ = [
    "SolverSettings",
    "VState",
    "ContinuationRun",
    "ValidationReport",
    "NewtonDivergence",
    "ContinuationError",
    "default_settings",
    "assemble_residual",
    "jacobian_fd",
    "newton_solve",
    "continuation",
    "validate_vstate",
    "patch_contours",
    "vstate_to_json",
    "vstate_from_json",
    "write_contours_csv",
    "max_epsilon",
]

log = logging.getLogger(__name__)


class NewtonDivergence(RuntimeError):
    def __init__(self, message: str, history: Sequence[float]):
        super().__init__(f"{message}; residual history {[f'{r:.3e}' for r in history]}")
        self.history = list(history)


class ContinuationError(RuntimeError):
    """The first continuation step failed: grid or model is misconfigured."""


@dataclass(frozen=True)
class SolverSettings:
    M: int
    M_nodes: int
    tol: float
    validation_tol: float
    max_iter: int = 30
    sigma: float = 0.5
    quadrature: Quadrature = "spectral"
    workers: int = 1

    @property
    def grid(self) -> CircleGrid:
        return make_grid(self.M_nodes)


def default_settings(model: PolygonModel, **overrides) -> SolverSettings:
    if model.kind == "euler":
        base = SolverSettings(M=32, M_nodes=128, tol=1e-10, validation_tol=1e-8)
    else:
        base = SolverSettings(M=24, M_nodes=512, tol=1e-8, validation_tol=1e-6)
    return replace(base, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class VState:
    model: PolygonModel
    epsilon: float
    omega: float
    shape: FourierShape
    projected_residual: float
    pointwise_residual: float
    iterations: int = 0
    history: tuple[float, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    pointwise_residual: float
    omega_drift: float
    M_nodes: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.pointwise_residual < self.tolerance and self.omega_drift < self.tolerance


@dataclass
class ContinuationRun:
    model: PolygonModel
    settings: SolverSettings
    eps_max: float
    steps: int
    states: list[VState] = field(default_factory=list)
    halted: str | None = None

    @property
    def empirical_eps0(self) -> float:
        """Largest ``eps`` reached; equals ``eps_max`` for a complete run."""
        return self.states[-1].epsilon if self.states else 0.0

    @property
    def complete(self) -> bool:
        return self.halted is None and len(self.states) == self.steps


# ---------------------------------------------------------------------------
# residual and Jacobian
# ---------------------------------------------------------------------------

def _evaluate(a: FloatArray, eps: float, model: PolygonModel, grid: CircleGrid, settings: SolverSettings):
    f = FourierShape(a)
    if model.kind == "euler":
        return evaluate_euler(eps, f, model, grid, sigma=settings.sigma)
    return evaluate_sqg(eps, f, model, grid, sigma=settings.sigma, quadrature=settings.quadrature)


def assemble_residual(
    a: FloatArray,
    eps: float,
    model: PolygonModel,
    grid: CircleGrid,
    settings: SolverSettings | None = None,
) -> FloatArray:
    """Sine coefficients ``f_2..f_{M+1}`` of the closed functional at shape ``a``."""
    settings = settings or default_settings(model, M_nodes=grid.M_nodes)
    a = np.asarray(a, dtype=np.float64)
    M = a.size
    if M > grid.max_modes:
        raise ValueError(f"M = {M} exceeds {grid.max_modes} for {grid.M_nodes} nodes")
    ev = _evaluate(a, eps, model, grid, settings)
    return ev.sin_coeffs[1 : M + 1].copy()


def jacobian_fd(
    a: FloatArray,
    eps: float,
    model: PolygonModel,
    grid: CircleGrid,
    settings: SolverSettings | None = None,
) -> FloatArray:
    """Central-difference Jacobian, step ``max(1e-6, 1e-6 |a_j|)`` per column."""
    settings = settings or default_settings(model, M_nodes=grid.M_nodes)
    a = np.asarray(a, dtype=np.float64)
    M = a.size

    def column(j: int) -> FloatArray:
        hj = max(1e-6, 1e-6 * abs(a[j]))
        ap = a.copy()
        am = a.copy()
        ap[j] += hj
        am[j] -= hj
        rp = assemble_residual(ap, eps, model, grid, settings)
        rm = assemble_residual(am, eps, model, grid, settings)
        return (rp - rm) / (2.0 * hj)

    if settings.workers > 1:
        with ThreadPoolExecutor(settings.workers) as pool:
            cols = list(pool.map(column, range(M)))
    else:
        cols = [column(j) for j in range(M)]
    J = np.column_stack(cols)
    if not np.all(np.isfinite(J)):
        raise FloatingPointError("non-finite Jacobian entries")
    return J


# ---------------------------------------------------------------------------
# Newton
# ---------------------------------------------------------------------------

def max_epsilon(model: PolygonModel) -> float:
    """Disjointness radius for circular patches around the polygon."""
    return disjointness_radius(model, make_grid(64))


_EVAL_ERRORS = (PatchOverlapError, TaylorRadiusError, ValueError, ArithmeticError)


def newton_solve(
    eps: float,
    model: PolygonModel,
    init: FourierShape | None = None,
    settings: SolverSettings | None = None,
    jacobian: FloatArray | None = None,
    refresh_ratio: float = 0.25,
) -> tuple[VState, FloatArray]:
    """Solve the projected equations at fixed ``eps``.

    Uses a Jacobian that is rebuilt only when the residual contraction ratio
    exceeds ``refresh_ratio``; a supplied ``jacobian`` seeds the iteration.
    Returns the state and the last Jacobian for reuse.
    """
    settings = settings or default_settings(model)
    eps = float(eps)
    if eps < 0 or eps >= max_epsilon(model):
        raise ValueError(f"eps = {eps} outside the patch-disjointness range [0, {max_epsilon(model):.4g})")
    grid = settings.grid
    M = settings.M
    a = np.zeros(M)
    if init is not None:
        k = min(M, init.M)
        a[:k] = init.a[:k]
    FourierShape(a).check_admissible(settings.sigma)

    r = assemble_residual(a, eps, model, grid, settings)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    J = jacobian
    fresh = False
    it = 0
    while norm >= settings.tol:
        if it >= settings.max_iter:
            raise NewtonDivergence(f"no convergence in {settings.max_iter} iterations at eps = {eps}", history)
        if J is None:
            J = jacobian_fd(a, eps, model, grid, settings)
            fresh = True
        da = np.linalg.solve(J, -r)
        lam = 1.0
        while True:
            cand = a + lam * da
            try:
                FourierShape(cand).check_admissible(settings.sigma)
                r_new = assemble_residual(cand, eps, model, grid, settings)
                norm_new = float(np.max(np.abs(r_new)))
            except _EVAL_ERRORS:
                norm_new = math.inf
            if norm_new < norm:
                break
            if not fresh:
                # stale Jacobian: rebuild before shortening the step
                J = None
                break
            lam *= 0.5
            if lam < 2.0**-10:
                raise NewtonDivergence(f"step halving failed at eps = {eps}", history)
        if J is None:
            continue
        ratio = norm_new / norm
        log.debug("eps=%.6g it=%d |r|=%.3e ratio=%.3e lam=%g", eps, it + 1, norm_new, ratio, lam)
        a, r, norm = cand, r_new, norm_new
        history.append(norm)
        it += 1
        if ratio > refresh_ratio and norm >= settings.tol:
            J = None
        fresh = False
    log.info("eps=%.6g converged in %d iterations, |r|=%.3e", eps, it, norm)
    f = FourierShape(a)
    ev = _evaluate(a, eps, model, grid, settings)
    if J is None:
        J = jacobian_fd(a, eps, model, grid, settings)
    state = VState(
        model=model,
        epsilon=eps,
        omega=ev.omega,
        shape=f,
        projected_residual=norm,
        pointwise_residual=float(np.max(np.abs(ev.F_samples))),
        iterations=it,
        history=tuple(history),
    )
    return state, J


def continuation(
    model: PolygonModel,
    eps_max: float,
    steps: int,
    settings: SolverSettings | None = None,
) -> ContinuationRun:
    """Uniform sweep ``eps_k = k eps_max / steps``, each solve warm-started."""
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be an integer >= 1")
    settings = settings or default_settings(model)
    run = ContinuationRun(model, settings, float(eps_max), int(steps))
    shape: FourierShape | None = None
    J = None
    for k in range(1, int(steps) + 1):
        eps = eps_max * k / steps
        try:
            state, J = newton_solve(eps, model, shape, settings, jacobian=J)
        except (NewtonDivergence, *_EVAL_ERRORS) as exc:
            if k == 1:
                raise ContinuationError(f"first continuation step failed: {exc}") from exc
            run.halted = f"eps = {eps:.6g}: {exc}"
            log.warning("continuation halted at %s", run.halted)
            break
        run.states.append(state)
        shape = state.shape
    return run


# ---------------------------------------------------------------------------
# validation and export
# ---------------------------------------------------------------------------

def validate_vstate(v: VState, fine_grid: CircleGrid | int | None = None, settings: SolverSettings | None = None) -> ValidationReport:
    """Max ``|F|`` over a fine grid and the drift of the closure speed."""
    settings = settings or default_settings(v.model)
    if fine_grid is None:
        fine_grid = 4 * settings.M_nodes
    if isinstance(fine_grid, int):
        fine_grid = make_grid(fine_grid)
    a = np.asarray(v.shape.a)
    try:
        ev = _evaluate(a, v.epsilon, v.model, fine_grid, settings)
        res = float(np.max(np.abs(ev.F_samples)))
        drift = abs(ev.omega - v.omega)
    except _EVAL_ERRORS:
        res, drift = math.inf, math.inf
    return ValidationReport(res, drift, fine_grid.M_nodes, settings.validation_tol)


def patch_contours(v: VState, samples_per_patch: int = 256) -> list[np.ndarray]:
    """Closed, positively oriented boundary polylines of all ``N`` patches."""
    m = v.model
    th = 2.0 * math.pi * np.arange(samples_per_patch) / samples_per_patch
    w = np.cos(th) + 1j * np.sin(th)
    eps = v.epsilon
    s = eps ** m.scaling_power
    z0 = m.l + eps * (w + s * v.shape.value(w))
    out = []
    for k in range(m.N):
        ang = 2.0 * math.pi * k / m.N
        zk = complex(math.cos(ang), math.sin(ang)) * z0 if k else z0
        out.append(np.concatenate([zk, zk[:1]]))
    return out


def write_contours_csv(contours: Sequence[np.ndarray], stream: TextIO) -> None:
    stream.write("patch_index,Re,Im\n")
    for k, c in enumerate(contours):
        for z in c:
            stream.write(f"{k},{z.real:.17g},{z.imag:.17g}\n")


def vstate_to_json(v: VState) -> str:
    doc: dict = {"kind": v.model.kind}
    if v.model.kind == "sqg":
        doc["beta"] = v.model.beta
        doc["cbeta"] = v.model.cbeta
    doc.update(
        N=v.model.N,
        l=v.model.l,
        epsilon=v.epsilon,
        omega=v.omega,
        coefficients=[float(x) for x in v.shape.a],
        projected_residual=v.projected_residual,
        pointwise_residual=v.pointwise_residual,
    )
    return json.dumps(doc, indent=2) + "\n"


def vstate_from_json(text: str) -> VState:
    d = json.loads(text)
    model = PolygonModel(d["N"], d["l"], d["kind"], d.get("beta"), d.get("cbeta", "printed"))
    return VState(
        model=model,
        epsilon=float(d["epsilon"]),
        omega=float(d["omega"]),
        shape=FourierShape(np.asarray(d["coefficients"], dtype=np.float64)),
        projected_residual=float(d["projected_residual"]),
        pointwise_residual=float(d["pointwise_residual"]),
    )
