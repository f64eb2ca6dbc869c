"""Contour-dynamics functional for N rotating Euler vortex patches.

Patch 0 is ``l + Phi(T)`` with ``Phi(w) = eps (w + eps f(w))`` and the other
patches are its rotations by ``2 pi m / N``.  With vorticity ``1/(pi eps^2)``
on each patch the velocity on patch 0 is

    v0(Phi(w) + l) = i w / (2 pi eps) + conj(J(eps, f)(w)),

and the patches rotate rigidly at speed ``Omega`` iff

    F(Omega, eps, f)(w) = Re[-(i/2pi) f'(w)
        + {J + i Omega eps (conj(w) + eps f(conj(w))) + i Omega l} w (1 + eps f'(w))]

vanishes on the unit circle.  Argument order is always ``(Omega, eps, f)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .harmonic_core import (
    CircleGrid,
    ComplexArray,
    FloatArray,
    FourierShape,
    PolygonModel,
    project_sin,
    quad_circle,
)
from .point_vortex import omega0

__all__ = [
    "PatchOverlapError",
    "ClosureDegenerateError",
    "EulerEvaluation",
    "FTilde",
    "j_euler",
    "omega_closure_euler",
    "f_euler",
    "f_tilde_euler",
    "evaluate_euler",
    "velocity_direct_euler",
    "overlap_margin",
    "patches_overlap",
    "disjointness_radius",
    "DEFAULT_SIGMA",
]

DEFAULT_SIGMA = 0.5
_ROW_BLOCK = 256


class PatchOverlapError(ValueError):
    """Patches touch or overlap: an inter-patch denominator nearly vanishes."""


class ClosureDegenerateError(ArithmeticError):
    """The denominator of the rotation-speed closure vanishes."""


@dataclass(frozen=True)
class EulerEvaluation:
    J_samples: ComplexArray
    F_samples: FloatArray
    omega: float
    sin_coeffs: FloatArray  # index 0 holds f_1


class FTilde(NamedTuple):
    coeffs: FloatArray  # f_n for n >= 2; index 0 holds f_2
    f1: float
    omega: float


def _require_euler(model: PolygonModel) -> None:
    if model.kind != "euler":
        raise ValueError("euler_patch functions need an Euler PolygonModel")


def _check_shape(f: FourierShape, grid: CircleGrid, sigma: float) -> None:
    if f.M > grid.max_modes:
        raise ValueError(
            f"shape has {f.M} modes but grid of {grid.M_nodes} nodes resolves at most {grid.max_modes}"
        )
    f.check_admissible(sigma)


def _inter_patch_denominators(eps, fw, fx, w, xi, model, e):
    # eps e (xi + eps f(xi)) - eps (w + eps f(w)) + (e - 1) l
    return (
        eps * e * (xi[None, :] + eps * fx[None, :])
        - eps * (w[:, None] + eps * fw[:, None])
        + (e - 1.0) * model.l
    )


def patches_overlap(
    eps: float, f: FourierShape, model: PolygonModel, grid: CircleGrid
) -> bool:
    """True if a boundary node of some patch lies inside patch 0 (winding number)."""
    w = grid.w
    s = eps ** model.scaling_power if eps >= 0 else -(abs(eps) ** model.scaling_power)
    b0 = model.l + eps * (w + s * f.value(w))
    b1 = np.roll(b0, -1)
    for e in model.roots:
        x = e * b0
        turn = np.angle((b1[None, :] - x[:, None]) / (b0[None, :] - x[:, None]))
        if np.any(np.abs(turn.sum(axis=1)) > math.pi):
            return True
    return False


def j_euler(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    sigma: float = DEFAULT_SIGMA,
) -> ComplexArray:
    """``J(eps, f)`` sampled at the evaluation nodes ``grid.w``."""
    _require_euler(model)
    _check_shape(f, grid, sigma)
    eps = float(eps)
    w, xi = grid.w, grid.xi
    fw, fx, fpx = f.value(w), f.value(xi), f.derivative(xi)
    dxi = grid.h * 1j * xi
    tol = 1e-8 * abs(model.l)
    if patches_overlap(eps, f, model, grid):
        raise PatchOverlapError(f"patch overlap: patches intersect at eps = {eps}")
    out = np.empty(grid.M_nodes, dtype=np.complex128)
    for j0 in range(0, grid.M_nodes, _ROW_BLOCK):
        sl = slice(j0, min(j0 + _ROW_BLOCK, grid.M_nodes))
        W = w[sl, None]
        dwx = W - xi[None, :]
        df = fw[sl, None] - fx[None, :]
        den = dwx + eps * df
        # f has real coefficients, so f(conj z) = conj f(z)
        k1 = np.conj(den) / den * fpx[None, :]
        k2 = (dwx * np.conj(df) - np.conj(dwx) * df) / (dwx * den)
        k = k1 + k2
        num3 = (np.conj(xi) + eps * np.conj(fx)) * (1.0 + eps * fpx)
        for e in model.roots:
            d3 = _inter_patch_denominators(eps, fw[sl], fx, w[sl], xi, model, e)
            amin = np.min(np.abs(d3))
            if amin < tol:
                jj, kk = np.unravel_index(np.argmin(np.abs(d3)), d3.shape)
                raise PatchOverlapError(
                    f"patch overlap: inter-patch denominator {amin:.2e} at node pair "
                    f"({j0 + jj}, {kk}) for eps = {eps}"
                )
            k = k + num3[None, :] / d3
        out[sl] = k @ dxi
    return out / (4.0 * math.pi**2)


def omega_closure_euler(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    J: ComplexArray | None = None,
    sigma: float = DEFAULT_SIGMA,
) -> float:
    """Rotation speed that annihilates the ``sin(theta)`` mode of ``F``."""
    _require_euler(model)
    if J is None:
        J = j_euler(eps, f, model, grid, sigma)
    w = grid.w
    wc = np.conj(w)
    dphi = 1.0 + eps * f.derivative(w)
    num = 1j * quad_circle(J * (w - wc) * dphi, w)
    den = quad_circle(dphi * (w - wc) * (model.l + eps * wc + eps**2 * f.value(wc)), w)
    if abs(den) < 1e-12 * abs(model.l):
        raise ClosureDegenerateError(f"closure denominator {abs(den):.2e} vanishes")
    om = num / den
    scale = max(abs(omega0(model)), abs(om.real))
    if abs(om.imag) > 1e-10 * scale:
        raise ArithmeticError(f"closure speed not real: Im = {om.imag:.3e}")
    return float(om.real)


def f_euler(
    omega: float,
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    J: ComplexArray | None = None,
    sigma: float = DEFAULT_SIGMA,
) -> FloatArray:
    """Residual ``F(Omega, eps, f)`` at the evaluation nodes."""
    _require_euler(model)
    if J is None:
        J = j_euler(eps, f, model, grid, sigma)
    w = grid.w
    wc = np.conj(w)
    fp = f.derivative(w)
    brace = J + 1j * omega * eps * (wc + eps * f.value(wc)) + 1j * omega * model.l
    return np.real(-1j / (2.0 * math.pi) * fp + brace * w * (1.0 + eps * fp))


def evaluate_euler(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    omega: float | None = None,
    sigma: float = DEFAULT_SIGMA,
) -> EulerEvaluation:
    """Sample ``J`` and ``F``; ``omega=None`` uses the closure speed."""
    J = j_euler(eps, f, model, grid, sigma)
    if omega is None:
        omega = omega_closure_euler(eps, f, model, grid, J=J)
    F = f_euler(omega, eps, f, model, grid, J=J)
    return EulerEvaluation(J, F, float(omega), project_sin(F))


def f_tilde_euler(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    sigma: float = DEFAULT_SIGMA,
) -> FTilde:
    """Sine coefficients ``f_n, n >= 2`` of ``F(Omega(eps, f), eps, f)``.

    The leftover ``f_1`` is returned as a closure diagnostic.
    """
    ev = evaluate_euler(eps, f, model, grid, sigma=sigma)
    return FTilde(ev.sin_coeffs[1:], float(ev.sin_coeffs[0]), ev.omega)


def velocity_direct_euler(
    eps: float, f: FourierShape, model: PolygonModel, grid: CircleGrid
) -> ComplexArray:
    """Velocity on patch 0 from the boundary integral, without residue reductions.

    ``v0(x) = (1/(4 pi^2 eps^2)) sum_m conj(oint_{dD_m} conj(x - y)/(x - y) dy)``
    evaluated at ``x = l + Phi(w_j)``.  Used as an independent check of ``J``.
    """
    _require_euler(model)
    w, xi = grid.w, grid.xi
    x = model.l + eps * (w + eps * f.value(w))
    y0 = model.l + eps * (xi + eps * f.value(xi))
    dy0 = eps * (1.0 + eps * f.derivative(xi)) * grid.h * 1j * xi
    total = np.zeros(grid.M_nodes, dtype=np.complex128)
    rots = np.concatenate([[1.0 + 0j], model.roots])
    for e in rots:
        y = e * y0
        d = x[:, None] - y[None, :]
        total += (np.conj(d) / d) @ (e * dy0)
    return np.conj(total) / (4.0 * math.pi**2 * eps**2)


def overlap_margin(eps: float, f: FourierShape, model: PolygonModel, grid: CircleGrid) -> float:
    """``min |inter-patch denominator|`` over nodes and rotations."""
    w, xi = grid.w, grid.xi
    fw, fx = f.value(w), f.value(xi)
    return float(
        min(np.min(np.abs(_inter_patch_denominators(eps, fw, fx, w, xi, model, e))) for e in model.roots)
    )


def disjointness_radius(
    model: PolygonModel,
    grid: CircleGrid,
    f: FourierShape | None = None,
    fraction: float = 0.1,
) -> float:
    """Largest ``eps`` keeping every inter-patch denominator above
    ``fraction * |l| * |1 - exp(2 pi i / N)|`` (bisection)."""
    f = f if f is not None else FourierShape.zeros(1)
    floor = fraction * abs(model.l) * abs(1.0 - model.roots[0])
    lo, hi = 0.0, 2.0 * abs(model.l)
    while overlap_margin(hi, f, model, grid) > floor:
        hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if overlap_margin(mid, f, model, grid) > floor:
            lo = mid
        else:
            hi = mid
    return lo
