"""Contour-dynamics functional for N rotating (SQG)_beta patches.

Patch 0 is ``l + Phi(T)`` with ``Phi(w) = eps (w + s f(w))``, ``s = eps^(1+beta)``.
After subtracting the leading self-induced term the velocity on patch 0 is

    v0(Phi(w) + l) = (C_beta / (pi eps^(1+beta))) oint |w - xi|^-beta dxi + J,

with ``J = J1 + J2 + J3 + J4``:

* ``J1``  self term, Taylor remainder of ``|w - xi + s (f(w) - f(xi))|^-beta``
* ``J2``  self term carrying ``f'(xi)``
* ``J3``  other patches, Taylor remainder about the point-vortex positions
* ``J4``  other patches, ``f'(xi)`` part

The rigid-rotation residual is

    F = Re[{conj(J) + i Omega (conj(Phi(w)) + l)} w (1 + s f'(w))] + mu_beta Im f'(w).

The weakly singular self integrals use one of three rules on the offset nodes:
``"spectral"`` (product integration against the exact kernel Fourier series,
default), ``"subtract"`` (singularity subtraction, second order) and
``"plain"`` (trapezoid, first order, for comparison only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, NamedTuple

import numpy as np

from .euler_patch import ClosureDegenerateError, FTilde, PatchOverlapError, patches_overlap
from .harmonic_core import (
    CircleGrid,
    ComplexArray,
    FloatArray,
    FourierShape,
    PolygonModel,
    c_beta,
    kernel_fourier_coeffs,
    mu_beta,
    product_weights,
    project_sin,
    quad_circle,
)
from .point_vortex import omega0

__all__ = [
    "TaylorRadiusError",
    "SqgTerms",
    "SqgEvaluation",
    "Quadrature",
    "taylor_split",
    "phi_beta",
    "singular_integral",
    "circle_kernel_constant",
    "j_sqg",
    "omega_closure_sqg",
    "f_sqg",
    "f_tilde_sqg",
    "evaluate_sqg",
    "velocity_direct_sqg",
]

Quadrature = Literal["spectral", "subtract", "plain"]
_ROW_BLOCK = 256


class TaylorRadiusError(ValueError):
    """A Taylor-split increment reaches the expansion point."""


class SqgTerms(NamedTuple):
    J1: ComplexArray
    J2: ComplexArray
    J3: ComplexArray
    J4: ComplexArray

    @property
    def total(self) -> ComplexArray:
        return self.J1 + self.J2 + self.J3 + self.J4


@dataclass(frozen=True)
class SqgEvaluation:
    terms: SqgTerms
    F_samples: FloatArray
    omega: float
    sin_coeffs: FloatArray  # index 0 holds f_1

    @property
    def J_samples(self) -> ComplexArray:
        return self.terms.total


def _require_sqg(model: PolygonModel) -> float:
    if model.kind != "sqg":
        raise ValueError("sqg_patch functions need an SQG PolygonModel")
    return float(model.beta)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (np.isfinite(eps) and eps >= 0.0):
        raise ValueError(f"SQG patches need eps >= 0, got {eps}")
    return eps


# ---------------------------------------------------------------------------
# Taylor split
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _gauss_legendre01(order: int) -> tuple[FloatArray, FloatArray]:
    x, wts = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * wts


def taylor_split(A: ComplexArray, B: ComplexArray, beta: float, order: int = 16) -> ComplexArray:
    """``|A + B|^-beta - |A|^-beta`` as ``-beta int_0^1 (Re[A conj B] + t|B|^2)/|A + tB|^(2+beta) dt``.

    Gauss-Legendre in ``t``; requires ``|B| < |A|`` elementwise.
    """
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    ratio = np.abs(B) / np.abs(A)
    if not np.all(ratio < 1.0):
        raise TaylorRadiusError(f"Taylor split needs |B| < |A|; max ratio {np.max(ratio):.3g}")
    t, wts = _gauss_legendre01(order)
    re = np.real(A * np.conj(B))
    b2 = np.abs(B) ** 2
    out = np.zeros(np.broadcast(A, B).shape)
    for tk, wk in zip(t, wts):
        out = out + wk * (re + tk * b2) / np.abs(A + tk * B) ** (2.0 + beta)
    return -beta * out


def phi_beta(x: FloatArray, beta: float) -> FloatArray:
    """``((1 + x)^(-beta/2) - 1) / x`` with its limit ``-beta/2`` at 0."""
    x = np.asarray(x, dtype=np.float64)
    b = 0.5 * beta
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    full = np.expm1(-b * np.log1p(safe)) / safe
    series = -b + 0.5 * b * (b + 1.0) * x - b * (b + 1.0) * (b + 2.0) / 6.0 * x * x
    return np.where(small, series, full)


# ---------------------------------------------------------------------------
# weakly singular integrals
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _rho(beta: float, M_nodes: int) -> FloatArray:
    r = product_weights(beta, M_nodes)
    r.setflags(write=False)
    return r


def circle_kernel_constant(beta: float) -> float:
    """``kappa`` with ``oint |w - xi|^-beta dxi = i kappa w`` on the unit circle."""
    return 2.0 * math.pi * float(kernel_fourier_coeffs(beta, 1)[1])


def _row_weights(grid: CircleGrid, beta: float, rows: slice, method: Quadrature) -> FloatArray:
    j = np.arange(grid.M_nodes)[rows]
    k = np.arange(grid.M_nodes)
    if method == "spectral":
        return _rho(beta, grid.M_nodes)[(k[None, :] - j[:, None]) % grid.M_nodes]
    r = np.abs(grid.w[rows, None] - grid.xi[None, :]) ** (-beta)
    return grid.h * r


def singular_integral(
    H: ComplexArray,
    H_diag: ComplexArray,
    grid: CircleGrid,
    beta: float,
    method: Quadrature = "spectral",
    rows: slice | None = None,
) -> ComplexArray:
    """``oint |w_j - xi|^-beta H(w_j, xi) dxi`` at the evaluation nodes in ``rows``.

    ``H`` holds samples ``H(w_j, xi_k)`` for the selected rows; ``H_diag`` is
    ``H(w_j, w_j)``, used only by the subtraction rule.
    """
    rows = rows if rows is not None else slice(0, grid.M_nodes)
    R = _row_weights(grid, beta, rows, method)
    dxi = 1j * grid.xi
    if method == "spectral" or method == "plain":
        return (R * H) @ dxi
    if method == "subtract":
        kappa = circle_kernel_constant(beta)
        return (R * (H - H_diag[:, None])) @ dxi + H_diag * 1j * kappa * grid.w[rows]
    raise ValueError(f"unknown quadrature {method!r}")


# ---------------------------------------------------------------------------
# J terms
# ---------------------------------------------------------------------------

def j_sqg(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    sigma: float = 0.5,
    quadrature: Quadrature = "spectral",
    t_rule: Literal["exact", "gauss"] = "exact",
) -> SqgTerms:
    """The four pieces of ``J(eps, f)`` at the evaluation nodes.

    ``t_rule="exact"`` integrates the Taylor remainder in closed form;
    ``"gauss"`` uses :func:`taylor_split` and exists for cross-checking.
    """
    beta = _require_sqg(model)
    eps = _check_eps(eps)
    if f.M > grid.max_modes:
        raise ValueError(
            f"shape has {f.M} modes but grid of {grid.M_nodes} nodes resolves at most {grid.max_modes}"
        )
    f.check_admissible(sigma)
    if patches_overlap(eps, f, model, grid):
        raise PatchOverlapError(f"patch overlap: patches intersect at eps = {eps}")
    cb = c_beta(beta, model.cbeta)
    s = eps ** (1.0 + beta)
    w, xi = grid.w, grid.xi
    fw, fpw = f.value(w), f.derivative(w)
    fx, fpx = f.value(xi), f.derivative(xi)
    Mn = grid.M_nodes
    J1 = np.empty(Mn, dtype=np.complex128)
    J2 = np.empty(Mn, dtype=np.complex128)
    J3 = np.zeros(Mn, dtype=np.complex128)
    J4 = np.zeros(Mn, dtype=np.complex128)

    # diagonal limits of the self-term integrands (D -> f'(w))
    x_d = 2.0 * s * fpw.real + s * s * np.abs(fpw) ** 2
    if np.any(s * np.abs(fpw) >= 1.0):
        raise TaylorRadiusError("s |f'(w)| reaches 1 on the circle")
    H1_d = (2.0 * fpw.real + s * np.abs(fpw) ** 2) * phi_beta(x_d, beta)
    H2_d = fpw * np.abs(1.0 + s * fpw) ** (-beta)

    qx = grid.h * 1j * xi
    lmod = model.l
    for j0 in range(0, Mn, _ROW_BLOCK):
        rows = slice(j0, min(j0 + _ROW_BLOCK, Mn))
        W = w[rows, None]
        D = (fw[rows, None] - fx[None, :]) / (W - xi[None, :])
        sD = s * np.abs(D)
        if np.any(sD >= 1.0):
            jj, kk = np.unravel_index(np.argmax(sD), sD.shape)
            raise TaylorRadiusError(
                f"self-term Taylor split outside its radius at node pair ({j0 + jj}, {kk})"
            )
        if t_rule == "exact":
            x = 2.0 * s * D.real + s * s * np.abs(D) ** 2
            H1 = (2.0 * D.real + s * np.abs(D) ** 2) * phi_beta(x, beta)
        elif t_rule == "gauss":
            H1 = taylor_split(np.ones_like(D), s * D, beta) / s if s > 0 else -beta * D.real
        else:
            raise ValueError(f"unknown t_rule {t_rule!r}")
        H2 = fpx[None, :] * np.abs(1.0 + s * D) ** (-beta)
        J1[rows] = singular_integral(H1, H1_d[rows], grid, beta, quadrature, rows)
        J2[rows] = singular_integral(H2, H2_d[rows], grid, beta, quadrature, rows)

        for e in model.roots:
            A = lmod * (1.0 - e)
            Z = W - e * xi[None, :] + s * (fw[rows, None] - e * fx[None, :])
            absA = abs(A)
            if eps * np.max(np.abs(Z)) >= absA:
                raise PatchOverlapError(
                    f"inter-patch Taylor split outside its radius for eps = {eps}"
                )
            if t_rule == "exact":
                u = (2.0 * np.real(A * np.conj(Z)) + eps * np.abs(Z) ** 2) / absA**2
                H3 = absA ** (-beta) * u * phi_beta(eps * u, beta)
            elif eps > 0:
                H3 = taylor_split(np.full_like(Z, A), eps * Z, beta) / eps
            else:
                H3 = -beta * np.real(A * np.conj(Z)) / absA ** (2.0 + beta)
            H4 = fpx[None, :] * np.abs(A + eps * Z) ** (-beta)
            J3[rows] += e * (H3 @ qx)
            J4[rows] += e * (H4 @ qx)

    pref = cb / math.pi
    return SqgTerms(pref * J1, pref * J2, pref * J3, pref * eps**beta * J4)


# ---------------------------------------------------------------------------
# closure and residual
# ---------------------------------------------------------------------------

def omega_closure_sqg(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    J: ComplexArray | None = None,
    **jkw,
) -> float:
    """Rotation speed that annihilates the ``sin(theta)`` mode of ``F``."""
    beta = _require_sqg(model)
    eps = _check_eps(eps)
    if J is None:
        J = j_sqg(eps, f, model, grid, **jkw).total
    s = eps ** (1.0 + beta)
    w = grid.w
    wc = np.conj(w)
    dphi = 1.0 + s * f.derivative(w)
    num = 1j * quad_circle(np.conj(J) * (w - wc) * dphi, w)
    den = quad_circle(dphi * (w - wc) * (model.l + eps * wc + eps * s * f.value(wc)), w)
    if abs(den) < 1e-12 * abs(model.l):
        raise ClosureDegenerateError(f"closure denominator {abs(den):.2e} vanishes")
    om = num / den
    scale = max(abs(omega0(model)), abs(om.real))
    if abs(om.imag) > 1e-10 * scale:
        raise ArithmeticError(f"closure speed not real: Im = {om.imag:.3e}")
    return float(om.real)


def f_sqg(
    omega: float,
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    J: ComplexArray | None = None,
    **jkw,
) -> FloatArray:
    """Residual ``F_beta(Omega, eps, f)`` at the evaluation nodes."""
    beta = _require_sqg(model)
    eps = _check_eps(eps)
    if J is None:
        J = j_sqg(eps, f, model, grid, **jkw).total
    s = eps ** (1.0 + beta)
    w = grid.w
    fp = f.derivative(w)
    phi_c = eps * (np.conj(w) + s * np.conj(f.value(w)))
    brace = np.conj(J) + 1j * omega * (phi_c + model.l)
    mu = mu_beta(beta, model.cbeta)
    return np.real(brace * w * (1.0 + s * fp)) + mu * fp.imag


def evaluate_sqg(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    omega: float | None = None,
    **jkw,
) -> SqgEvaluation:
    """Sample ``J`` and ``F_beta``; ``omega=None`` uses the closure speed."""
    terms = j_sqg(eps, f, model, grid, **jkw)
    J = terms.total
    if omega is None:
        omega = omega_closure_sqg(eps, f, model, grid, J=J)
    F = f_sqg(omega, eps, f, model, grid, J=J)
    return SqgEvaluation(terms, F, float(omega), project_sin(F))


def f_tilde_sqg(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    **jkw,
) -> FTilde:
    """Sine coefficients ``f_n, n >= 2`` of ``F_beta(Omega(eps, f), eps, f)``."""
    ev = evaluate_sqg(eps, f, model, grid, **jkw)
    return FTilde(ev.sin_coeffs[1:], float(ev.sin_coeffs[0]), ev.omega)


def velocity_direct_sqg(
    eps: float,
    f: FourierShape,
    model: PolygonModel,
    grid: CircleGrid,
    quadrature: Quadrature = "spectral",
) -> ComplexArray:
    """Velocity on patch 0 from ``(C_beta/(pi eps^2)) sum_m oint_{dD_m} |x - y|^-beta dy``.

    Evaluated directly in physical coordinates, without any Taylor split.
    The self term is reduced to the circle kernel via the factor
    ``|w - xi|^beta / |Phi(w) - Phi(xi)|^beta``, which is smooth.
    """
    beta = _require_sqg(model)
    eps = _check_eps(eps)
    if eps == 0:
        raise ValueError("direct velocity needs eps > 0")
    cb = c_beta(beta, model.cbeta)
    s = eps ** (1.0 + beta)
    w, xi = grid.w, grid.xi
    fw, fx, fpx, fpw = f.value(w), f.value(xi), f.derivative(xi), f.derivative(w)
    x = model.l + eps * (w + s * fw)
    y0 = model.l + eps * (xi + s * fx)
    dPhi = eps * (1.0 + s * fpx)
    D = (fw[:, None] - fx[None, :]) / (w[:, None] - xi[None, :])
    H = eps ** (-beta) * np.abs(1.0 + s * D) ** (-beta) * eps * (1.0 + s * fpx)[None, :]
    H_d = eps ** (1.0 - beta) * np.abs(1.0 + s * fpw) ** (-beta) * (1.0 + s * fpw)
    total = singular_integral(H, H_d, grid, beta, quadrature)
    q = grid.h * 1j * xi
    for e in model.roots:
        d = np.abs(x[:, None] - e * y0[None, :]) ** (-beta)
        total = total + e * (d @ (dPhi * q))
    return cb / (math.pi * eps**2) * total
