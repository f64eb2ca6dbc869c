"""Linearized functionals at the trivial solution and their diagonal spectra.

At ``(Omega0, eps=0, f=0)`` both contour functionals map the shape mode
``a_n w^-n`` onto the single residual mode ``sin((n+1) theta)``:

* Euler:  multiplier ``n / (2 pi)``
* SQG:    multiplier ``C_beta beta Gamma(1-beta) / (2 Gamma(1-beta/2)^2) * gamma_n``

The closed forms are paired with brute-force quadrature oracles that use a
singularity-corrected trapezoid rule (generalized zeta correction).  These do
not share code with the product-integration weights of :mod:`sqg_patch`.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy.special import zeta

from .harmonic_core import (
    CBetaVariant,
    ComplexArray,
    FloatArray,
    FourierShape,
    c_beta,
    gamma_fn,
    make_grid,
    mu_beta,
    pochhammer,
)

__all__ = [
    "SpectrumRow",
    "SpectrumTable",
    "circle_kernel_integral",
    "circle_kernel_quadrature",
    "corrected_trapezoid",
    "gamma_coeffs",
    "gamma_n",
    "gamma_n_lower_bound",
    "sqg_prefactor",
    "sqg_diagonal",
    "sqg_diagonal_expanded",
    "euler_diagonal",
    "linearized_euler",
    "linearized_sqg",
    "mode_integrals_quadrature",
    "linearized_sqg_quadrature",
    "spectrum_table",
]


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return beta


def _check_n(n: int) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"mode index must be an integer >= 0, got {n!r}")
    return int(n)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def circle_kernel_integral(beta: float) -> float:
    """``kappa_beta`` with ``oint dxi / |w - xi|^beta = i kappa_beta w``."""
    beta = _check_beta(beta)
    g = gamma_fn(1.0 - beta / 2)
    return 2.0 * math.pi * beta * gamma_fn(1.0 - beta) / ((2.0 - beta) * g * g)


def _base(beta: float, variant: CBetaVariant) -> float:
    # C_beta Gamma(1-beta) / Gamma(1-beta/2)^2
    g = gamma_fn(1.0 - beta / 2)
    return c_beta(beta, variant) * gamma_fn(1.0 - beta) / (g * g)


def gamma_coeffs(beta: float, n: int, variant: CBetaVariant = "printed") -> tuple[float, float]:
    """``(gamma_{1,n}, gamma_{2,n})``: self-term mode coefficients.

    For ``f = w^-n`` the Taylor-remainder self integral, normalized by
    ``beta C_beta / (2 pi i)``, equals ``gamma_{1,n} w^(n+2) + gamma_{2,n} conj(w)^n``.
    """
    beta = _check_beta(beta)
    n = _check_n(n)
    b = 0.5 * beta
    base = _base(beta, variant)
    g1 = beta * (1.0 + b) * base / (2.0 * (2.0 - beta)) * (
        1.0 - pochhammer(2.0 + b, n) / pochhammer(2.0 - b, n)
    )
    g2 = -beta * base / 4.0 * (1.0 - pochhammer(b, n) / pochhammer(-b, n))
    return g1, g2


def gamma_n(beta: float, n: int) -> float:
    """``2(1+n)/(1-beta/2) - (1+beta/2)_n/(1-beta/2)_n - (1+beta/2)_{n+1}/(1-beta/2)_{n+1}``."""
    beta = _check_beta(beta)
    n = _check_n(n)
    b = 0.5 * beta
    r_n = pochhammer(1.0 + b, n) / pochhammer(1.0 - b, n)
    r_n1 = r_n * (1.0 + b + n) / (1.0 - b + n)
    return 2.0 * (1.0 + n) / (1.0 - b) - r_n - r_n1


def gamma_n_lower_bound(beta: float, n: int) -> float:
    """Explicit linear-in-``n`` lower bound for ``gamma_n`` (valid for ``n >= 2``).

    At ``n = 1`` the expression exceeds ``gamma_1`` for every ``beta``.
    """
    beta = _check_beta(beta)
    n = _check_n(n)
    b = 0.5 * beta
    k = (1.0 + b) / ((2.0 - b) * (1.0 - b))
    return 2.0 * (1.0 + n) / (1.0 - b) - k * (n + b) - k * (n + 1.0 + b)


def sqg_prefactor(beta: float, variant: CBetaVariant = "printed") -> float:
    """``C_beta beta Gamma(1-beta) / (2 Gamma(1-beta/2)^2)``."""
    beta = _check_beta(beta)
    return 0.5 * beta * _base(beta, variant)


def euler_diagonal(n: int) -> float:
    return _check_n(n) / (2.0 * math.pi)


def sqg_diagonal(beta: float, n: int, variant: CBetaVariant = "printed") -> float:
    return sqg_prefactor(beta, variant) * gamma_n(beta, n)


def sqg_diagonal_expanded(beta: float, n: int, variant: CBetaVariant = "printed") -> float:
    """Same multiplier assembled as ``n mu + 2(g1 - g2) - 2 n c R_n``."""
    beta = _check_beta(beta)
    b = 0.5 * beta
    g1, g2 = gamma_coeffs(beta, n, variant)
    r = pochhammer(b, n) / pochhammer(1.0 - b, n)
    return n * mu_beta(beta, variant) + 2.0 * (g1 - g2) - 2.0 * n * _base(beta, variant) * r


def _coeff_array(h: FourierShape | FloatArray) -> FloatArray:
    a = h.a if isinstance(h, FourierShape) else np.asarray(h, dtype=np.float64)
    return np.asarray(a, dtype=np.float64).reshape(-1)


def linearized_euler(h: FourierShape | FloatArray) -> FloatArray:
    """Sine coefficients ``c_k`` (``k = 1..M+1``, index 0 is ``k = 1``) of the
    Euler linearization applied to ``h``."""
    a = _coeff_array(h)
    out = np.zeros(a.size + 1)
    out[1:] = np.arange(1, a.size + 1) * a / (2.0 * math.pi)
    return out


def linearized_sqg(
    beta: float, h: FourierShape | FloatArray, variant: CBetaVariant = "printed"
) -> FloatArray:
    """Sine coefficients of the SQG linearization; same layout as :func:`linearized_euler`."""
    a = _coeff_array(h)
    out = np.zeros(a.size + 1)
    out[1:] = [sqg_diagonal(beta, n, variant) * an for n, an in enumerate(a, start=1)]
    return out


# ---------------------------------------------------------------------------
# quadrature oracles
# ---------------------------------------------------------------------------

def corrected_trapezoid(
    G: ComplexArray, G_star: ComplexArray, h: float, beta: float
) -> ComplexArray:
    """Offset-node trapezoid for ``int |psi|^-beta g dpsi`` with the leading
    singular error removed.

    ``G[j, k]`` are samples of ``|w_j - xi_k|^-beta g_j(xi_k)`` at nodes
    half a step off the singularity and ``G_star[j] = g_j(w_j)``.  The
    remaining error is ``O(h^(3-beta))``.
    """
    q = h * np.sum(G, axis=-1)
    # Hurwitz zeta(beta, 1/2) = (2^beta - 1) zeta(beta); scipy's two-argument form needs beta > 1
    zh = (2.0**beta - 1.0) * float(zeta(beta))
    return q - 2.0 * zh * h ** (1.0 - beta) * G_star


def circle_kernel_quadrature(beta: float, M_nodes: int = 2048, theta0: float = 0.0) -> complex:
    """``oint dxi / |w - xi|^beta`` at ``w = exp(i theta0)`` by corrected trapezoid."""
    beta = _check_beta(beta)
    grid = make_grid(M_nodes)
    rot = complex(math.cos(theta0), math.sin(theta0))
    w = rot
    xi = rot * grid.xi
    G = np.abs(w - xi) ** (-beta) * 1j * xi
    return complex(corrected_trapezoid(G, np.asarray(1j * w), grid.h, beta))


def mode_integrals_quadrature(
    beta: float,
    n: int,
    M_nodes: int = 4096,
    n_eval: int = 64,
    variant: CBetaVariant = "printed",
) -> tuple[float, float, float]:
    """Brute-force ``(gamma_{1,n}, gamma_{2,n}, q_n)`` for ``f = w^-n``.

    ``gamma_{1,n}, gamma_{2,n}`` are the ``w^(n+2)`` and ``conj(w)^n`` Fourier
    coefficients of ``(beta C_beta/(2 pi i)) oint Re[(w-xi) conj(f(w)-f(xi))]/|w-xi|^(2+beta) dxi``;
    ``q_n`` is the ``conj(w)^n`` coefficient of ``(C_beta/(2 pi i)) oint f'(xi)/|w-xi|^beta dxi``.
    Both are extracted from ``n_eval`` evaluation points.
    """
    beta = _check_beta(beta)
    n = _check_n(n)
    if n < 1 or n_eval <= 2 * n + 2 or M_nodes % n_eval:
        raise ValueError("need n >= 1, n_eval > 2n + 2 and n_eval dividing M_nodes")
    grid = make_grid(M_nodes)
    w = grid.w[:: M_nodes // n_eval]
    xi = grid.xi
    cb = c_beta(beta, variant)
    W = w[:, None]
    X = xi[None, :]
    kern = np.abs(W - X) ** (-beta)
    # Re[(w - xi) conj(f(w) - f(xi))] / |w - xi|^2 = Re[D], D the divided difference
    D = (W ** (-n) - X ** (-n)) / (W - X)
    D_star = -n * w ** (-n - 1)
    I1 = corrected_trapezoid(kern * D.real * 1j * X, D_star.real * 1j * w, grid.h, beta)
    fp = -n * xi ** (-n - 1)
    I2 = corrected_trapezoid(kern * fp[None, :] * 1j * X, -n * w ** (-n - 1) * 1j * w, grid.h, beta)
    I1 *= beta * cb / (2j * math.pi)
    I2 *= cb / (2j * math.pi)
    g1 = np.mean(I1 * w ** (-(n + 2)))
    g2 = np.mean(I1 * w**n)
    q = np.mean(I2 * w**n)
    return float(g1.real), float(g2.real), float(q.real)


def linearized_sqg_quadrature(
    beta: float, n: int, M_nodes: int = 4096, variant: CBetaVariant = "printed"
) -> float:
    """Diagonal multiplier assembled from ``mu_beta Im[h'] + Re[conj(K(h)) w]``
    with the self integrals of ``K`` done by brute-force quadrature."""
    g1, g2, q = mode_integrals_quadrature(beta, n, M_nodes, variant=variant)
    # K(h) = -2i I1 + 2i I2, so Re[conj(K) w] carries 2 g1 - 2 g2 + 2 q on sin((n+1) theta)
    return n * mu_beta(beta, variant) + 2.0 * (g1 - g2) + 2.0 * q


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumRow:
    n: int
    gamma1: float
    gamma2: float
    gamma: float
    diagonal: float


@dataclass(frozen=True)
class SpectrumTable:
    beta: float
    cbeta: CBetaVariant
    rows: tuple[SpectrumRow, ...]

    @property
    def c0(self) -> float:
        """Empirical ``min gamma_n / n`` over the tabulated range."""
        return min(r.gamma / r.n for r in self.rows)

    @property
    def all_positive(self) -> bool:
        return all(r.gamma > 0 for r in self.rows)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["n", "gamma1", "gamma2", "gamma_n", "diagonal"])
        for r in self.rows:
            writer.writerow(
                [r.n, f"{r.gamma1:.17g}", f"{r.gamma2:.17g}", f"{r.gamma:.17g}", f"{r.diagonal:.17g}"]
            )

    def to_json(self) -> str:
        doc = {
            "beta": self.beta,
            "cbeta": self.cbeta,
            "c0": self.c0,
            "rows": [
                {"n": r.n, "gamma1": r.gamma1, "gamma2": r.gamma2, "gamma_n": r.gamma, "diagonal": r.diagonal}
                for r in self.rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def spectrum_table(beta: float, n_max: int, variant: CBetaVariant = "printed") -> SpectrumTable:
    beta = _check_beta(beta)
    if int(n_max) != n_max or n_max < 1:
        raise ValueError("n_max must be an integer >= 1")
    rows = []
    for n in range(1, int(n_max) + 1):
        g1, g2 = gamma_coeffs(beta, n, variant)
        g = gamma_n(beta, n)
        rows.append(SpectrumRow(n, g1, g2, g, sqg_prefactor(beta, variant) * g))
    return SpectrumTable(beta, variant, tuple(rows))
