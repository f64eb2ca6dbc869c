"""Unit-circle grids, Fourier shapes, contour quadrature and special functions.

Everything downstream samples functions on the unit circle through a
:class:`CircleGrid`.  Evaluation nodes ``w_j = exp(i theta_j)`` and quadrature
nodes ``xi_k`` are interleaved (half-step offset), so no kernel is ever
evaluated on its diagonal ``xi = w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

CBetaVariant = Literal["printed", "standard"]

__all__ = [
    "CircleGrid",
    "FourierShape",
    "PolygonModel",
    "make_grid",
    "eval_shape",
    "quad_circle",
    "project_sin",
    "synthesize_sin",
    "gamma_fn",
    "pochhammer",
    "c_beta",
    "c_beta_printed",
    "c_beta_standard",
    "mu_beta",
    "kernel_fourier_coeffs",
    "product_weights",
]


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleGrid:
    """Uniform evaluation nodes plus half-offset quadrature nodes on the circle."""

    M_nodes: int
    theta: FloatArray = field(repr=False)
    w: ComplexArray = field(repr=False)
    phi: FloatArray = field(repr=False)
    xi: ComplexArray = field(repr=False)

    @property
    def h(self) -> float:
        return 2.0 * math.pi / self.M_nodes

    @property
    def max_modes(self) -> int:
        """Largest shape truncation M that keeps projections alias-free."""
        return self.M_nodes // 2 - 2

    def refined(self, factor: int) -> "CircleGrid":
        return make_grid(self.M_nodes * factor)


def make_grid(M_nodes: int) -> CircleGrid:
    """Build a :class:`CircleGrid` with ``M_nodes`` evaluation nodes.

    ``M_nodes`` must be even and at least 8.
    """
    if int(M_nodes) != M_nodes:
        raise ValueError(f"M_nodes must be an integer, got {M_nodes!r}")
    M_nodes = int(M_nodes)
    if M_nodes < 8 or M_nodes % 2:
        raise ValueError(f"M_nodes must be even and >= 8, got {M_nodes}")
    h = 2.0 * math.pi / M_nodes
    theta = h * np.arange(M_nodes)
    phi = theta + 0.5 * h
    # cos/sin separately keeps |w| = 1 to the last bit more reliably than exp
    w = np.cos(theta) + 1j * np.sin(theta)
    xi = np.cos(phi) + 1j * np.sin(phi)
    for arr in (theta, w, phi, xi):
        arr.setflags(write=False)
    return CircleGrid(M_nodes, theta, w, phi, xi)


# ---------------------------------------------------------------------------
# shapes and models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierShape:
    """Boundary perturbation ``f(w) = sum_{n>=1} a_n w^{-n}`` with real ``a_n``.

    ``a[0]`` holds ``a_1``.
    """

    a: FloatArray

    def __post_init__(self) -> None:
        arr = np.asarray(self.a)
        if np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise ValueError("FourierShape coefficients must be real")
            arr = arr.real
        arr = np.array(arr, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValueError("FourierShape coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @classmethod
    def zeros(cls, M: int) -> "FourierShape":
        return cls(np.zeros(M))

    @property
    def M(self) -> int:
        return self.a.size

    def lipschitz_norm(self) -> float:
        """``sum n |a_n|``; bounds ``|f'|`` on the circle."""
        n = np.arange(1, self.M + 1)
        return float(np.sum(n * np.abs(self.a)))

    def check_admissible(self, sigma: float = 0.5) -> None:
        if sigma >= 1.0:
            raise ValueError("admissibility radius sigma must be < 1")
        norm = self.lipschitz_norm()
        if norm > sigma:
            raise ValueError(
                f"shape not admissible: sum n|a_n| = {norm:.3g} exceeds sigma = {sigma}"
            )

    def value(self, z: ArrayLike) -> ComplexArray:
        u = 1.0 / np.asarray(z, dtype=np.complex128)
        out = np.zeros_like(u)
        for an in self.a[::-1]:
            out = (out + an) * u
        return out

    def derivative(self, z: ArrayLike) -> ComplexArray:
        u = 1.0 / np.asarray(z, dtype=np.complex128)
        out = np.zeros_like(u)
        n = np.arange(self.M, 0, -1)
        for nn, an in zip(n, self.a[::-1]):
            out = (out + nn * an) * u
        return -out * u

    def with_coefficients(self, a: ArrayLike) -> "FourierShape":
        return FourierShape(np.asarray(a, dtype=np.float64))


def eval_shape(f: FourierShape, z: ArrayLike) -> tuple[ComplexArray, ComplexArray]:
    """Return ``(f(z), f'(z))`` for ``z`` on the unit circle."""
    return f.value(z), f.derivative(z)


@dataclass(frozen=True)
class PolygonModel:
    """Physical configuration: ``N`` patches around a polygon of radius ``l``.

    ``kind`` is ``"euler"`` or ``"sqg"``; the latter needs ``0 < beta < 1``.
    ``cbeta`` selects the normalization constant variant, see :func:`c_beta`.
    """

    N: int
    l: float
    kind: Literal["euler", "sqg"] = "euler"
    beta: float | None = None
    cbeta: CBetaVariant = "printed"

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if not np.isfinite(self.l) or self.l == 0:
            raise ValueError("polygon radius l must be finite and nonzero")
        object.__setattr__(self, "l", float(self.l))
        if self.kind == "euler":
            if self.beta not in (None, 0, 0.0):
                raise ValueError("Euler model takes no beta")
            object.__setattr__(self, "beta", None)
        elif self.kind == "sqg":
            if self.beta is None or not (0.0 < self.beta < 1.0):
                raise ValueError(f"SQG model needs 0 < beta < 1, got {self.beta!r}")
            object.__setattr__(self, "beta", float(self.beta))
        else:
            raise ValueError(f"unknown equation kind {self.kind!r}")
        if self.cbeta not in ("printed", "standard"):
            raise ValueError(f"unknown c_beta variant {self.cbeta!r}")

    @property
    def roots(self) -> ComplexArray:
        """``exp(2 pi i m / N)`` for ``m = 1..N-1``."""
        m = np.arange(1, self.N)
        ang = 2.0 * math.pi * m / self.N
        return np.cos(ang) + 1j * np.sin(ang)

    @property
    def scaling_power(self) -> float:
        """Exponent ``p`` in ``Phi(w) = eps (w + eps^p f(w))``."""
        return 1.0 if self.kind == "euler" else 1.0 + self.beta


# ---------------------------------------------------------------------------
# quadrature and projections
# ---------------------------------------------------------------------------

def quad_circle(samples: ArrayLike, nodes: ArrayLike) -> complex:
    """Trapezoid rule for ``oint g(xi) dxi`` with ``dxi = i xi dphi``.

    ``samples`` are values of ``g`` at the uniformly spaced ``nodes``.
    """
    g = np.asarray(samples, dtype=np.complex128)
    z = np.asarray(nodes, dtype=np.complex128)
    if g.shape[-1] != z.shape[-1]:
        raise ValueError("samples and nodes must align")
    return complex((2.0 * math.pi / z.shape[-1]) * np.sum(g * 1j * z, axis=-1))


def _sin_matrix(M_nodes: int, nmax: int) -> FloatArray:
    theta = 2.0 * math.pi * np.arange(M_nodes) / M_nodes
    n = np.arange(1, nmax + 1)
    return np.sin(np.outer(n, theta))


def project_sin(samples: ArrayLike, nmax: int | None = None) -> FloatArray:
    """Sine coefficients ``f_n = (2/M) sum_j s_j sin(n theta_j)``, ``n = 1..nmax``.

    ``samples`` live on the full uniform grid ``theta_j = 2 pi j / M``.
    Default ``nmax = M/2 - 1``.
    """
    s = np.asarray(samples, dtype=np.float64)
    M_nodes = s.shape[-1]
    if nmax is None:
        nmax = M_nodes // 2 - 1
    return (2.0 / M_nodes) * (_sin_matrix(M_nodes, nmax) @ s)


def synthesize_sin(coeffs: ArrayLike, M_nodes: int) -> FloatArray:
    """Inverse of :func:`project_sin`: ``sum_n c_n sin(n theta_j)``."""
    c = np.asarray(coeffs, dtype=np.float64)
    return _sin_matrix(M_nodes, c.size).T @ c


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Euler Gamma function in double precision."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def pochhammer(x: float, n: int) -> float:
    """Rising factorial ``x (x+1) ... (x+n-1)``."""
    if int(n) != n or n < 0:
        raise ValueError("pochhammer needs an integer n >= 0")
    out = 1.0
    for k in range(int(n)):
        out *= x + k
    return out


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return beta


def c_beta_printed(beta: float) -> float:
    """``Gamma(beta/2) / (2^(1-beta) Gamma((1-beta)/2))``."""
    beta = _check_beta(beta)
    return gamma_fn(beta / 2) / (2.0 ** (1.0 - beta) * gamma_fn((1.0 - beta) / 2))


def c_beta_standard(beta: float) -> float:
    """``Gamma(beta/2) / (2^(1-beta) Gamma(1-beta/2))``."""
    beta = _check_beta(beta)
    return gamma_fn(beta / 2) / (2.0 ** (1.0 - beta) * gamma_fn(1.0 - beta / 2))


def c_beta(beta: float, variant: CBetaVariant = "printed") -> float:
    """Kernel constant ``C_beta``.

    The two variants differ only in the last Gamma factor of the denominator;
    every functional in this package is homogeneous in ``C_beta``, so the
    choice rescales time and leaves shapes untouched.
    """
    if variant == "printed":
        return c_beta_printed(beta)
    if variant == "standard":
        return c_beta_standard(beta)
    raise ValueError(f"unknown c_beta variant {variant!r}")


def mu_beta(beta: float, variant: CBetaVariant = "printed") -> float:
    """``C_beta 2 beta Gamma(1-beta) / ((2-beta) Gamma(1-beta/2)^2)``."""
    beta = _check_beta(beta)
    g = gamma_fn(1.0 - beta / 2)
    return c_beta(beta, variant) * 2.0 * beta * gamma_fn(1.0 - beta) / ((2.0 - beta) * g * g)


def kernel_fourier_coeffs(beta: float, pmax: int) -> FloatArray:
    """Fourier coefficients ``c_p``, ``p = 0..pmax``, of ``|1 - e^{i psi}|^{-beta}``.

    ``|1 - e^{i psi}|^{-beta} = sum_p c_|p| e^{i p psi}`` with
    ``c_p = Gamma(1-beta)/Gamma(1-beta/2)^2 * (beta/2)_p / (1-beta/2)_p``.
    """
    beta = _check_beta(beta)
    g = gamma_fn(1.0 - beta / 2)
    c = np.empty(pmax + 1)
    c[0] = gamma_fn(1.0 - beta) / (g * g)
    for p in range(1, pmax + 1):
        c[p] = c[p - 1] * (beta / 2 + p - 1) / (1.0 - beta / 2 + p - 1)
    return c


def product_weights(beta: float, M_nodes: int) -> FloatArray:
    """Spectral product-integration weights for the ``|w - xi|^{-beta}`` kernel.

    ``rho[k]`` multiplies ``G(xi_{j+k})`` when integrating
    ``int_0^{2pi} |w_j - xi|^{-beta} G(xi) dphi``; the rule is exact for
    trigonometric polynomials ``G`` of degree below ``M_nodes/2``.
    """
    h = 2.0 * math.pi / M_nodes
    c = kernel_fourier_coeffs(beta, M_nodes // 2 - 1)
    psi = (np.arange(M_nodes) + 0.5) * h
    p = np.arange(1, M_nodes // 2)
    # Nyquist mode vanishes at the half-offset nodes
    return h * (c[0] + 2.0 * (np.cos(np.outer(psi, p)) @ c[1:]))


def circulant(v: ArrayLike) -> FloatArray:
    """Matrix ``R[j, k] = v[(k - j) mod M]``."""
    v = np.asarray(v)
    M = v.size
    idx = (np.arange(M)[None, :] - np.arange(M)[:, None]) % M
    return v[idx]


def as_shape(a: FourierShape | Sequence[float] | FloatArray) -> FourierShape:
    return a if isinstance(a, FourierShape) else FourierShape(np.asarray(a, dtype=np.float64))
