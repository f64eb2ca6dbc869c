"""Point vortices on a regular polygon: angular velocities and RK4 dynamics.

Positions are complex numbers.  The perpendicular gradient is multiplication
by ``i`` of the radial direction, so a radial interaction ``G`` moves vortex
``m`` with

    dz_m/dt = i sum_{k != m} (z_m - z_k)/|z_m - z_k| G'(|z_m - z_k|).

Newtonian vortices use ``G = ln(r)/(2 pi)``.  For (SQG)_beta the interaction
consistent with the patch functional is ``G = -C_beta r^{-beta}`` (velocity is
``-grad^perp`` of the potential), i.e. ``G'(r) = +beta C_beta r^{-1-beta}``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np

from .harmonic_core import CBetaVariant, ComplexArray, FloatArray, PolygonModel, c_beta

__all__ = [
    "Interaction",
    "PointConfig",
    "Trajectory",
    "IntegrationBlowUp",
    "newtonian",
    "sqg_interaction",
    "zero_interaction",
    "thomson_polygon",
    "omega_newtonian",
    "omega_general",
    "omega_sqg",
    "omega0",
    "velocity_points",
    "integrate_points",
    "write_trajectory_csv",
]


class IntegrationBlowUp(RuntimeError):
    """A position became non-finite during time stepping."""


@dataclass(frozen=True)
class Interaction:
    """Radial pair interaction given through ``G'`` (and optionally ``G``)."""

    name: str
    dG: Callable[[np.ndarray], np.ndarray]
    G: Callable[[np.ndarray], np.ndarray] | None = None


def newtonian() -> Interaction:
    return Interaction(
        "newtonian",
        dG=lambda r: 1.0 / (2.0 * math.pi * r),
        G=lambda r: np.log(r) / (2.0 * math.pi),
    )


def sqg_interaction(beta: float, variant: CBetaVariant = "printed") -> Interaction:
    cb = c_beta(beta, variant)
    return Interaction(
        f"sqg(beta={beta:g})",
        dG=lambda r: beta * cb * r ** (-1.0 - beta),
        G=lambda r: -cb * r ** (-beta),
    )


def zero_interaction() -> Interaction:
    return Interaction("zero", dG=lambda r: np.zeros_like(r), G=lambda r: np.zeros_like(r))


@dataclass(frozen=True)
class PointConfig:
    positions: ComplexArray
    interaction: Interaction = field(default_factory=newtonian)

    def __post_init__(self) -> None:
        z = np.array(self.positions, dtype=np.complex128).reshape(-1)
        z.setflags(write=False)
        object.__setattr__(self, "positions", z)
        _check_distinct(z)

    @property
    def N(self) -> int:
        return self.positions.size


def _check_distinct(z: np.ndarray) -> None:
    if z.size < 2:
        return
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices(z.size)] = np.inf
    if not np.all(d > 0):
        raise ValueError("point vortex positions must be pairwise distinct")


def thomson_polygon(N: int, l: float, interaction: Interaction | None = None) -> PointConfig:
    """``N`` vortices at ``l exp(2 pi i m / N)``."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N!r}")
    if l == 0 or not np.isfinite(l):
        raise ValueError("polygon radius l must be finite and nonzero")
    ang = 2.0 * math.pi * np.arange(int(N)) / int(N)
    z = l * (np.cos(ang) + 1j * np.sin(ang))
    return PointConfig(z, interaction or newtonian())


def _chords(N: int) -> ComplexArray:
    k = np.arange(1, N)
    ang = 2.0 * math.pi * k / N
    return 1.0 - (np.cos(ang) + 1j * np.sin(ang))


def _real_or_raise(s: complex, scale: float, what: str) -> float:
    if abs(s.imag) > 1e-13 * max(1.0, abs(scale)):
        raise ArithmeticError(f"{what}: imaginary part {s.imag:.3e} does not vanish")
    return float(s.real)


def omega_newtonian(N: int, l: float) -> float:
    """Angular velocity of the Newtonian Thomson polygon."""
    if int(N) != N or N < 2 or l == 0:
        raise ValueError("need N >= 2 and l != 0")
    s = complex(np.sum(1.0 / _chords(int(N))))
    return _real_or_raise(s, N, "omega_newtonian") / (2.0 * math.pi * l * l)


def omega_general(N: int, l: float, dG: Callable[[np.ndarray], np.ndarray]) -> float:
    """Angular velocity for a general radial interaction with derivative ``dG``."""
    if int(N) != N or N < 2 or l == 0:
        raise ValueError("need N >= 2 and l != 0")
    c = _chords(int(N))
    r = np.abs(c)
    # chord lengths are |l| |1 - e^{2 pi i k/N}|, so l < 0 enters through |l|
    g = np.asarray(dG(abs(l) * r), dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise ValueError("G' returned non-finite values on the polygon chords")
    s = complex(np.sum(c / r * g))
    scale = float(np.sum(np.abs(g)))
    return _real_or_raise(s, scale, "omega_general") / abs(l)


def omega_sqg(N: int, l: float, beta: float, variant: CBetaVariant = "printed") -> float:
    """Angular velocity of the (SQG)_beta Thomson polygon."""
    if int(N) != N or N < 2 or l == 0:
        raise ValueError("need N >= 2 and l != 0")
    cb = c_beta(beta, variant)
    c = _chords(int(N))
    s = complex(np.sum(c / np.abs(c) ** (2.0 + beta)))
    return beta * cb * _real_or_raise(s, N, "omega_sqg") / abs(l) ** (2.0 + beta)


def omega0(model: PolygonModel) -> float:
    """Point-vortex angular velocity matching ``model``."""
    if model.kind == "euler":
        return omega_newtonian(model.N, model.l)
    return omega_sqg(model.N, model.l, model.beta, model.cbeta)


def velocity_points(config: PointConfig) -> ComplexArray:
    return _velocity(config.positions, config.interaction.dG)


def _velocity(z: np.ndarray, dG) -> np.ndarray:
    dz = z[:, None] - z[None, :]
    r = np.abs(dz)
    np.fill_diagonal(r, 1.0)
    if np.any(r == 0):
        raise ValueError("coincident point vortices")
    g = np.asarray(dG(r), dtype=np.float64)
    terms = dz / r * g
    np.fill_diagonal(terms, 0.0)
    return 1j * terms.sum(axis=1)


def _pair_energy(z: np.ndarray, G) -> float:
    iu = np.triu_indices(z.size, k=1)
    return float(np.sum(G(np.abs(z[iu[0]] - z[iu[1]]))))


@dataclass
class Trajectory:
    t: FloatArray
    positions: ComplexArray  # (steps + 1, N)
    energy: FloatArray | None

    @property
    def energy_drift(self) -> float | None:
        if self.energy is None:
            return None
        return float(np.max(np.abs(self.energy - self.energy[0])))

    def center_drift(self) -> float:
        c = self.positions.sum(axis=1)
        return float(np.max(np.abs(c - c[0])))


def integrate_points(config: PointConfig, dt: float, steps: int) -> Trajectory:
    """Classic fixed-step RK4; records positions and the pair energy."""
    if not (np.isfinite(dt) and dt > 0) or int(steps) != steps or steps < 0:
        raise ValueError("need finite dt > 0 and an integer steps >= 0")
    dG = config.interaction.dG
    G = config.interaction.G
    z = config.positions.copy()
    out = np.empty((int(steps) + 1, z.size), dtype=np.complex128)
    out[0] = z
    energy = None if G is None else np.empty(int(steps) + 1)
    if energy is not None:
        energy[0] = _pair_energy(z, G)
    for n in range(int(steps)):
        k1 = _velocity(z, dG)
        k2 = _velocity(z + 0.5 * dt * k1, dG)
        k3 = _velocity(z + 0.5 * dt * k2, dG)
        k4 = _velocity(z + dt * k3, dG)
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(z)):
            raise IntegrationBlowUp(f"non-finite position at step {n + 1}, t = {(n + 1) * dt:.6g}")
        out[n + 1] = z
        if energy is not None:
            energy[n + 1] = _pair_energy(z, G)
    t = dt * np.arange(int(steps) + 1)
    return Trajectory(t, out, energy)


def write_trajectory_csv(traj: Trajectory, stream: TextIO, every: int = 1) -> None:
    """CSV with columns ``t, m, Re, Im``; one row per vortex per recorded step."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["t", "m", "Re", "Im"])
    for s in range(0, traj.t.size, every):
        for m, z in enumerate(traj.positions[s]):
            writer.writerow([f"{traj.t[s]:.17g}", m, f"{z.real:.17g}", f"{z.imag:.17g}"])


def rotation_error(traj: Trajectory, omega: float) -> FloatArray:
    """``max_m |z_m(t) - exp(i omega t) z_m(0)|`` for each recorded time."""
    ref = np.exp(1j * omega * traj.t)[:, None] * traj.positions[0][None, :]
    return np.max(np.abs(traj.positions - ref), axis=1)
