"""The rotating-patch functional for small patches.

Evaluates the residual at the trivial point and at a perturbed shape, and
checks the boundary-integral velocity against a direct evaluation.
"""
import numpy as np

from thomson_vstates.euler_patch import evaluate_euler, j_euler, velocity_direct_euler
from thomson_vstates.harmonic_core import FourierShape, PolygonModel, make_grid
from thomson_vstates.point_vortex import omega0
from thomson_vstates.sqg_patch import evaluate_sqg

grid = make_grid(256)
euler = PolygonModel(3, 1.0)
sqg = PolygonModel(3, 1.0, "sqg", 0.5)
zero = FourierShape.zeros(4)
shape = FourierShape(np.array([0.05, -0.02, 0.01, 0.0]))

for model, evaluate in ((euler, evaluate_euler), (sqg, evaluate_sqg)):
    ev0 = evaluate(0.0, zero, model, grid)
    ev1 = evaluate(0.05, shape, model, grid)
    print(f"{model.kind}: Omega_0 = {omega0(model):.10f}")
    print(f"  trivial point: max |F| = {np.max(np.abs(ev0.F_samples)):.2e}")
    print(f"  eps=0.05: Omega = {ev1.omega:.10f}, sin(theta) mode = {ev1.sin_coeffs[0]:.1e}")
    print(f"  leading modes of F: {np.array2string(ev1.sin_coeffs[1:5], precision=3)}")

eps = 0.05
J = j_euler(eps, shape, euler, grid)
lead = 1j * grid.w / (2 * np.pi * eps)
direct = velocity_direct_euler(eps, shape, euler, grid)
print(f"reduced vs direct velocity: {np.max(np.abs(lead + np.conj(J) - direct)):.2e}")
