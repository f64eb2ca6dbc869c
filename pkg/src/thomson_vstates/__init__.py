"""Rotating vortex-patch configurations near point-vortex polygons.

Euler and generalized SQG patches placed at the vertices of a regular polygon,
computed by Newton continuation from the point-vortex limit.
"""
from .harmonic_core import (
    CircleGrid,
    FourierShape,
    PolygonModel,
    c_beta,
    gamma_fn,
    make_grid,
    mu_beta,
    pochhammer,
    project_sin,
    quad_circle,
)
from .point_vortex import (
    integrate_points,
    omega0,
    omega_general,
    omega_newtonian,
    omega_sqg,
    thomson_polygon,
)
from .euler_patch import f_euler, f_tilde_euler, j_euler, omega_closure_euler
from .sqg_patch import f_sqg, f_tilde_sqg, j_sqg, omega_closure_sqg
from .linear_theory import (
    circle_kernel_integral,
    gamma_coeffs,
    gamma_n,
    linearized_euler,
    linearized_sqg,
    spectrum_table,
)
from .vstate_solver import (
    VState,
    continuation,
    newton_solve,
    patch_contours,
    validate_vstate,
)

__version__ = "0.1.0"

__all__ = [
    "CircleGrid",
    "FourierShape",
    "PolygonModel",
    "c_beta",
    "gamma_fn",
    "make_grid",
    "mu_beta",
    "pochhammer",
    "project_sin",
    "quad_circle",
    "integrate_points",
    "omega0",
    "omega_general",
    "omega_newtonian",
    "omega_sqg",
    "thomson_polygon",
    "f_euler",
    "f_tilde_euler",
    "j_euler",
    "omega_closure_euler",
    "f_sqg",
    "f_tilde_sqg",
    "j_sqg",
    "omega_closure_sqg",
    "circle_kernel_integral",
    "gamma_coeffs",
    "gamma_n",
    "linearized_euler",
    "linearized_sqg",
    "spectrum_table",
    "VState",
    "continuation",
    "newton_solve",
    "patch_contours",
    "validate_vstate",
    "__version__",
]
