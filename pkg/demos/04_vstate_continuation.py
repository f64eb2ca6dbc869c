"""Rotating patch polygons by Newton continuation from the point vortices.

Follows the Euler pair and the SQG triangle in the patch size, validates
the final states on a finer grid and writes contour files to ./demo_out.
"""
from pathlib import Path

import numpy as np

from thomson_vstates.harmonic_core import PolygonModel
from thomson_vstates.vstate_solver import (
    continuation,
    default_settings,
    patch_contours,
    validate_vstate,
    write_contours_csv,
)

out = Path("demo_out")
out.mkdir(exist_ok=True)
for model, eps in ((PolygonModel(2, 1.0), 0.05), (PolygonModel(3, 1.0, "sqg", 0.5), 0.02)):
    st = default_settings(model)
    run = continuation(model, eps, 10, st)
    print(f"{model.kind} N={model.N}")
    for s in run.states:
        print(f"  eps={s.epsilon:.4f}  Omega={s.omega:.10f}  max|a|={np.max(np.abs(s.shape.a)):.3e}  its={s.iterations}")
    rep = validate_vstate(run.states[-1], 4 * st.M_nodes, st)
    print(f"  validation on {rep.M_nodes} nodes: residual {rep.pointwise_residual:.1e}, passed={rep.passed}")
    with open(out / f"{model.kind}_contours.csv", "w", newline="\n") as fh:
        write_contours_csv(patch_contours(run.states[-1]), fh)
