"""Linearization at the point-vortex limit.

The derivative in the shape is diagonal in sine modes.  Closed-form entries
are compared with brute-force quadrature and their growth is tabulated.
"""
from thomson_vstates.linear_theory import (
    euler_diagonal,
    linearized_sqg_quadrature,
    spectrum_table,
    sqg_diagonal,
)

print("n   Euler n/(2pi)   SQG closed form   SQG quadrature   rel. diff")
for n in (1, 2, 3, 5, 8):
    c = sqg_diagonal(0.5, n)
    q = linearized_sqg_quadrature(0.5, n, 4096)
    print(f"{n:<3d} {euler_diagonal(n):.10f}    {c:.10f}     {q:.10f}     {abs(q - c) / c:.1e}")

for beta in (0.25, 0.5, 0.75):
    t = spectrum_table(beta, 100)
    print(f"beta={beta}: all gamma_n > 0: {t.all_positive}, min gamma_n / n = {t.c0:.5f}")
