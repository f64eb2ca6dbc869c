"""Thomson polygons: rigid rotation of N point vortices on a circle.

Prints the angular velocity for Newtonian and SQG interactions, then
integrates one period with RK4 and reports how well the polygon closes.
"""
import math

from thomson_vstates.point_vortex import (
    integrate_points,
    newtonian,
    omega_newtonian,
    omega_sqg,
    rotation_error,
    sqg_interaction,
    thomson_polygon,
)

print("N   Omega (Euler)    Omega (SQG, beta=0.5)")
for N in range(2, 8):
    print(f"{N}   {omega_newtonian(N, 1.0):.12f}   {omega_sqg(N, 1.0, 0.5):.12f}")

for name, inter, om in (
    ("Euler", newtonian(), omega_newtonian(4, 1.0)),
    ("SQG  ", sqg_interaction(0.5), omega_sqg(4, 1.0, 0.5)),
):
    T = 2 * math.pi / om
    for div in (256, 1024, 4096):
        traj = integrate_points(thomson_polygon(4, 1.0, inter), T / div, div)
        print(f"{name} N=4  dt=T/{div:<5d} closure error {rotation_error(traj, om)[-1]:.3e}")
