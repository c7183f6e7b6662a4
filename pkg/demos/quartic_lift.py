"""From a cubic on the sphere to a quadratic in rank-one projections.

g(x, y) = f(x) y is a quartic; writing z_a z_b z_c z_d as p_ab p_cd turns it
into a quadratic h in P = z z^T. Splitting |z| = 1 into |x| = t and
y = sqrt(1 - t^2) shows max h = max_t t^3 sqrt(1 - t^2) * max f.

Run: python3 demos/quartic_lift.py
"""
import numpy as np

from grassnp import multistart_rgd
from grassnp.poly import SparsePoly
from grassnp.reductions import (QUARTIC_LIFT_CONSTANT, grassmann_h_from_quartic,
                                quartic_sphere_lift, sphere_instance)

t = np.linspace(0, 1, 100_001)
vals = t**3 * np.sqrt(1 - t**2)
print(f"grid max {vals.max():.10f} at t={t[vals.argmax()]:.5f}; "
      f"closed form {QUARTIC_LIFT_CONSTANT:.10f} at sqrt(3)/2={np.sqrt(3) / 2:.5f}")

x = [SparsePoly.var(i, 1, (3, 1)) for i in (1, 2, 3)]
f = x[0] ** 3 - x[0] * x[1] * x[2] * 3 + x[2] ** 2 * x[1] * 2
sphere = multistart_rgd(sphere_instance(f), starts=30, iters=800, seed=1)
h = grassmann_h_from_quartic(quartic_sphere_lift(f))
lifted = multistart_rgd(h, starts=30, iters=800, seed=2)
print(f"max f on S^2        {sphere.best_value:.8f}")
print(f"max h on Gr(1, 4)   {lifted.best_value:.8f}")
print(f"ratio               {lifted.best_value / sphere.best_value:.8f}")
