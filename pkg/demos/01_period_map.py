"""The period map K(a) and the area density w(a).

Each modulus 0 < a < a0 gives one profile curve; over one period of r(t)
the curve turns by K(a).  The hypersurface closes up when K(a) = 2 pi p/s.
"""

import math

import numpy as np

from otsuki import geometry
from otsuki.geometry import ShapeParameter

n = 3
a0 = geometry.critical_parameter(n)
print(f"n = {n}: a0 = {a0:.12g}, Clifford area = {geometry.clifford_area(n, 1):.12g}")

# %% K increases from pi to sqrt(2) pi
for fraction in (1e-6, 1e-3, 0.1, 0.5, 0.9, 1 - 1e-6):
    shape = ShapeParameter(n, a0 * fraction)
    K = geometry.rotation_angle(shape)
    w = geometry.area_density(shape)
    print(f"a = a0*{fraction:<10g} T = {geometry.period_T(shape):.10f}  K/pi = {K / math.pi:.10f}  w = {w:.10f}")

# %% the lower limit is approached very slowly: K - pi ~ a^(1/(2n-2))
for e in (10, 20, 40):
    gap = geometry.rotation_angle(ShapeParameter(n, a0 * 10.0**-e)) - math.pi
    print(f"a = a0*1e-{e}: K - pi = {gap:.3e}")

# %% monotonicity on a fine grid
grid = np.geomspace(a0 * 1e-10, a0 * (1 - 1e-10), 2000)
K = np.array([geometry.rotation_angle(ShapeParameter(n, float(a))) for a in grid])
print("K strictly increasing on 2000 points:", bool(np.all(np.diff(K) > 0)))
