"""Entropies of the cones over the compact members."""

import math

from otsuki import geometry, shrinker

# %% the Gaussian moment behind lambda(C(M)) = |M| / sigma_n
for n in range(1, 6):
    product = (2 * math.pi) ** (-(n + 1) / 2) * shrinker.gaussian_moment(n) * geometry.sphere_area(n)
    print(f"n = {n}: (2 pi)^(-(n+1)/2) * moment * sigma_n = {product!r}")

# %% table for surfaces
print(f"\nthreshold for n = 2: {shrinker.entropy_threshold(2):.12f} (pi - 1 = {math.pi - 1:.12f})")
for row in shrinker.entropy_table(2, 12):
    print(f"{row.source:>14}  entropy = {row.entropy:.10f}  margin = {row.threshold_margin:.4f}")
