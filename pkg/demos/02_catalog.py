"""Compact members M^n(s, p): solving K(a) = 2 pi p / s and ranking by area."""

from otsuki import geometry
from otsuki.errors import TargetOutOfRange
from otsuki.geometry import RotationSpec

# %% one member
summary = geometry.summarize(2, RotationSpec(2, 3))
for key, value in summary.as_dict().items():
    print(f"{key:>15} = {value}")

# %% every member with s <= 20, smallest area first
for n in (2, 3, 4):
    rows = geometry.catalog(n, 20)
    print(f"\nn = {n}: {len(rows)} members")
    for r in rows[:6]:
        print(f"  (p, s) = ({r.p:2d}, {r.s:2d})  a = {r.a:.6e}  |M|/|Clifford| = {r.clifford_ratio:.6f}")

# %% targets outside (pi, sqrt(2) pi) do not close up
try:
    geometry.solve_shape(2, RotationSpec(1, 2))
except TargetOutOfRange as exc:
    print("\nrejected:", exc)
