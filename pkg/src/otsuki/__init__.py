"""Minimal rotational hypersurfaces ``M^n(s, p)`` of the unit sphere ``S^(n+1)``.

Submodules
----------
numerics   singular quadrature, bracketed roots, RK4, half-integer Gamma
geometry   roots, period map ``K(a)``, area density ``w(a)``, solving and catalogs
bounds     envelope functions and theorem certificates for the area bounds
profile    ODE integration of the profile curve, curve and mesh export
shrinker   entropies of the cones over the hypersurfaces
cli        the ``otsuki`` command
"""

from __future__ import annotations

from .errors import InputError, NumericalError, OtsukiError
from .geometry import (
    GeometrySummary,
    RootPair,
    RotationSpec,
    ShapeParameter,
    area_density,
    catalog,
    clifford_area,
    critical_parameter,
    find_roots,
    period_T,
    rotation_angle,
    solve_shape,
    sphere_area,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "GeometrySummary",
    "InputError",
    "NumericalError",
    "OtsukiError",
    "RootPair",
    "RotationSpec",
    "ShapeParameter",
    "area_density",
    "catalog",
    "clifford_area",
    "critical_parameter",
    "find_roots",
    "period_T",
    "rotation_angle",
    "solve_shape",
    "sphere_area",
    "summarize",
]
