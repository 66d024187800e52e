"""Entropy of cones over minimal hypersurfaces of the sphere.

For a minimal ``M^n`` in ``S^(n+1)`` the cone ``C(M)`` is a self-shrinker and
its entropy reduces to ``lambda(C(M)) = |M| / sigma_n``: the Gaussian weight
integrates along the rays to ``(2 pi)^(-(n+1)/2) int_0^oo t^n e^(-t^2/2) dt``,
which is exactly ``1 / sigma_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

from . import geometry, numerics
from .errors import InvalidArea, InvalidDimension


@dataclass(frozen=True)
class EntropyRecord:
    """One cone: ``source`` is ``round_sphere``, ``clifford`` or ``spec(p,s)``."""

    n: int
    source: str
    area: float
    entropy: float
    threshold_margin: float = math.nan

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "source": self.source,
            "area": self.area,
            "entropy": self.entropy,
            "threshold_margin": self.threshold_margin,
        }


def cone_entropy(n: int, area: float) -> float:
    """``area / sigma_n``, the entropy of the cone over a minimal ``M^n`` of that area."""
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidDimension(f"n must be an integer >= 2, got {n!r}")
    if not (area > 0 and math.isfinite(area)):
        raise InvalidArea(f"area must be positive and finite, got {area!r}")
    return area / geometry.sphere_area(int(n))


def gaussian_moment(n: int) -> float:
    """``int_0^oo t^n exp(-t^2/2) dt = 2^((n-1)/2) Gamma((n+1)/2)``.

    >>> gaussian_moment(1), gaussian_moment(3)
    (1.0, 2.0)
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise InvalidDimension(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    return 2.0 ** (0.5 * (n - 1)) * numerics.gamma_half(n + 1)


def clifford_entropy(n: int) -> float:
    """``2 pi sigma_{n-1} sqrt(a0) / sigma_n``, the entropy of the cone over ``S^1 x S^(n-1)``."""
    return cone_entropy(n, geometry.clifford_area(n, 1))


def entropy_threshold(n: int) -> float:
    """``4 (pi - 1) sigma_{n-1} sqrt(a0) / sigma_n``; every non-Clifford cone in the family lies above it."""
    return 2.0 * (1.0 - 1.0 / math.pi) * clifford_entropy(n)


def entropy_table(
    n: int,
    s_max: int,
    tol: float = geometry.DEFAULT_TOL,
    nodes: int = geometry.DEFAULT_NODES,
) -> List[EntropyRecord]:
    """Round sphere, Clifford and catalog cones, with margins over the threshold.

    ``threshold_margin`` is ``entropy / threshold - 1`` for catalog rows
    (positive when the lower bound holds) and NaN for the reference rows.
    """
    sphere = geometry.sphere_area(n)
    clifford = geometry.clifford_area(n, 1)
    threshold = entropy_threshold(n)
    rows = [
        EntropyRecord(n, "round_sphere", sphere, cone_entropy(n, sphere)),
        EntropyRecord(n, "clifford", clifford, cone_entropy(n, clifford)),
    ]
    for entry in geometry.catalog(n, s_max, tol, nodes):
        lam = cone_entropy(n, entry.area)
        rows.append(EntropyRecord(n, f"spec({entry.p},{entry.s})", entry.area, lam, lam / threshold - 1.0))
    return rows
