"""Period map, areas and the catalog of compact rotational hypersurfaces.

A minimal rotational hypersurface ``M_a`` of the unit sphere ``S^{n+1}`` is
selected by a modulus ``0 < a < a0(n) = (n-1)^(n-1) / n^n``.  Its profile
radius ``r`` oscillates between ``sqrt(x1)`` and ``sqrt(x2)``, the roots of
``z(x) = x^(n-1) - x^n - a`` in ``(0, 1)``.  In the variable ``x = r^2``:

* profile period ``T    = int x^((n-2)/2)            / sqrt(z) dx``
* rotation angle ``K    = sqrt(a) int dx / ((1-x) sqrt(x) sqrt(z))``
* area integral  ``J    = int x^(n-3/2)              / sqrt(z) dx``

all over ``[x1, x2]``.  The fundamental portion has area
``sigma_{n-1} * J``; ``M_a`` closes up when ``K = 2 pi p / s`` with
``gcd(p, s) = 1`` and then has area ``s * sigma_{n-1} * J = w(a) * p`` with
``w(a) = 2 pi sigma_{n-1} J / K``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

import numpy as np

from . import numerics
from .errors import (
    DegenerateShape,
    InputError,
    InvalidDimension,
    InvalidRotation,
    NoSignChange,
    TargetOutOfRange,
)

#: Default number of Gauss-Legendre nodes of the singular rule.
DEFAULT_NODES = 128

#: Default tolerance on ``|K(a) - 2 pi p / s|`` when inverting the period map.
DEFAULT_TOL = 1e-10

#: Relative margins of the search bracket ``[a0 * lo, a0 * (1 - hi)]``.
SOLVE_BRACKET = (1e-9, 1e-9)

#: Smallest modulus tried when extending the search bracket downwards.
MIN_MODULUS = 1e-290


def _check_dimension(n: int, minimum: int = 2) -> int:
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise InvalidDimension(f"dimension must be an integer >= {minimum}, got {n!r}")
    return int(n)


def critical_parameter(n: int) -> float:
    """``a0(n) = (n-1)^(n-1) / n^n``, the modulus of the Clifford hypersurface."""
    n = _check_dimension(n)
    if n <= 1000:
        # exact integers; int / int is correctly rounded
        return (n - 1) ** (n - 1) / n**n
    return math.exp((n - 1) * math.log(n - 1) - n * math.log(n))


def sphere_area(m: int) -> float:
    """Area ``sigma_m = 2 pi^((m+1)/2) / Gamma((m+1)/2)`` of the unit ``S^m``."""
    m = _check_dimension(m, minimum=1)
    return 2.0 * math.pi ** (0.5 * (m + 1)) / numerics.gamma_half(m + 1)


def clifford_area(n: int, k: int = 1) -> float:
    """Area of ``S^k(sqrt(k/n)) x S^(n-k)(sqrt((n-k)/n))``."""
    n = _check_dimension(n)
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n - 1:
        raise InvalidDimension(f"need 1 <= k <= n-1, got k={k!r} for n={n}")
    k = int(k)
    return (
        sphere_area(k)
        * (k / n) ** (0.5 * k)
        * sphere_area(n - k)
        * ((n - k) / n) ** (0.5 * (n - k))
    )


@dataclass(frozen=True)
class ShapeParameter:
    """Dimension ``n`` and modulus ``a`` with ``0 < a < a0(n)``."""

    n: int
    a: float

    def __post_init__(self) -> None:
        n = _check_dimension(self.n)
        object.__setattr__(self, "n", n)
        a = float(self.a)
        a0 = critical_parameter(n)
        if not (0.0 < a < a0):
            raise DegenerateShape(f"modulus a={a!r} must lie in (0, a0={a0!r}) for n={n}")
        object.__setattr__(self, "a", a)

    @property
    def a0(self) -> float:
        return critical_parameter(self.n)


@dataclass(frozen=True)
class RootPair:
    """Roots ``x1 < x2`` of ``z`` in ``(0, 1)``.

    ``gap`` is ``1 - x2`` computed directly, which keeps its relative
    accuracy when ``x2`` is within rounding distance of 1.
    """

    x1: float
    x2: float
    gap: float

    @property
    def r1(self) -> float:
        return math.sqrt(self.x1)

    @property
    def r2(self) -> float:
        return math.sqrt(self.x2)


@dataclass(frozen=True)
class RotationSpec:
    """Coprime ``(p, s)``: rotation number ``p`` and ``s``-fold symmetry.

    A compact hypersurface needs ``1/2 < p/s < sqrt(2)/2``; that is checked
    by :attr:`admissible` rather than at construction so that callers can
    report an out-of-range target distinctly.
    """

    p: int
    s: int

    def __post_init__(self) -> None:
        for name in ("p", "s"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise InvalidRotation(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if math.gcd(self.p, self.s) != 1:
            raise InvalidRotation(f"p={self.p} and s={self.s} are not coprime")

    @property
    def admissible(self) -> bool:
        # 1/2 < p/s < 1/sqrt(2), in exact integer arithmetic
        return 2 * self.p > self.s and 2 * self.p * self.p < self.s * self.s

    @property
    def target(self) -> float:
        """Rotation angle ``2 pi p / s`` that closes the hypersurface."""
        return 2.0 * math.pi * self.p / self.s


@dataclass(frozen=True)
class GeometrySummary:
    n: int
    p: int
    s: int
    a: float
    T: float
    K: float
    w: float
    area: float
    entropy: float
    clifford_ratio: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "s": self.s,
            "a": self.a,
            "T": self.T,
            "K": self.K,
            "w": self.w,
            "area": self.area,
            "entropy": self.entropy,
            "clifford_ratio": self.clifford_ratio,
        }


# --------------------------------------------------------------------------
# Roots and the regularized denominator
# --------------------------------------------------------------------------


def z_function(n: int, a: float, x):
    """``z(x) = x^(n-1) (1 - x) - a``."""
    return x ** (n - 1) * (1.0 - x) - a


@lru_cache(maxsize=4096)
def _roots(n: int, a: float) -> RootPair:
    x0 = (n - 1) / n
    lo1 = 0.5 * a ** (1.0 / (n - 1))
    x1 = numerics.bracketed_root(lambda x: z_function(n, a, x), lo1, x0, xtol=0.0)
    # solve for u = 1 - x2 so that tiny gaps keep full relative precision
    u2 = numerics.bracketed_root(lambda u: (1.0 - u) ** (n - 1) * u - a, 0.5 * a, 1.0 - x0, xtol=0.0)
    return RootPair(x1, 1.0 - u2, u2)


def find_roots(shape: ShapeParameter) -> RootPair:
    """Roots ``x1 < (n-1)/n < x2`` of ``z(x) = x^(n-1) - x^n - a``.

    ``z`` increases on ``(0, x0)`` and decreases on ``(x0, 1)`` with maximum
    ``z(x0) = a0 - a > 0``, so each side holds exactly one root.

    Raises
    ------
    DegenerateShape
        If ``a`` is so close to ``a0`` that ``z(x0)`` does not resolve as
        positive in floating point.
    """
    try:
        return _roots(shape.n, shape.a)
    except NoSignChange as exc:
        raise DegenerateShape(f"roots of z are not separable at a={shape.a!r}: {exc}") from None


def reduced_denominator(n: int, roots: RootPair, x: np.ndarray) -> np.ndarray:
    """Return ``z(x) / ((x - x1)(x2 - x))`` without forming the ratio.

    This is minus the second divided difference ``z[x1, x2, x]``.  For the
    monomial ``x^m`` that divided difference is the complete homogeneous
    symmetric polynomial ``h_{m-2}(x1, x2, x)``, so the result is
    ``h_{n-2}(x1, x2, x) - h_{n-3}(x1, x2, x)``.
    """
    x = np.asarray(x, dtype=float)
    x1, x2 = roots.x1, roots.x2
    prev = np.zeros_like(x)  # h_{-1}
    cur = np.ones_like(x)  # h_0
    pair = 1.0  # h_j(x1, x2)
    for j in range(1, n - 1):
        pair = x2 * pair + x1**j
        prev, cur = cur, pair + x * cur
    return cur - prev


# --------------------------------------------------------------------------
# The three quadratures
# --------------------------------------------------------------------------


def _first_divided_difference(n: int, c: float, x: np.ndarray) -> np.ndarray:
    # z[c, x] = h_{n-2}(c, x) (1 - x) - c^(n-1), with h_j(c, x) = x h_{j-1} + c^j
    h = np.ones_like(x)
    for j in range(1, n - 1):
        h = x * h + c**j
    return h * (1.0 - x) - c ** (n - 1)


def _reduced_on_rule(n: int, roots: RootPair, rule: numerics.SingularRule) -> np.ndarray:
    if roots.x1 >= 0.5 * (n - 1) / n:
        # roots close together: the symmetric form has no cancellation
        return reduced_denominator(n, roots, rule.x)
    # Well separated roots: on each half divide the one-root difference
    # quotient by the offset to the other root, which is at least L/2.
    lower = _first_divided_difference(n, roots.x1, rule.x) / rule.right
    upper = -_first_divided_difference(n, roots.x2, rule.x) / rule.left
    return np.where(rule.upper, upper, lower)


@lru_cache(maxsize=4096)
def _quadratures(n: int, a: float, nodes: int) -> Tuple[float, float, float]:
    roots = _roots(n, a)
    rule = numerics.singular_rule(roots.x1, roots.x2, nodes, gap=(roots.x1, roots.gap))
    rho = _reduced_on_rule(n, roots, rule)
    if not np.all(rho > 0):
        raise DegenerateShape(f"reduced denominator not positive for n={n}, a={a!r}")
    inv = 1.0 / np.sqrt(rho)
    x = rule.x
    one_minus_x = np.where(rule.upper, roots.gap + rule.right, 1.0 - x)
    period = rule.integrate(x ** (0.5 * (n - 2)) * inv)
    angle = math.sqrt(a) * rule.integrate(inv / (one_minus_x * np.sqrt(x)))
    area = rule.integrate(x ** (n - 1.5) * inv)
    return period, angle, area


def period_T(shape: ShapeParameter, nodes: int = DEFAULT_NODES) -> float:
    """Period ``T = 2 int_{r1}^{r2} dr / sqrt(1 - r^2 - a r^(2-2n))`` of the profile.

    With ``x = r^2`` one has ``1 - r^2 - a r^(2-2n) = z(x) / x^(n-1)`` and
    ``dr = dx / (2 sqrt(x))``, so ``T = int x^((n-2)/2) / sqrt(z) dx``.
    For ``n = 2``, ``z = (x - x1)(x2 - x)`` and ``T = pi`` for every ``a``.
    """
    find_roots(shape)
    return _quadratures(shape.n, shape.a, nodes)[0]


def rotation_angle(shape: ShapeParameter, nodes: int = DEFAULT_NODES) -> float:
    """Period map ``K(a) = theta(T)``, the rotation angle over one period.

    ``K = 2 int_0^{T/2} sqrt(a) r^(1-n) / (1 - r^2) dt``; with ``dt = dr / sqrt(q)``
    and ``x = r^2`` this is ``sqrt(a) int dx / ((1 - x) sqrt(x) sqrt(z))``.
    The factor ``1/(1 - x)`` is nearly singular at ``x2`` when ``a`` is small,
    so the quadrature is graded towards both ends.
    """
    find_roots(shape)
    return _quadratures(shape.n, shape.a, nodes)[1]


def area_integral(shape: ShapeParameter, nodes: int = DEFAULT_NODES) -> float:
    """``J(a) = int_{x1}^{x2} x^(n-3/2) / sqrt(z) dx``; the fundamental portion has area ``sigma_{n-1} J``."""
    find_roots(shape)
    return _quadratures(shape.n, shape.a, nodes)[2]


def area_density(shape: ShapeParameter, nodes: int = DEFAULT_NODES) -> float:
    """``w(a) = 2 pi sigma_{n-1} J(a) / K(a)``, area per unit rotation number."""
    find_roots(shape)
    _, angle, area = _quadratures(shape.n, shape.a, nodes)
    return 2.0 * math.pi * sphere_area(shape.n - 1) * area / angle


# --------------------------------------------------------------------------
# Inversion of the period map and the catalog
# --------------------------------------------------------------------------


def solve_shape(
    n: int,
    spec: RotationSpec,
    tol: float = DEFAULT_TOL,
    nodes: int = DEFAULT_NODES,
) -> ShapeParameter:
    """Find the unique ``a`` with ``K(a) = 2 pi p / s``.

    ``K`` is strictly increasing from ``pi`` to ``sqrt(2) pi``, so a
    bracketed search over ``[a0 * 1e-9, a0 * (1 - 1e-9)]`` suffices unless
    the target is very close to ``pi``; the lower end is then pushed down
    by factors of ``1e-10`` until the target is bracketed.

    Raises
    ------
    TargetOutOfRange
        If ``2 pi p / s`` is not in ``(pi, sqrt(2) pi)``, or lies so close
        to an end that it is outside the period map on the search bracket.
    NonConvergence
        If the root finder fails.
    """
    n = _check_dimension(n)
    if not spec.admissible:
        raise TargetOutOfRange(
            f"K = 2*pi*{spec.p}/{spec.s} = {spec.target:.6f} is outside (pi, sqrt(2)*pi); "
            f"need 1/2 < p/s < sqrt(2)/2"
        )
    a0 = critical_parameter(n)
    lo, hi = a0 * SOLVE_BRACKET[0], a0 * (1.0 - SOLVE_BRACKET[1])
    target = spec.target

    def residual(a: float) -> float:
        return _quadratures(n, a, nodes)[1] - target

    # K - pi decays only like a^(1/(2n-2)); targets near pi need tiny a.
    while residual(lo) > 0.0:
        if lo < MIN_MODULUS:
            raise TargetOutOfRange(f"K = {target!r} is not attained for a >= {lo!r} (n={n})")
        lo *= 1e-10
    try:
        a = numerics.bracketed_root(residual, lo, hi, xtol=0.0, ftol=tol)
    except NoSignChange:
        raise TargetOutOfRange(
            f"K = {target!r} is not attained on a in [{lo!r}, {hi!r}] for n={n}"
        ) from None
    return ShapeParameter(n, a)


def summarize(
    n: int,
    spec: RotationSpec,
    tol: float = DEFAULT_TOL,
    nodes: int = DEFAULT_NODES,
) -> GeometrySummary:
    """Solve for ``a`` and tabulate ``T, K, w``, the area, entropy and Clifford ratio."""
    shape = solve_shape(n, spec, tol, nodes)
    period, angle, area_int = _quadratures(shape.n, shape.a, nodes)
    w = 2.0 * math.pi * sphere_area(n - 1) * area_int / angle
    area = w * spec.p
    return GeometrySummary(
        n=shape.n,
        p=spec.p,
        s=spec.s,
        a=shape.a,
        T=period,
        K=angle,
        w=w,
        area=area,
        entropy=area / sphere_area(n),
        clifford_ratio=area / clifford_area(n, 1),
    )


def rotation_specs(s_max: int) -> Iterator[RotationSpec]:
    """All admissible coprime ``(p, s)`` with ``s <= s_max``, by ``s`` then ``p``."""
    for s in range(3, int(s_max) + 1):
        for p in range(s // 2 + 1, s):
            if 2 * p * p >= s * s:
                break
            if math.gcd(p, s) == 1:
                yield RotationSpec(p, s)


def catalog(
    n: int,
    s_max: int,
    tol: float = DEFAULT_TOL,
    nodes: int = DEFAULT_NODES,
    workers: Optional[int] = None,
) -> List[GeometrySummary]:
    """Summaries of every compact ``M^n(s, p)`` with ``s <= s_max``, by ascending area.

    Ties in area are broken by ``s``.  With ``workers > 1`` the entries are
    computed on a thread pool; the result order does not depend on it.
    """
    n = _check_dimension(n)
    if isinstance(s_max, bool) or int(s_max) != s_max or s_max < 3:
        raise InputError(f"s_max must be an integer >= 3, got {s_max!r}")
    specs = list(rotation_specs(s_max))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda sp: summarize(n, sp, tol, nodes), specs))
    else:
        rows = [summarize(n, sp, tol, nodes) for sp in specs]
    return sorted(rows, key=lambda r: (r.area, r.s))
