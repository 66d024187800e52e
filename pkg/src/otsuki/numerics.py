"""Numerical kernels shared by the geometry, bounds and profile modules.

* :func:`bracketed_root` -- safeguarded false position (Illinois variant)
  with bisection fallback.
* :func:`integrate_singular` -- integrals of ``N(x) / sqrt(D(x))`` where ``D``
  has simple zeros at both ends of ``[x1, x2]``.  The cosine substitution
  ``x = (x1 + x2)/2 - (x2 - x1)/2 * cos(phi)`` turns the integral into
  ``int_0^pi N(x) / sqrt(rho(x)) dphi`` with ``rho = D / ((x - x1)(x2 - x))``
  smooth and positive, which composite Gauss-Legendre handles well.
* :func:`integrate_endpoint_singular` -- same idea when only one end of the
  interval is a zero of ``D``.
* :func:`integrate_ode` -- classical fixed-step fourth-order Runge-Kutta.
* :func:`gamma_half` -- ``Gamma(k/2)`` by the exact half-integer recurrence.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DenominatorNonpositive,
    InputError,
    InvalidDimension,
    NoSignChange,
    NonConvergence,
    NonFinite,
)

EPS = np.finfo(float).eps

#: Relative width of the endpoint layer in which ``rho`` is interpolated
#: towards its one-sided derivative limit instead of formed as a ratio.
BOUNDARY_LAYER = 1e-6

#: Deepest geometric refinement level of the singular rule.
MAX_GRADING_LEVELS = 1100

ScalarFunction = Callable[[float], float]
ArrayFunction = Callable[[np.ndarray], np.ndarray]


# --------------------------------------------------------------------------
# Root finding
# --------------------------------------------------------------------------


def bracketed_root(
    func: ScalarFunction,
    lo: float,
    hi: float,
    xtol: float = 1e-14,
    *,
    rtol: float = 4 * EPS,
    ftol: float = 0.0,
    maxiter: int = 200,
) -> float:
    """Find a zero of ``func`` inside the sign-changing bracket ``[lo, hi]``.

    Each step takes the false-position (secant through the bracket ends)
    point, with the Illinois down-weighting of a stale endpoint.  Whenever
    two consecutive steps fail to halve the bracket, or the secant point
    falls outside the open bracket, a bisection step is taken instead, so
    the bracket width at least halves every two iterations.  A positive
    bracket spanning more than a factor 16 is bisected geometrically.

    Parameters
    ----------
    func : callable
        Continuous scalar function.
    lo, hi : float
        Bracket with ``func(lo)`` and ``func(hi)`` of strictly opposite sign.
    xtol, rtol : float
        Stop once ``hi - lo <= xtol + rtol * max(|lo|, |hi|)``.
    ftol : float
        Also stop as soon as ``|func(x)| <= ftol``.
    maxiter : int
        Iteration cap.

    Returns
    -------
    float
        The bracket end (or iterate) with the smallest ``|func|``.

    Raises
    ------
    NoSignChange
        If ``func(lo)`` and ``func(hi)`` have the same sign.
    NonConvergence
        If the tolerance is not met within ``maxiter`` iterations.
    """
    if not xtol > 0 and not rtol > 0 and not ftol > 0:
        raise InputError("at least one tolerance must be positive")
    lo, hi = float(lo), float(hi)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = float(func(lo)), float(func(hi))
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise NonFinite(f"non-finite function value at bracket end: f({lo})={flo}, f({hi})={fhi}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoSignChange(f"f({lo!r})={flo:.3e} and f({hi!r})={fhi:.3e} have the same sign")

    # interpolation weights; the signs of slo/shi always match flo/fhi
    slo, shi = flo, fhi
    last_side = 0
    widths = [math.inf, math.inf]
    for _ in range(maxiter):
        if hi - lo <= xtol + rtol * max(abs(lo), abs(hi)):
            return lo if abs(flo) <= abs(fhi) else hi
        x = (lo * shi - hi * slo) / (shi - slo)
        if not (lo < x < hi) or (hi - lo) > 0.5 * widths[-2]:
            if lo > 0 and hi > 16.0 * lo:
                # bracket spans decades: bisect the logarithm
                x = math.sqrt(lo) * math.sqrt(hi)
            else:
                x = 0.5 * (lo + hi)
            if not (lo < x < hi):
                # adjacent floats: the bracket cannot shrink further
                return lo if abs(flo) <= abs(fhi) else hi
        fx = float(func(x))
        if not math.isfinite(fx):
            raise NonFinite(f"non-finite function value f({x!r})={fx}")
        if abs(fx) <= ftol or fx == 0.0:
            return x
        widths.append(hi - lo)
        if (fx > 0) == (flo > 0):
            lo, flo, slo = x, fx, fx
            if last_side == -1:
                shi *= 0.5
            last_side = -1
        else:
            hi, fhi, shi = x, fx, fx
            if last_side == 1:
                slo *= 0.5
            last_side = 1
    raise NonConvergence(f"bracketed_root: no convergence in {maxiter} iterations, bracket [{lo!r}, {hi!r}]")


# --------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _gauss_legendre(m: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(m)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_gauss_legendre(breaks: Sequence[float], m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an ``m``-point Gauss-Legendre rule on every panel."""
    t, w = _gauss_legendre(m)
    b = np.asarray(breaks, dtype=float)
    lo, hi = b[:-1, None], b[1:, None]
    half = 0.5 * (hi - lo)
    return (lo + half * (t + 1.0)).ravel(), (half * w).ravel()


def _grading_levels(gap: Optional[float], length: float) -> int:
    # A numerator singularity at distance ``gap`` outside the end of the
    # interval shows up in phi at distance ~2*sqrt(gap/length); grade the
    # panels geometrically until they are smaller than that.
    if gap is None or not gap > 0:
        return 0
    scale = 2.0 * math.sqrt(gap / length)
    if scale >= 1.0:
        return 0
    return min(MAX_GRADING_LEVELS, int(math.ceil(math.log2(math.pi / scale))))


@dataclass(frozen=True)
class SingularRule:
    """Quadrature rule for ``int_{x1}^{x2} N(x) / sqrt(D(x)) dx``.

    The integral is approximated by ``sum(weights * N(x) / sqrt(rho(x)))``
    with ``rho = D / (left * right)``.  ``left = x - x1`` and
    ``right = x2 - x`` are stored separately because they are computed
    without cancellation, whereas forming them from ``x`` is not.  Nodes
    with ``upper`` set lie in the half of the interval next to ``x2``.
    """

    x1: float
    x2: float
    x: np.ndarray
    left: np.ndarray
    right: np.ndarray
    upper: np.ndarray
    weights: np.ndarray

    @property
    def length(self) -> float:
        return self.x2 - self.x1

    def integrate(self, values: np.ndarray) -> float:
        """Apply the rule to already regularized integrand values ``N/sqrt(rho)``."""
        return float(np.dot(self.weights, values))


def _half_rule(levels: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
    # angle measured from the nearest end, graded towards 0
    half_pi = 0.5 * math.pi
    breaks = [0.0, *(half_pi * 2.0 ** (-k) for k in range(levels, 0, -1)), half_pi]
    return composite_gauss_legendre(breaks, m)


def singular_rule(
    x1: float,
    x2: float,
    nodes: int = 128,
    gap: Optional[Tuple[Optional[float], Optional[float]]] = None,
) -> SingularRule:
    """Build the composite rule in the angle variable.

    ``[0, pi]`` is split at ``pi/2``; each half carries ``nodes // 2``
    Gauss-Legendre points.  If ``gap = (d1, d2)`` gives the distance from
    ``x1`` (resp. ``x2``) to the nearest singularity of the numerator
    outside the interval, extra panels are added, graded geometrically
    (ratio 1/2) towards that end, each with ``nodes // 2`` points.  Each
    half is laid out in the angle measured from its own end, so nodes very
    close to ``x2`` keep their relative offset accuracy.
    """
    if not x2 > x1:
        raise InputError(f"need x1 < x2, got [{x1!r}, {x2!r}]")
    if nodes < 8:
        raise InputError(f"nodes must be >= 8, got {nodes}")
    length = x2 - x1
    d1, d2 = gap if gap is not None else (None, None)
    psi1, w1 = _half_rule(_grading_levels(d1, length), nodes // 2)
    psi2, w2 = _half_rule(_grading_levels(d2, length), nodes // 2)
    near1 = length * np.sin(0.5 * psi1) ** 2
    far1 = length * np.cos(0.5 * psi1) ** 2
    near2 = length * np.sin(0.5 * psi2) ** 2
    far2 = length * np.cos(0.5 * psi2) ** 2
    return SingularRule(
        x1=x1,
        x2=x2,
        x=np.concatenate([x1 + near1, x2 - near2]),
        left=np.concatenate([near1, far2]),
        right=np.concatenate([far1, near2]),
        upper=np.concatenate([np.zeros(psi1.size, bool), np.ones(psi2.size, bool)]),
        weights=np.concatenate([w1, w2]),
    )


def _one_sided_derivative(func: ArrayFunction, x: float, h: float) -> float:
    # second-order one-sided difference; ``h`` may be negative
    xs = np.array([x, x + h, x + 2.0 * h])
    f = np.asarray(func(xs), dtype=float)
    return float((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h))


def _layer_width(length: float, gap: Optional[float]) -> float:
    # a nearby singularity sets the scale on which rho varies
    if gap is not None and 0 < gap < length:
        return BOUNDARY_LAYER * gap
    return BOUNDARY_LAYER * length


def _regularized_denominator(
    denominator: ArrayFunction,
    derivative: Optional[ArrayFunction],
    rule: SingularRule,
    gap: Optional[Tuple[Optional[float], Optional[float]]] = None,
) -> np.ndarray:
    length = rule.length
    d = np.asarray(denominator(rule.x), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = d / (rule.left * rule.right)

    if derivative is not None:
        d1 = float(derivative(rule.x1))
        d2 = float(derivative(rule.x2))
    else:
        h = 1e-5 * length
        d1 = _one_sided_derivative(denominator, rule.x1, h)
        d2 = _one_sided_derivative(denominator, rule.x2, -h)
    rho1 = d1 / length
    rho2 = -d2 / length

    # Inside the layer the ratio loses all accuracy; interpolate linearly
    # between the endpoint limit and the ratio at the layer edge.
    g1, g2 = gap if gap is not None else (None, None)
    w1, w2 = _layer_width(length, g1), _layer_width(length, g2)
    edges = np.array([rule.x1 + w1, rule.x2 - w2])
    d_edge = np.asarray(denominator(edges), dtype=float)
    rho_edge = d_edge / np.array([w1 * (length - w1), w2 * (length - w2)])
    near1 = rule.left < w1
    near2 = rule.right < w2
    rho = np.where(near1, rho1 + (rho_edge[0] - rho1) * rule.left / w1, rho)
    rho = np.where(near2, rho2 + (rho_edge[1] - rho2) * rule.right / w2, rho)
    return rho


def integrate_singular(
    numerator: ArrayFunction,
    denominator: Optional[ArrayFunction],
    x1: float,
    x2: float,
    nodes: int = 128,
    *,
    derivative: Optional[ArrayFunction] = None,
    reduced: Optional[ArrayFunction] = None,
    gap: Optional[Tuple[Optional[float], Optional[float]]] = None,
) -> float:
    """Integrate ``numerator / sqrt(denominator)`` over ``[x1, x2]``.

    ``denominator`` must be positive inside the interval and have simple
    zeros at ``x1`` and ``x2``.  Both callables are applied to numpy arrays.

    Parameters
    ----------
    numerator, denominator : callable
        Vectorized functions of ``x``.
    x1, x2 : float
        The two zeros of ``denominator``.
    nodes : int
        Gauss-Legendre points per half of the angle interval (and per
        graded panel); at least 8.
    derivative : callable, optional
        Derivative of ``denominator``, used for the endpoint limits of
        ``rho``.  A one-sided finite difference is used when omitted.
    reduced : callable, optional
        ``rho(x) = denominator(x) / ((x - x1)(x2 - x))`` in closed form.
        When given, ``denominator`` and ``derivative`` are not used.
    gap : (float or None, float or None), optional
        Distances from ``x1`` and ``x2`` to the nearest singularity of
        ``numerator``; triggers geometric grading of the panels.

    Notes
    -----
    Without ``reduced`` the accuracy is limited by evaluating ``D`` next to
    its roots from ``x`` alone: the relative error is about
    ``1e-13 * max(1, |x1| / (x2 - x1))``.  Pass ``reduced`` for narrow
    intervals far from the origin.

    Raises
    ------
    DenominatorNonpositive
        If ``rho`` is not positive and finite at some node, which means
        ``x1``/``x2`` are not the roots bracketing a positive region.
    """
    rule = singular_rule(x1, x2, nodes, gap)
    if reduced is not None:
        rho = np.asarray(reduced(rule.x), dtype=float)
    else:
        if denominator is None:
            raise InputError("either denominator or reduced must be given")
        rho = _regularized_denominator(denominator, derivative, rule, gap)
    rho = np.broadcast_to(rho, rule.x.shape)
    if not np.all(rho > 0) or not np.all(np.isfinite(rho)):
        bad = rule.x[~((rho > 0) & np.isfinite(rho))][0]
        raise DenominatorNonpositive(f"denominator is not positive inside [{x1!r}, {x2!r}] (at x={bad!r})")
    num = np.broadcast_to(np.asarray(numerator(rule.x), dtype=float), rule.x.shape)
    return rule.integrate(num / np.sqrt(rho))


def integrate_endpoint_singular(
    numerator: ArrayFunction,
    denominator: ArrayFunction,
    lo: float,
    hi: float,
    singular_end: str,
    nodes: int = 128,
    *,
    derivative: Optional[ArrayFunction] = None,
    gap: Optional[float] = None,
) -> float:
    """Integrate ``numerator / sqrt(denominator)`` when only one end is a zero.

    With the zero at ``b`` and the regular end at ``c``, the substitution
    ``x = b + (c - b) * sin(psi)**2`` on ``psi in [0, pi/2]`` gives the
    smooth integrand ``2 sqrt(|c - b|) cos(psi) N / sqrt(rho)`` with
    ``rho = D / |x - b|``.

    Parameters
    ----------
    singular_end : {"lo", "hi"}
        Which end of ``[lo, hi]`` is the simple zero of ``denominator``.
    gap : float, optional
        Distance from the singular end to the nearest singularity of the
        integrand outside the interval; grades the panels towards that end.
    """
    if not hi > lo:
        raise InputError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    if singular_end not in ("lo", "hi"):
        raise InputError(f"singular_end must be 'lo' or 'hi', got {singular_end!r}")
    length = hi - lo
    b, direction = (lo, 1.0) if singular_end == "lo" else (hi, -1.0)
    # psi ~ sqrt(offset / length), half the angle scale of the two-sided rule
    levels = _grading_levels(None if gap is None else 0.25 * gap, length) + 1
    psi, w = _half_rule(levels, max(nodes // 2, 4))
    offset = length * np.sin(psi) ** 2
    x = b + direction * offset
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.asarray(denominator(x), dtype=float) / offset
    if derivative is not None:
        slope = float(derivative(b))
    else:
        slope = _one_sided_derivative(denominator, b, direction * 1e-5 * length)
    rho_b = direction * slope
    width = _layer_width(length, gap)
    edge = np.asarray(denominator(np.array([b + direction * width])), dtype=float)[0] / width
    near = offset < width
    rho = np.where(near, rho_b + (edge - rho_b) * offset / width, rho)
    if not np.all(rho > 0) or not np.all(np.isfinite(rho)):
        raise DenominatorNonpositive(f"denominator is not positive inside [{lo!r}, {hi!r}]")
    num = np.broadcast_to(np.asarray(numerator(x), dtype=float), x.shape)
    return float(np.dot(w, 2.0 * math.sqrt(length) * np.cos(psi) * num / np.sqrt(rho)))


# --------------------------------------------------------------------------
# ODE integration
# --------------------------------------------------------------------------


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: Sequence[float],
    t_end: float,
    steps: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Classical RK4 with ``steps`` equal steps from ``t0`` to ``t_end``.

    Returns
    -------
    t : ndarray, shape (steps + 1,)
    y : ndarray, shape (steps + 1, len(y0))
        Every intermediate state is retained.

    Raises
    ------
    NonFinite
        As soon as a state component stops being finite.
    """
    if steps < 100:
        raise InputError(f"steps must be >= 100, got {steps}")
    y = np.array(y0, dtype=float)
    if y.ndim != 1:
        raise InputError("initial state must be a flat vector")
    h = (t_end - t0) / steps
    t = t0 + h * np.arange(steps + 1)
    t[-1] = t_end
    out = np.empty((steps + 1, y.size))
    out[0] = y
    for i in range(steps):
        ti = t[i]
        k1 = np.asarray(rhs(ti, y), dtype=float)
        k2 = np.asarray(rhs(ti + 0.5 * h, y + 0.5 * h * k1), dtype=float)
        k3 = np.asarray(rhs(ti + 0.5 * h, y + 0.5 * h * k2), dtype=float)
        k4 = np.asarray(rhs(ti + h, y + h * k3), dtype=float)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"ODE state became non-finite at t={t[i + 1]!r}")
        out[i + 1] = y
    return t, out


# --------------------------------------------------------------------------
# Special functions
# --------------------------------------------------------------------------


def gamma_half(k: int) -> float:
    """Return ``Gamma(k / 2)`` for a positive integer ``k``.

    Uses ``Gamma(1/2) = sqrt(pi)``, ``Gamma(1) = 1`` and
    ``Gamma(x + 1) = x Gamma(x)``.
    """
    if int(k) != k or k < 1:
        raise InvalidDimension(f"gamma_half needs a positive integer, got {k!r}")
    k = int(k)
    if k % 2 == 0:
        return float(math.factorial(k // 2 - 1))
    value = math.sqrt(math.pi)
    for j in range(1, (k - 1) // 2 + 1):
        value *= j - 0.5
    return value
