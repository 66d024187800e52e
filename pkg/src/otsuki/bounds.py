"""Envelope bounds for the area integral and theorem certificates.

With ``y = x^(n - 1/2)`` the area integral becomes

    2 int_{x1}^{x2} x^(n-3/2) / sqrt(z(x)) dx = 4/(2n-1) int_{y1}^{y2} dy / sqrt(f(y)),
    f(y) = y^((2n-2)/(2n-1)) - y^(2n/(2n-1)) - a.

``f`` is bracketed by two piecewise quadratic envelopes that agree with it
at ``y1`` and ``y2``: ``g1 >= f`` (so ``int 1/sqrt(f) >= int 1/sqrt(g1)``)
and ``g2 <= f``.  The reciprocal square-root integrals of ``g1`` and ``g2``
are arcsine integrals in closed form, which gives the lower and upper
bounds on the area.

The certificates here are sampling based: the envelope inequalities are
checked on dense grids and the integrals by quadrature.  Each
:class:`CertificateReport` carries a signed margin so the slack is visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import geometry, numerics
from .errors import DenominatorNonpositive, DomainError, InputError
from .geometry import RotationSpec, ShapeParameter

#: Envelope inequalities are accepted up to this absolute slack.
ENVELOPE_SLACK = 1e-12

#: Required agreement between closed-form and quadrature envelope integrals.
CLOSED_FORM_RTOL = 1e-8

LOWER_CONSTANT = 2.0 * (1.0 - 1.0 / math.pi)


@dataclass(frozen=True)
class EnvelopeParams:
    """Constants of the two envelope constructions for one ``(n, a)``."""

    n: int
    a: float
    a0: float
    y1: float
    y2: float
    y_c: float
    c: float
    b: float
    B: float
    C: float
    A0: float

    @property
    def alpha(self) -> float:
        return (2 * self.n - 2) / (2 * self.n - 1)

    @property
    def beta(self) -> float:
        return 2 * self.n / (2 * self.n - 1)


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one numerical check.

    ``margin`` is the signed distance from the inequality boundary, in the
    units described by ``detail``; ``passed`` is ``margin > 0``.
    """

    claim: str
    passed: bool
    margin: float
    samples: int
    detail: str

    def as_dict(self) -> dict:
        return {
            "claim": self.claim,
            "passed": self.passed,
            "margin": self.margin,
            "samples": self.samples,
            "detail": self.detail,
        }


def _report(claim: str, margin: float, samples: int, detail: str) -> CertificateReport:
    margin = float(margin)
    return CertificateReport(claim, bool(margin > 0), margin, int(samples), detail)


def _combine(primary: float, checks: Sequence[Tuple[str, float]]) -> Tuple[float, List[str]]:
    # Report the primary margin unless a secondary check fails, in which case
    # the worst failing margin is reported so that passed <=> margin > 0.
    failed = [(name, m) for name, m in checks if not m > 0]
    if failed:
        return min(m for _, m in failed), [name for name, _ in failed]
    return primary, []


# --------------------------------------------------------------------------
# Envelope constants and functions
# --------------------------------------------------------------------------


def envelope_params(shape: ShapeParameter) -> EnvelopeParams:
    n, a = shape.n, shape.a
    roots = geometry.find_roots(shape)
    p = n - 0.5
    m = 2 * n - 1
    a0 = geometry.critical_parameter(n)
    ratio = (n - 1) / n
    b = 2.0 * (n - 1) / m**2 * ratio ** (-n)
    return EnvelopeParams(
        n=n,
        a=a,
        a0=a0,
        y1=roots.x1**p,
        y2=roots.x2**p,
        y_c=ratio ** (0.5 * m),
        c=8.0 * math.sqrt(n * (n - 1)) / m**2,
        b=b,
        B=1.0 / m,
        C=b,
        A0=0.25 * m * math.sqrt(2.0 * a0),
    )


def _as_positive(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise DomainError("f is defined for y > 0 only")
    return y


def f_eval(params: EnvelopeParams, y):
    """``f(y) = y^((2n-2)/(2n-1)) - y^(2n/(2n-1)) - a``; vectorized."""
    y = _as_positive(y)
    out = y**params.alpha - y**params.beta - params.a
    return float(out) if out.ndim == 0 else out


def f_derivative(params: EnvelopeParams, y):
    y = _as_positive(y)
    out = params.alpha * y ** (params.alpha - 1.0) - params.beta * y ** (params.beta - 1.0)
    return float(out) if out.ndim == 0 else out


def _check_domain(params: EnvelopeParams, y: np.ndarray) -> None:
    if np.any((y < params.y1) | (y > params.y2)):
        raise DomainError(f"envelope evaluated outside [y1, y2] = [{params.y1!r}, {params.y2!r}]")


def _pieces(params: EnvelopeParams, y, side: Optional[str]) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    _check_domain(params, y)
    if side is None:
        return y <= params.y_c
    if side not in ("left", "right"):
        raise InputError(f"side must be 'left', 'right' or None, got {side!r}")
    return np.full(y.shape, side == "left")


def g1_eval(params: EnvelopeParams, y, side: Optional[str] = None):
    """Lower-bound envelope ``g1 >= f``.

    ``c (sqrt(y1) - sqrt(yc))^2 - c (sqrt(y) - sqrt(yc))^2`` on ``[y1, yc]`` and
    ``b (y2 - yc)^2 - b (y - yc)^2`` on ``(yc, y2]``.  The two pieces need
    not meet at ``yc``; ``side`` selects a piece regardless of ``y``.
    """
    left = _pieces(params, y, side)
    y = np.asarray(y, dtype=float)
    sc = math.sqrt(params.y_c)
    lo = params.c * (math.sqrt(params.y1) - sc) ** 2 - params.c * (np.sqrt(y) - sc) ** 2
    hi = params.b * (params.y2 - params.y_c) ** 2 - params.b * (y - params.y_c) ** 2
    out = np.where(left, lo, hi)
    return float(out) if out.ndim == 0 else out


def g2_eval(params: EnvelopeParams, y, side: Optional[str] = None):
    """Upper-bound envelope ``g2 <= f``.

    ``C (y1 - yc)^2 - C (y - yc)^2`` on ``[y1, yc]`` and
    ``B (y2 - yc)^2 - B (y - yc)^2`` on ``(yc, y2]``.
    """
    left = _pieces(params, y, side)
    y = np.asarray(y, dtype=float)
    d = y - params.y_c
    lo = params.C * ((params.y1 - params.y_c) ** 2 - d**2)
    hi = params.B * ((params.y2 - params.y_c) ** 2 - d**2)
    out = np.where(left, lo, hi)
    return float(out) if out.ndim == 0 else out


def envelope_grid(params: EnvelopeParams, samples: int = 10_000) -> Tuple[np.ndarray, np.ndarray]:
    """Sample points on ``[y1, yc]`` (uniform in ``sqrt(y)``) and ``[yc, y2]`` (uniform in ``y``).

    Both halves contain ``yc`` so the one-sided limits there are sampled.
    """
    k = max(samples // 2, 2)
    left = np.linspace(math.sqrt(params.y1), math.sqrt(params.y_c), k) ** 2
    left[0], left[-1] = params.y1, params.y_c
    right = np.linspace(params.y_c, params.y2, samples - k)
    right[-1] = params.y2
    return left, right


def envelope_margins(params: EnvelopeParams, samples: int = 10_000) -> Tuple[float, float]:
    """Return ``(min h1, max h2)`` with ``h1 = g1 - f`` and ``h2 = g2 - f`` on a grid."""
    if samples < 1000:
        raise InputError(f"samples must be >= 1000, got {samples}")
    left, right = envelope_grid(params, samples)
    f_left, f_right = f_eval(params, left), f_eval(params, right)
    h1 = np.concatenate([g1_eval(params, left, "left") - f_left, g1_eval(params, right, "right") - f_right])
    h2 = np.concatenate([g2_eval(params, left, "left") - f_left, g2_eval(params, right, "right") - f_right])
    return float(h1.min()), float(h2.max())


class EnvelopeIntegrals(NamedTuple):
    """``int 1/sqrt(g)`` over each envelope piece."""

    g1_left: float
    g1_right: float
    g2_left: float
    g2_right: float


def closed_form_envelope_integrals(params: EnvelopeParams) -> EnvelopeIntegrals:
    """Closed forms of the four envelope integrals, as stated with the constructions."""
    n, A0 = params.n, params.A0
    m = 2 * n - 1
    return EnvelopeIntegrals(
        g1_left=(1.0 - 2.0 / math.pi + 2.0 / math.pi * math.sqrt(params.y1 / params.y_c)) * A0 * math.pi,
        g1_right=A0 * math.pi,
        g2_left=0.5 * math.sqrt(m**2 / (2.0 * (n - 1)) * (n / (n - 1)) ** (-n)) * math.pi,
        g2_right=0.5 * math.sqrt(m) * math.pi,
    )


def g1_left_arcsine(params: EnvelopeParams) -> float:
    """``int_{y1}^{yc} dy / sqrt(g1)`` derived directly.

    With ``u = sqrt(yc) - sqrt(y)`` and ``u1 = sqrt(yc) - sqrt(y1)`` the
    integral is ``(2/sqrt(c)) int_0^{u1} (sqrt(yc) - u) / sqrt(u1^2 - u^2) du
    = (2/sqrt(c)) (pi sqrt(yc)/2 - u1)``.
    """
    sc = math.sqrt(params.y_c)
    return 2.0 / math.sqrt(params.c) * (0.5 * math.pi * sc - (sc - math.sqrt(params.y1)))


def quadrature_envelope_integrals(params: EnvelopeParams, nodes: int = 128) -> EnvelopeIntegrals:
    """The four envelope integrals by one-sided singular quadrature."""
    one = lambda y: 1.0  # noqa: E731
    y1, yc, y2 = params.y1, params.y_c, params.y2

    def piece(g, lo, hi, end):
        # the left pieces see the branch point of sqrt(y) at distance y1
        gap = y1 if end == "lo" else None
        return numerics.integrate_endpoint_singular(
            one, lambda y: g(params, y, side), lo, hi, end, nodes, gap=gap
        )

    side = "left"
    g1_left = piece(g1_eval, y1, yc, "lo")
    g2_left = piece(g2_eval, y1, yc, "lo")
    side = "right"
    g1_right = piece(g1_eval, yc, y2, "hi")
    g2_right = piece(g2_eval, yc, y2, "hi")
    return EnvelopeIntegrals(g1_left, g1_right, g2_left, g2_right)


def _f_increment(params: EnvelopeParams, base: float, step: np.ndarray) -> np.ndarray:
    # f(base + step) - f(base) without forming the O(1) powers and subtracting
    t = np.log1p(step / base)
    return base**params.alpha * np.expm1(params.alpha * t) - base**params.beta * np.expm1(params.beta * t)


def y_integral(params: EnvelopeParams, nodes: int = 128) -> float:
    """``I(a) = int_{y1}^{y2} dy / sqrt(f(y))`` by singular quadrature in ``y``.

    ``rho = f / ((y - y1)(y2 - y))`` is evaluated from increments of ``f``
    away from the nearer root, so neither the thin band near ``a0`` (where
    ``f`` is much smaller than its terms) nor tiny ``y1`` loses accuracy.
    """
    rule = numerics.singular_rule(params.y1, params.y2, nodes, gap=(params.y1, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = _f_increment(params, params.y1, rule.left) / (rule.left * rule.right)
        upper = _f_increment(params, params.y2, -rule.right) / (rule.left * rule.right)
    rho = np.where(rule.upper, upper, lower)
    if not np.all(rho > 0) or not np.all(np.isfinite(rho)):
        raise DenominatorNonpositive(f"f is not positive inside [{params.y1!r}, {params.y2!r}]")
    return rule.integrate(1.0 / np.sqrt(rho))


def lower_bound_coefficient(params: EnvelopeParams) -> float:
    """``2 - 2/pi + (2/pi) sqrt(y1/yc)``: ``I(a) >= coefficient * A0 * pi``."""
    return 2.0 - 2.0 / math.pi + 2.0 / math.pi * math.sqrt(params.y1 / params.y_c)


def upper_bound_coefficient(n: int) -> float:
    """``1 + sqrt(2 / ((2n-1) a0))``: ``I(a) <= coefficient * A0 * pi`` for every ``a``."""
    return 1.0 + math.sqrt(2.0 / ((2 * n - 1) * geometry.critical_parameter(n)))


# --------------------------------------------------------------------------
# Certificates
# --------------------------------------------------------------------------


def default_grid(n: int, points: int = 100) -> np.ndarray:
    """Geometric grid on ``(a0 * 1e-6, a0 * (1 - 1e-6))``."""
    a0 = geometry.critical_parameter(n)
    return np.geomspace(a0 * 1e-6, a0 * (1.0 - 1e-6), points)


def certify_envelopes(
    n: int,
    a_values: Optional[Sequence[float]] = None,
    samples: int = 10_000,
    nodes: int = 128,
) -> List[CertificateReport]:
    """Check ``g1 >= f`` and ``g2 <= f`` and the closed-form envelope integrals.

    Margins are ``min h1 + 1e-12`` and ``1e-12 - max h2`` over all shapes.
    A disagreement between closed form, arcsine derivation and quadrature
    beyond ``1e-8`` relative makes the certificate fail.
    """
    a0 = geometry.critical_parameter(n)
    if a_values is None:
        a_values = [0.25 * a0, 0.5 * a0, 0.75 * a0]
    min_h1, max_h2 = math.inf, -math.inf
    worst = {"g1": 0.0, "g2": 0.0}
    for a in a_values:
        params = envelope_params(ShapeParameter(n, a))
        lo, hi = envelope_margins(params, samples)
        min_h1, max_h2 = min(min_h1, lo), max(max_h2, hi)
        closed = closed_form_envelope_integrals(params)
        quad = quadrature_envelope_integrals(params, nodes)
        arcsine = g1_left_arcsine(params)
        for name in ("g1", "g2"):
            for piece in ("left", "right"):
                key = f"{name}_{piece}"
                ref = getattr(closed, key)
                diffs = [abs(getattr(quad, key) / ref - 1.0)]
                if key == "g1_left":
                    diffs.append(abs(arcsine / ref - 1.0))
                worst[name] = max(worst[name], *diffs)
    count = len(a_values) * samples
    reports = []
    for name, value, margin in (
        ("g1", min_h1, min_h1 + ENVELOPE_SLACK),
        ("g2", max_h2, ENVELOPE_SLACK - max_h2),
    ):
        margin, failed = _combine(margin, [("closed forms", CLOSED_FORM_RTOL - worst[name])])
        what = "min h1" if name == "g1" else "max h2"
        detail = (
            f"n={n}: {what} = {value:.3e} over {len(a_values)} shapes; "
            f"closed form vs quadrature max rel. diff {worst[name]:.2e}"
        )
        if failed:
            detail += "; FAILED: " + ", ".join(failed)
        reports.append(_report(f"envelope_{name}", margin, count, detail))
    return reports


def certify_theorem1(
    n: int,
    a_grid: Optional[Sequence[float]] = None,
    nodes: int = 128,
) -> CertificateReport:
    """Lower bound ``I(a) > (2 - 2/pi) A0 pi`` across a grid of moduli.

    For every ``a`` this checks ``I(a) >= (2 - 2/pi + (2/pi) sqrt(y1/yc)) A0 pi``,
    that coefficient exceeding ``2 - 2/pi``, and the equivalent ``x``-form
    ``2 J(a) > 2 (1 - 1/pi) sqrt(2 a0) pi`` and its consequence
    ``2 w(a) / |Clifford| > 2 (1 - 1/pi)``.  The margin is
    ``min_a I(a) / ((2 - 2/pi) A0 pi) - 1``.
    """
    grid = default_grid(n) if a_grid is None else np.asarray(a_grid, dtype=float)
    a0 = geometry.critical_parameter(n)
    primary = math.inf
    sharp = math.inf
    xform = math.inf
    density = math.inf
    clifford = geometry.clifford_area(n, 1)
    for a in grid:
        shape = ShapeParameter(n, float(a))
        params = envelope_params(shape)
        integral = y_integral(params, nodes)
        base = LOWER_CONSTANT * params.A0 * math.pi
        primary = min(primary, integral / base - 1.0)
        sharp = min(sharp, integral / (lower_bound_coefficient(params) * params.A0 * math.pi) - 1.0)
        j = geometry.area_integral(shape, nodes)
        xform = min(xform, 2.0 * j / (LOWER_CONSTANT * math.sqrt(2.0 * a0) * math.pi) - 1.0)
        w = geometry.area_density(shape, nodes)
        density = min(density, 2.0 * w / clifford / LOWER_CONSTANT - 1.0)
    checks = [("sharp lower bound", sharp + ENVELOPE_SLACK), ("x-form", xform), ("2w/|Clifford|", density)]
    margin, failed = _combine(primary, checks)
    detail = (
        f"n={n}: min I/((2-2/pi)A0 pi) - 1 = {primary:.6g}; "
        f"min I/lower(a) - 1 = {sharp:.3e}; x-form margin {xform:.6g}; 2w/|Clifford| margin {density:.6g}"
    )
    if failed:
        detail += "; FAILED: " + ", ".join(failed)
    return _report("theorem1", margin, len(grid), detail)


def certify_corollary2(
    n: int,
    s_max: int = 10,
    tol: float = geometry.DEFAULT_TOL,
    nodes: int = 128,
) -> CertificateReport:
    """Every compact ``M^n(s, p)`` except ``(p, s) = (2, 3)`` has area above ``3(1 - 1/pi) |Clifford|``.

    Checked on the catalog up to ``s_max``; the margin is the smallest
    ``clifford_ratio / (3 (1 - 1/pi)) - 1``.  Entries are also checked
    against the weaker ``2 (1 - 1/pi)`` bound.
    """
    rows = geometry.catalog(n, s_max, tol, nodes)
    others = [r for r in rows if (r.p, r.s) != (2, 3)]
    weak = min(r.clifford_ratio for r in rows) / LOWER_CONSTANT - 1.0
    primary = min((r.clifford_ratio / (1.5 * LOWER_CONSTANT) - 1.0 for r in others), default=math.inf)
    margin, failed = _combine(primary, [("2(1-1/pi) bound", weak)])
    detail = f"n={n}, s<={s_max}: {len(rows)} entries; min ratio/(2(1-1/pi)) - 1 = {weak:.6g}"
    if failed:
        detail += "; FAILED: " + ", ".join(failed)
    return _report("corollary2", margin, len(rows), detail)


def certify_theorem4(
    n: int,
    tol: float = geometry.DEFAULT_TOL,
    nodes: int = 128,
) -> CertificateReport:
    """``|M^n(3,2)| < 3 |Clifford|`` together with the constants of its bounding chain.

    Checks, at the modulus of ``M^n(3,2)``: ``I <= (1 + sqrt(2/((2n-1) a0))) A0 pi``;
    for ``n = 3`` that coefficient equals ``1 + sqrt(27/10)``; for ``n >= 4`` it is
    below ``1 + sqrt((n/(n-1))^n) <= 25/9``; ``25/9 < 4/sqrt(2)``; and finally
    ``clifford_ratio < 3``.  The margin is ``3 - clifford_ratio``.
    """
    spec = RotationSpec(2, 3)
    summary = geometry.summarize(n, spec, tol, nodes)
    params = envelope_params(ShapeParameter(n, summary.a))
    integral = y_integral(params, nodes)
    coeff = upper_bound_coefficient(n)
    checks = [
        ("I <= chain bound", coeff * params.A0 * math.pi / integral - 1.0),
        ("25/9 < 4/sqrt(2)", 4.0 / math.sqrt(2.0) - 25.0 / 9.0),
        ("I < (4/sqrt(2)) A0 pi", 4.0 / math.sqrt(2.0) * params.A0 * math.pi / integral - 1.0),
    ]
    if n == 3:
        checks.append(("n=3 coefficient", 1e-12 - abs(coeff - (1.0 + math.sqrt(27.0 / 10.0)))))
    if n >= 4:
        loose = 1.0 + math.sqrt((n / (n - 1)) ** n)
        checks.append(("coefficient < 1 + sqrt((n/(n-1))^n)", loose - coeff))
        checks.append(("1 + sqrt((n/(n-1))^n) <= 25/9", 25.0 / 9.0 - loose + 1e-15))
    primary = 3.0 - summary.clifford_ratio
    margin, failed = _combine(primary, checks)
    detail = (
        f"n={n}: a*={summary.a:.12g}, |M(3,2)|/|Clifford| = {summary.clifford_ratio:.12g}; "
        f"I/(A0 pi) = {integral / (params.A0 * math.pi):.10g} <= {coeff:.10g}"
    )
    if failed:
        detail += "; FAILED: " + ", ".join(failed)
    return _report("theorem4", margin, 1, detail)


def certify_theorem3(
    n: int,
    s_max: int = 50,
    tol: float = geometry.DEFAULT_TOL,
    nodes: int = 128,
) -> CertificateReport:
    """The least area in the catalog belongs to ``M^n(3,2)`` or ``M^n(5,3)``.

    Also checks ``|M(7,4)| / |Clifford| > 4 (1 - 1/pi) * 7 sqrt(2)/8 > 3`` and
    that every other entry exceeds ``5 (1 - 1/pi)``.  The margin is the
    smallest relative gap among these checks.
    """
    if s_max < 7:
        raise InputError(f"s_max must be >= 7, got {s_max}")
    rows = geometry.catalog(n, s_max, tol, nodes)
    special = {(2, 3), (3, 5)}
    best = min(r.area for r in rows if (r.p, r.s) in special)
    rest = [r for r in rows if (r.p, r.s) not in special]
    minimum = rest[0].area / best - 1.0
    seven = next(r for r in rows if (r.p, r.s) == (4, 7))
    bound74 = 4.0 * (1.0 - 1.0 / math.pi) * 7.0 * math.sqrt(2.0) / 8.0
    others = [r for r in rest if (r.p, r.s) != (4, 7)]
    five = min((r.clifford_ratio for r in others), default=math.inf) / (5.0 * (1.0 - 1.0 / math.pi)) - 1.0
    checks = [
        ("minimum at (2,3) or (3,5)", minimum),
        ("|M(7,4)| > 4(1-1/pi) 7 sqrt2/8 |Clifford|", seven.clifford_ratio / bound74 - 1.0),
        ("4(1-1/pi) 7 sqrt2/8 > 3", bound74 - 3.0),
        ("others > 5(1-1/pi) |Clifford|", five),
    ]
    margin = min(m for _, m in checks)
    argmin = rows[0]
    detail = (
        f"n={n}, s<={s_max}: minimum at (p,s)=({argmin.p},{argmin.s}) with ratio {argmin.clifford_ratio:.10g}; "
        + "; ".join(f"{name}: {m:.4g}" for name, m in checks)
    )
    return _report("theorem3", margin, len(rows), detail)
