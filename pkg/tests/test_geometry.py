from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otsuki import geometry
from otsuki.errors import DegenerateShape, InputError, InvalidDimension, InvalidRotation, TargetOutOfRange
from otsuki.geometry import RotationSpec, ShapeParameter

# Reference values from an independent 40-digit mpmath evaluation
# (findroot for the roots, tanh-sinh quadrature of the raw x-integrals).
ORACLE_INTEGRALS = {
    # (n, a): (x1, x2, T, K, J)
    (2, 0.1): (0.11270166537925832, 0.88729833462074168, 3.1415926535897932, 4.1945907008657622, 2.1216228309309043),
    (3, 0.05): (0.25992433398483828, 0.94387724647124564, 2.6614712852170375, 4.213806730254583, 1.6418559959868756),
    (4, 0.02): (0.30669101739717722, 0.9786631508575591, 2.4002376609473837, 4.1235934872961996, 1.3719230756221756),
    (5, 0.01): (0.35252906636416537, 0.98957176476201909, 2.2209085521059644, 4.0588070676428185, 1.2026667818845383),
}

ORACLE_SOLUTIONS = {
    # (n, p, s): (a*, area, area / |Clifford|)
    (2, 2, 3): (0.097805178755111397, 39.957263923971294, 2.0242586379430267),
    (3, 2, 3): (0.044193234036752017, 61.69199449970651, 2.0299762891577513),
    (3, 3, 5): (0.0039825145124223041, 99.495609241240004, 3.2739049737803972),
    (4, 2, 3): (0.028580200100963203, 81.840110337146734, 2.0318642886772411),
    (2, 4, 7): (0.0056219857820268273, 88.582745997940383, 4.4876543373999394),
}


# --- constants ----------------------------------------------------------------

@pytest.mark.parametrize("n, expected", [(2, 0.25), (3, 4 / 27), (4, 27 / 256), (5, 256 / 3125)])
def test_critical_parameter(n, expected):
    assert geometry.critical_parameter(n) == pytest.approx(expected, rel=1e-15)


def test_critical_parameter_large_n_is_continuous():
    # both branches of the evaluation agree in the asymptotic 1/(e n) regime
    for n in (999, 1000, 1001, 5000):
        assert geometry.critical_parameter(n) * math.e * n == pytest.approx(1.0, rel=1e-3)
    assert geometry.critical_parameter(1001) < geometry.critical_parameter(1000)


def test_critical_parameter_rejects_bad_dimension():
    with pytest.raises(InvalidDimension):
        geometry.critical_parameter(1)


@pytest.mark.parametrize("m, expected", [(1, 2 * math.pi), (2, 4 * math.pi), (3, 2 * math.pi**2)])
def test_sphere_area(m, expected):
    assert geometry.sphere_area(m) == pytest.approx(expected, rel=1e-15)


def test_sphere_area_domain():
    with pytest.raises(InvalidDimension):
        geometry.sphere_area(0)


@pytest.mark.parametrize("n", range(2, 11))
def test_clifford_area_from_critical_parameter(n):
    expected = 2 * math.pi * geometry.sphere_area(n - 1) * math.sqrt(geometry.critical_parameter(n))
    assert geometry.clifford_area(n, 1) == pytest.approx(expected, rel=1e-13)


def test_clifford_torus_area():
    assert geometry.clifford_area(2, 1) == pytest.approx(2 * math.pi**2, rel=1e-15)


# --- domain types ---------------------------------------------------------------

@pytest.mark.parametrize("a", [0.0, -0.1, 0.25, 0.3, math.nan])
def test_shape_parameter_rejects_degenerate_modulus(a):
    with pytest.raises(DegenerateShape):
        ShapeParameter(2, a)


def test_shape_parameter_rejects_dimension():
    with pytest.raises(InvalidDimension):
        ShapeParameter(1, 0.1)


@pytest.mark.parametrize("p, s", [(2, 4), (0, 3), (-1, 3), (3, 6)])
def test_rotation_spec_rejects_invalid_pairs(p, s):
    with pytest.raises(InvalidRotation):
        RotationSpec(p, s)


@given(st.integers(1, 200), st.integers(1, 200))
def test_admissible_matches_rational_window(p, s):
    if math.gcd(p, s) != 1:
        return
    q = Fraction(p, s)
    assert RotationSpec(p, s).admissible == (Fraction(1, 2) < q and 2 * q * q < 1)


def test_rotation_specs_enumeration():
    specs = [(r.p, r.s) for r in geometry.rotation_specs(10)]
    assert specs == [(2, 3), (3, 5), (4, 7), (5, 8), (5, 9), (7, 10)]


# --- roots and integrals ----------------------------------------------------------

@pytest.mark.parametrize("key", sorted(ORACLE_INTEGRALS))
def test_roots_against_oracle(key):
    n, a = key
    x1, x2 = ORACLE_INTEGRALS[key][:2]
    roots = geometry.find_roots(ShapeParameter(n, a))
    assert roots.x1 == pytest.approx(x1, rel=1e-14)
    assert roots.x2 == pytest.approx(x2, rel=1e-14)
    assert roots.gap == pytest.approx(1.0 - x2, rel=1e-12)
    assert roots.x1 < (n - 1) / n < roots.x2


@given(st.integers(2, 12), st.floats(1e-12, 1.0 - 1e-9))
@settings(max_examples=60)
def test_roots_are_zeros_of_z(n, fraction):
    shape = ShapeParameter(n, geometry.critical_parameter(n) * fraction)
    roots = geometry.find_roots(shape)
    for x in (roots.x1, roots.x2):
        # z has O(1) terms, so its residual at a rounded root is O(eps)
        assert abs(geometry.z_function(n, shape.a, x)) < 1e-15
    assert 0 < roots.x1 < roots.x2 < 1


@pytest.mark.parametrize("key", sorted(ORACLE_INTEGRALS))
def test_integrals_against_oracle(key):
    n, a = key
    _, _, T, K, J = ORACLE_INTEGRALS[key]
    shape = ShapeParameter(n, a)
    assert geometry.period_T(shape) == pytest.approx(T, rel=1e-13)
    assert geometry.rotation_angle(shape) == pytest.approx(K, rel=1e-13)
    assert geometry.area_integral(shape) == pytest.approx(J, rel=1e-13)


@given(st.floats(1e-14, 1.0 - 1e-10))
@settings(max_examples=60)
def test_period_is_pi_for_surfaces(fraction):
    # for n = 2, z is the quadratic (x - x1)(x2 - x)
    assert geometry.period_T(ShapeParameter(2, 0.25 * fraction)) == pytest.approx(math.pi, rel=1e-13)


@given(st.integers(2, 4), st.floats(0.01, 0.99))
@settings(max_examples=8, deadline=None)
def test_rotation_angle_against_live_oracle(n, fraction):
    mp = pytest.importorskip("mpmath")
    with mp.workdps(25):
        a = mp.mpf(geometry.critical_parameter(n) * fraction)
        z = lambda x: x ** (n - 1) * (1 - x) - a  # noqa: E731
        x0 = mp.mpf(n - 1) / n
        x1 = mp.findroot(z, (mp.mpf(0), x0), solver="illinois")
        x2 = mp.findroot(z, (x0, mp.mpf(1)), solver="illinois")
        k = mp.sqrt(a) * mp.quad(lambda x: 1 / ((1 - x) * mp.sqrt(x * z(x))), [x1, (x1 + x2) / 2, x2])
    assert geometry.rotation_angle(ShapeParameter(n, float(a))) == pytest.approx(float(k), rel=1e-12)


def test_node_doubling_is_converged():
    shape = ShapeParameter(3, 1e-40)
    assert geometry.rotation_angle(shape, 256) == pytest.approx(geometry.rotation_angle(shape, 128), rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_period_map_is_increasing_between_its_limits(n):
    a0 = geometry.critical_parameter(n)
    values = [geometry.rotation_angle(ShapeParameter(n, a)) for a in np.geomspace(a0 * 1e-12, a0 * (1 - 1e-9), 300)]
    assert np.all(np.diff(values) > 0)
    assert math.pi < values[0] < values[-1] < math.sqrt(2) * math.pi


def test_area_density_tends_to_clifford_area():
    for n in (2, 3, 6):
        a0 = geometry.critical_parameter(n)
        w = geometry.area_density(ShapeParameter(n, a0 * (1 - 1e-10)))
        assert w == pytest.approx(geometry.clifford_area(n, 1), rel=1e-9)


# --- solving and catalogs ------------------------------------------------------------

@pytest.mark.parametrize("key", sorted(ORACLE_SOLUTIONS))
def test_summaries_against_oracle(key):
    n, p, s = key
    a, area, ratio = ORACLE_SOLUTIONS[key]
    summary = geometry.summarize(n, RotationSpec(p, s))
    assert summary.a == pytest.approx(a, rel=1e-9)
    assert summary.area == pytest.approx(area, rel=1e-10)
    assert summary.clifford_ratio == pytest.approx(ratio, rel=1e-10)
    assert summary.K == pytest.approx(2 * math.pi * p / s, abs=1e-10)
    assert summary.entropy == pytest.approx(summary.area / geometry.sphere_area(n), rel=1e-15)


@pytest.mark.parametrize("n", [2, 3, 6, 10])
def test_solve_shape_hits_target(n):
    for spec in geometry.rotation_specs(30):
        shape = geometry.solve_shape(n, spec)
        assert abs(geometry.rotation_angle(shape) - spec.target) <= geometry.DEFAULT_TOL


@pytest.mark.parametrize("p, s", [(1, 1), (1, 2), (3, 4), (5, 7)])
def test_solve_shape_rejects_targets_outside_range(p, s):
    with pytest.raises(TargetOutOfRange, match="1/2 < p/s < sqrt"):
        geometry.solve_shape(2, RotationSpec(p, s))


def test_catalog_up_to_five():
    rows = geometry.catalog(2, 5)
    assert [(r.p, r.s) for r in rows] == [(2, 3), (3, 5)]


def test_catalog_is_sorted_and_thread_independent():
    serial = geometry.catalog(3, 30)
    threaded = geometry.catalog(3, 30, workers=4)
    assert [r.as_dict() for r in serial] == [r.as_dict() for r in threaded]
    areas = [r.area for r in serial]
    assert areas == sorted(areas)


def test_catalog_validates_bound():
    with pytest.raises(InputError):
        geometry.catalog(2, 2)


# K - pi at a = a0 * 1e-10, independent mpmath evaluation
ORACLE_SLOW_LIMIT = {2: 0.00012592367007018674, 3: 0.0051441655937149697, 4: 0.020805514678732679}


@pytest.mark.parametrize("n", sorted(ORACLE_SLOW_LIMIT))
def test_period_map_near_zero_modulus(n):
    a0 = geometry.critical_parameter(n)
    K = geometry.rotation_angle(ShapeParameter(n, a0 * 1e-10))
    assert K - math.pi == pytest.approx(ORACLE_SLOW_LIMIT[n], rel=1e-10)


@pytest.mark.parametrize("n, decades", [(3, (20, 40)), (4, (40, 60)), (6, (40, 80))])
def test_period_map_approaches_pi_like_a_power(n, decades):
    # K - pi ~ C a^(1/(2n-2)) as a -> 0; the windows keep K - pi far above rounding
    a0 = geometry.critical_parameter(n)
    a = a0 * 10.0 ** -np.array(decades, dtype=float)
    gaps = [geometry.rotation_angle(ShapeParameter(n, float(x))) - math.pi for x in a]
    slope = math.log(gaps[1] / gaps[0]) / math.log(a[1] / a[0])
    assert slope == pytest.approx(1 / (2 * n - 2), rel=1e-3)


def test_period_map_near_zero_modulus_for_surfaces():
    # for n = 2 the power law picks up a logarithm: K - pi ~ sqrt(a) (log(1/a) + c)
    offsets = []
    for e in (12, 14, 16, 18, 20):
        a = 0.25 * 10.0**-e
        gap = geometry.rotation_angle(ShapeParameter(2, a)) - math.pi
        offsets.append(gap / math.sqrt(a) - math.log(1 / a))
    assert max(offsets) - min(offsets) < 1e-3
