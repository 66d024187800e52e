from __future__ import annotations

import math

import pytest

from otsuki import geometry, shrinker
from otsuki.errors import InvalidArea, InvalidDimension


def test_round_sphere_cone_has_unit_entropy():
    for n in range(2, 12):
        assert shrinker.cone_entropy(n, geometry.sphere_area(n)) == 1.0


def test_clifford_cone_entropy_for_surfaces():
    assert shrinker.cone_entropy(2, 2 * math.pi**2) == pytest.approx(math.pi / 2, rel=1e-15)
    assert shrinker.clifford_entropy(2) == pytest.approx(math.pi / 2, rel=1e-15)


@pytest.mark.parametrize("area", [0.0, -1.0, math.nan, math.inf])
def test_cone_entropy_rejects_bad_area(area):
    with pytest.raises(InvalidArea):
        shrinker.cone_entropy(2, area)


def test_cone_entropy_rejects_bad_dimension():
    with pytest.raises(InvalidDimension):
        shrinker.cone_entropy(1, 1.0)


@pytest.mark.parametrize("n, expected", [(0, math.sqrt(math.pi / 2)), (1, 1.0), (2, math.sqrt(math.pi / 2)), (3, 2.0)])
def test_gaussian_moment_values(n, expected):
    assert shrinker.gaussian_moment(n) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("n", range(0, 13))
def test_gaussian_moment_against_quadrature(n):
    integrate = pytest.importorskip("scipy.integrate")
    value, _ = integrate.quad(lambda t: t**n * math.exp(-0.5 * t * t), 0, math.inf, epsabs=0, epsrel=1e-13)
    assert shrinker.gaussian_moment(n) == pytest.approx(value, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 13))
def test_gaussian_weight_normalizes_sphere_area(n):
    product = (2 * math.pi) ** (-(n + 1) / 2) * shrinker.gaussian_moment(n) * geometry.sphere_area(n)
    assert product == pytest.approx(1.0, rel=1e-13)


def test_gaussian_moment_domain():
    with pytest.raises(InvalidDimension):
        shrinker.gaussian_moment(-1)


def test_surface_threshold():
    assert shrinker.entropy_threshold(2) == pytest.approx(math.pi - 1, rel=1e-14)


def test_entropy_table_for_surfaces():
    rows = shrinker.entropy_table(2, 10)
    assert [r.source for r in rows[:2]] == ["round_sphere", "clifford"]
    assert rows[0].entropy == 1.0
    assert rows[1].entropy == pytest.approx(math.pi / 2, rel=1e-15)
    assert math.isnan(rows[0].threshold_margin)
    catalog_rows = rows[2:]
    assert catalog_rows[0].source == "spec(2,3)"
    assert len(catalog_rows) == len(list(geometry.rotation_specs(10)))
    for r in catalog_rows:
        assert r.threshold_margin > 0
        assert r.entropy > rows[1].entropy
        assert r.as_dict()["source"] == r.source
    # the first closed member lies strictly inside the window from the area bounds
    first = catalog_rows[0].entropy
    assert 2 * (1 - 1 / math.pi) * math.pi / 2 < first < 3 * math.pi / 2
