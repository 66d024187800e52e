from __future__ import annotations

import io
import math

import numpy as np
import pytest

from otsuki import geometry, profile
from otsuki.errors import DimensionUnsupported, InputError, PoleCollision, TurningPointStall
from otsuki.geometry import RotationSpec, ShapeParameter


@pytest.fixture(scope="module")
def torus_path():
    return profile.profile_for_spec(2, RotationSpec(2, 3))


def shape(n, fraction):
    return ShapeParameter(n, geometry.critical_parameter(n) * fraction)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("fraction", [0.25, 0.5, 0.75])
def test_profile_against_quadrature(n, fraction):
    sh = shape(n, fraction)
    path = profile.integrate_profile(sh)
    roots = geometry.find_roots(sh)
    assert path.theta[-1] == pytest.approx(geometry.rotation_angle(sh), rel=1e-6)
    assert path.T == pytest.approx(geometry.period_T(sh), rel=1e-15)
    dr, dv = path.periodicity_error()
    assert abs(dr) < 1e-6 and abs(dv) < 1e-6
    assert path.r[path.steps // 2] == pytest.approx(roots.r2, abs=1e-6)
    assert path.r[0] == roots.r1 and path.r_dot[0] == 0.0 and path.theta[0] == 0.0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_profile_invariants(n):
    path = profile.integrate_profile(shape(n, 0.3))
    assert np.max(np.abs(path.speed_residual())) < 1e-8
    assert np.max(np.abs(path.energy_residual())) < 1e-8
    assert np.all(np.diff(path.theta) > 0)
    assert np.all(path.theta_rate() > 0)


def test_samples_view(torus_path):
    samples = torus_path.samples
    assert len(samples) == torus_path.steps + 1
    assert samples[0] == (0.0, torus_path.r[0], 0.0, 0.0)


def test_profile_needs_enough_steps():
    with pytest.raises(InputError):
        profile.integrate_profile(shape(2, 0.5), 999)


def test_turning_point_stall(monkeypatch):
    real = geometry.find_roots

    def narrowed(sh):
        roots = real(sh)
        return geometry.RootPair(roots.x1, 0.5 * (roots.x1 + roots.x2), roots.gap)

    monkeypatch.setattr(profile.geometry, "find_roots", narrowed)
    with pytest.raises(TurningPointStall):
        profile.integrate_profile(shape(2, 0.5))


@pytest.mark.parametrize("n, p, s", [(2, 2, 3), (3, 2, 3), (3, 3, 5)])
def test_fundamental_area_matches_quadrature(n, p, s):
    path = profile.profile_for_spec(n, RotationSpec(p, s))
    summary = geometry.summarize(n, RotationSpec(p, s))
    assert s * profile.fundamental_area(path) == pytest.approx(summary.area, rel=1e-6)


def test_fundamental_area_converges():
    sh = shape(3, 0.5)
    coarse = profile.fundamental_area(profile.integrate_profile(sh, 4096))
    fine = profile.fundamental_area(profile.integrate_profile(sh, 8192))
    assert fine == pytest.approx(coarse, rel=1e-8)


def test_fundamental_area_near_clifford_limit():
    # area per unit rotation number tends to the Clifford area
    for n in (2, 3):
        path = profile.integrate_profile(shape(n, 1 - 1e-6))
        w = profile.fundamental_area(path) * 2 * math.pi / path.K
        assert w == pytest.approx(geometry.clifford_area(n, 1), rel=1e-5)


def test_simpson_with_odd_interval_count():
    sh = shape(2, 0.5)
    even = profile.fundamental_area(profile.integrate_profile(sh, 4096))
    odd = profile.fundamental_area(profile.integrate_profile(sh, 4095))
    assert odd == pytest.approx(even, rel=1e-10)


def test_curve_closes_after_s_copies(torus_path):
    rows = profile.export_profile_curve(torus_path)
    assert rows.shape == (3 * torus_path.steps + 1, 5)
    assert rows[-1, 2] == pytest.approx(4 * math.pi, abs=1e-5)
    assert rows[-1, 0] == pytest.approx(3 * torus_path.T, rel=1e-15)
    r = rows[:, 1]
    assert np.max(np.abs(rows[:, 3] ** 2 + rows[:, 4] ** 2 - (1 - r**2))) < 1e-12
    assert np.all(np.diff(rows[:, 0]) > 0) and np.all(np.diff(rows[:, 2]) > 0)


def test_curve_first_row(torus_path):
    rows = profile.export_profile_curve(torus_path, copies=1)
    r1 = torus_path.r[0]
    assert tuple(rows[0]) == (0.0, r1, 0.0, math.sqrt(1 - r1 * r1), 0.0)
    with pytest.raises(InputError):
        profile.export_profile_curve(torus_path, copies=0)


def test_curve_csv_format(torus_path):
    rows = profile.export_profile_curve(torus_path, copies=1)
    buffer = io.StringIO()
    profile.write_curve_csv(rows, buffer)
    text = buffer.getvalue()
    assert "\r" not in text
    lines = text.split("\n")
    assert lines[0] == "t,r,theta,alpha_x,alpha_y" and lines[-1] == ""
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:-1]])
    assert np.array_equal(parsed, rows)  # 17 significant digits round trip


def test_curve_csv_to_file(torus_path, tmp_path):
    target = tmp_path / "curve.csv"
    profile.write_curve_csv(profile.export_profile_curve(torus_path, 1), target)
    assert target.read_bytes().startswith(b"t,r,theta,alpha_x,alpha_y\n")


def test_mesh_of_torus(torus_path):
    mesh = profile.export_mesh_s3(torus_path, 32, profile_samples=128)
    assert mesh.vertices.shape == (3 * 128 * 32, 3)
    assert mesh.faces.shape == (2 * 3 * 128 * 32, 3)
    assert mesh.faces.min() == 0 and mesh.faces.max() == mesh.vertices.shape[0] - 1
    assert np.max(np.abs(np.sum(mesh.sphere_points**2, axis=1) - 1)) < 1e-10
    assert mesh.euler_characteristic() == 0
    assert mesh.face_areas().min() > 0
    assert mesh.signed_volume() > 0
    assert mesh.metadata == {"n": 2, "p": 2, "s": 3, "a": repr(torus_path.shape.a), "copies": 3}


def test_mesh_edges_are_shared_by_two_faces(torus_path):
    mesh = profile.export_mesh_s3(torus_path, 16, profile_samples=64)
    f = mesh.faces
    directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    # consistent orientation: every directed edge occurs once, with its reverse
    assert len({tuple(e) for e in directed}) == directed.shape[0]
    assert {tuple(e) for e in directed} == {(b, a) for a, b in directed}


def test_mesh_obj_format(torus_path):
    mesh = profile.export_mesh_s3(torus_path, 16, profile_samples=32)
    buffer = io.StringIO()
    mesh.write_obj(buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0].startswith("# n=2 p=2 s=3 a=")
    nv = mesh.vertices.shape[0]
    assert all(line.startswith("v ") for line in lines[1 : 1 + nv])
    assert all(line.startswith("f ") for line in lines[1 + nv :])
    indices = np.array([[int(i) for i in line.split()[1:]] for line in lines[1 + nv :]])
    assert indices.min() == 1 and indices.max() == nv


def test_mesh_guards(torus_path):
    with pytest.raises(DimensionUnsupported):
        profile.export_mesh_s3(profile.integrate_profile(shape(3, 0.5)), 32, copies=1)
    with pytest.raises(InputError):
        profile.export_mesh_s3(torus_path, 8)
    with pytest.raises(InputError):
        profile.export_mesh_s3(profile.integrate_profile(shape(2, 0.5)), 32)


def test_pole_collision_guard(torus_path):
    # a corrupted path that passes through the projection pole
    m = 1000
    bad = profile.ProfilePath(
        shape=torus_path.shape,
        t=np.linspace(0, 1, m + 1),
        r=np.full(m + 1, 1e-7),
        r_dot=np.zeros(m + 1),
        theta=np.full(m + 1, 0.5 * math.pi),
        T=1.0,
        K=0.0,
        spec=torus_path.spec,
    )
    with pytest.raises(PoleCollision):
        profile.export_mesh_s3(bad, 16)
