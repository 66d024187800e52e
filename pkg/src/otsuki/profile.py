"""Profile curve of the rotational hypersurfaces by direct ODE integration.

The hypersurface is swept by

    phi(y, t) = (r(t) y, sqrt(1 - r^2) cos theta(t), sqrt(1 - r^2) sin theta(t)),
    y in S^(n-1),

with the first integral ``r'^2 = 1 - r^2 - a r^(2-2n)`` and
``theta' = sqrt(a) r^(1-n) / (1 - r^2)``.  Differentiating the first integral
and dividing by ``2 r'`` gives the second order equation

    r'' = -r + a (n - 1) r^(1 - 2n),

which is regular at the turning points where ``r' = 0``; it is what gets
integrated, starting from ``(r, r', theta) = (r1, 0, 0)``.

Substituting ``r'^2`` into ``|phi_t|^2 = r'^2 + r^2 r'^2 / (1 - r^2) +
(1 - r^2) theta'^2`` gives ``|phi_t|^2 = (r'^2 + a r^(2-2n)) / (1 - r^2) = 1``,
so ``t`` is arclength along the profile.  This identity is derived from the
displays rather than stated with them; the area element of the fundamental
portion is then ``r^(n-1) dt dy`` and its area ``sigma_{n-1} int_0^T r^(n-1) dt``.

This module is an independent check on the quadrature pipeline in
:mod:`otsuki.geometry`: it only borrows ``T``, ``K`` and the turning points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import geometry, numerics
from .errors import DimensionUnsupported, InputError, PoleCollision, TurningPointStall
from .geometry import RotationSpec, ShapeParameter

DEFAULT_STEPS = 4096

#: Relative slack around ``[r1, r2]`` before the integration is declared stalled.
TURNING_SLACK = 1e-3

#: Stereographic projection refuses points with ``u4`` above ``1 - POLE_MARGIN``.
POLE_MARGIN = 1e-9

CURVE_HEADER = ("t", "r", "theta", "alpha_x", "alpha_y")


@dataclass(frozen=True)
class ProfilePath:
    """Samples of ``(t, r, r', theta)`` over one period ``[0, T]``.

    ``K`` is the rotation angle from quadrature; it is used to extend
    ``theta`` across copies.  ``spec`` is set when the shape was solved for
    a closing rotation, and fixes the number of copies of a closed curve.
    """

    shape: ShapeParameter
    t: np.ndarray
    r: np.ndarray
    r_dot: np.ndarray
    theta: np.ndarray
    T: float
    K: float
    spec: Optional[RotationSpec] = None

    @property
    def samples(self) -> List[Tuple[float, float, float, float]]:
        return list(zip(self.t.tolist(), self.r.tolist(), self.r_dot.tolist(), self.theta.tolist()))

    @property
    def steps(self) -> int:
        return self.t.size - 1

    def theta_rate(self) -> np.ndarray:
        n, a = self.shape.n, self.shape.a
        return math.sqrt(a) * self.r ** (1 - n) / (1.0 - self.r**2)

    def speed_residual(self) -> np.ndarray:
        """``|phi_t|^2 - 1`` at every sample."""
        n, a = self.shape.n, self.shape.a
        r, v = self.r, self.r_dot
        one_minus = 1.0 - r**2
        return v**2 + r**2 * v**2 / one_minus + a * r ** (2 - 2 * n) / one_minus - 1.0

    def energy_residual(self) -> np.ndarray:
        """``r'^2 - (1 - r^2 - a r^(2-2n))`` at every sample."""
        n, a = self.shape.n, self.shape.a
        r = self.r
        return self.r_dot**2 - (1.0 - r**2 - a * r ** (2 - 2 * n))

    def periodicity_error(self) -> Tuple[float, float]:
        """``(r(T) - r1, r'(T))``; reported, never corrected."""
        return float(self.r[-1] - self.r[0]), float(self.r_dot[-1])


def _rhs(n: int, a: float):
    root_a = math.sqrt(a)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        r = y[0]
        return np.array([y[1], -r + a * (n - 1) * r ** (1 - 2 * n), root_a * r ** (1 - n) / (1.0 - r * r)])

    return rhs


def integrate_profile(
    shape: ShapeParameter,
    steps_per_period: int = DEFAULT_STEPS,
    *,
    nodes: int = geometry.DEFAULT_NODES,
    spec: Optional[RotationSpec] = None,
) -> ProfilePath:
    """Integrate the profile over one period with fixed-step RK4.

    Parameters
    ----------
    shape : ShapeParameter
    steps_per_period : int
        Number of equal RK4 steps over ``[0, T]``; at least 1000.
    nodes : int
        Quadrature nodes for ``T`` and ``K``.
    spec : RotationSpec, optional
        Attached to the result for closed-curve and mesh exports.

    Raises
    ------
    TurningPointStall
        If ``r`` leaves ``[r1 (1 - 1e-3), r2 (1 + 1e-3)]``.
    NonFinite
        If the integration blows up.
    """
    if steps_per_period < 1000:
        raise InputError(f"steps_per_period must be >= 1000, got {steps_per_period}")
    n, a = shape.n, shape.a
    roots = geometry.find_roots(shape)
    T = geometry.period_T(shape, nodes)
    K = geometry.rotation_angle(shape, nodes)
    r1, r2 = roots.r1, roots.r2
    t, y = numerics.integrate_ode(_rhs(n, a), 0.0, [r1, 0.0, 0.0], T, steps_per_period)
    r = y[:, 0]
    lo, hi = r1 * (1.0 - TURNING_SLACK), r2 * (1.0 + TURNING_SLACK)
    bad = (r < lo) | (r > hi) | (r < 0.5 * r1)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise TurningPointStall(f"r={r[i]!r} at t={t[i]!r} left [{lo!r}, {hi!r}]")
    return ProfilePath(shape, t, r, y[:, 1].copy(), y[:, 2].copy(), T, K, spec)


def profile_for_spec(
    n: int,
    spec: RotationSpec,
    steps_per_period: int = DEFAULT_STEPS,
    *,
    tol: float = geometry.DEFAULT_TOL,
    nodes: int = geometry.DEFAULT_NODES,
) -> ProfilePath:
    """Solve for the closing modulus of ``spec`` and integrate its profile."""
    shape = geometry.solve_shape(n, spec, tol, nodes)
    return integrate_profile(shape, steps_per_period, nodes=nodes, spec=spec)


def _simpson(y: np.ndarray, h: float) -> float:
    m = y.size - 1
    if m % 2:
        # 3/8 rule on the last three intervals keeps fourth order
        tail = 3.0 * h / 8.0 * (y[-4] + 3.0 * y[-3] + 3.0 * y[-2] + y[-1])
        return _simpson(y[:-3], h) + tail if m > 3 else tail
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def fundamental_area(path: ProfilePath) -> float:
    """``sigma_{n-1} int_0^T r^(n-1) dt`` by composite Simpson over the samples."""
    n = path.shape.n
    h = path.T / path.steps
    return geometry.sphere_area(n - 1) * _simpson(path.r ** (n - 1), h)


def export_profile_curve(path: ProfilePath, copies: Optional[int] = None) -> np.ndarray:
    """Rows ``(t, r, theta, alpha_x, alpha_y)`` over ``[0, copies * T]``.

    ``alpha = sqrt(1 - r^2) (cos theta, sin theta)``.  Each copy repeats
    ``r`` and advances ``theta`` by ``K``; the seam sample is emitted once.
    ``copies`` defaults to ``s`` when the path carries a rotation spec.
    """
    if copies is None:
        copies = path.spec.s if path.spec is not None else 1
    if copies < 1:
        raise InputError(f"copies must be >= 1, got {copies}")
    m = path.steps
    k = np.repeat(np.arange(copies), m)
    idx = np.tile(np.arange(m), copies)
    k = np.append(k, copies - 1)
    idx = np.append(idx, m)
    t = path.t[idx] + k * path.T
    r = path.r[idx]
    theta = path.theta[idx] + k * path.K
    rho = np.sqrt(1.0 - r**2)
    return np.column_stack([t, r, theta, rho * np.cos(theta), rho * np.sin(theta)])


def _open_text(target: Union[str, Path, IO[str]]):
    if hasattr(target, "write"):
        return target, False
    return open(target, "w", encoding="utf-8", newline="\n"), True


def write_curve_csv(rows: np.ndarray, target: Union[str, Path, IO[str]]) -> None:
    """CSV with header ``t,r,theta,alpha_x,alpha_y``, ``%.17g`` values, LF endings."""
    fh, close = _open_text(target)
    try:
        fh.write(",".join(CURVE_HEADER) + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    finally:
        if close:
            fh.close()


@dataclass(frozen=True)
class MeshArtifact:
    """Triangulated stereographic image of a closed surface in ``S^3``.

    ``sphere_points`` keeps the pre-projection points in ``R^4``.
    """

    vertices: np.ndarray
    faces: np.ndarray
    metadata: dict
    sphere_points: np.ndarray = field(repr=False)

    def euler_characteristic(self) -> int:
        f = self.faces
        edges = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
        n_edges = np.unique(edges, axis=0).shape[0]
        return int(self.vertices.shape[0] - n_edges + f.shape[0])

    def face_areas(self) -> np.ndarray:
        v = self.vertices[self.faces]
        return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)

    def signed_volume(self) -> float:
        v = self.vertices[self.faces]
        return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)

    def write_obj(self, target: Union[str, Path, IO[str]]) -> None:
        """Wavefront OBJ: one ``#`` metadata line, ``v`` lines, then 1-based ``f`` lines."""
        fh, close = _open_text(target)
        try:
            meta = " ".join(f"{k}={v}" for k, v in self.metadata.items())
            fh.write(f"# {meta}\n")
            for x, y, z in self.vertices:
                fh.write("v %.17g %.17g %.17g\n" % (x, y, z))
            for i, j, k in self.faces + 1:
                fh.write(f"f {i} {j} {k}\n")
        finally:
            if close:
                fh.close()


def _grid_faces(rows: int, cols: int) -> np.ndarray:
    # quads (i, j) -> (i+1, j) -> (i+1, j+1) -> (i, j+1), wrapping both ways
    i, j = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    i, j = i.ravel(), j.ravel()
    ip, jp = (i + 1) % rows, (j + 1) % cols
    a, b, c, d = i * cols + j, ip * cols + j, ip * cols + jp, i * cols + jp
    return np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])


def export_mesh_s3(
    path: ProfilePath,
    circle_samples: int = 32,
    *,
    profile_samples: int = 256,
    copies: Optional[int] = None,
) -> MeshArtifact:
    """Mesh of the closed surface ``M^2`` in ``S^3``, stereographically projected to ``R^3``.

    Parameters
    ----------
    path : ProfilePath
        Profile of a surface (``n = 2``).
    circle_samples : int
        Points on the rotation circle ``y in S^1``; at least 16.
    profile_samples : int
        Rings per copy of the fundamental portion, taken from the path
        samples at (nearly) uniform spacing.
    copies : int, optional
        Defaults to ``s`` from ``path.spec``.

    The grid wraps in both directions, so the mesh is a closed torus.
    Faces are flipped if necessary so the enclosed signed volume is positive.
    """
    n = path.shape.n
    if n != 2:
        raise DimensionUnsupported(f"meshes are only available for n = 2, got n = {n}")
    if circle_samples < 16:
        raise InputError(f"circle_samples must be >= 16, got {circle_samples}")
    if copies is None:
        if path.spec is None:
            raise InputError("copies is required for a path without a rotation spec")
        copies = path.spec.s
    if copies < 1 or profile_samples < 3:
        raise InputError("copies must be >= 1 and profile_samples >= 3")
    m = path.steps
    idx = np.unique(np.rint(np.linspace(0, m, min(profile_samples, m) + 1)[:-1]).astype(int))
    r = np.tile(path.r[idx], copies)
    theta = (path.theta[idx][None, :] + path.K * np.arange(copies)[:, None]).ravel()
    beta = 2.0 * math.pi * np.arange(circle_samples) / circle_samples
    rho = np.sqrt(1.0 - r**2)
    u = np.empty((r.size, circle_samples, 4))
    u[..., 0] = r[:, None] * np.cos(beta)[None, :]
    u[..., 1] = r[:, None] * np.sin(beta)[None, :]
    u[..., 2] = (rho * np.cos(theta))[:, None]
    u[..., 3] = (rho * np.sin(theta))[:, None]
    u = u.reshape(-1, 4)
    if np.any(u[:, 3] > 1.0 - POLE_MARGIN):
        raise PoleCollision("a surface point lies at the projection pole")
    vertices = u[:, :3] / (1.0 - u[:, 3:4])
    faces = _grid_faces(r.size, circle_samples)
    spec = path.spec
    metadata = {
        "n": n,
        "p": spec.p if spec is not None else None,
        "s": spec.s if spec is not None else None,
        "a": repr(path.shape.a),
        "copies": copies,
    }
    mesh = MeshArtifact(vertices, faces, metadata, u)
    if mesh.signed_volume() < 0:
        mesh = MeshArtifact(vertices, faces[:, ::-1].copy(), metadata, u)
    return mesh
