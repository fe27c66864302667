"""
Stereographic projection between the unit sphere and the extended plane.

Projection is from the north pole ``(0, 0, 1)`` onto the equatorial plane:

    (nt, chit, xit) -> (nt / (1 - xit), chit / (1 - xit))
    (n, chi)        -> (2n, 2chi, n^2 + chi^2 - 1) / (1 + n^2 + chi^2)

The north pole goes to the point at infinity, which is the tagged value
:data:`INFINITY` rather than a floating-point inf.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNIT_TOL = 1e-12
POLE_TOL = 1e-15

# published EP coordinates of the elliptic microcavity: plane (n, chi) and sphere
MICROCAVITY_EPS_PLANE = ((2.6257, 0.6001), (2.9036, 0.5372))
MICROCAVITY_EPS_SPHERE = ((0.636, 0.145, 0.758), (0.598, 0.111, 0.795))


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"


INFINITY = _Infinity()


@dataclass(frozen=True)
class SpherePoint:
    nt: float
    chit: float
    xit: float

    def __post_init__(self):
        r = self.nt ** 2 + self.chit ** 2 + self.xit ** 2
        if not abs(r - 1.0) <= UNIT_TOL:
            raise ValueError(f"point is not on the unit sphere (|p|^2 = {r:.12g})")

    def as_array(self) -> np.ndarray:
        return np.array([self.nt, self.chit, self.xit])


@dataclass(frozen=True)
class PlanePoint:
    n: float
    chi: float

    def __post_init__(self):
        if not (np.isfinite(self.n) and np.isfinite(self.chi)):
            raise ValueError("plane points must be finite; use INFINITY for the point at infinity")

    def as_array(self) -> np.ndarray:
        return np.array([self.n, self.chi])


def project(p: SpherePoint | Sequence[float]) -> PlanePoint | _Infinity:
    nt, chit, xit = (p.nt, p.chit, p.xit) if isinstance(p, SpherePoint) else p
    den = 1.0 - xit
    if den <= POLE_TOL:
        return INFINITY
    return PlanePoint(nt / den, chit / den)


def unproject(q: PlanePoint | Sequence[float]) -> SpherePoint:
    n, chi = (q.n, q.chi) if isinstance(q, PlanePoint) else q
    if not (np.isfinite(n) and np.isfinite(chi)):
        raise ValueError("unproject needs a finite plane point")
    zeta = 1.0 + n * n + chi * chi
    return SpherePoint(2 * n / zeta, 2 * chi / zeta, (n * n + chi * chi - 1) / zeta)


def project_array(xyz: np.ndarray) -> np.ndarray:
    """Vectorised projection of an ``(N, 3)`` array; the north pole maps to ``nan``."""
    xyz = np.asarray(xyz, float)
    den = 1.0 - xyz[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = xyz[:, :2] / den[:, None]
    out[den <= POLE_TOL] = np.nan
    return out


def unproject_array(nc: np.ndarray) -> np.ndarray:
    nc = np.asarray(nc, float)
    r2 = np.sum(nc ** 2, axis=1)
    zeta = 1.0 + r2
    return np.column_stack([2 * nc[:, 0] / zeta, 2 * nc[:, 1] / zeta, (r2 - 1) / zeta])


@dataclass
class CurveProjection:
    points: list
    branches: list[np.ndarray]


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def project_curve(curve: Iterable) -> CurveProjection:
    """Project a sampled sphere curve and split it where it passes the north pole.

    A split happens at a sample at the pole (it becomes :data:`INFINITY`) and
    between two samples whose great-circle step passes over the pole, detected
    as the pole lying closer to the step's midpoint than half the step's angle.
    ``branches`` holds the finite pieces as ``(m, 2)`` arrays ready for plotting.
    """
    pts = [p.as_array() if isinstance(p, SpherePoint) else np.asarray(p, float) for p in curve]
    if not pts:
        return CurveProjection([], [])
    xyz = np.vstack(pts)
    north = np.array([0.0, 0.0, 1.0])
    projected = [project(p) for p in xyz]

    branches, current = [], []
    for k, q in enumerate(projected):
        if k > 0 and q is not INFINITY and projected[k - 1] is not INFINITY:
            a, b = xyz[k - 1], xyz[k]
            half = 0.5 * np.arccos(np.clip(np.dot(a, b), -1.0, 1.0))
            mid = a + b
            if np.linalg.norm(mid) > 0:
                to_pole = np.arccos(np.clip(np.dot(_unit(mid), north), -1.0, 1.0))
                if to_pole < half:
                    if current:
                        branches.append(np.array(current))
                    current = []
        if q is INFINITY:
            if current:
                branches.append(np.array(current))
            current = []
        else:
            current.append([q.n, q.chi])
    if current:
        branches.append(np.array(current))
    return CurveProjection(projected, branches)


def great_circle_arc(p, q, n: int = 101, through=None) -> list[SpherePoint]:
    """Samples of the great-circle arc from ``p`` to ``q``.

    By default the short arc; with ``through`` the arc of the same great
    circle that contains that point.
    """
    p = _unit(np.asarray(p, float))
    q = _unit(np.asarray(q, float))
    axis = np.cross(p, q)
    if np.linalg.norm(axis) < 1e-12:
        raise ValueError("endpoints are parallel; the great circle is not unique")
    axis = _unit(axis)
    angle = np.arctan2(np.dot(np.cross(p, q), axis), np.dot(p, q))
    if through is not None:
        w = _unit(np.asarray(through, float))
        if abs(np.dot(w, axis)) > 1e-9:
            raise ValueError("'through' does not lie on the great circle of the endpoints")
        ang_w = np.arctan2(np.dot(np.cross(p, w), axis), np.dot(p, w)) % (2 * np.pi)
        if ang_w > angle:
            angle -= 2 * np.pi
    ts = np.linspace(0.0, angle, n)
    perp = np.cross(axis, p)
    arr = np.outer(np.cos(ts), p) + np.outer(np.sin(ts), perp)
    arr = _unit(arr)
    return [SpherePoint(*row) for row in arr]


def plane_csv(points: Iterable) -> str:
    lines = ["n,chi"]
    for q in points:
        if q is INFINITY:
            lines.append("inf,inf")
        else:
            n, chi = (q.n, q.chi) if isinstance(q, PlanePoint) else q
            lines.append(f"{n:.12g},{chi:.12g}")
    return "\n".join(lines) + "\n"


def sphere_csv(points: Iterable) -> str:
    lines = ["nt,chit,xit"]
    for p in points:
        nt, chit, xit = (p.nt, p.chit, p.xit) if isinstance(p, SpherePoint) else p
        lines.append(f"{nt:.12g},{chit:.12g},{xit:.12g}")
    return "\n".join(lines) + "\n"
