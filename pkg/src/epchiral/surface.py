"""
Spectrum grids and the two EP constraint curves of a two-band model.

The EP conditions are ``Re D = |d_R|^2 - |d_I|^2 = 0`` and
``Im D / 2 = d_R . d_I = 0``.  Each zero set is traced with marching squares
on a grid, then every vertex is pulled onto the exact curve by Newton steps
along the gradient, so the emitted points satisfy the condition to rounding
error rather than to grid resolution.  The curves cross at the EPs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from skimage.measure import find_contours

from .errors import EmptyRegion
from .spectra import EPLocation, TwoBandModel, refine_ep


@dataclass
class SpectrumGrid:
    x: np.ndarray
    y: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray

    def csv(self, part: str) -> str:
        """``part='re'``: sheets ordered by real part; ``'im'``: by imaginary part."""
        if part == "re":
            a, b = self.e_plus.real, self.e_minus.real
        elif part == "im":
            a, b = self.e_plus.imag, self.e_minus.imag
        else:
            raise ValueError("part must be 're' or 'im'")
        hi, lo = np.maximum(a, b), np.minimum(a, b)
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        lines = [f"x,y,{part}_Eplus,{part}_Eminus"]
        for row in zip(X.ravel(), Y.ravel(), hi.ravel(), lo.ravel()):
            lines.append(",".join(f"{v:.12g}" for v in row))
        return "\n".join(lines) + "\n"


def _axes(region, nx, ny):
    x0, x1, y0, y1 = (float(v) for v in region)
    if nx < 2 or ny < 2:
        raise EmptyRegion(f"grid {nx}x{ny} is degenerate; need at least 2 points per axis")
    if not (x1 > x0 and y1 > y0):
        raise EmptyRegion(f"degenerate region {region!r}")
    return np.linspace(x0, x1, nx), np.linspace(y0, y1, ny)


def spectrum_grid(model: TwoBandModel, region=(-2, 2, -2, 2), nx: int = 201, ny: int = 201) -> SpectrumGrid:
    xs, ys = _axes(region, nx, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    r = np.sqrt(model.discriminant(X, Y) + 0j)
    d0 = model.offset(X, Y)
    return SpectrumGrid(xs, ys, d0 + r, d0 - r)


@dataclass
class ConstraintLoci:
    real: list[np.ndarray]
    imag: list[np.ndarray]
    intersections: list[EPLocation]

    @staticmethod
    def _csv(curves) -> str:
        lines = ["x,y,branch"]
        for k, c in enumerate(curves):
            for x, y in c:
                lines.append(f"{x:.12g},{y:.12g},{k}")
        return "\n".join(lines) + "\n"

    def csv_real(self) -> str:
        return self._csv(self.real)

    def csv_imag(self) -> str:
        return self._csv(self.imag)

    def csv_intersections(self) -> str:
        lines = ["x,y,residual"]
        for ep in self.intersections:
            lines.append(f"{ep.point.x:.12g},{ep.point.y:.12g},{ep.residual:.12g}")
        return "\n".join(lines) + "\n"


def _project_onto(f, pts, h, tol, max_iter=40):
    """Newton steps ``p <- p - f(p) grad f / |grad f|^2``; drops points that do not settle."""
    x, y = pts[:, 0].copy(), pts[:, 1].copy()
    for _ in range(max_iter):
        v = f(x, y)
        if np.all(np.abs(v) <= tol):
            break
        gx = (f(x + h, y) - f(x - h, y)) / (2 * h)
        gy = (f(x, y + h) - f(x, y - h)) / (2 * h)
        g2 = gx * gx + gy * gy
        ok = g2 > 0
        step = np.where(ok, v / np.where(ok, g2, 1.0), 0.0)
        x, y = x - step * gx, y - step * gy
    good = np.abs(f(x, y)) <= tol
    return np.column_stack([x[good], y[good]])


def _curves(f, xs, ys, h, tol):
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    field = f(X, Y)
    if np.all(field == 0):
        return []
    out = []
    for c in find_contours(field, 0.0):
        pts = np.column_stack([np.interp(c[:, 0], np.arange(len(xs)), xs),
                               np.interp(c[:, 1], np.arange(len(ys)), ys)])
        pts = _project_onto(f, pts, h, tol)
        if len(pts) >= 2:
            out.append(pts)
    return out


def _crossings(c1, c2):
    """Approximate intersection points of two polylines."""
    a0 = (c1[:-1, 0] + 1j * c1[:-1, 1])[:, None]
    a1 = (c1[1:, 0] + 1j * c1[1:, 1])[:, None]
    b0 = (c2[:-1, 0] + 1j * c2[:-1, 1])[None, :]
    b1 = (c2[1:, 0] + 1j * c2[1:, 1])[None, :]
    da, db, w = a1 - a0, b1 - b0, b0 - a0
    den = (np.conj(da) * db).imag
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (np.conj(w) * db).imag / den
        t = (np.conj(w) * da).imag / den
    hit = (den != 0) & (s >= 0) & (s <= 1) & (t >= 0) & (t <= 1)
    i, j = np.nonzero(hit)
    return list(a0[i, 0] + s[i, j] * da[i, 0])


def constraint_loci(model: TwoBandModel, region=(-2, 2, -2, 2), nx: int = 201, ny: int = 201,
                    tol: float = 1e-13, ep_tol: float = 1e-12) -> ConstraintLoci:
    """Points on the zero sets of both EP conditions and their refined intersections."""
    xs, ys = _axes(region, nx, ny)
    scale = max(xs[-1] - xs[0], ys[-1] - ys[0])
    h = 1e-7 * scale

    def f_re(x, y):
        return model.conditions(x, y)[0]

    def f_im(x, y):
        return model.conditions(x, y)[1]

    real = _curves(f_re, xs, ys, h, tol * max(1.0, scale ** 2))
    imag = _curves(f_im, xs, ys, h, tol * max(1.0, scale ** 2))

    eps: list[EPLocation] = []
    for c1 in real:
        for c2 in imag:
            for z in _crossings(c1, c2):
                ep = refine_ep(model, z, tol=ep_tol, scale=scale)
                if ep is None or any(abs(ep.z - q.z) < 1e-8 * scale for q in eps):
                    continue
                eps.append(ep)
    eps.sort(key=lambda ep: (ep.point.x, ep.point.y))
    return ConstraintLoci(real, imag, eps)
