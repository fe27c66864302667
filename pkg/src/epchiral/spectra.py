"""
Spectra of two-band non-Hermitian models.

A two-band model is ``H = d_R.sigma + i d_I.sigma + d0 * 1`` with real
3-vectors ``d_R``, ``d_I`` depending on a point of the parameter plane.  Its
eigenvalues are ``d0 +/- sqrt(D)`` with the discriminant

    D = |d_R|^2 - |d_I|^2 + 2i d_R.d_I = d.d,   d = d_R + i d_I,

and exceptional points (EPs) are the zeros of ``D``.  Models work on numpy
arrays of coordinates so that grids and loops are evaluated in one call.

Sign conventions
----------------
``BranchTrace.d_arg`` is the plain increment of ``arg D`` along the loop
(counter-clockwise positive).  Words and vorticities use the clockwise-positive
convention of :mod:`epchiral.words`, so ``numerical_vorticity`` is
``-d_arg / (4 pi)``: a clockwise loop around both zeros of ``(z-z1)(z-z2)``
has ``d_arg = -4 pi`` and vorticity ``+1``, like the word ``ab``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (AmbiguousBasepoint, ClearanceViolation, EmptyRegion, NoConvergence,
                     NonQuantized, TangentCrossing, UnresolvedBranching)
from .loops import Loop, as_complex, default_cut_directions, polyline_distance
from .words import Letter, Word, reduce_free

MAX_TRACE_SAMPLES = 2 ** 20
# refinement stops once every step turns arg D by less than this
MAX_STEP_ARG = np.pi / 4
# best matching cost must be below this fraction of the swapped cost
MATCH_RATIO = 0.5
VORTICITY_TOL = 1e-3


class ParamPoint(NamedTuple):
    x: float
    y: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def of(cls, p) -> "ParamPoint":
        z = as_complex(p)
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            raise ValueError(f"parameter point must be finite, got {p!r}")
        return cls(z.real, z.imag)


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

class TwoBandModel:
    """Base class; subclasses implement :meth:`d_vector`.

    Evaluators must be pure and continuous on the region they are queried on.
    """

    name = "two_band"

    def d_vector(self, x, y):
        """Complex vector ``d = d_R + i d_I`` of shape ``(3,) + shape(x)`` and ``d0``."""
        raise NotImplementedError

    def vectors(self, x, y):
        d, d0 = self.d_vector(x, y)
        return d.real, d.imag, d0

    def discriminant(self, x, y):
        d, _ = self.d_vector(x, y)
        return d[0] * d[0] + d[1] * d[1] + d[2] * d[2]

    def offset(self, x, y):
        _, d0 = self.d_vector(x, y)
        return np.broadcast_to(d0, np.shape(x)) + 0j

    def hamiltonian(self, x: float, y: float) -> np.ndarray:
        d, d0 = self.d_vector(np.asarray(x, float), np.asarray(y, float))
        dx, dy, dz = (complex(c) for c in d)
        return np.array([[d0 + dz, dx - 1j * dy], [dx + 1j * dy, d0 - dz]], dtype=complex)

    def conditions(self, x, y):
        """The two real EP conditions ``|d_R|^2 - |d_I|^2`` and ``d_R.d_I``."""
        D = self.discriminant(x, y)
        return D.real, 0.5 * D.imag

    def to_spec(self) -> dict:
        raise TypeError(f"{type(self).__name__} has no file representation")


class NHDirac(TwoBandModel):
    """``H = kx sx + ky sy + i b_x sx``; EPs at ``(0, +/- b_x)``."""

    name = "nh_dirac"

    def __init__(self, b_x: float = 1.0):
        self.b_x = float(b_x)

    def d_vector(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return np.array([x + 1j * self.b_x, y + 0j, np.zeros_like(x) + 0j]), 0.0

    def discriminant_closed_form(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return x ** 2 + y ** 2 - self.b_x ** 2 + 2j * x * self.b_x

    def to_spec(self):
        return {"model": self.name, "b_x": self.b_x}

    def __repr__(self):
        return f"NHDirac(b_x={self.b_x})"


class SquareRoot(TwoBandModel):
    """Analytic model with ``D = (z - z1)(z - z2)``, ``z = x + iy``.

    Realised by ``d = (z - m, i h, 0)`` with ``m`` the midpoint and ``h`` the
    half separation, so ``d.d = (z-m)^2 - h^2 = D``.
    """

    name = "square_root"

    def __init__(self, z1: complex = -1j, z2: complex = 1j):
        self.z1 = complex(z1)
        self.z2 = complex(z2)

    def d_vector(self, x, y):
        z = np.asarray(x, float) + 1j * np.asarray(y, float)
        m = 0.5 * (self.z1 + self.z2)
        h = 0.5 * (self.z2 - self.z1)
        return np.array([z - m, np.full_like(z, 1j * h), np.zeros_like(z)]), 0.0

    def discriminant(self, x, y):
        z = np.asarray(x, float) + 1j * np.asarray(y, float)
        return (z - self.z1) * (z - self.z2)

    def to_spec(self):
        return {"model": self.name, "z1": [self.z1.real, self.z1.imag],
                "z2": [self.z2.real, self.z2.imag]}

    def __repr__(self):
        return f"SquareRoot(z1={self.z1}, z2={self.z2})"


class GenericTwoLevel(TwoBandModel):
    """``[[l1, g], [g, l2]]`` with ``l1``, ``l2``, ``g`` constants or numpy-aware callables of ``(x, y)``.

    Eigenvalues ``(l1+l2)/2 +/- sqrt(Delta^2 + g^2)`` with ``Delta = (l1-l2)/2``.
    """

    name = "two_level"

    def __init__(self, lam1: Callable | complex, lam2: Callable | complex, g: Callable | complex):
        self.lam1, self.lam2, self.g = lam1, lam2, g

    @staticmethod
    def _eval(f, x, y):
        v = f(x, y) if callable(f) else f
        return np.broadcast_to(np.asarray(v, complex), np.broadcast(x, y).shape)

    def d_vector(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        l1, l2, g = (self._eval(f, x, y) for f in (self.lam1, self.lam2, self.g))
        return np.array([g, np.zeros_like(g), 0.5 * (l1 - l2)]), 0.5 * (l1 + l2)


def eigenvalues(model: TwoBandModel, p) -> tuple[complex, complex]:
    """``d0 + sqrt(D)`` and ``d0 - sqrt(D)`` with the principal square root; unordered."""
    p = ParamPoint.of(p)
    D = complex(model.discriminant(p.x, p.y))
    d0 = complex(model.offset(p.x, p.y))
    s = np.sqrt(D)
    return d0 + s, d0 - s


def discriminant(model: TwoBandModel, p) -> complex:
    p = ParamPoint.of(p)
    return complex(model.discriminant(p.x, p.y))


# ---------------------------------------------------------------------------
# EP location
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EPLocation:
    point: ParamPoint
    residual: float

    @property
    def z(self) -> complex:
        return self.point.z


def _region(region) -> tuple[float, float, float, float]:
    x0, x1, y0, y1 = (float(v) for v in region)
    if not all(np.isfinite([x0, x1, y0, y1])) or x1 <= x0 or y1 <= y0:
        raise EmptyRegion(f"degenerate region {region!r}; expected (xmin, xmax, ymin, ymax)")
    return x0, x1, y0, y1


def _residual(model, x, y) -> float:
    f1, f2 = model.conditions(x, y)
    return float(max(abs(f1), abs(f2)))


def _newton(model, x, y, h, tol, max_iter=50):
    """Damped Newton on the two real EP conditions; returns (x, y, residual) or None."""
    def F(x, y):
        f1, f2 = model.conditions(np.float64(x), np.float64(y))
        return np.array([float(f1), float(f2)])

    f = F(x, y)
    res = np.max(np.abs(f))
    for _ in range(max_iter):
        if res <= tol:
            break
        J = np.empty((2, 2))
        J[:, 0] = (F(x + h, y) - F(x - h, y)) / (2 * h)
        J[:, 1] = (F(x, y + h) - F(x, y - h)) / (2 * h)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(30):
            xn, yn = x + lam * step[0], y + lam * step[1]
            fn = F(xn, yn)
            rn = np.max(np.abs(fn))
            if rn < res:
                break
            lam *= 0.5
        else:
            return None
        x, y, f, res = xn, yn, fn, rn
    if res > tol:
        return None
    # polishing steps; keep only improvements
    for _ in range(3):
        J = np.empty((2, 2))
        J[:, 0] = (F(x + h, y) - F(x - h, y)) / (2 * h)
        J[:, 1] = (F(x, y + h) - F(x, y - h)) / (2 * h)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            break
        fn = F(x + step[0], y + step[1])
        rn = np.max(np.abs(fn))
        if rn >= res:
            break
        x, y, f, res = x + step[0], y + step[1], fn, rn
    return float(x), float(y), float(res)


def refine_ep(model: TwoBandModel, p, tol: float = 1e-10, scale: float = 1.0) -> EPLocation | None:
    """Newton refinement of an approximate EP; ``None`` if it does not converge."""
    z = as_complex(p)
    out = _newton(model, z.real, z.imag, 1e-6 * scale, tol)
    if out is None:
        return None
    x, y, res = out
    return EPLocation(ParamPoint(x, y), res)


def find_eps(model: TwoBandModel, region=(-2.0, 2.0, -2.0, 2.0), grid_n: int = 64,
             tol: float = 1e-10) -> list[EPLocation]:
    """Locate the EPs of ``model`` inside ``region = (xmin, xmax, ymin, ymax)``.

    A ``grid_n x grid_n`` scan marks cells where both real conditions change
    sign; each marked cell seeds a damped Newton iteration (central-difference
    Jacobian, step ``1e-6`` of the region size).  Candidates that do not reach
    ``tol`` within 50 steps are dropped with a :class:`NoConvergence` warning.
    Results within ``10 * tol`` of each other are merged; the list is sorted by
    ``(x, y)``.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    if tol <= 0:
        raise ValueError("tol must be positive")
    x0, x1, y0, y1 = _region(region)
    scale = max(x1 - x0, y1 - y0)
    h = 1e-6 * scale

    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    f1, f2 = model.conditions(X, Y)

    def straddles(f):
        corners = np.stack([f[:-1, :-1], f[1:, :-1], f[:-1, 1:], f[1:, 1:]])
        return (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)

    cells = np.argwhere(straddles(f1) & straddles(f2))
    found: list[EPLocation] = []
    for i, j in cells:
        cx = 0.5 * (xs[i] + xs[i + 1])
        cy = 0.5 * (ys[j] + ys[j + 1])
        out = _newton(model, cx, cy, h, tol)
        if out is None:
            warnings.warn(f"Newton failed from cell centre ({cx:.6g}, {cy:.6g}); candidate dropped",
                          NoConvergence, stacklevel=2)
            continue
        x, y, res = out
        margin = 10 * tol
        if not (x0 - margin <= x <= x1 + margin and y0 - margin <= y <= y1 + margin):
            continue
        if any(abs(complex(x, y) - ep.z) <= 10 * tol for ep in found):
            continue
        found.append(EPLocation(ParamPoint(x, y), res))
    found.sort(key=lambda ep: (ep.point.x, ep.point.y))
    return found


# ---------------------------------------------------------------------------
# branch tracing
# ---------------------------------------------------------------------------

@dataclass
class BranchTrace:
    """Eigenvalue branches matched continuously along a sampled loop."""

    points: np.ndarray
    branch_plus: np.ndarray
    branch_minus: np.ndarray
    discriminant: np.ndarray
    permutation: tuple[int, int]
    d_arg: float
    n: int

    @property
    def swapped(self) -> bool:
        return self.permutation == (1, 0)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.points))

    def csv(self) -> str:
        lines = ["t,re_Eplus,im_Eplus,re_Eminus,im_Eminus,re_D,im_D"]
        for t, p, m, D in zip(self.t, self.branch_plus, self.branch_minus, self.discriminant):
            lines.append(",".join(f"{v:.12g}" for v in
                                  (t, p.real, p.imag, m.real, m.imag, D.real, D.imag)))
        return "\n".join(lines) + "\n"


def _match(D, d0):
    """Minimal-displacement matching of the pairs ``d0 +/- sqrt(D)``.

    Returns the sign sequence applied to the principal root and the worst ratio
    of chosen to rejected cost.  For two candidates the choice at each step only
    depends on the previous principal root, so it can be made for all steps at
    once and accumulated with a cumulative product.
    """
    r = np.sqrt(D)
    dd = d0[:-1] - d0[1:]
    # same sign as before vs. flipped
    x_keep = r[:-1] - r[1:]
    x_flip = r[:-1] + r[1:]
    c_keep = np.abs(dd + x_keep) + np.abs(dd - x_keep)
    c_flip = np.abs(dd + x_flip) + np.abs(dd - x_flip)
    tau = np.where(c_keep <= c_flip, 1.0, -1.0)
    best = np.minimum(c_keep, c_flip)
    worst = np.maximum(c_keep, c_flip)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(worst > 0, best / worst, 1.0)
    sigma = np.concatenate([[1.0], np.cumprod(tau)])
    return r, sigma, float(ratio.max()) if len(ratio) else 0.0


def _trace_once(model, pts):
    D = model.discriminant(pts.real, pts.imag)
    d0 = model.offset(pts.real, pts.imag)
    darg = np.angle(D[1:] / D[:-1])
    r, sigma, ratio = _match(D, d0)
    return D, d0, r, sigma, darg, ratio


def trace_loop(model: TwoBandModel, loop: Loop, n: int | None = None, *, eps=None,
               clearance: float | None = None, max_samples: int = MAX_TRACE_SAMPLES) -> BranchTrace:
    """Follow both eigenvalues around ``loop``.

    The sample count starts at ``n`` (default ``loop.samples``) and doubles until
    every step turns ``arg D`` by less than ``MAX_STEP_ARG`` and every
    minimal-displacement match is unambiguous.  ``eps`` are the EPs used for the
    clearance check; when omitted they are located inside the loop's padded
    bounding box.  ``clearance`` defaults to ``1e-3`` of the loop diameter.
    """
    n = loop.samples if n is None else int(n)
    if n < 64:
        raise ValueError("at least 64 samples are required")
    diam = loop.diameter()
    if clearance is None:
        clearance = 1e-3 * diam
    if eps is None:
        x0, x1, y0, y1 = loop.bounding_box()
        pad = 0.1 * max(diam, 1e-12)
        eps = find_eps(model, (x0 - pad, x1 + pad, y0 - pad, y1 + pad))
    ep_z = [as_complex(ep.z if isinstance(ep, EPLocation) else ep) for ep in eps]
    pts = loop.sample(n)
    for z in ep_z:
        dist = polyline_distance(z, pts)
        if dist <= clearance:
            raise ClearanceViolation(
                f"loop passes within {dist:.3g} of the EP at {z}; required clearance is "
                f"{clearance:.3g} -- move the loop further away from the EP")

    while True:
        D, d0, r, sigma, darg, ratio = _trace_once(model, pts)
        if np.any(D == 0):
            raise ClearanceViolation("a loop sample hits a zero of the discriminant")
        if np.max(np.abs(darg)) < MAX_STEP_ARG and ratio < MATCH_RATIO:
            break
        n *= 2
        if n > max_samples:
            raise UnresolvedBranching(
                f"steps still ambiguous at {max_samples} samples; increase the clearance from the EPs")
        pts = loop.sample(n)

    plus = d0 + sigma * r
    minus = d0 - sigma * r
    e0p, e0m = plus[0], minus[0]
    keep = abs(plus[-1] - e0p) + abs(minus[-1] - e0m)
    swap = abs(plus[-1] - e0m) + abs(minus[-1] - e0p)
    perm = (0, 1) if keep <= swap else (1, 0)
    return BranchTrace(points=pts, branch_plus=plus, branch_minus=minus, discriminant=D,
                       permutation=perm, d_arg=float(np.sum(darg)), n=len(pts) - 1)


class VorticityReading(NamedTuple):
    value: Fraction
    raw: float
    residual: float


def numerical_vorticity(trace: BranchTrace, tol: float = VORTICITY_TOL) -> VorticityReading:
    """Winding of ``E+ - E-`` (clockwise positive): ``-d_arg / (4 pi)`` snapped to a half-integer."""
    raw = -trace.d_arg / (4 * np.pi)
    value = Fraction(round(2 * raw), 2)
    residual = abs(raw - float(value))
    if residual > tol:
        raise NonQuantized(f"vorticity {raw:.6g} is {residual:.3g} away from a half-integer; "
                           "the loop is under-sampled")
    return VorticityReading(value, raw, residual)


def ep_charges(model: TwoBandModel, eps, radius: float | None = None, n: int = 512) -> list[int]:
    """Counter-clockwise winding of ``D`` on a small circle around each EP.

    Zeros of ``(z-z1)(z-z2)`` all have charge +1; the two EPs of the
    non-Hermitian Dirac model carry opposite charges.
    """
    z = [as_complex(ep.z if isinstance(ep, EPLocation) else ep) for ep in eps]
    if radius is None:
        sep = min((abs(p - q) for i, p in enumerate(z) for q in z[i + 1:]), default=1.0)
        radius = 0.1 * sep
    theta = np.linspace(0.0, 2 * np.pi, n + 1)
    out = []
    for p in z:
        c = p + radius * np.exp(1j * theta)
        D = model.discriminant(c.real, c.imag)
        out.append(int(round(np.sum(np.angle(D[1:] / D[:-1])) / (2 * np.pi))))
    return out


def predicted_vorticity(w: Word, charges: Sequence[int]) -> Fraction:
    """Vorticity of a loop in class ``w`` when EP ``i`` has discriminant charge ``charges[i]``."""
    return Fraction(sum(l.exponent * charges[l.generator] for l in w), 2)


# ---------------------------------------------------------------------------
# symbolic word from cut crossings
# ---------------------------------------------------------------------------

def _cross(u: complex, v):
    return u.real * np.imag(v) - u.imag * np.real(v)


def loop_word(loop, eps, cut_directions=None, n: int | None = None, *,
              tangent_tol: float = 1e-9) -> Word:
    """Homotopy class of a loop as a word, read off from crossings of cut rays.

    Ray ``i`` starts at ``eps[i]`` and runs along ``cut_directions[i]`` (default:
    radially away from the EP centroid).  Crossing ray ``i`` clockwise about its
    EP appends generator ``i`` with exponent +1, counter-clockwise with -1.  The
    freely reduced word is returned.
    """
    ep_z = [as_complex(ep.z if isinstance(ep, EPLocation) else ep) for ep in eps]
    dirs = default_cut_directions(ep_z) if cut_directions is None else \
        [as_complex(u) / abs(as_complex(u)) for u in cut_directions]
    if len(dirs) != len(ep_z):
        raise ValueError("one cut direction per EP is required")
    pts = loop.sample(n) if isinstance(loop, Loop) else np.asarray([as_complex(p) for p in loop])
    if pts[0] != pts[-1]:
        pts = np.append(pts, pts[0])
    scale = max(1.0, float(np.max(np.abs(pts))))

    events = []
    for i, (p, u) in enumerate(zip(ep_z, dirs)):
        rel = pts - p
        side = _cross(u, rel)
        along = (rel * np.conj(u)).real
        on_cut = (np.abs(side) <= tangent_tol * scale) & (along >= 0)
        if on_cut[0]:
            raise AmbiguousBasepoint(f"the loop starts on the cut of EP {i}")
        # points on the ray count as the positive side (half-open convention)
        s = np.where(side >= 0, 1, -1)
        idx = np.nonzero(s[:-1] != s[1:])[0]
        for k in idx:
            a, b = rel[k], rel[k + 1]
            sa, sb = side[k], side[k + 1]
            frac = sa / (sa - sb) if sa != sb else 0.0
            hit = a + frac * (b - a)
            if (hit * np.conj(u)).real < 0:
                continue
            seg = b - a
            sin = abs(_cross(u, seg)) / max(abs(seg), 1e-300)
            if sin < tangent_tol:
                raise TangentCrossing(f"segment {k} grazes the cut of EP {i}; resample the loop")
            # moving to the negative side (clockwise about the EP) is +1
            exponent = 1 if sb < sa else -1
            events.append((k, frac, i, exponent))
    events.sort()
    return reduce_free(Word(Letter(i, e) for _, _, i, e in events))
