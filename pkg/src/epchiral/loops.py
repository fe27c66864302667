"""
Closed loops in the parameter plane.

Points of the plane are handled as complex numbers ``x + 1j*y`` throughout.
A :class:`Loop` is a closed chain of line and circular-arc segments; it can be
sampled at any resolution, which is what the adaptive branch tracer needs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .words import Word

CLOSURE_TOL = 1e-9


def as_complex(p) -> complex:
    """Accept ``complex``, a 2-sequence ``(x, y)`` or an object with ``x``/``y``."""
    if isinstance(p, (complex, float, int, np.number)):
        return complex(p)
    if hasattr(p, "x") and hasattr(p, "y"):
        return complex(p.x, p.y)
    x, y = p
    return complex(x, y)


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, u):
        u = np.asarray(u, dtype=float)
        return self.start + (self.end - self.start) * u

    def reversed(self) -> "LineSegment":
        return LineSegment(self.end, self.start)

    def to_spec(self) -> dict:
        return {"type": "line", "start": [self.start.real, self.start.imag],
                "end": [self.end.real, self.end.imag]}


@dataclass(frozen=True)
class ArcSegment:
    """Arc ``center + radius * exp(1j*(start_angle + u*sweep))``; negative sweep is clockwise."""

    center: complex
    radius: float
    start_angle: float
    sweep: float

    @property
    def length(self) -> float:
        return abs(self.radius * self.sweep)

    @property
    def start(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.start_angle)

    @property
    def end(self) -> complex:
        return self.center + self.radius * np.exp(1j * (self.start_angle + self.sweep))

    def point(self, u):
        u = np.asarray(u, dtype=float)
        return self.center + self.radius * np.exp(1j * (self.start_angle + u * self.sweep))

    def reversed(self) -> "ArcSegment":
        return ArcSegment(self.center, self.radius, self.start_angle + self.sweep, -self.sweep)

    def to_spec(self) -> dict:
        return {"type": "arc", "center": [self.center.real, self.center.imag],
                "radius": self.radius, "start_angle": self.start_angle, "sweep": self.sweep}


class Loop:
    """Closed piecewise path made of :class:`LineSegment` and :class:`ArcSegment`."""

    def __init__(self, segments: Sequence, samples: int = 4096):
        segments = tuple(segments)
        if not segments:
            raise ValueError("a loop needs at least one segment")
        scale = max(1.0, max(abs(s.start) for s in segments))
        for s, t in zip(segments, segments[1:] + segments[:1]):
            if abs(s.end - t.start) > CLOSURE_TOL * scale:
                raise ValueError(f"segments do not chain: {s.end} != {t.start}")
        self.segments = segments
        self.samples = int(samples)

    # -- constructors ------------------------------------------------------------

    @classmethod
    def circle(cls, center, radius: float, orientation: str = "cw",
               start_angle: float = 0.0, samples: int = 4096) -> "Loop":
        if radius <= 0:
            raise ValueError("radius must be positive")
        if orientation not in ("cw", "ccw"):
            raise ValueError("orientation must be 'cw' or 'ccw'")
        sweep = -2 * np.pi if orientation == "cw" else 2 * np.pi
        return cls([ArcSegment(as_complex(center), float(radius), float(start_angle), sweep)],
                   samples=samples)

    @classmethod
    def polyline(cls, points, samples: int = 4096) -> "Loop":
        pts = [as_complex(p) for p in points]
        if len(pts) < 3:
            raise ValueError("a polyline loop needs at least three points")
        if pts[0] != pts[-1]:
            pts.append(pts[0])
        segs = [LineSegment(p, q) for p, q in zip(pts, pts[1:]) if p != q]
        return cls(segs, samples=samples)

    # -- geometry ------------------------------------------------------------------

    @property
    def start(self) -> complex:
        return complex(self.segments[0].start)

    @property
    def length(self) -> float:
        return float(sum(s.length for s in self.segments))

    def sample(self, n: int | None = None) -> np.ndarray:
        """About ``n`` points along the loop, segment endpoints included; last == first."""
        n = self.samples if n is None else int(n)
        lengths = np.array([s.length for s in self.segments])
        total = lengths.sum()
        parts = []
        for seg, L in zip(self.segments, lengths):
            m = max(1, int(round(n * L / total)))
            if isinstance(seg, ArcSegment):
                m = max(m, int(np.ceil(abs(seg.sweep) / (np.pi / 8))))
            parts.append(seg.point(np.arange(m) / m))
        pts = np.concatenate(parts + [np.array([self.start])])
        pts[-1] = pts[0]
        return pts

    def bounding_box(self, n: int = 2048) -> tuple[float, float, float, float]:
        z = self.sample(n)
        return float(z.real.min()), float(z.real.max()), float(z.imag.min()), float(z.imag.max())

    def diameter(self, n: int = 2048) -> float:
        """Bounding-box diagonal; an upper bound of the true diameter."""
        x0, x1, y0, y1 = self.bounding_box(n)
        return float(np.hypot(x1 - x0, y1 - y0))

    def reversed(self) -> "Loop":
        return Loop([s.reversed() for s in reversed(self.segments)], samples=self.samples)

    def __add__(self, other: "Loop") -> "Loop":
        """Concatenation of two loops sharing a basepoint."""
        return Loop(self.segments + other.segments, samples=max(self.samples, other.samples))

    def to_spec(self) -> dict:
        return {"kind": "arcs", "segments": [s.to_spec() for s in self.segments],
                "samples": self.samples}


def segment_distance(z: complex, a: np.ndarray, b: np.ndarray) -> float:
    """Smallest distance from ``z`` to the segments ``a[i] -> b[i]``."""
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(dd > 0, ((z - a) * np.conj(d)).real / dd, 0.0)
    u = np.clip(u, 0.0, 1.0)
    return float(np.min(np.abs(a + u * d - z)))


def polyline_distance(z: complex, pts: np.ndarray) -> float:
    return segment_distance(z, pts[:-1], pts[1:])


# ---------------------------------------------------------------------------
# loops realising a given word
# ---------------------------------------------------------------------------

def default_cut_directions(eps: Sequence) -> list[complex]:
    """Unit directions of cut rays pointing radially away from the centroid of the EPs.

    With a single EP the ray points along +y.
    """
    z = [as_complex(p) for p in eps]
    if len(z) == 1:
        return [1j]
    c = sum(z) / len(z)
    out = []
    for p in z:
        d = p - c
        if abs(d) == 0:
            raise ValueError("an EP sits at the centroid; give cut directions explicitly")
        out.append(d / abs(d))
    return out


def lasso_loop(w: Word, eps: Sequence, *, rng: np.random.Generator | None = None,
               basepoint=None, radius_fraction=(0.15, 0.4), jitter: float = np.pi / 4,
               samples: int = 4096) -> Loop:
    """A loop whose homotopy class is ``w``, built as a chain of lassos.

    Each letter is a straight tail from the basepoint to a small circle around
    its EP, one full turn (clockwise for exponent +1), and the tail back.  With
    ``rng`` the basepoint offset, circle radii and tail directions are
    randomised.  The default basepoint is the centroid of the EPs, so the tails
    never meet the radial cut rays of :func:`default_cut_directions`; this needs
    at least two EPs in convex position.
    """
    z = [as_complex(p) for p in eps]
    if len(z) < 2 and basepoint is None:
        raise ValueError("give a basepoint when there is a single EP")
    sep = min(abs(p - q) for i, p in enumerate(z) for q in z[i + 1:]) if len(z) > 1 else 1.0
    if basepoint is None:
        q0 = sum(z) / len(z)
        if rng is not None:
            q0 += 0.1 * sep * rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform())
    else:
        q0 = as_complex(basepoint)

    lo, hi = radius_fraction
    segs = []
    for letter in w:
        if letter.generator >= len(z):
            raise ValueError(f"word uses generator {letter.generator} but only {len(z)} EPs given")
        p = z[letter.generator]
        r = sep * (rng.uniform(lo, hi) if rng is not None else 0.5 * (lo + hi))
        phi = np.angle(q0 - p)
        if rng is not None:
            phi += rng.uniform(-jitter, jitter)
        touch = p + r * np.exp(1j * phi)
        sweep = -2 * np.pi * letter.exponent
        segs.append(LineSegment(q0, touch))
        segs.append(ArcSegment(p, r, phi, sweep))
        segs.append(LineSegment(touch, q0))
    if not segs:
        # contractible: a small circle around the basepoint avoiding every EP
        r = 0.25 * min(abs(q0 - p) for p in z)
        segs = [ArcSegment(q0 + r, r, np.pi, -2 * np.pi)]
    # the arc endpoint is recomputed from exp(); snap chain points exactly
    return Loop(_snap(segs), samples=samples)


def _snap(segs):
    out = []
    for s in segs:
        if isinstance(s, LineSegment) and out:
            s = LineSegment(complex(out[-1].end), s.end)
        out.append(s)
    return out
