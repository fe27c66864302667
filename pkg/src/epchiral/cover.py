"""
Covering-space bookkeeping for EP branch points.

The Riemann surface of the eigenvalues is modelled by the hopping automaton:
``n`` copies of the punctured plane, one cut ray per branch point, and a sheet
permutation applied whenever a loop crosses a cut.  Lifting a loop word is then
a product of permutations, composed left to right (the first letter acts
first).

Also here: Reidemeister-Schreier rewriting of even words over the free basis
``{A = a^2, B = b^2, C = ab}`` of the two-sheet cover's loop group, and the
explicit homotopy between the loops ``ab`` and ``c`` (both EPs at once) in the
plane punctured at +1 and -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange, NotInSubgroup, PunctureHit
from .loops import as_complex, default_cut_directions
from .words import Letter, Word, reduce_free

Perm = tuple[int, ...]


# ---------------------------------------------------------------------------
# permutations (one-line image notation: perm[i] is the image of i)
# ---------------------------------------------------------------------------

def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(first: Perm, then: Perm) -> Perm:
    """Apply ``first``, then ``then``."""
    return tuple(then[i] for i in first)


def invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle_length(p: Perm, start: int) -> int:
    n, i = 1, p[start]
    while i != start:
        i = p[i]
        n += 1
    return n


def perm_order(p: Perm) -> int:
    seen = set()
    order = 1
    for i in range(len(p)):
        if i not in seen:
            c = cycle_length(p, i)
            j = i
            for _ in range(c):
                seen.add(j)
                j = p[j]
            order = order * c // math.gcd(order, c)
    return order


# ---------------------------------------------------------------------------
# covering specification and lifting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchPoint:
    position: complex
    cut_direction: complex
    deck_perm: Perm

    def __post_init__(self):
        u = as_complex(self.cut_direction)
        if abs(u) == 0:
            raise ValueError("cut direction must be nonzero")
        object.__setattr__(self, "position", as_complex(self.position))
        object.__setattr__(self, "cut_direction", u / abs(u))
        object.__setattr__(self, "deck_perm", tuple(int(i) for i in self.deck_perm))
        if not is_permutation(self.deck_perm):
            raise ValueError(f"deck_perm {self.deck_perm} is not a permutation")


def _rays_intersect(p1, u1, p2, u2, tol=1e-12) -> bool:
    """Do the rays ``p1 + s u1`` and ``p2 + t u2`` (s, t >= 0) meet?"""
    den = u1.real * u2.imag - u1.imag * u2.real
    d = p2 - p1
    if abs(den) < tol:
        # parallel: they meet only when collinear and overlapping
        if abs(d.real * u1.imag - d.imag * u1.real) > tol * max(1.0, abs(d)):
            return False
        if (d * np.conj(u1)).real >= 0:
            return True
        # p2 lies behind p1: ray 2 reaches p1 only if it points the same way
        return (u1 * np.conj(u2)).real > 0
    s = (d.real * u2.imag - d.imag * u2.real) / den
    t = (d.real * u1.imag - d.imag * u1.real) / den
    return s >= -tol and t >= -tol


@dataclass(frozen=True)
class CoveringSpec:
    """``n_sheets`` copies of the plane glued along one cut ray per branch point."""

    n_sheets: int
    branch_points: tuple[BranchPoint, ...]

    def __post_init__(self):
        if self.n_sheets < 2:
            raise ValueError("a covering needs at least two sheets")
        bps = tuple(self.branch_points)
        object.__setattr__(self, "branch_points", bps)
        if not bps:
            raise ValueError("a covering needs at least one branch point")
        for bp in bps:
            if len(bp.deck_perm) != self.n_sheets:
                raise ValueError(f"deck_perm {bp.deck_perm} does not act on {self.n_sheets} sheets")
        for i, p in enumerate(bps):
            for q in bps[i + 1:]:
                if p.position == q.position:
                    raise ValueError("coincident branch points")
                if _rays_intersect(p.position, p.cut_direction, q.position, q.cut_direction):
                    raise ValueError(f"cut rays from {p.position} and {q.position} intersect")

    def to_spec(self) -> dict:
        return {
            "sheets": self.n_sheets,
            "branch_points": [
                {"pos": [bp.position.real, bp.position.imag],
                 "cut_dir": [bp.cut_direction.real, bp.cut_direction.imag],
                 "perm": list(bp.deck_perm)}
                for bp in self.branch_points
            ],
        }

    @classmethod
    def from_spec(cls, spec: dict) -> "CoveringSpec":
        bps = [BranchPoint(as_complex(b["pos"]), as_complex(b["cut_dir"]), tuple(b["perm"]))
               for b in spec["branch_points"]]
        return cls(int(spec["sheets"]), tuple(bps))


def standard_two_sheet(ep1, ep2) -> CoveringSpec:
    """Two sheets, both branch points swapping them, radial cut rays."""
    z1, z2 = as_complex(ep1), as_complex(ep2)
    if z1 == z2:
        raise ValueError("the two EPs coincide")
    u1, u2 = default_cut_directions([z1, z2])
    return CoveringSpec(2, (BranchPoint(z1, u1, (1, 0)), BranchPoint(z2, u2, (1, 0))))


@dataclass(frozen=True)
class LiftResult:
    total_perm: Perm
    closes: bool
    order_to_close: int
    sheets: tuple[int, ...] = field(default=(), compare=False)


def lift_word(cover: CoveringSpec, w: Word, start_sheet: int = 0) -> LiftResult:
    """Lift ``w`` starting on ``start_sheet``; ``sheets`` lists the sheet after each letter."""
    if not 0 <= start_sheet < cover.n_sheets:
        raise IndexOutOfRange(f"start sheet {start_sheet} outside 0..{cover.n_sheets - 1}")
    total: Perm = tuple(range(cover.n_sheets))
    for l in w:
        if l.generator >= len(cover.branch_points):
            raise IndexOutOfRange(
                f"generator {l.generator} but only {len(cover.branch_points)} branch points")
        p = cover.branch_points[l.generator].deck_perm
        total = compose(total, p if l.exponent == 1 else invert(p))
    sheets = []
    s = start_sheet
    for l in w:
        p = cover.branch_points[l.generator].deck_perm
        s = p[s] if l.exponent == 1 else invert(p)[s]
        sheets.append(s)
    return LiftResult(total, total[start_sheet] == start_sheet,
                      cycle_length(total, start_sheet), tuple(sheets))


# ---------------------------------------------------------------------------
# the index-2 subgroup and its free basis {a^2, b^2, ab}
# ---------------------------------------------------------------------------

COVER_NAMES = ("A", "B", "C")
_A, _B, _C = 0, 1, 2
_EXPANSION = {_A: "aa", _B: "bb", _C: "ab"}


def _check_ab(w: Word):
    if any(g > 1 for g in w.generators):
        raise ValueError("only words in a and b are supported")


def is_in_cover_subgroup(w: Word) -> bool:
    _check_ab(w)
    return len(reduce_free(w)) % 2 == 0


def rewrite_over_cover_generators(w: Word) -> tuple[tuple[str, int], ...]:
    """Express an even word in the free basis ``A = a^2, B = b^2, C = ab``.

    Schreier rewriting with transversal ``{e, a}``: scanning the word while
    tracking the coset gives the Schreier generators ``a^2``, ``ab`` and
    ``b a^-1``; the last one equals ``B C^-1``.  The result is freely reduced.
    """
    _check_ab(w)
    if not is_in_cover_subgroup(w):
        raise NotInSubgroup(f"{w} has odd length and does not lift to a closed loop")
    # Schreier generator for (coset rep, generator); None = trivial
    gamma = {
        (0, 0): [],                          # e.a.a^-1
        (0, 1): [(_B, 1), (_C, -1)],         # e.b.a^-1 = b a^-1
        (1, 0): [(_A, 1)],                   # a.a
        (1, 1): [(_C, 1)],                   # a.b
    }
    out: list[tuple[int, int]] = []
    coset = 0
    for l in w:
        if l.exponent == 1:
            out += gamma[(coset, l.generator)]
        else:
            prev = 1 - coset
            out += [(g, -e) for g, e in reversed(gamma[(prev, l.generator)])]
        coset = 1 - coset
    reduced = reduce_free(Word(Letter(g, e) for g, e in out))
    return tuple((COVER_NAMES[l.generator], l.exponent) for l in reduced)


def expand_cover_word(seq: Sequence[tuple[str, int]]) -> Word:
    """Substitute ``A -> aa``, ``B -> bb``, ``C -> ab`` and freely reduce."""
    letters: list[Letter] = []
    for name, e in seq:
        piece = Word.parse(_EXPANSION[COVER_NAMES.index(name)])
        letters += (piece if e == 1 else ~piece).letters
    return reduce_free(Word(letters))


def format_cover_word(seq: Sequence[tuple[str, int]]) -> str:
    if not seq:
        return "e"
    return " ".join(name if e == 1 else f"{name}^-1" for name, e in seq)


# ---------------------------------------------------------------------------
# the explicit homotopy between alpha ~ [a][b] and beta ~ [c]
# ---------------------------------------------------------------------------

PUNCTURES = (-1.0 + 0j, 1.0 + 0j)
BREAKPOINTS = (0.25, 0.5, 0.75)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)) or not np.all(np.isfinite(t)):
        raise ValueError("t must lie in [0, 1]")
    return t


def _alpha_pieces(t):
    return (-1 + np.exp(-4j * np.pi * t), 1 - np.exp(-4j * np.pi * (t - 0.5)))


def _beta_pieces(t):
    return (-2 + 2 * np.exp(-4j * np.pi * t),
            -4 * np.exp(-2j * np.pi * (t - 0.25)),
            2 + 2 * np.exp(-4j * np.pi * (t - 0.75)))


def supplement_alpha(t):
    """Clockwise unit circle about -1, then clockwise unit circle about +1; based at 0."""
    t = _check_t(t)
    a1, a2 = _alpha_pieces(t)
    out = np.where(t <= 0.5, a1, a2)
    return complex(out) if out.ndim == 0 else out


def supplement_beta(t):
    """One clockwise circuit around both punctures: arcs of radii 2, 4, 2."""
    t = _check_t(t)
    b1, b2, b3 = _beta_pieces(t)
    out = np.select([t <= 0.25, t <= 0.75], [b1, b2], b3)
    return complex(out) if out.ndim == 0 else out


def _homotopy_pieces(t, s):
    a1, a2 = _alpha_pieces(t)
    b1, b2, b3 = _beta_pieces(t)
    return ((1 - s) * a1 + s * b1,
            (1 - s) * a1 + s * b2,
            (1 - s) * a2 + s * b2,
            (1 - s) * a2 + s * b3)


def homotopy(t, s):
    """Four-piece straight-line homotopy with ``H(t, 0) = alpha(t)`` and ``H(t, 1) = beta(t)``."""
    t = _check_t(t)
    s = _check_t(s)
    t, s = np.broadcast_arrays(t, s)
    h1, h2, h3, h4 = _homotopy_pieces(t, s)
    out = np.select([t <= 0.25, t <= 0.5, t <= 0.75], [h1, h2, h3], h4)
    return complex(out) if out.ndim == 0 else out


# |dH/dt| <= max(|alpha'|, |beta'|) = 8 pi; |dH/ds| = |beta - alpha| <= 4 + 2
LIPSCHITZ_T = 8 * np.pi
LIPSCHITZ_S = 6.0


@dataclass
class HomotopyGrid:
    nt: int
    ns: int
    min_puncture_distance: float
    argmin: tuple[float, float]
    endpoint_residuals: dict
    continuity_jumps: tuple[float, ...]
    lipschitz_lower_bound: float

    ENDPOINT_TOL = 1e-12
    CONTINUITY_TOL = 1e-9

    @property
    def valid(self) -> bool:
        return (self.min_puncture_distance > 0
                and max(self.endpoint_residuals.values()) < self.ENDPOINT_TOL
                and max(self.continuity_jumps) < self.CONTINUITY_TOL)

    def to_dict(self) -> dict:
        return {
            "nt": self.nt, "ns": self.ns,
            "min_puncture_distance": self.min_puncture_distance,
            "argmin": list(self.argmin),
            "endpoint_residuals": dict(self.endpoint_residuals),
            "continuity_jumps": list(self.continuity_jumps),
            "lipschitz_lower_bound": self.lipschitz_lower_bound,
            "valid": self.valid,
        }


def verify_homotopy(nt: int = 256, ns: int = 256) -> HomotopyGrid:
    """Sample the homotopy on an ``nt x ns`` grid and certify that it avoids +-1.

    ``lipschitz_lower_bound`` subtracts the worst-case variation inside one grid
    cell from the sampled minimum; when positive it bounds the distance of the
    whole continuous homotopy from the punctures.
    """
    if nt < 128 or ns < 128:
        raise ValueError("grid must be at least 128 x 128")
    t = np.linspace(0.0, 1.0, nt)
    s = np.linspace(0.0, 1.0, ns)
    T, S = np.meshgrid(t, s, indexing="ij")
    H = homotopy(T, S)
    dist = np.minimum(np.abs(H - PUNCTURES[0]), np.abs(H - PUNCTURES[1]))
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    dmin = float(dist[i, j])
    if dmin <= 0.0:
        raise PunctureHit(f"homotopy hits a puncture at t={t[i]:.6g}, s={s[j]:.6g}",
                          location=(float(t[i]), float(s[j])))

    residuals = {
        "s0": float(np.max(np.abs(H[:, 0] - supplement_alpha(t)))),
        "s1": float(np.max(np.abs(H[:, -1] - supplement_beta(t)))),
        "basepoint": float(max(np.max(np.abs(H[0, :])), np.max(np.abs(H[-1, :])))),
    }
    jumps = []
    for k, tb in enumerate(BREAKPOINTS):
        pieces = _homotopy_pieces(np.full_like(s, tb), s)
        jumps.append(float(np.max(np.abs(pieces[k] - pieces[k + 1]))))
    slack = 0.5 * (LIPSCHITZ_T / (nt - 1) + LIPSCHITZ_S / (ns - 1))
    return HomotopyGrid(nt, ns, dmin, (float(t[i]), float(s[j])), residuals,
                        tuple(jumps), dmin - slack)
