"""
Stereographic projection of a parameter plane
=============================================

Sphere points (nt, chit, xit) go to plane points (n, chi) by projecting from
the north pole; the north pole itself is the point at infinity.
"""
import numpy as np

from epchiral.sphere import (
    MICROCAVITY_EPS_PLANE, MICROCAVITY_EPS_SPHERE, great_circle_arc, project_curve, unproject,
)

# EP locations of a deformed microcavity and their place on the sphere.
for q, published in zip(MICROCAVITY_EPS_PLANE, MICROCAVITY_EPS_SPHERE):
    p = unproject(q)
    print(f"(n, chi) = {q}  ->  ({p.nt:.4f}, {p.chit:.4f}, {p.xit:.4f})  published {published}")

# A meridian through EP1 and over the north pole becomes a straight line on the
# plane, leaving to infinity on one side and coming back from the other.
p1 = unproject(MICROCAVITY_EPS_PLANE[0]).as_array()
p2 = unproject(MICROCAVITY_EPS_PLANE[1]).as_array()
opposite = np.array([-p1[0], -p1[1], p1[2]])
arc = great_circle_arc(p1, opposite, n=400, through=(0, 0, 1))
out = project_curve(arc)
print(f"\narc through the pole: {len(out.branches)} branches")
for b in out.branches:
    print(f"  {len(b)} points from {np.round(b[0], 3)} to {np.round(b[-1], 3)}")

short = project_curve(great_circle_arc(p1, p2, n=50))
print(f"arc from EP1 to EP2: {len(short.branches)} branch")
