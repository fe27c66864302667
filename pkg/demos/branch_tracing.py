"""
Following eigenvalues around loops
==================================

Two models with a pair of EPs at (0, -1) and (0, 1):

* ``NHDirac``: H = kx sx + ky sy + i sx, the non-Hermitian Dirac cone;
* ``SquareRoot``: the discriminant is exactly (z + i)(z - i).
"""
import numpy as np

from epchiral.loops import Loop, lasso_loop
from epchiral.spectra import (
    NHDirac, SquareRoot, ep_charges, find_eps, loop_word, numerical_vorticity, trace_loop,
)
from epchiral.words import vorticity_of_word, word

dirac, root = NHDirac(1.0), SquareRoot(-1j, 1j)
for m in (dirac, root):
    print(m, "EPs:", [(e.point.x, e.point.y) for e in find_eps(m)], "charges:", ep_charges(m, [-1j, 1j]))

# Around one EP the two eigenvalues trade places.  The sign of the half-integer
# vorticity follows the EP's charge, which is -1 for the upper Dirac EP.
one = Loop.circle((0, 1), 0.5, "cw")
tr = trace_loop(dirac, one)
print("\none EP:  permutation", tr.permutation, " vorticity", numerical_vorticity(tr).value)

# Around both they come back home.  For the square-root model the discriminant
# winds twice; for the Dirac model the two charges cancel and it does not wind.
big = Loop.circle((0, 0), 3, "cw")
for m in (root, dirac):
    tr = trace_loop(m, big)
    print(f"both EPs, {type(m).__name__:>10}: permutation {tr.permutation}  "
          f"d_arg/pi = {tr.d_arg / np.pi:+.3f}  vorticity {numerical_vorticity(tr).value}")
print("word of that loop:", loop_word(big, [-1j, 1j]))

# Any word can be realised as a loop made of lines and arcs.
rng = np.random.default_rng(1)
print("\n word  read back  swapped  vorticity (numerical / from word)")
for text in ["a", "ab", "ba", "aB", "BA", "abab", "abA"]:
    w = word(text)
    loop = lasso_loop(w, [-1j, 1j], rng=rng)
    tr = trace_loop(root, loop, eps=[-1j, 1j])
    print(f"{text:>5}  {loop_word(loop, [-1j, 1j])!s:>9}  {tr.swapped!s:>7}  "
          f"{numerical_vorticity(tr).value!s:>4} / {vorticity_of_word(w)}")
