"""
Loops around two EPs as words
=============================

A loop in the plane with two EPs removed is a word in ``a`` (once around the
first EP, clockwise) and ``b`` (the second).  Capital letters are inverses.
"""
from epchiral.words import (
    classify, enumerate_table, is_mirror_pair, mirror_set, parity, project_dihedral, word,
)

# The clockwise loop around both EPs, and its mirror image.
w0 = word("ab")
print(w0, "->", classify(w0), "| mirror", parity(w0), "->", classify(parity(w0)))

# Each EP is a square-root branch point, so going twice around one of them does
# nothing to the spectrum.  Modulo a^2 = b^2 = e only the alternation survives.
for text in ["ab", "ba", "Ba", "aab", "abab", "abA"]:
    w = word(text)
    print(f"{text:>5}  capped: {project_dihedral(w)!s:>6}  class: {classify(w)}")

# ab and ba cannot be deformed into each other: they are mirror images.
print("ab ~ mirror of ba:", is_mirror_pair(word("ab"), word("ba")))

# Standard words of degree k: a^+-1 b^+-1 ... with 2k letters.  The table counts
# them by number of inverted letters r.
for k in (1, 2, 3):
    print(f"\nk = {k}")
    print(" r  count  Lk  vorticity")
    for row in enumerate_table(k):
        print(f"{row.r:2d}  {row.count:5d}  {row.linking_number:2d}  {row.vorticity:9d}")

# The standard words with the opposite vorticity of ab.
print("\nmirror set of ab at k = 1:", [w.to_text() for w in mirror_set(word("ab"), 1)])
