"""
The two-sheeted cover and an explicit homotopy
==============================================

Lifting a loop to the Riemann surface of sqrt((z + i)(z - i)) closes exactly
when the word has even length.  Closed lifts form a subgroup generated by
A = a^2, B = b^2 and C = ab.
"""
from epchiral.cover import (
    format_cover_word, lift_word, rewrite_over_cover_generators, standard_two_sheet,
    verify_homotopy,
)
from epchiral.words import word

cov = standard_two_sheet(-1j, 1j)
for text in ["a", "b", "ab", "ba", "abab", "aba"]:
    r = lift_word(cov, word(text))
    extra = f"  = {format_cover_word(rewrite_over_cover_generators(word(text)))}" if r.closes else ""
    print(f"{text:>5}: sheets {r.sheets}  closes {r.closes}  order {r.order_to_close}{extra}")

# ba is not ab, but on the cover it is b^2 (ab)^-1 a^2.
print("\nba =", format_cover_word(rewrite_over_cover_generators(word("ba"))))

# The two supplement loops alpha and beta are homotopic in the punctured plane.
# The certificate samples the homotopy and bounds its distance to the punctures.
for n in (128, 256, 512):
    g = verify_homotopy(n, n)
    print(f"grid {n:4d}: min distance {g.min_puncture_distance:.6f}  "
          f"lower bound {g.lipschitz_lower_bound:.4f}  valid {g.valid}")
