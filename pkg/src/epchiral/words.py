"""
Loop words around a pair of exceptional points.

A loop in the twice-punctured plane is a word in the free group on ``a``
(once around EP1) and ``b`` (once around EP2).  Imposing the cone relations
``a^2 = b^2 = e`` gives the infinite dihedral group, whose rotation subgroup is
generated by ``ab`` and carries an integer winding.  This module keeps both
levels exact and symbolic:

* free reduction and the text format ``a b A B`` (capitals are inverses),
* projection to the dihedral normal form and the winding homomorphism,
* chirality classes, parity (orientation reversal) and mirror sets,
* the vorticity / linking-number bookkeeping of the standard words
  ``a^{±1} b^{±1} a^{±1} b^{±1} ...`` and their binomial table.

Generators are small nonnegative integers; 0 is ``a`` and 1 is ``b``.  Larger
indices are accepted by the free-group operations (they label the extra
branch points of a 2m-EP configuration) but have no text representation.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Sequence

MAX_TABLE_K = 12
MAX_LISTING_K = 8

_TEXT = {(0, 1): "a", (1, 1): "b", (0, -1): "A", (1, -1): "B"}
_PARSE = {v: k for k, v in _TEXT.items()}


@dataclass(frozen=True, order=True)
class Letter:
    generator: int
    exponent: int = 1

    def __post_init__(self):
        if self.generator < 0:
            raise ValueError(f"generator index must be nonnegative, got {self.generator}")
        if self.exponent not in (1, -1):
            raise ValueError(f"letter exponent must be +1 or -1, got {self.exponent}")

    def inverse(self) -> "Letter":
        return Letter(self.generator, -self.exponent)


def _as_letter(x) -> Letter:
    if isinstance(x, Letter):
        return x
    gen, exp = x
    return Letter(int(gen), int(exp))


class Word:
    """An element of the free group, stored as a sequence of letters.

    The stored letters are kept as given (possibly unreduced), so that loops can
    be built letter by letter.  Equality and hashing use the freely reduced form;
    compare ``.letters`` or ``str()`` for literal equality.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable = ()):
        object.__setattr__(self, "letters", tuple(_as_letter(x) for x in letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def parse(cls, text: str) -> "Word":
        letters = []
        for ch in text:
            try:
                letters.append(Letter(*_PARSE[ch]))
            except KeyError:
                raise ValueError(f"invalid character {ch!r} in word {text!r}") from None
        return cls(letters)

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    def to_text(self) -> str:
        try:
            return "".join(_TEXT[(l.generator, l.exponent)] for l in self.letters)
        except KeyError:
            raise ValueError("only generators 0 and 1 have a text form") from None

    def __str__(self):
        try:
            return self.to_text()
        except ValueError:
            return " ".join(f"g{l.generator}^{l.exponent}" for l in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        # plain concatenation; the group product up to free reduction
        return Word(self.letters + other.letters)

    def __invert__(self) -> "Word":
        return parity(self)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return parity(self) ** (-n)
        return Word(self.letters * n)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return reduce_free(self).letters == reduce_free(other).letters

    def __hash__(self):
        return hash(reduce_free(self).letters)

    @property
    def generators(self) -> set[int]:
        return {l.generator for l in self.letters}

    @property
    def exponent_sum(self) -> int:
        return sum(l.exponent for l in self.letters)


def word(text: str) -> Word:
    """Shorthand for :meth:`Word.parse`."""
    return Word.parse(text)


# ---------------------------------------------------------------------------
# free group and dihedral quotient
# ---------------------------------------------------------------------------

def reduce_free(w: Word) -> Word:
    """Freely reduced form: cancel adjacent ``x x^-1`` pairs until none remain."""
    stack: list[Letter] = []
    for l in w.letters:
        if stack and stack[-1].generator == l.generator and stack[-1].exponent == -l.exponent:
            stack.pop()
        else:
            stack.append(l)
    return Word(stack)


def is_freely_reduced(w: Word) -> bool:
    return all(
        not (u.generator == v.generator and u.exponent == -v.exponent)
        for u, v in zip(w.letters, w.letters[1:])
    )


@dataclass(frozen=True)
class DihedralElement:
    """Reduced element of the free product of order-2 groups (D_inf for two generators).

    ``alternating`` lists generator indices with no two neighbours equal.
    """

    alternating: tuple[int, ...] = ()

    def __post_init__(self):
        if any(x == y for x, y in zip(self.alternating, self.alternating[1:])):
            raise ValueError(f"not in dihedral normal form: {self.alternating}")

    def __len__(self):
        return len(self.alternating)

    def __str__(self):
        if not self.alternating:
            return "e"
        names = "ab"
        return "".join(names[g] if g < 2 else f"g{g}" for g in self.alternating)

    @property
    def is_rotation(self) -> bool:
        return len(self.alternating) % 2 == 0


def project_dihedral(w: Word) -> DihedralElement:
    """Image of ``w`` under the cone relations ``x^2 = e`` for every generator.

    Exponent signs are dropped (each generator is an involution) and equal
    neighbours cancel.
    """
    stack: list[int] = []
    for l in w.letters:
        if stack and stack[-1] == l.generator:
            stack.pop()
        else:
            stack.append(l.generator)
    return DihedralElement(tuple(stack))


class Marker(enum.Enum):
    REFLECTION = "reflection"

    def __repr__(self):
        return "REFLECTION"


REFLECTION = Marker.REFLECTION


def _check_two_generator(w: Word):
    bad = {g for g in w.generators if g > 1}
    if bad:
        raise ValueError(f"winding is defined on words in a and b only; got generators {sorted(bad)}")


def winding(w: Word) -> int | Marker:
    """Integer winding of ``w`` in the capped group, or :data:`REFLECTION`.

    The dihedral image ``(ab)^k`` has winding ``+k`` and ``(ba)^k`` has ``-k``.
    Odd images are reflections and carry no integer winding.
    """
    _check_two_generator(w)
    alt = project_dihedral(w).alternating
    if not alt:
        return 0
    if len(alt) % 2:
        return REFLECTION
    half = len(alt) // 2
    return half if alt[0] == 0 else -half


def free_equal(u: Word, v: Word) -> bool:
    return reduce_free(u).letters == reduce_free(v).letters


def capped_equal(u: Word, v: Word) -> bool:
    return project_dihedral(u) == project_dihedral(v)


# ---------------------------------------------------------------------------
# chirality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChiralityClass:
    kind: str
    k: int = 0

    _KINDS = ("trivial", "cw", "ccw", "reflection")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown chirality kind {self.kind!r}")
        if self.kind in ("cw", "ccw"):
            if self.k < 1:
                raise ValueError("CW/CCW degree must be a positive integer")
        elif self.k != 0:
            raise ValueError(f"{self.kind} carries no degree")

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def cw(cls, k: int):
        return cls("cw", k)

    @classmethod
    def ccw(cls, k: int):
        return cls("ccw", k)

    @classmethod
    def reflection(cls):
        return cls("reflection")

    def __str__(self):
        if self.kind == "cw":
            return f"CW({self.k})"
        if self.kind == "ccw":
            return f"CCW({self.k})"
        return self.kind.capitalize()


def classify(w: Word) -> ChiralityClass:
    n = winding(w)
    if n is REFLECTION:
        return ChiralityClass.reflection()
    if n == 0:
        return ChiralityClass.trivial()
    return ChiralityClass.cw(n) if n > 0 else ChiralityClass.ccw(-n)


def parity(w: Word) -> Word:
    """Orientation reversal: the group inverse (reverse the word, flip every exponent)."""
    return Word(l.inverse() for l in reversed(w.letters))


def is_mirror_pair(w0: Word, w1: Word) -> bool:
    n0, n1 = winding(w0), winding(w1)
    if n0 is REFLECTION or n1 is REFLECTION:
        return False
    return n0 + n1 == 0


# ---------------------------------------------------------------------------
# standard words, vorticity and the enumeration table
# ---------------------------------------------------------------------------

def is_standard_form(w: Word) -> bool:
    """True for ``a^{±1} b^{±1} ... a^{±1} b^{±1}`` of positive even length."""
    n = len(w.letters)
    if n == 0 or n % 2:
        return False
    return all(l.generator == i % 2 for i, l in enumerate(w.letters))


def standard_word(signs: Sequence[int]) -> Word:
    """Standard word with the given exponent per letter (positions alternate a, b)."""
    if not signs or len(signs) % 2:
        raise ValueError("a standard word needs a positive even number of letters")
    return Word(Letter(i % 2, s) for i, s in enumerate(signs))


def standard_words(k: int) -> Iterator[Word]:
    """All ``4**k`` standard words of degree ``k`` in lexicographic sign order (+ before -)."""
    if k < 1:
        raise ValueError("degree must be positive")
    for signs in itertools.product((1, -1), repeat=2 * k):
        yield standard_word(signs)


def vorticity_of_word(w: Word) -> Fraction:
    """Half the exponent sum.

    The exponent sum is unchanged by free reduction, so unreduced input is fine.
    """
    return Fraction(w.exponent_sum, 2)


def crossings(w: Word) -> int:
    """Number of inverted letters (EP crossings) of a standard word."""
    return sum(1 for l in w.letters if l.exponent == -1)


def linking_number(w: Word) -> int:
    if not is_standard_form(w):
        raise ValueError(f"linking number is only defined for standard words, got {w}")
    return len(w) // 2 + crossings(w)


def mirror_set(w0: Word, k_form: int) -> list[Word]:
    """Standard words of degree ``k_form`` whose vorticity is ``-winding(w0)``.

    Returned in lexicographic sign order.
    """
    n = winding(w0)
    if n is REFLECTION:
        raise ValueError(f"{w0} is a reflection and has no mirror set")
    if n == 0:
        raise ValueError(f"{w0} has zero winding; its mirror set is not defined")
    target = Fraction(-n)
    return [w for w in standard_words(k_form) if vorticity_of_word(w) == target]


@dataclass(frozen=True)
class WordTableRow:
    r: int
    count: int
    linking_number: int
    vorticity: int
    words: tuple[Word, ...] | None = field(default=None, compare=False)


def enumerate_table(k: int, *, words: bool = False, max_k: int = MAX_TABLE_K) -> list[WordTableRow]:
    """Rows ``r = 0..2k`` of standard words of degree ``k`` grouped by crossings.

    Counts are binomial; with ``words=True`` the words themselves are listed
    (only up to ``k = 8``).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k > max_k:
        raise ValueError(f"k={k} exceeds the enumeration bound {max_k}")
    if words and k > MAX_LISTING_K:
        raise ValueError(f"word listings are limited to k <= {MAX_LISTING_K}")

    listing: dict[int, list[Word]] = {r: [] for r in range(2 * k + 1)}
    if words:
        for w in standard_words(k):
            listing[crossings(w)].append(w)

    rows = []
    for r in range(2 * k + 1):
        rows.append(WordTableRow(
            r=r,
            count=comb(2 * k, r),
            linking_number=k + r,
            vorticity=k - r,
            words=tuple(listing[r]) if words else None,
        ))
    if sum(row.count for row in rows) != 4 ** k:
        raise AssertionError("binomial total mismatch")
    return rows


def table_csv(rows: Sequence[WordTableRow]) -> str:
    lines = ["r,count,linking,vorticity"]
    lines += [f"{row.r},{row.count},{row.linking_number},{row.vorticity}" for row in rows]
    return "\n".join(lines) + "\n"
