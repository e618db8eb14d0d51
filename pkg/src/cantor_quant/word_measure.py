"""Words, cylinder intervals and exact moments of the 1/4-3/4 Cantor measure.

The measure ``P`` is the invariant measure of the two similarities
``S1(x) = x/4`` and ``S2(x) = x/2 + 1/2`` taken with probabilities 1/4 and
3/4.  A word ``"2212"`` addresses the cylinder ``S_2 o S_2 o S_1 o S_2([0, 1])``;
the leftmost symbol is the outermost map.

Everything here is exact (:class:`fractions.Fraction`).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

__all__ = [
    "Word",
    "Cylinder",
    "CantorMeasure",
    "STANDARD",
    "map_point",
    "cylinder",
    "centroid",
    "pair_centroid",
    "moments",
    "second_moment",
    "interval_distortion",
    "weight",
    "prob",
    "scale",
    "words_of_length",
    "is_prefix_free",
    "is_complete_cut",
]

ONE = Fraction(1)


class Word(str):
    """A finite string over ``{"1", "2"}``; the empty word is the identity map.

    Subclassing ``str`` keeps words hashable and ordered lexicographically
    (``"1" < "12" < "2"``), which is the canonical order used for output.
    """

    __slots__ = ()

    def __new__(cls, symbols: str | Iterable[int] = "") -> "Word":
        if not isinstance(symbols, str):
            symbols = "".join(str(s) for s in symbols)
        if symbols in ("∅", "()"):
            symbols = ""
        bad = set(symbols) - {"1", "2"}
        if bad:
            raise ValueError(f"word {symbols!r} has symbols outside {{1, 2}}: {sorted(bad)}")
        return super().__new__(cls, symbols)

    @property
    def ones(self) -> int:
        """Number of ``1`` symbols, c(sigma)."""
        return self.count("1")

    @property
    def signature(self) -> tuple[int, int]:
        """``(length, ones)``; two words have equal weight iff signatures agree."""
        return len(self), self.count("1")

    def child(self, symbol: int | str) -> "Word":
        return Word(str(self) + str(symbol))

    def children(self) -> tuple["Word", "Word"]:
        return self.child(1), self.child(2)

    def is_prefix_of(self, other: str) -> bool:
        return other.startswith(self)

    def display(self) -> str:
        return str(self) if self else "∅"

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


@dataclass(frozen=True)
class Cylinder:
    word: Word
    left: Fraction
    right: Fraction
    prob: Fraction
    length: Fraction

    def contains(self, x: Fraction) -> bool:
        return self.left <= x <= self.right


@dataclass(frozen=True)
class CantorMeasure:
    """Invariant measure of ``S1(x) = r1*x``, ``S2(x) = r2*x + 1 - r2`` with weights ``p1``, ``1 - p1``.

    The defaults give the measure studied throughout this package.  Other
    parameters are accepted for experimentation by the oracle only; no
    optimality result is claimed for them.
    """

    r1: Fraction = Fraction(1, 4)
    r2: Fraction = Fraction(1, 2)
    p1: Fraction = Fraction(1, 4)

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "p1"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (0 < self.r1 and 0 < self.r2 and self.r1 + self.r2 < 1):
            raise ValueError("need 0 < r1, 0 < r2 and r1 + r2 < 1 (disjoint children)")
        if not 0 < self.p1 < 1:
            raise ValueError("need 0 < p1 < 1")

    @property
    def p2(self) -> Fraction:
        return 1 - self.p1

    @property
    def is_standard(self) -> bool:
        return (self.r1, self.r2, self.p1) == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))

    # -- maps -------------------------------------------------------------
    def map_point(self, word: str, x: Fraction) -> Fraction:
        x = Fraction(x)
        # innermost map is the rightmost symbol
        for s in reversed(word):
            if s == "1":
                x = self.r1 * x
            else:
                x = self.r2 * x + (1 - self.r2)
        return x

    def prob(self, word: str) -> Fraction:
        c = word.count("1")
        return self.p1**c * self.p2 ** (len(word) - c)

    def scale(self, word: str) -> Fraction:
        c = word.count("1")
        return self.r1**c * self.r2 ** (len(word) - c)

    def cylinder(self, word: str) -> Cylinder:
        w = Word(word)
        return Cylinder(
            word=w,
            left=self.map_point(w, Fraction(0)),
            right=self.map_point(w, ONE),
            prob=self.prob(w),
            length=self.scale(w),
        )

    # -- moments ----------------------------------------------------------
    @cached_property
    def _moments(self) -> tuple[Fraction, Fraction]:
        # E = p1*r1*E + p2*(r2*E + t2)
        # E2 = p1*r1^2*E2 + p2*(r2^2*E2 + 2*r2*t2*E + t2^2)
        t2 = 1 - self.r2
        mean = self.p2 * t2 / (1 - self.p1 * self.r1 - self.p2 * self.r2)
        contraction = self.p1 * self.r1**2 + self.p2 * self.r2**2
        second = self.p2 * (2 * self.r2 * t2 * mean + t2**2) / (1 - contraction)
        return mean, second

    @property
    def mean(self) -> Fraction:
        return self._moments[0]

    @property
    def second_moment(self) -> Fraction:
        return self._moments[1]

    @property
    def variance(self) -> Fraction:
        mean, second = self._moments
        return second - mean**2

    @property
    def weight_ratios(self) -> tuple[Fraction, Fraction]:
        """Factors by which ``p * s**2`` shrinks for the ``1``- and ``2``-child."""
        return self.p1 * self.r1**2, self.p2 * self.r2**2

    def centroid(self, word: str) -> Fraction:
        return self.map_point(word, self.mean)

    def weight(self, word: str) -> Fraction:
        return self.prob(word) * self.scale(word) ** 2

    def interval_distortion(self, word: str, a: Fraction) -> Fraction:
        """``integral over J_word of (x - a)^2 dP``."""
        return self.prob(word) * (self.scale(word) ** 2 * self.variance + (self.centroid(word) - a) ** 2)

    def pair_centroid(self, word_a: str, word_b: str) -> Fraction:
        if word_b.startswith(word_a) or word_a.startswith(word_b):
            raise ValueError(f"cylinders of {word_a!r} and {word_b!r} are nested, not disjoint")
        pa, pb = self.prob(word_a), self.prob(word_b)
        return (pa * self.centroid(word_a) + pb * self.centroid(word_b)) / (pa + pb)


STANDARD = CantorMeasure()

_V = STANDARD.variance
_MEAN = STANDARD.mean


def map_point(word: str, x: Fraction) -> Fraction:
    """Apply ``S_word`` to ``x``."""
    return STANDARD.map_point(word, x)


def prob(word: str) -> Fraction:
    """``P(J_word) = 3**(|w| - c) / 4**|w|``."""
    k, c = len(word), word.count("1")
    return Fraction(3 ** (k - c), 4**k)


def scale(word: str) -> Fraction:
    """``lambda(J_word) = 1 / 2**(|w| + c)``."""
    return Fraction(1, 2 ** (len(word) + word.count("1")))


def cylinder(word: str) -> Cylinder:
    w = Word(word)
    left = map_point(w, Fraction(0))
    length = scale(w)
    return Cylinder(word=w, left=left, right=left + length, prob=prob(w), length=length)


def centroid(word: str) -> Fraction:
    """Conditional mean of ``P`` on ``J_word``, i.e. ``S_word(2/3)``."""
    return map_point(word, _MEAN)


def pair_centroid(word_a: str, word_b: str) -> Fraction:
    """Conditional mean of ``P`` on the union of two disjoint cylinders."""
    return STANDARD.pair_centroid(word_a, word_b)


def moments() -> tuple[Fraction, Fraction]:
    """Return ``(mean, variance)`` of ``P``, solved from the self-similarity equations."""
    return STANDARD.mean, STANDARD.variance


def second_moment() -> Fraction:
    return STANDARD.second_moment


def weight_of_signature(length: int, ones: int) -> Fraction:
    return Fraction(3 ** (length - ones), 2 ** (4 * length + 2 * ones))


def weight(word: str) -> Fraction:
    """``P(J_word) * lambda(J_word)**2 = 3**(|w|-c) / 2**(4|w|+2c)``."""
    return weight_of_signature(len(word), word.count("1"))


def interval_distortion(word: str, a: Fraction) -> Fraction:
    return prob(word) * (scale(word) ** 2 * _V + (centroid(word) - Fraction(a)) ** 2)


def words_of_length(k: int) -> Iterator[Word]:
    """All ``2**k`` words of length ``k`` in lexicographic order."""
    if k == 0:
        yield Word("")
        return
    for i in range(2**k):
        yield Word(format(i, f"0{k}b").replace("1", "2").replace("0", "1"))


def is_prefix_free(words: Iterable[str]) -> bool:
    ordered = sorted(words)
    # in lexicographic order a prefix sorts immediately before some extension of it
    return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))


def is_complete_cut(words: Iterable[str]) -> bool:
    """True if ``words`` are prefix-free and their cylinders carry all of the mass."""
    words = list(words)
    return is_prefix_free(words) and sum((prob(w) for w in words), Fraction(0)) == 1
