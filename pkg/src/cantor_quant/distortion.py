"""Distortion of arbitrary finite codebooks against the Cantor measure.

The measure is singular, so the integral is evaluated cylinder by cylinder:
a cylinder lying inside one Voronoi region contributes its closed-form
second moment about that region's point, and a cylinder cut by a Voronoi
boundary is bracketed and refined into its children.  All bounds are exact
rationals.
"""
from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .word_measure import (
    Word,
    cylinder,
    centroid,
    interval_distortion,
    is_complete_cut,
    moments,
    weight,
)

__all__ = [
    "Codebook",
    "DistortionEstimate",
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "voronoi_boundaries",
    "evaluate_codebook",
    "distortion_of_words",
]

DEFAULT_BUDGET = 1_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, expanded: int, lower: Fraction, upper: Fraction, gap: Fraction):
        super().__init__(
            f"gap {float(gap):.3g} not reached after {expanded} cylinder expansions "
            f"(current width {float(upper - lower):.3g})"
        )
        self.expanded = expanded
        self.lower = lower
        self.upper = upper


@dataclass(frozen=True)
class Codebook:
    points: tuple[Fraction, ...]

    def __init__(self, points: Iterable[Fraction | int | str]):
        pts = tuple(Fraction(p) for p in points)
        if not pts:
            raise ValueError("codebook needs at least one point")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError("codebook points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def boundaries(self) -> tuple[Fraction, ...]:
        return tuple((a + b) / 2 for a, b in zip(self.points, self.points[1:]))

    def nearest(self, x: Fraction) -> Fraction:
        i = bisect.bisect_left(self.points, x)
        cands = self.points[max(i - 1, 0) : i + 1]
        return min(cands, key=lambda a: (abs(x - a), a))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def voronoi_boundaries(codebook: Codebook | Sequence[Fraction]) -> list[Fraction]:
    """Midpoints between consecutive code points."""
    if not isinstance(codebook, Codebook):
        codebook = Codebook(codebook)
    return list(codebook.boundaries)


@dataclass
class DistortionEstimate:
    lower: Fraction
    upper: Fraction
    requested_gap: Fraction
    cylinders_expanded: int
    history: list[tuple[Fraction, Fraction]] | None = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def brackets(self, value: Fraction) -> bool:
        return self.lower <= value <= self.upper


def evaluate_codebook(
    codebook: Codebook | Sequence[Fraction],
    gap: Fraction | str | float,
    budget: int = DEFAULT_BUDGET,
    record_history: bool = False,
) -> DistortionEstimate:
    """Certified bounds on ``integral of min_a (x - a)^2 dP`` for ``codebook``.

    A cylinder cut by a Voronoi boundary gets lower bound 0 and upper bound
    the error of serving the whole cylinder from the code point nearest its
    centroid; the widest such cylinder is refined first.
    """
    if not isinstance(codebook, Codebook):
        codebook = Codebook(codebook)
    gap = Fraction(gap)
    if gap <= 0:
        raise ValueError("gap must be positive")
    points = codebook.points
    bounds = codebook.boundaries

    lower = Fraction(0)
    upper = Fraction(0)
    pending: list[tuple[Fraction, Word]] = []

    def place(word: Word) -> None:
        nonlocal lower, upper
        cyl = cylinder(word)
        # closed regions; a cylinder touching a boundary with its left end belongs to the right
        i = bisect.bisect_right(bounds, cyl.left)
        if i == len(bounds) or cyl.right <= bounds[i]:
            exact = interval_distortion(word, points[i])
            lower += exact
            upper += exact
        else:
            bound = interval_distortion(word, codebook.nearest(centroid(word)))
            upper += bound
            heapq.heappush(pending, (-bound, word))

    place(Word(""))
    history = [(lower, upper)] if record_history else None
    expanded = 0
    while upper - lower > gap:
        if expanded >= budget:
            raise BudgetExceeded(expanded, lower, upper, gap)
        neg_bound, word = heapq.heappop(pending)
        upper += neg_bound
        for child in word.children():
            place(child)
        expanded += 1
        if history is not None:
            history.append((lower, upper))
    return DistortionEstimate(lower, upper, gap, expanded, history)


def distortion_of_words(words: Iterable[str]) -> Fraction:
    """Distortion of ``{centroid(w)}`` when each point serves exactly its own cylinder."""
    words = [Word(w) for w in words]
    if not is_complete_cut(words):
        raise ValueError("words must form a complete prefix-free cut")
    variance = moments()[1]
    return sum((weight(w) for w in words), Fraction(0)) * variance
