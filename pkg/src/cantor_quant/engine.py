"""Optimal n-point quantizers of the Cantor measure by greedy cylinder splitting.

An optimal set of n-means is ``{centroid(w) : w in leaves}`` for a complete
prefix-free cut ``leaves`` obtained from ``{""}`` by repeatedly splitting a
leaf of maximal weight ``P(J_w) * lambda(J_w)**2``.  Every such choice is
optimal, so the family of optimal sets at stage ``n`` is determined by the
weight class that is only partially split.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .distortion import Codebook
from .word_measure import (
    Word,
    centroid,
    is_prefix_free,
    moments,
    weight,
    weight_of_signature,
)

__all__ = [
    "SplitState",
    "OptimalSetFamily",
    "GenealogyGraph",
    "RecursionReport",
    "EnumerationLimitError",
    "SPLIT_FACTOR",
    "DEFAULT_ENUMERATION_LIMIT",
    "initial_state",
    "split_step",
    "optimal_error",
    "error_table",
    "canonical_optimal_words",
    "count_optimal_sets",
    "enumerate_optimal_sets",
    "genealogy",
    "codebook_from_words",
    "verify_recursion",
    "max_split_weight",
    "children_of",
]

VARIANCE = moments()[1]
# a split removes 1 - (1/64 + 3/16) of the victim's weight
SPLIT_FACTOR = Fraction(51, 64)
DEFAULT_ENUMERATION_LIMIT = 100_000

WordSet = tuple[Word, ...]


class EnumerationLimitError(RuntimeError):
    """A stage has more optimal sets than the enumeration limit allows."""

    def __init__(self, stage: int, count: int, limit: int):
        super().__init__(f"stage {stage} has {count} optimal sets, above the limit {limit}")
        self.stage = stage
        self.count = count
        self.limit = limit


def _canon(words: Iterable[str]) -> WordSet:
    return tuple(sorted(Word(w) for w in words))


@dataclass(frozen=True)
class SplitState:
    """One frontier of the greedy construction: the leaf words of an optimal set."""

    leaves: WordSet
    error: Fraction

    @property
    def n(self) -> int:
        return len(self.leaves)

    @property
    def max_weight(self) -> Fraction:
        return max(weight(w) for w in self.leaves)

    @property
    def max_entries(self) -> WordSet:
        top = self.max_weight
        return tuple(w for w in self.leaves if weight(w) == top)


def initial_state() -> SplitState:
    return SplitState(leaves=(Word(""),), error=VARIANCE)


def split_step(state: SplitState, victim: str) -> SplitState:
    """Replace ``victim`` by its two children.

    Only a leaf of maximal weight may be split; anything else would not give
    an optimal set.
    """
    victim = Word(victim)
    if victim not in state.max_entries:
        raise ValueError(
            f"cannot split {victim.display()}: not a maximal-weight leaf "
            f"(maximal: {', '.join(w.display() for w in state.max_entries)})"
        )
    leaves = [w for w in state.leaves if w != victim]
    leaves.extend(victim.children())
    error = state.error - SPLIT_FACTOR * weight(victim) * VARIANCE
    return SplitState(leaves=_canon(leaves), error=error)


@dataclass(frozen=True)
class _Greedy:
    errors: tuple[Fraction, ...]  # errors[n - 1] = V_n
    split_weights: tuple[Fraction, ...]  # weight of the leaf split going from n to n + 1


@lru_cache(maxsize=8)
def _greedy(n_max: int) -> _Greedy:
    heap: list[tuple[Fraction, Word]] = [(-Fraction(1), Word(""))]
    error = VARIANCE
    errors = [error]
    splits = []
    for _ in range(n_max - 1):
        neg_w, victim = heapq.heappop(heap)
        w = -neg_w
        splits.append(w)
        error -= SPLIT_FACTOR * w * VARIANCE
        errors.append(error)
        for child in victim.children():
            heapq.heappush(heap, (-weight(child), child))
    return _Greedy(tuple(errors), tuple(splits))


def _table_size(n: int) -> int:
    # round up so neighbouring queries share one cached run
    return max(8, 1 << (n - 1).bit_length())


def optimal_error(n: int) -> Fraction:
    """Exact n-th quantization error ``V_n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _greedy(_table_size(n)).errors[n - 1]


def error_table(n_max: int) -> list[Fraction]:
    """``[V_1, ..., V_{n_max}]``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return list(_greedy(_table_size(n_max)).errors[:n_max])


def max_split_weight(n: int) -> Fraction:
    """Weight of the leaf split when going from stage ``n`` to ``n + 1``."""
    return _greedy(_table_size(n + 1)).split_weights[n - 1]


def canonical_optimal_words(n: int) -> WordSet:
    """One optimal leaf set, splitting the lexicographically smallest tied word first."""
    if n < 1:
        raise ValueError("n must be >= 1")
    heap: list[tuple[Fraction, Word]] = [(-Fraction(1), Word(""))]
    for _ in range(n - 1):
        _, victim = heapq.heappop(heap)
        for child in victim.children():
            heapq.heappush(heap, (-weight(child), child))
    return _canon(w for _, w in heap)


@dataclass(frozen=True)
class _Frontier:
    fixed: WordSet  # leaves outside the partially split class
    tied: WordSet  # the class from which ``to_split`` words still get split
    to_split: int


def _frontier(n: int) -> _Frontier:
    """Split whole weight classes (signature ``(len, ones)``) until stage ``n`` is reached."""
    if n < 1:
        raise ValueError("n must be >= 1")
    classes: dict[tuple[int, int], list[Word]] = {(0, 0): [Word("")]}
    size = 1
    while True:
        sig = max(classes, key=lambda s: weight_of_signature(*s))
        members = classes[sig]
        if size == n or size + len(members) > n:
            fixed = [w for s, ws in classes.items() if s != sig for w in ws]
            if size == n:
                return _Frontier(_canon(fixed + members), (), 0)
            return _Frontier(_canon(fixed), _canon(members), n - size)
        del classes[sig]
        length, ones = sig
        for w in members:
            classes.setdefault((length + 1, ones + 1), []).append(w.child(1))
            classes.setdefault((length + 1, ones), []).append(w.child(2))
        size += len(members)


def count_optimal_sets(n: int) -> int:
    """Number of distinct optimal sets of n-means, without enumerating them."""
    f = _frontier(n)
    return math.comb(len(f.tied), f.to_split)


@dataclass
class OptimalSetFamily:
    n: int
    count: int
    error: Fraction
    sets: list[WordSet] | None = None

    @property
    def materialized(self) -> bool:
        return self.sets is not None


def enumerate_optimal_sets(n: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> OptimalSetFamily:
    """All optimal leaf sets at stage ``n`` in lexicographic order, if there are at most ``limit``."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    f = _frontier(n)
    count = math.comb(len(f.tied), f.to_split)
    family = OptimalSetFamily(n=n, count=count, error=optimal_error(n))
    if count > limit:
        return family
    found = set()
    for chosen in itertools.combinations(f.tied, f.to_split):
        kept = [w for w in f.tied if w not in chosen]
        grown = [c for w in chosen for c in w.children()]
        found.add(_canon(list(f.fixed) + kept + grown))
    family.sets = sorted(found)
    return family


def children_of(leaves: Sequence[str]) -> list[WordSet]:
    """Every set reachable from ``leaves`` by splitting one maximal-weight leaf."""
    state = SplitState(_canon(leaves), Fraction(0))
    return sorted({_canon(split_step(state, tau).leaves) for tau in state.max_entries})


@dataclass
class GenealogyGraph:
    """Optimal sets per stage and the single-split edges between consecutive stages.

    Nodes are ``(n, i)`` with ``i`` the 1-based index of the set in the
    lexicographically sorted stage list.
    """

    stages: dict[int, list[WordSet]]
    edges: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)

    def label(self, node: tuple[int, int]) -> str:
        n, i = node
        return f"α_{n}" if len(self.stages[n]) == 1 else f"α_{n},{i}"

    def nodes(self) -> list[tuple[int, int]]:
        return [(n, i) for n in sorted(self.stages) for i in range(1, len(self.stages[n]) + 1)]

    def words(self, node: tuple[int, int]) -> WordSet:
        n, i = node
        return self.stages[n][i - 1]


def genealogy(n_from: int, n_to: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> GenealogyGraph:
    if not 1 <= n_from < n_to:
        raise ValueError("need 1 <= n_from < n_to")
    stages: dict[int, list[WordSet]] = {}
    for n in range(n_from, n_to + 1):
        family = enumerate_optimal_sets(n, limit)
        if family.sets is None:
            raise EnumerationLimitError(n, family.count, limit)
        stages[n] = family.sets
    graph = GenealogyGraph(stages)
    for n in range(n_from, n_to):
        index = {s: j for j, s in enumerate(stages[n + 1], start=1)}
        for i, parent in enumerate(stages[n], start=1):
            for child in children_of(parent):
                try:
                    graph.edges.append(((n, i), (n + 1, index[child])))
                except KeyError:
                    raise AssertionError(
                        f"split of stage-{n} set {i} produced a set missing from stage {n + 1}"
                    ) from None
    return graph


def codebook_from_words(words: Iterable[str]) -> Codebook:
    words = [Word(w) for w in words]
    if not words:
        raise ValueError("empty word set")
    if not is_prefix_free(words):
        raise ValueError("word set is not prefix-free")
    return Codebook(sorted(centroid(w) for w in words))


@dataclass
class RecursionReport:
    n_max: int
    ok: bool
    # (n, V_n, best value of V_j/64 + 3 V_{n-j}/16, minimizing j's)
    rows: list[tuple[int, Fraction, Fraction, tuple[int, ...]]]
    first_violation: int | None = None


def verify_recursion(n_max: int) -> RecursionReport:
    """Check ``V_n = min_j (V_j / 64 + 3 V_{n-j} / 16)`` for ``2 <= n <= n_max``."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    v = [None] + error_table(n_max)
    rows = []
    violation = None
    for n in range(2, n_max + 1):
        candidates = {j: v[j] / 64 + 3 * v[n - j] / 16 for j in range(1, n)}
        best = min(candidates.values())
        argmins = tuple(j for j, c in candidates.items() if c == best)
        rows.append((n, v[n], best, argmins))
        if best != v[n] and violation is None:
            violation = n
    return RecursionReport(n_max=n_max, ok=violation is None, rows=rows, first_violation=violation)
