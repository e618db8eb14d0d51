"""Brute-force check of the greedy engine on a discretized measure.

``discretize(d)`` replaces every depth-``d`` cylinder by an atom at its
conditional mean.  Moving mass to conditional means removes exactly the
within-cell variance ``(13/64)**d * V``, so the optimal discrete error ``D_n``
satisfies ``0 <= V_n - D_n <= (13/64)**d * V``.  ``D_n`` is found exactly by
dynamic programming over contiguous clusters of the sorted atoms.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import engine
from .word_measure import STANDARD, CantorMeasure, Word, words_of_length

__all__ = [
    "AtomMeasure",
    "OracleResult",
    "OracleViolation",
    "MAX_DEPTH",
    "discretize",
    "dp_kmeans",
    "dp_kmeans_sweep",
    "dp_kmeans_fast",
    "lloyd_refine",
    "oracle_check",
    "oracle_sweep",
    "heuristic_greedy_error",
]

MAX_DEPTH = 16


@dataclass(frozen=True)
class AtomMeasure:
    positions: tuple[Fraction, ...]
    masses: tuple[Fraction, ...]
    depth: int
    words: tuple[Word, ...] = field(default=(), repr=False)

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def atoms(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.positions, self.masses))

    def distortion(self, codebook: Sequence[Fraction]) -> Fraction:
        codebook = sorted(Fraction(c) for c in codebook)
        total = Fraction(0)
        for x, w in zip(self.positions, self.masses):
            total += w * min((x - c) ** 2 for c in codebook)
        return total


@lru_cache(maxsize=4)
def discretize(depth: int, measure: CantorMeasure = STANDARD) -> AtomMeasure:
    """Atoms ``(centroid(w), P(J_w))`` for all words of length ``depth``, left to right."""
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in [1, {MAX_DEPTH}], got {depth}")
    # lexicographic order of equal-length words is left-to-right order of their cylinders
    words = tuple(words_of_length(depth))
    positions = tuple(measure.centroid(w) for w in words)
    masses = tuple(measure.prob(w) for w in words)
    return AtomMeasure(positions, masses, depth, words)


def _scaled(measure: AtomMeasure) -> tuple[list[int], list[int], list[int], int, int]:
    """Integer prefix sums of mass, mass*pos, mass*pos^2 over a common denominator."""
    lx = math.lcm(*(p.denominator for p in measure.positions))
    lw = math.lcm(*(w.denominator for w in measure.masses))
    c0, c1, c2 = [0], [0], [0]
    for p, w in zip(measure.positions, measure.masses):
        x = p.numerator * (lx // p.denominator)
        m = w.numerator * (lw // w.denominator)
        c0.append(c0[-1] + m)
        c1.append(c1[-1] + m * x)
        c2.append(c2[-1] + m * x * x)
    return c0, c1, c2, lx, lw


def _divide_and_conquer(size: int, k: int, layer_cost):
    """Partition ``0..size`` into 1..k contiguous segments, one DP layer per segment count.

    ``layer_cost(prev, j, i)`` is the value of the best split whose last
    segment is ``j..i-1`` given the previous layer ``prev``.  Optimal split
    points are monotone in ``i``, so each layer is filled by divide and
    conquer.  The smallest minimizing ``j`` is kept (shorter left part).
    Returns ``(layers, splits)``; ``layers[t][size]`` is the optimum with ``t + 1`` segments.
    """
    prev: list = [None] * (size + 1)
    prev[0] = 0
    layers, splits = [], []
    for layer in range(1, k + 1):
        cur: list = [None] * (size + 1)
        arg = [0] * (size + 1)
        stack = [(layer, size, layer - 1, size - 1)]
        while stack:
            lo, hi, jlo, jhi = stack.pop()
            if lo > hi:
                continue
            mid = (lo + hi) // 2
            best = None
            best_j = jlo
            for j in range(jlo, min(mid - 1, jhi) + 1):
                if prev[j] is None:
                    continue
                c = layer_cost(prev, j, mid)
                if best is None or c < best:
                    best, best_j = c, j
            cur[mid] = best
            arg[mid] = best_j
            stack.append((lo, mid - 1, jlo, best_j))
            stack.append((mid + 1, hi, best_j, jhi))
        prev = cur
        layers.append(cur)
        splits.append(arg)
    return layers, splits


def _backtrack(splits: list[list[int]], size: int) -> list[tuple[int, int]]:
    segments = []
    i = size
    for arg in reversed(splits):
        j = arg[i]
        segments.append((j, i))
        i = j
    return segments[::-1]


def dp_kmeans_sweep(measure: AtomMeasure, n_max: int) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
    """Exact optimal ``(error, codebook)`` for every ``n`` in ``1..n_max`` from one DP run."""
    m = len(measure)
    if not 1 <= n_max <= m:
        raise ValueError(f"n must lie in [1, {m}], got {n_max}")
    c0, c1, c2, lx, lw = _scaled(measure)

    # maximizing the sum of S1^2/S0 over segments minimizes S2 - S1^2/S0
    def cost(prev, j, i):
        s1 = c1[i] - c1[j]
        return prev[j] - Fraction(s1 * s1, c0[i] - c0[j])

    layers, splits = _divide_and_conquer(m, n_max, cost)
    out = []
    for n in range(1, n_max + 1):
        error = Fraction(c2[m] + layers[n - 1][m], lw * lx * lx)
        codebook = tuple(
            Fraction(c1[i] - c1[j], (c0[i] - c0[j]) * lx)
            for j, i in _backtrack(splits[:n], m)
        )
        out.append((error, codebook))
    return out


def dp_kmeans(measure: AtomMeasure, n: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Globally optimal n-point codebook for the atom measure, in exact arithmetic.

    Optimal clusters of sorted atoms are contiguous, so the problem is a DP
    over segment boundaries with prefix sums of mass, mass*pos and mass*pos^2.
    """
    return dp_kmeans_sweep(measure, n)[-1]


def _to_longdouble(values: Sequence[Fraction]) -> np.ndarray:
    num = np.array([v.numerator for v in values], dtype=np.longdouble)
    den = np.array([v.denominator for v in values], dtype=np.longdouble)
    return num / den


def dp_kmeans_fast(measure: AtomMeasure, n: int) -> tuple[float, tuple[float, ...], float]:
    """Extended-precision float version of :func:`dp_kmeans`.

    Returns ``(error, codebook, tolerance)`` where ``tolerance`` bounds the
    accumulated rounding error of the reported error.
    """
    m = len(measure)
    if not 1 <= n <= m:
        raise ValueError(f"n must lie in [1, {m}], got {n}")
    dtype = np.longdouble
    x = _to_longdouble(measure.positions)
    w = _to_longdouble(measure.masses)
    # centre positions to limit cancellation in S2 - S1^2/S0
    centre = (w * x).sum() / w.sum()
    x = x - centre
    c0 = np.concatenate(([0], np.cumsum(w))).astype(dtype)
    c1 = np.concatenate(([0], np.cumsum(w * x))).astype(dtype)
    c2 = np.concatenate(([0], np.cumsum(w * x * x))).astype(dtype)
    prev = np.full(m + 1, np.inf, dtype=dtype)
    prev[0] = 0
    splits = []
    for layer in range(1, n + 1):
        cur = np.full(m + 1, np.inf, dtype=dtype)
        arg = np.zeros(m + 1, dtype=np.int64)
        stack = [(layer, m, layer - 1, m - 1)]
        while stack:
            lo, hi, jlo, jhi = stack.pop()
            if lo > hi:
                continue
            mid = (lo + hi) // 2
            j = np.arange(jlo, min(mid - 1, jhi) + 1)
            s0 = c0[mid] - c0[j]
            s1 = c1[mid] - c1[j]
            cand = prev[j] + (c2[mid] - c2[j]) - s1 * s1 / s0
            best = int(np.argmin(cand))
            cur[mid] = cand[best]
            arg[mid] = j[best]
            stack.append((lo, mid - 1, jlo, int(j[best])))
            stack.append((mid + 1, hi, int(j[best]), jhi))
        prev = cur
        splits.append(arg)
    codebook = tuple(
        float((c1[i] - c1[j]) / (c0[i] - c0[j]) + centre) for j, i in _backtrack(splits, m)
    )
    eps = float(np.finfo(dtype).eps)
    tolerance = 8 * (m + n) * eps * float(c2[m]) + 8 * eps * float(prev[m])
    return float(max(prev[m], 0)), codebook, tolerance


def lloyd_refine(
    measure: AtomMeasure, init: Sequence[Fraction], max_iters: int = 100
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Lloyd iteration (nearest-point assignment, then mass centroids) on the atoms."""
    codes = sorted(Fraction(c) for c in init)
    if not codes:
        raise ValueError("init codebook is empty")
    for _ in range(max_iters):
        sums = [[Fraction(0), Fraction(0)] for _ in codes]
        bounds = [(a + b) / 2 for a, b in zip(codes, codes[1:])]
        k = 0
        for x, w in zip(measure.positions, measure.masses):
            while k < len(bounds) and x > bounds[k]:
                k += 1
            sums[k][0] += w
            sums[k][1] += w * x
        # an empty region keeps its point
        new = sorted(s1 / s0 if s0 else c for (s0, s1), c in zip(sums, codes))
        if new == codes:
            break
        codes = new
    return measure.distortion(codes), tuple(codes)


class OracleViolation(AssertionError):
    def __init__(self, result: "OracleResult"):
        super().__init__(result.describe())
        self.result = result


@dataclass
class OracleResult:
    n: int
    depth: int
    mode: str
    discrete_error: Fraction | float
    codebook: tuple
    bound: Fraction
    engine_error: Fraction
    tolerance: float = 0.0
    heuristic: bool = False
    # optimal leaf set whose sorted cylinders contain the DP code points, if any
    matched_words: tuple[Word, ...] | None = None
    inside_cylinders: list[bool] = field(default_factory=list)

    @property
    def gap(self) -> Fraction | float:
        return self.engine_error - self.discrete_error

    @property
    def within_bracket(self) -> bool:
        if self.mode == "exact":
            return 0 <= self.gap <= self.bound
        gap = float(self.engine_error) - float(self.discrete_error)
        return -self.tolerance <= gap <= float(self.bound) + self.tolerance

    @property
    def passed(self) -> bool:
        return self.within_bracket

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        label = " [HEURISTIC]" if self.heuristic else ""
        return (
            f"{status}{label} n={self.n} depth={self.depth} mode={self.mode}: "
            f"V_n - D_n = {float(self.gap):.6e}, allowed [0, {float(self.bound):.6e}]"
            + (f" +/- {self.tolerance:.2e}" if self.mode == "fast" else "")
            + (
                ""
                if self.heuristic
                else f"; codebook {'matches' if self.matched_words else 'does not match'} an optimal cut"
            )
        )


def heuristic_greedy_error(n: int, measure: CantorMeasure) -> Fraction:
    """Greedy max-weight splitting for arbitrary parameters.  No optimality claim."""
    a, b = measure.weight_ratios
    heap = [(-Fraction(1), "")]
    total = Fraction(1)
    for _ in range(n - 1):
        neg, w = heapq.heappop(heap)
        total += neg * (1 - a - b)
        heapq.heappush(heap, (neg * a, w + "1"))
        heapq.heappush(heap, (neg * b, w + "2"))
    return total * measure.variance


def _match_cut(codebook: Sequence, n: int, limit: int, measure: CantorMeasure):
    if measure.is_standard:
        family = engine.enumerate_optimal_sets(n, limit)
        candidates = family.sets or [engine.canonical_optimal_words(n)]
    else:
        return None, []
    best_flags: list[bool] = []
    for words in candidates:
        cyls = [measure.cylinder(w) for w in words]
        flags = [c.left <= p <= c.right for c, p in zip(cyls, codebook)]
        if all(flags):
            return tuple(words), flags
        if not best_flags:
            best_flags = flags
    return None, best_flags


def _check_args(n: int, depth: int, mode: str) -> None:
    if mode not in ("exact", "fast"):
        raise ValueError("mode must be 'exact' or 'fast'")
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in [1, {MAX_DEPTH}], got {depth}")
    if not 1 <= n <= 2**depth:
        raise ValueError(f"n must lie in [1, 2**depth = {2**depth}], got {n}")


def _result(n, depth, mode, measure, discrete, codebook, tolerance, match_limit) -> OracleResult:
    a, b = measure.weight_ratios
    heuristic = not measure.is_standard
    matched, flags = _match_cut(codebook, n, match_limit, measure)
    return OracleResult(
        n=n,
        depth=depth,
        mode=mode,
        discrete_error=discrete,
        codebook=codebook,
        bound=(a + b) ** depth * measure.variance,
        engine_error=heuristic_greedy_error(n, measure) if heuristic else engine.optimal_error(n),
        tolerance=tolerance,
        heuristic=heuristic,
        matched_words=matched,
        inside_cylinders=flags,
    )


def oracle_check(
    n: int,
    depth: int,
    mode: str = "exact",
    measure: CantorMeasure = STANDARD,
    strict: bool = False,
    match_limit: int = 1000,
) -> OracleResult:
    """Compare the engine's ``V_n`` with the optimal discrete error at ``depth``.

    With ``strict=True`` a failed bracket raises :class:`OracleViolation`.
    For non-standard parameters the engine value comes from
    :func:`heuristic_greedy_error` and the result is flagged ``heuristic``.
    """
    _check_args(n, depth, mode)
    atoms = discretize(depth, measure)
    if mode == "exact":
        discrete, codebook = dp_kmeans(atoms, n)
        tolerance = 0.0
    else:
        discrete, codebook, tolerance = dp_kmeans_fast(atoms, n)
    result = _result(n, depth, mode, measure, discrete, codebook, tolerance, match_limit)
    if strict and not result.passed:
        raise OracleViolation(result)
    return result


def oracle_sweep(
    n_max: int, depth: int, measure: CantorMeasure = STANDARD, strict: bool = False
) -> list[OracleResult]:
    """Exact :func:`oracle_check` for every ``n`` in ``1..n_max`` from a single DP run."""
    _check_args(n_max, depth, "exact")
    results = []
    for n, (discrete, codebook) in enumerate(dp_kmeans_sweep(discretize(depth, measure), n_max), 1):
        result = _result(n, depth, "exact", measure, discrete, codebook, 0.0, 1000)
        if strict and not result.passed:
            raise OracleViolation(result)
        results.append(result)
    return results
