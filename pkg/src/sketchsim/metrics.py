"""Similarity metrics over sketch pairs.

These approximate the exact Dice / cosine scores of the underlying
multisets using only the two counter vectors (or matrices), which is
what makes a single sketch exchange between two devices sufficient.

Every metric is exact or an overestimate, never an underestimate: a
collision can only add mass to a cell, and min(a+c, b+d) >= min(a,b) +
min(c,d), so the positionwise-minimum numerator never loses intersection
mass. All scores are computed from exact integer sums with one final
floating division, so results are deterministic across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .multiset import UndefinedSimilarityError
from .sketches import BloomFilter, CountMinSketch, CountingBloomFilter


@dataclass(frozen=True)
class CompatibilityWitness:
    """Proof that two sketches are comparable.

    Two sketches may be compared iff every field matches: same structure
    kind, same dimensions, same hash family seed and counter width.
    """

    kind: str
    width: int
    depth: int
    hash_count: int
    seed: int
    counter_width: int


class IncompatibleSketchError(ValueError):
    """Comparison attempted between sketches with differing parameters."""

    def __init__(self, mismatched_fields: list[str]):
        self.mismatched_fields = mismatched_fields
        super().__init__("incompatible sketches, differing fields: " + ", ".join(mismatched_fields))


def witness_of(sketch: BloomFilter | CountingBloomFilter | CountMinSketch) -> CompatibilityWitness:
    """The compatibility header of a sketch."""
    if isinstance(sketch, BloomFilter):
        return CompatibilityWitness("bf", sketch.length, 1, sketch.hash_count, sketch.seed, 1)
    if isinstance(sketch, CountingBloomFilter):
        return CompatibilityWitness("cbf", sketch.length, 1, sketch.hash_count, sketch.seed, 32)
    if isinstance(sketch, CountMinSketch):
        return CompatibilityWitness("cms", sketch.width, sketch.depth, 1, sketch.seed, 32)
    raise TypeError(f"not a sketch: {type(sketch).__name__}")


def check_witnesses(a: CompatibilityWitness, b: CompatibilityWitness) -> CompatibilityWitness:
    """Return the shared witness, or raise naming every differing field."""
    mismatched = [f.name for f in fields(CompatibilityWitness) if getattr(a, f.name) != getattr(b, f.name)]
    if mismatched:
        raise IncompatibleSketchError(mismatched)
    return a


def _require_comparable(p, q, expected_type, type_name: str) -> None:
    if not isinstance(p, expected_type) or not isinstance(q, expected_type):
        raise TypeError(f"expected two {type_name} instances")
    check_witnesses(witness_of(p), witness_of(q))


def _dice_sums(a: np.ndarray, b: np.ndarray) -> tuple[int, int]:
    # exact integer numerator/denominator of the positionwise Dice form
    numerator = 2 * int(np.minimum(a, b).sum(dtype=np.uint64))
    denominator = int(a.sum(dtype=np.uint64)) + int(b.sum(dtype=np.uint64))
    return numerator, denominator


def _int_dot(a: np.ndarray, b: np.ndarray) -> int:
    if a.size == 0:
        return 0
    # int64 is exact only while products cannot reach 2^63
    if int(a.max()) * int(b.max()) * a.size < 2**63:
        return int(np.dot(a.astype(np.int64), b.astype(np.int64)))
    return sum(x * y for x, y in zip(a.tolist(), b.tolist()))


def _cosine_value(a: np.ndarray, b: np.ndarray) -> float:
    norm_sq_a = _int_dot(a, a)
    norm_sq_b = _int_dot(b, b)
    if norm_sq_a == 0 or norm_sq_b == 0:
        raise UndefinedSimilarityError("cosine of an all-zero counter vector is undefined")
    product = norm_sq_a * norm_sq_b
    root = math.isqrt(product)
    denominator = float(root) if root * root == product else math.sqrt(product)
    return _int_dot(a, b) / denominator


def cbf_dice(p: CountingBloomFilter, q: CountingBloomFilter) -> float:
    """Dice coefficient of two CBFs.

    2 * sum_i min(p_i, q_i) / sum_i (p_i + q_i). The denominator is the
    cross sum of both full counter vectors; with k hash functions it
    equals k * (|X| + |Y|), so the score keeps the Dice scale.
    """
    _require_comparable(p, q, CountingBloomFilter, "CountingBloomFilter")
    numerator, denominator = _dice_sums(p.counters, q.counters)
    if denominator == 0:
        raise UndefinedSimilarityError("Dice of two all-zero sketches is undefined")
    return numerator / denominator


def cms_dice(r: CountMinSketch, s: CountMinSketch) -> float:
    """Dice coefficient of two CMSs: mean of the per-row CBF Dice values.

    A row pair with zero denominator (both rows empty) is an error, not
    a skipped row: silently dropping rows would bias the average.
    """
    _require_comparable(r, s, CountMinSketch, "CountMinSketch")
    values = []
    for row in range(r.depth):
        numerator, denominator = _dice_sums(r.table[row], s.table[row])
        if denominator == 0:
            raise UndefinedSimilarityError(f"Dice undefined: row {row} is all-zero in both sketches")
        values.append(numerator / denominator)
    return math.fsum(values) / r.depth


def cbf_cosine(p: CountingBloomFilter, q: CountingBloomFilter) -> float:
    """Cosine similarity of two CBF counter vectors."""
    _require_comparable(p, q, CountingBloomFilter, "CountingBloomFilter")
    return _cosine_value(p.counters, q.counters)


def cms_cosine(r: CountMinSketch, s: CountMinSketch) -> float:
    """Cosine similarity of two CMSs: mean of the per-row cosine values."""
    _require_comparable(r, s, CountMinSketch, "CountMinSketch")
    values = [_cosine_value(r.table[row], s.table[row]) for row in range(r.depth)]
    return math.fsum(values) / r.depth
