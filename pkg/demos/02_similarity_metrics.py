"""Exact similarity vs sketch-level estimates, and the one-sided error.

Run with: python demos/02_similarity_metrics.py
"""

import numpy as np

from sketchsim import (
    CountMinSketch,
    CountingBloomFilter,
    Multiset,
    cbf_dice,
    cms_cosine,
    cms_dice,
    cosine,
    dice,
)

rng = np.random.default_rng(3)

# Two profiles that share part of their taste.
shared = {f"shared-{i}": int(rng.integers(1, 6)) for i in range(30)}
alice = Multiset({**shared, **{f"alice-{i}": int(rng.integers(1, 6)) for i in range(35)}})
bob = Multiset({**shared, **{f"bob-{i}": int(rng.integers(1, 6)) for i in range(35)}})

print("exact Dice:  ", round(dice(alice, bob), 4))
print("exact cosine:", round(cosine(alice, bob), 4))

# Sketch both sides with the same length and the same seed; that is the
# whole comparability requirement.
for n in (64, 128, 256, 1024):
    p = CountingBloomFilter.from_multiset(alice, n, hash_count=1, seed=7)
    q = CountingBloomFilter.from_multiset(bob, n, hash_count=1, seed=7)
    estimate = cbf_dice(p, q)
    print(f"CBF-Dice n={n:5d}: {estimate:.4f}  (error {estimate - dice(alice, bob):+.4f})")

# The error is one-sided: a collision adds the same mass to both sides of
# the positionwise minimum, so estimates are never below the exact score.
worst = min(
    cbf_dice(
        CountingBloomFilter.from_multiset(alice, 64, 1, seed=s),
        CountingBloomFilter.from_multiset(bob, 64, 1, seed=s),
    )
    - dice(alice, bob)
    for s in range(200)
)
print("\nsmallest error over 200 seeds at n=64:", f"{worst:+.5f}", "(never negative)")

# CMS metrics average the per-row scores; more rows do not help similarity
# estimation, they just average rows with the same collision statistics.
for d in (1, 4, 10):
    r = CountMinSketch.from_multiset(alice, 128, d, seed=7)
    s = CountMinSketch.from_multiset(bob, 128, d, seed=7)
    print(f"CMS-Dice d={d:2d}: {cms_dice(r, s):.4f}   CMS-cosSim: {cms_cosine(r, s):.4f}")
