import numpy as np
import pytest

from sketchsim import companion_sharing, corpus_pairs, generate_synthetic, random_multiset

# One pinned seed per corpus so every run of the suite sees identical data.
SD_SEED = 7
REAL_LIKE_SEED = 11
RD_LIKE_SEED = 5


def make_pair_corpus(seed, targets, distinct_range=(60, 75), count_range=(1, 3), prefix="r"):
    """Random multiset pairs hitting the given similarity targets.

    Profiles mimic listening histories: ~60-75 distinct 10-character
    ids with small play counts. Ground truth is whatever the oracle
    says for the constructed pair, not the target.
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for i, target in enumerate(targets):
        distinct = int(rng.integers(*distinct_range))
        base = random_multiset(rng, distinct, 10, count_range=count_range)
        shared = int(round(float(target) * base.cardinality()))
        other = companion_sharing(rng, base, shared, 10, count_range=count_range)
        corpus.append((f"{prefix}{i:04d}", base, other))
    return corpus


@pytest.fixture(scope="session")
def sd_pairs():
    """The 1001-pair synthetic corpus with evenly spaced Dice targets."""
    return generate_synthetic(SD_SEED)


@pytest.fixture(scope="session")
def sd_corpus(sd_pairs):
    return corpus_pairs(sd_pairs)


@pytest.fixture(scope="session")
def real_like_corpus():
    """500 listening-history-like pairs with uniformly random similarity."""
    rng = np.random.default_rng(REAL_LIKE_SEED)
    targets = rng.uniform(0.0, 1.0, size=500)
    return make_pair_corpus(REAL_LIKE_SEED + 1, targets)


@pytest.fixture(scope="session")
def rd_like_corpus():
    """800 pairs whose similarity distribution mirrors the real data set:

    most comparisons nearly dissimilar, a sparse middle band, and a tail
    of genuinely similar pairs (cf. the sorted similarity plots).
    """
    rng = np.random.default_rng(RD_LIKE_SEED)
    targets = np.concatenate(
        [
            rng.uniform(0.0, 0.20, size=600),
            rng.uniform(0.20, 0.45, size=60),
            rng.uniform(0.45, 1.0, size=140),
        ]
    )
    return make_pair_corpus(RD_LIKE_SEED + 1, targets, prefix="rd")
