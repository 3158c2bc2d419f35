"""Acceptance suite: one test per release criterion, run with -v for the
per-criterion pass/fail lines. Every tolerance is pinned here; corpora
and sketch seeds are fixed in conftest so results are reproducible."""

import csv
import os
import random
from pathlib import Path

import numpy as np
import pytest

from sketchsim import (
    BloomFilter,
    CountMinSketch,
    CountingBloomFilter,
    GridSpec,
    Multiset,
    SketchParams,
    build_user_profiles,
    cbf_dice,
    cms_dice,
    cosine,
    decode,
    dice,
    encode,
    find_collision_free_seed,
    ingest_triplets,
    run_grid,
    run_pairwise,
    threshold_report,
)
from sketchsim.experiments import DEFAULT_DEPTHS, DEFAULT_DIMS, _BuildCache, _run_pairwise

FIXTURE = Path(__file__).parent / "data" / "fixture_triplets.tsv"
SKETCH_SEED = 0


def _report(criterion, message):
    print(f"[acceptance] {criterion}: PASS ({message})")


def _random_multiset(rng, pool, max_distinct=40, max_count=9):
    m = Multiset()
    for _ in range(rng.randint(1, max_distinct)):
        m.insert(rng.choice(pool), rng.randint(1, max_count))
    return m


def test_c01_cbf_cms_equivalence():
    """k=1 CBF equals d=1 CMS cell-for-cell, and the Dice scores match exactly."""
    rng = random.Random(101)
    pool = [rng.randbytes(10) for _ in range(300)]
    multisets = [_random_multiset(rng, pool) for _ in range(100)]
    for n in (64, 128, 400):
        for m in multisets:
            cbf = CountingBloomFilter.from_multiset(m, n, hash_count=1, seed=SKETCH_SEED)
            cms = CountMinSketch.from_multiset(m, n, 1, seed=SKETCH_SEED)
            assert np.array_equal(cbf.counters, cms.table[0])
        for x, y in zip(multisets, multisets[1:]):
            p = CountingBloomFilter.from_multiset(x, n, 1, seed=SKETCH_SEED)
            q = CountingBloomFilter.from_multiset(y, n, 1, seed=SKETCH_SEED)
            r = CountMinSketch.from_multiset(x, n, 1, seed=SKETCH_SEED)
            s = CountMinSketch.from_multiset(y, n, 1, seed=SKETCH_SEED)
            assert cbf_dice(p, q) == cms_dice(r, s)
    _report("C1 equivalence", "100 multisets x n in {64,128,400}, tolerance 0")


def test_c02_overestimation_across_default_grid(sd_corpus, real_like_corpus):
    """estimate - truth >= -1e-12 for cbf_dice and cms_dice over every default grid cell."""
    corpus = list(sd_corpus) + list(real_like_corpus)
    worst = 0.0
    for kind in ("cbf", "cms"):
        cache = _BuildCache(SKETCH_SEED)
        for dim in DEFAULT_DIMS:
            for depth in DEFAULT_DEPTHS:
                if kind == "cbf":
                    params = SketchParams("cbf", dim, hash_count=depth, seed=SKETCH_SEED)
                else:
                    params = SketchParams("cms", dim, depth=depth, seed=SKETCH_SEED)
                run = _run_pairwise(corpus, params, "dice", cache)
                assert not run.failures
                cell_min = min(r.error for r in run.results)
                worst = min(worst, cell_min)
                assert cell_min >= -1e-12, (kind, dim, depth, cell_min)
    _report("C2 overestimation", f"{len(corpus)} pairs x 25 configs x 2 structures, min error {worst:.2e}")


def test_c03_hash_count_penalty(sd_corpus):
    """More hash functions never reduce the RMSE: k=4 >= k=1 and k=8 >= k=2."""
    cells = run_grid(sd_corpus, GridSpec("cbf", dims=[128, 256, 400], depths=[1, 2, 4, 8], seed=SKETCH_SEED))
    for n in (128, 256, 400):
        assert cells[(n, 4)] >= cells[(n, 1)], (n, cells[(n, 4)], cells[(n, 1)])
        assert cells[(n, 8)] >= cells[(n, 2)], (n, cells[(n, 8)], cells[(n, 2)])
    _report("C3 hash-count penalty", "strict >= at n in {128,256,400}")


def test_c04_length_benefit(sd_corpus):
    """RMSE non-increasing as the length doubles, allowing one small inversion."""
    lengths = [64, 128, 256, 512, 1024]
    cells = run_grid(sd_corpus, GridSpec("cbf", dims=lengths, depths=[1], seed=SKETCH_SEED))
    series = [cells[(n, 1)] for n in lengths]
    inversions = [(a, b) for a, b in zip(series, series[1:]) if b > a]
    assert len(inversions) <= 1, series
    for a, b in inversions:
        assert (b - a) / a < 0.10, series
    _report("C4 length benefit", "RMSE " + " -> ".join(f"{v:.4f}" for v in series))


def test_c05_depth_insensitivity(sd_corpus):
    """CMS rows barely move the RMSE: |RMSE(d=10) - RMSE(d=1)| <= 0.25 * RMSE(d=1)."""
    cells = run_grid(sd_corpus, GridSpec("cms", dims=[200, 400], depths=[1, 10], seed=SKETCH_SEED))
    details = []
    for w in (200, 400):
        d1, d10 = cells[(w, 1)], cells[(w, 10)]
        assert abs(d10 - d1) <= 0.25 * d1, (w, d1, d10)
        details.append(f"w={w}: {abs(d10 - d1) / d1:.1%}")
    _report("C5 depth insensitivity", ", ".join(details))


def test_c06_recommended_configuration(rd_like_corpus):
    """One-hash CBF of length 128 at threshold 0.6 on a listening-history-like corpus."""
    distincts = [m.distinct_count() for _, a, b in rd_like_corpus for m in (a, b)]
    mean_distinct = sum(distincts) / len(distincts)
    assert 60 <= mean_distinct <= 74, mean_distinct

    run = run_pairwise(rd_like_corpus, SketchParams("cbf", 128, seed=SKETCH_SEED), "dice")
    assert not run.failures
    report = threshold_report(run.results, 0.6)
    assert report.false_negatives == 0

    false_positives = [r for r in run.results if r.estimate >= 0.6 > r.truth]
    assert false_positives, "expected some false positives at length 128"
    min_fp_truth = min(r.truth for r in false_positives)
    assert min_fp_truth >= 0.45, min_fp_truth

    high = [r.error for r in run.results if r.truth >= 0.6]
    low = [r.error for r in run.results if r.truth < 0.2]
    assert high and low
    assert sum(high) / len(high) < sum(low) / len(low)
    _report(
        "C6 recommended configuration",
        f"mean distinct {mean_distinct:.1f}, fp={report.false_positives}, fn=0, "
        f"lowest fp truth {min_fp_truth:.3f}",
    )


def test_c07_dice_vs_cosine(sd_corpus):
    """Dice and cosine agree exactly on identity/zero; sketch-level gap is reported only."""
    x = Multiset({"a": 3, "b": 5, "c": 1})
    y = Multiset({"d": 2, "e": 7})
    assert dice(x, x) == cosine(x, x) == 1.0
    assert dice(x, y) == cosine(x, y) == 0.0

    params = SketchParams("cms", 400, depth=10, seed=SKETCH_SEED)
    dice_run = run_pairwise(sd_corpus, params, "dice")
    cosine_run = run_pairwise(sd_corpus, params, "cosine")
    dice_by_id = {r.pair_id: r.estimate for r in dice_run.results}
    gaps = [abs(dice_by_id[r.pair_id] - r.estimate) for r in cosine_run.results]
    _report(
        "C7 dice vs cosine",
        f"max |CMS-Dice - CMS-cosSim| = {max(gaps):.4f}, mean = {sum(gaps) / len(gaps):.4f} (report only)",
    )


def test_c08_wire_round_trip():
    """1000 random sketches survive encode/decode bit-exactly; CBF n=128 is 539 bytes."""
    assert len(encode(CountingBloomFilter(128, hash_count=1, seed=0))) == 539
    rng = random.Random(808)
    pool = [rng.randbytes(10) for _ in range(200)]
    for i in range(1000):
        m = _random_multiset(rng, pool)
        seed = rng.randint(0, 2**64 - 1)
        kind = i % 3
        if kind == 0:
            sketch = BloomFilter.from_multiset(m, rng.randint(1, 257), rng.randint(1, 4), seed)
        elif kind == 1:
            sketch = CountingBloomFilter.from_multiset(m, rng.randint(1, 257), rng.randint(1, 4), seed)
        else:
            sketch = CountMinSketch.from_multiset(m, rng.randint(1, 129), rng.randint(1, 8), seed)
        data = encode(sketch)
        again = decode(data)
        assert again == sketch
        assert encode(again) == data
    _report("C8 wire round-trip", "1000 sketches across bf/cbf/cms, plus the 539-byte envelope")


def test_c09_real_data_pipeline():
    """Filtering the bundled 50-user fixture keeps exactly the rule-satisfying users."""
    # independent recount, bypassing the library parser
    plays: dict[str, dict[str, int]] = {}
    with open(FIXTURE, encoding="utf-8") as handle:
        for row in csv.reader(handle, delimiter="\t"):
            user, song, count = row
            plays.setdefault(user, {})
            plays[user][song] = plays[user].get(song, 0) + int(count)
    expected_kept = {user for user, songs in plays.items() if len(songs) >= 50}

    profiles = build_user_profiles(ingest_triplets(FIXTURE), min_distinct=50)
    assert set(profiles) == expected_kept
    for user in expected_kept:
        assert profiles[user].distinct_count() == len(plays[user])
        assert profiles[user].cardinality() == sum(plays[user].values())
    _report("C9 real-data pipeline", f"{len(expected_kept)} of {len(plays)} fixture users kept at min_distinct=50")


@pytest.mark.skipif(
    "SKETCHSIM_TASTE_PROFILE" not in os.environ,
    reason="set SKETCHSIM_TASTE_PROFILE to the original filtered taste-profile subset TSV",
)
def test_c09_optional_published_corpus_counts():
    """With the original subset file, the published corpus counts reproduce."""
    profiles = build_user_profiles(
        ingest_triplets(os.environ["SKETCHSIM_TASTE_PROFILE"]), min_distinct=50
    )
    users = len(profiles)
    songs = len({song for profile in profiles.values() for song, _ in profile.items()})
    plays = sum(profile.cardinality() for profile in profiles.values())
    assert (users, songs, plays) == (1865, 14867, 122389)
    _report("C9b published counts", f"{users} users, {songs} songs, {plays} plays")


def test_c10_collision_free_exactness():
    """With a searched collision-free seed, cbf_dice equals the oracle to 1e-12."""
    rng = random.Random(91)
    pool = [rng.randbytes(8) for _ in range(16)]
    seed = find_collision_free_seed(pool, size=4096, hash_count=2)
    checked = 0
    while checked < 100:
        x, y = Multiset(), Multiset()
        for element in pool:
            if rng.random() < 0.7:
                x.insert(element, rng.randint(1, 9))
            if rng.random() < 0.7:
                y.insert(element, rng.randint(1, 9))
        if x.cardinality() == 0 and y.cardinality() == 0:
            continue
        p = CountingBloomFilter.from_multiset(x, 4096, hash_count=2, seed=seed)
        q = CountingBloomFilter.from_multiset(y, 4096, hash_count=2, seed=seed)
        assert abs(cbf_dice(p, q) - dice(x, y)) <= 1e-12
        checked += 1
    _report("C10 collision-free exactness", f"collision-free seed {seed}, 100 pairs, <= 1e-12")
