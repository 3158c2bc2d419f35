"""Corpus construction: controlled synthetic pairs and play-count ingestion.

The synthetic generator produces one random base multiset plus, for each
target similarity t, a companion that shares floor(t * T) units of mass
with the base (T = base cardinality) and is padded to cardinality T with
fresh random elements. The achieved Dice is then exactly shared/T; the
stored score is always recomputed by the exact oracle, never assumed
from the construction.

Real listening histories arrive as tab-separated ``user<TAB>song<TAB>count``
lines (gzip accepted); profiles are one multiset per user, filtered by a
minimum number of distinct songs.
"""

from __future__ import annotations

import gzip
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from .multiset import Multiset, dice

logger = logging.getLogger(__name__)

# 0x21..0x7E: printable ASCII without space/tab, so generated elements
# survive the TSV profile format unescaped.
_ALPHABET = np.frombuffer(bytes(range(0x21, 0x7F)), dtype=np.uint8)
_FRESH_TRIES = 1000

MANIFEST_SCHEMA = "sketchsim-corpus-v1"
MANIFEST_NAME = "manifest.json"
PROFILES_NAME = "profiles.tsv"
BASE_ID = "base"


class GenerationError(RuntimeError):
    """Synthetic generation cannot satisfy the requested shape."""


class TripletParseError(ValueError):
    """A triplet line failed to parse; carries the 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {reason}")


@dataclass(frozen=True)
class SyntheticPair:
    """A base/companion multiset pair with target and achieved Dice."""

    base: Multiset
    other: Multiset
    target_dice: float
    exact_dice: float


@dataclass(frozen=True)
class ListeningRecord:
    user: str
    song: str
    play_count: int


def _random_string(rng: np.random.Generator, length: int) -> bytes:
    return bytes(_ALPHABET[rng.integers(0, len(_ALPHABET), size=length)])


def _fresh_string(rng: np.random.Generator, length: int, taken: set[bytes]) -> bytes:
    for _ in range(_FRESH_TRIES):
        candidate = _random_string(rng, length)
        if candidate not in taken:
            taken.add(candidate)
            return candidate
    raise GenerationError(
        f"could not draw a fresh {length}-character string after {_FRESH_TRIES} tries; "
        "the string space is too small for the requested corpus"
    )


def _check_count_range(count_range: tuple[int, int]) -> tuple[int, int]:
    low, high = count_range
    if low < 1 or high < low:
        raise ValueError(f"count_range must satisfy 1 <= low <= high, got {count_range}")
    return low, high


def random_multiset(
    rng: np.random.Generator,
    distinct: int,
    string_length: int = 10,
    count_range: tuple[int, int] = (1, 1),
    total: int | None = None,
) -> Multiset:
    """Multiset of `distinct` fresh random strings with random counts.

    With `total` given, counts are nudged up or down (never below 1)
    until the cardinality is exactly `total`.
    """
    if distinct < 1:
        raise ValueError(f"distinct must be >= 1, got {distinct}")
    if string_length < 1:
        raise ValueError(f"string_length must be >= 1, got {string_length}")
    low, high = _check_count_range(count_range)
    if 4 * distinct > len(_ALPHABET) ** string_length:
        raise GenerationError(
            f"{distinct} distinct strings of length {string_length} would exhaust the string space"
        )
    taken: set[bytes] = set()
    elements = [_fresh_string(rng, string_length, taken) for _ in range(distinct)]
    counts = [int(c) for c in rng.integers(low, high + 1, size=distinct)]
    if total is not None:
        if total < distinct:
            raise GenerationError(f"total {total} cannot cover {distinct} elements with count >= 1")
        counts = _adjust_to_total(counts, total)
    return Multiset(zip(elements, counts))


def _adjust_to_total(counts: list[int], total: int) -> list[int]:
    difference = total - sum(counts)
    i = 0
    while difference != 0:
        slot = i % len(counts)
        if difference > 0:
            counts[slot] += 1
            difference -= 1
        elif counts[slot] > 1:
            counts[slot] -= 1
            difference += 1
        i += 1
    return counts


def companion_sharing(
    rng: np.random.Generator,
    base: Multiset,
    shared_mass: int,
    string_length: int = 10,
    count_range: tuple[int, int] = (1, 1),
) -> Multiset:
    """Companion of `base` with the same cardinality sharing exactly `shared_mass`.

    The shared part takes base elements (in random order, possibly one
    of them partially); the rest is padded with fresh strings absent
    from the base, so the multiset intersection is exactly `shared_mass`.
    """
    total = base.cardinality()
    if not 0 <= shared_mass <= total:
        raise ValueError(f"shared_mass must be in [0, {total}], got {shared_mass}")
    low, high = _check_count_range(count_range)
    items = sorted(base.items())
    companion = Multiset()
    remaining = shared_mass
    for index in rng.permutation(len(items)):
        if remaining == 0:
            break
        element, count = items[index]
        take = min(count, remaining)
        companion.insert(element, take)
        remaining -= take
    taken = {element for element, _ in items}
    padding = total - shared_mass
    while padding > 0:
        count = min(int(rng.integers(low, high + 1)), padding)
        companion.insert(_fresh_string(rng, string_length, taken), count)
        padding -= count
    return companion


def generate_synthetic(
    seed: int,
    pair_count: int = 1001,
    target_unique: int = 67,
    string_length: int = 10,
) -> list[SyntheticPair]:
    """Synthetic corpus: one base, `pair_count` companions with evenly spaced targets.

    Targets run from 0 to 1 inclusive. The base cardinality is forced
    large enough that every target is achievable within 1/T and the
    achieved values cover [0, 1] without gaps larger than 2/pair_count.
    The defaults reproduce a corpus of ~67 distinct 10-character strings
    per multiset with 1001 similarity steps.
    """
    if pair_count < 1:
        raise ValueError(f"pair_count must be >= 1, got {pair_count}")
    rng = np.random.default_rng(seed)
    total = max(15 * target_unique, pair_count + 3)
    base = random_multiset(rng, target_unique, string_length, count_range=(1, 29), total=total)
    cardinality = base.cardinality()
    steps = pair_count - 1
    pairs = []
    for i in range(pair_count):
        target = i / steps if steps else 0.0
        shared = (i * cardinality) // steps if steps else 0
        other = companion_sharing(rng, base, shared, string_length, count_range=(1, 29))
        pairs.append(SyntheticPair(base, other, target, dice(base, other)))
    return pairs


def corpus_pairs(pairs: Iterable[SyntheticPair]) -> list[tuple[str, Multiset, Multiset]]:
    """(pair_id, base, other) triples as consumed by the experiment runner."""
    return [(f"p{i:04d}", pair.base, pair.other) for i, pair in enumerate(pairs)]


def _open_lines(source: str | Path | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        with open(path, "rb") as raw:
            magic = raw.read(2)
        opener = gzip.open if magic == b"\x1f\x8b" else open
        with opener(path, "rt", encoding="utf-8") as handle:  # type: ignore[operator]
            yield from handle
    else:
        yield from source


def ingest_triplets(source: str | Path | IO[str] | Iterable[str]) -> list[ListeningRecord]:
    """Parse ``user<TAB>song<TAB>count`` lines into listening records.

    Blank lines are skipped. Malformed lines raise TripletParseError
    with their line number. Duplicate (user, song) lines are summed with
    a warning, keeping first-seen order.
    """
    merged: dict[tuple[str, str], int] = {}
    for line_number, raw in enumerate(_open_lines(source), 1):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise TripletParseError(line_number, f"expected 3 tab-separated fields, got {len(parts)}")
        user, song, count_text = parts
        if not user or not song:
            raise TripletParseError(line_number, "empty user or song id")
        try:
            count = int(count_text)
        except ValueError:
            raise TripletParseError(line_number, f"play count is not an integer: {count_text!r}") from None
        if count < 1:
            raise TripletParseError(line_number, f"play count must be >= 1, got {count}")
        key = (user, song)
        if key in merged:
            logger.warning("line %d: duplicate (user, song) %r; counts summed", line_number, key)
            merged[key] += count
        else:
            merged[key] = count
    return [ListeningRecord(user, song, count) for (user, song), count in merged.items()]


def build_user_profiles(records: Iterable[ListeningRecord], min_distinct: int = 0) -> dict[str, Multiset]:
    """One multiset per user (song -> plays), dropping users below `min_distinct` songs."""
    if min_distinct < 0:
        raise ValueError(f"min_distinct must be >= 0, got {min_distinct}")
    profiles: dict[str, Multiset] = {}
    for record in records:
        profiles.setdefault(record.user, Multiset()).insert(record.song, record.play_count)
    return {user: profile for user, profile in profiles.items() if profile.distinct_count() >= min_distinct}


def write_profiles(destination: str | Path | IO[str], profiles: Mapping[str, Multiset]) -> None:
    """Write profiles as triplet TSV (songs sorted, so output is reproducible)."""
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as handle:
            write_profiles(handle, profiles)
        return
    for user, profile in profiles.items():
        for song, count in sorted(profile.items()):
            destination.write(f"{user}\t{song.decode('utf-8')}\t{count}\n")


def read_profiles(source: str | Path | IO[str] | Iterable[str]) -> dict[str, Multiset]:
    """All user profiles from a triplet TSV, unfiltered."""
    return build_user_profiles(ingest_triplets(source), min_distinct=0)


def write_corpus(
    out_dir: str | Path,
    pairs: list[SyntheticPair],
    *,
    seed: int,
    target_unique: int,
    string_length: int,
) -> Path:
    """Persist a synthetic corpus: profiles TSV plus a JSON manifest.

    The manifest lists every pair id with its target and achieved Dice
    and each multiset's distinct count and cardinality; the base
    multiset is stored once under the id "base".
    """
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    ids = [pair_id for pair_id, _, _ in corpus_pairs(pairs)]
    base = pairs[0].base
    profiles: dict[str, Multiset] = {BASE_ID: base}
    for pair_id, pair in zip(ids, pairs):
        profiles[pair_id] = pair.other
    write_profiles(out_path / PROFILES_NAME, profiles)
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "kind": "synthetic",
        "seed": seed,
        "pair_count": len(pairs),
        "target_unique": target_unique,
        "string_length": string_length,
        "profiles_file": PROFILES_NAME,
        "base_id": BASE_ID,
        "multisets": {
            user: {"distinct": profile.distinct_count(), "cardinality": profile.cardinality()}
            for user, profile in profiles.items()
        },
        "pairs": [
            {
                "pair_id": pair_id,
                "a": BASE_ID,
                "b": pair_id,
                "target_dice": pair.target_dice,
                "exact_dice": pair.exact_dice,
            }
            for pair_id, pair in zip(ids, pairs)
        ],
    }
    manifest_path = out_path / MANIFEST_NAME
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return manifest_path


def load_corpus(manifest_path: str | Path) -> list[tuple[str, Multiset, Multiset]]:
    """Load a corpus manifest back into (pair_id, a, b) triples."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as handle:
        manifest = json.load(handle)
    if manifest.get("schema") != MANIFEST_SCHEMA:
        raise ValueError(f"unsupported corpus manifest schema: {manifest.get('schema')!r}")
    profiles = read_profiles(manifest_path.parent / manifest["profiles_file"])
    pairs = []
    for entry in manifest["pairs"]:
        try:
            pairs.append((entry["pair_id"], profiles[entry["a"]], profiles[entry["b"]]))
        except KeyError as missing:
            raise ValueError(f"manifest pair {entry['pair_id']!r} references unknown profile {missing}") from None
    return pairs
