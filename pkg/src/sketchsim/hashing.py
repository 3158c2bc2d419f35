"""Deterministic seeded hash family shared by every sketch.

Two sketches can only be compared if the same elements land on the same
cells on both sides, so the digest procedure is normative down to the
byte (see README "Hash procedure" for the bit-for-bit contract):

    h1      = mix64( FNV1a64( seed_le8 || 0x01 || element ) )
    h2      = mix64( FNV1a64( seed_le8 || 0x02 || element ) ) with bit 0 forced to 1
    index_i = ((h1 + i * h2) mod 2^64) mod table_size       for i = 0..k-1

where FNV1a64 is the standard 64-bit FNV-1a digest, seed_le8 is the
64-bit seed in little-endian byte order, and mix64 is the 64-bit
avalanche finalizer (xor-shift 33 / multiply 0xff51afd7ed558ccd /
xor-shift 33 / multiply 0xc4ceb9fe1a85ec53 / xor-shift 33). The
finalizer matters: raw FNV-1a digests of two strings that differ only
in their final byte differ by a fixed multiple of the FNV prime at
every seed, which double hashing turns into structural collisions for
sequential keys ("user1", "user2", ...). Combining the two finalized
digests by double hashing yields k index functions from two digest
passes while keeping the table-level collision behaviour of k
independent functions.

Count-Min rows each use a single-function family whose seed derives from
the base seed and the row index:

    row_seed(base, 0) = base
    row_seed(base, r) = FNV1a64( base_le8 || 0x03 || r_le4 )     for r >= 1

Row 0 keeps the base seed itself so a one-row Count-Min sketch is
cell-for-cell identical to a one-hash Counting Bloom Filter built from
the same seed.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .multiset import as_element

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
SEED_MAX = 2**64 - 1

_DOMAIN_H1 = b"\x01"
_DOMAIN_H2 = b"\x02"
_DOMAIN_ROW = b"\x03"


def fnv1a64(data: bytes, state: int = FNV_OFFSET) -> int:
    """64-bit FNV-1a digest of `data`, continuing from `state`."""
    h = state
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def mix64(value: int) -> int:
    """64-bit avalanche finalizer (murmur-style); bijective on uint64."""
    value ^= value >> 33
    value = (value * 0xFF51AFD7ED558CCD) & _MASK64
    value ^= value >> 33
    value = (value * 0xC4CEB9FE1A85EC53) & _MASK64
    value ^= value >> 33
    return value


def _mix64_bulk(values: np.ndarray) -> np.ndarray:
    shift = np.uint64(33)
    values = values.copy()
    values ^= values >> shift
    values *= np.uint64(0xFF51AFD7ED558CCD)
    values ^= values >> shift
    values *= np.uint64(0xC4CEB9FE1A85EC53)
    values ^= values >> shift
    return values


def fnv1a64_bulk(datas: Sequence[bytes], state: int = FNV_OFFSET) -> np.ndarray:
    """FNV-1a digests of many byte strings at once (uint64 array).

    Bit-identical to calling fnv1a64 on each entry; inputs are grouped
    by length so each group vectorizes into one pass per byte position.
    """
    out = np.empty(len(datas), dtype=np.uint64)
    by_length: dict[int, list[int]] = {}
    for i, data in enumerate(datas):
        by_length.setdefault(len(data), []).append(i)
    prime = np.uint64(FNV_PRIME)
    for length, indices in by_length.items():
        idx = np.array(indices)
        h = np.full(len(indices), state, dtype=np.uint64)
        if length:
            block = np.frombuffer(
                b"".join(datas[i] for i in indices), dtype=np.uint8
            ).reshape(len(indices), length)
            for j in range(length):
                h ^= block[:, j].astype(np.uint64)
                h *= prime  # uint64 wraparound, matching the scalar masking
        out[idx] = h
    return out


def _check_seed(seed: int) -> int:
    if not isinstance(seed, int) or not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return seed


@lru_cache(maxsize=1024)
def _prefix_state(seed: int, domain: bytes) -> int:
    return fnv1a64(seed.to_bytes(8, "little") + domain)


def digest_pair(seed: int, element: bytes | str) -> tuple[int, int]:
    """The (h1, h2) digest pair of an element under a seed; h2 is odd."""
    key = as_element(element)
    _check_seed(seed)
    h1 = mix64(fnv1a64(key, _prefix_state(seed, _DOMAIN_H1)))
    h2 = mix64(fnv1a64(key, _prefix_state(seed, _DOMAIN_H2))) | 1
    return h1, h2


def digest_pairs_bulk(seed: int, elements: Sequence[bytes]) -> tuple[np.ndarray, np.ndarray]:
    """(h1, h2) arrays for many elements; matches digest_pair entrywise."""
    _check_seed(seed)
    h1 = _mix64_bulk(fnv1a64_bulk(elements, _prefix_state(seed, _DOMAIN_H1)))
    h2 = _mix64_bulk(fnv1a64_bulk(elements, _prefix_state(seed, _DOMAIN_H2))) | np.uint64(1)
    return h1, h2


def digest1_bulk(seed: int, elements: Sequence[bytes]) -> np.ndarray:
    """h1 array only, for single-function (k=1) families such as CMS rows."""
    _check_seed(seed)
    return _mix64_bulk(fnv1a64_bulk(elements, _prefix_state(seed, _DOMAIN_H1)))


def derive_row_seed(base_seed: int, row: int) -> int:
    """Seed of a Count-Min row family; row 0 is the base seed itself."""
    _check_seed(base_seed)
    if row < 0:
        raise ValueError(f"row must be non-negative, got {row}")
    if row == 0:
        return base_seed
    return fnv1a64(row.to_bytes(4, "little"), _prefix_state(base_seed, _DOMAIN_ROW))


class HashFamily:
    """k position-generating hash functions over a fixed table size.

    Fully determined by (seed, hash_count, size); carries no state, so
    instances are safe for unrestricted concurrent use.
    """

    __slots__ = ("seed", "hash_count", "size")

    def __init__(self, seed: int = 0, hash_count: int = 1, size: int = 1):
        self.seed = _check_seed(seed)
        if hash_count < 1:
            raise ValueError(f"hash_count must be >= 1, got {hash_count}")
        if size < 1:
            raise ValueError(f"size must be >= 1, got {size}")
        self.hash_count = hash_count
        self.size = size

    def positions(self, element: bytes | str) -> list[int]:
        """The k table indices of an element, each in [0, size)."""
        h1, h2 = digest_pair(self.seed, element)
        return [((h1 + i * h2) & _MASK64) % self.size for i in range(self.hash_count)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HashFamily):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.hash_count == other.hash_count
            and self.size == other.size
        )

    def __repr__(self) -> str:
        return f"HashFamily(seed={self.seed}, hash_count={self.hash_count}, size={self.size})"


def find_collision_free_seed(
    elements: Sequence[bytes | str],
    size: int,
    hash_count: int = 1,
    start_seed: int = 0,
    max_tries: int = 100_000,
) -> int:
    """Search for a seed under which no two distinct elements share a cell.

    Used to construct configurations where sketch similarity is provably
    exact. An element colliding with itself (two of its own index
    functions on one cell) is allowed; only cross-element sharing is
    ruled out.
    """
    keys = [as_element(e) for e in elements]
    for seed in range(start_seed, start_seed + max_tries):
        family = HashFamily(seed=seed, hash_count=hash_count, size=size)
        owner: dict[int, bytes] = {}
        ok = True
        for key in keys:
            for position in set(family.positions(key)):
                if owner.setdefault(position, key) != key:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return seed
    raise RuntimeError(
        f"no collision-free seed found in {max_tries} tries "
        f"(size={size}, hash_count={hash_count}, {len(keys)} elements)"
    )
