"""Space-efficient multiset similarity estimation with counting sketches.

Two devices each turn a local multiset (say, song -> play count) into a
Counting Bloom Filter or Count-Min Sketch, exchange one envelope each,
and score their similarity from counter vectors alone. Estimates equal
or overestimate the exact Dice / cosine score, never undershoot it.
"""

from .multiset import (
    COUNT_MAX,
    Multiset,
    UndefinedSimilarityError,
    cosine,
    dice,
    intersection_cardinality,
)
from .hashing import (
    HashFamily,
    derive_row_seed,
    digest_pair,
    find_collision_free_seed,
    fnv1a64,
)
from .sketches import (
    COUNTER_MAX,
    BloomFilter,
    CountMinSketch,
    CountingBloomFilter,
    cms_to_cbf,
)
from .metrics import (
    CompatibilityWitness,
    IncompatibleSketchError,
    cbf_cosine,
    cbf_dice,
    check_witnesses,
    cms_cosine,
    cms_dice,
    witness_of,
)
from .datasets import (
    GenerationError,
    ListeningRecord,
    SyntheticPair,
    TripletParseError,
    build_user_profiles,
    companion_sharing,
    corpus_pairs,
    generate_synthetic,
    ingest_triplets,
    load_corpus,
    random_multiset,
    read_profiles,
    write_corpus,
    write_profiles,
)
from .experiments import (
    ComparisonResult,
    GridSpec,
    PairFailure,
    PairwiseRun,
    SketchParams,
    ThresholdReport,
    rmse,
    run_grid,
    run_pairwise,
    threshold_report,
    write_comparisons_csv,
    write_grid_csv,
    write_threshold_csv,
)
from .wire import (
    BadMagicError,
    HeaderConsistencyError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    WireFormatError,
    compatibility_check,
    decode,
    decode_header,
    encode,
    envelope_size,
)

__version__ = "0.1.0"
