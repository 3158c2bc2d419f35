"""Command-line front end: gen, ingest, sketch, compare, grid, threshold.

Machine-readable artifacts go only to the explicit output paths (or to
stdout for `compare`); progress and summaries go to stderr. Exit codes:
0 success, 1 data error, 2 sketch compatibility error, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import datasets, experiments, metrics, wire
from .multiset import Multiset, UndefinedSimilarityError, cosine, dice
from .sketches import CountMinSketch, CountingBloomFilter

EXIT_OK = 0
EXIT_DATA = 1
EXIT_COMPAT = 2
EXIT_USAGE = 64

# Recommended defaults: one-hash CBF of length 128, Dice, threshold 0.6.
DEFAULT_KIND = "cbf"
DEFAULT_LENGTH = 128
DEFAULT_THRESHOLD = 0.6

_METRIC_FNS = {
    ("cbf", "dice"): metrics.cbf_dice,
    ("cbf", "cosine"): metrics.cbf_cosine,
    ("cms", "dice"): metrics.cms_dice,
    ("cms", "cosine"): metrics.cms_cosine,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("expected a non-empty list of integers >= 1")
    return values


def _threshold(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"threshold must be in (0, 1), got {value}")
    return value


def _add_sketch_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kind", choices=("cbf", "cms"), default=DEFAULT_KIND)
    parser.add_argument(
        "--length",
        "--width",
        dest="length",
        type=_positive_int,
        default=DEFAULT_LENGTH,
        help="CBF length n / CMS width w (default %(default)s)",
    )
    parser.add_argument("--hashes", type=_positive_int, default=1, help="hash functions k (CBF only)")
    parser.add_argument("--depth", type=_positive_int, default=1, help="rows d (CMS only)")
    parser.add_argument("--seed", type=_seed, default=0, help="shared hash seed")


def _sketch_params(parser: argparse.ArgumentParser, args: argparse.Namespace) -> experiments.SketchParams:
    if args.kind == "cbf" and args.depth != 1:
        parser.error("--depth applies to --kind cms only")
    if args.kind == "cms" and args.hashes != 1:
        parser.error("--hashes applies to --kind cbf only")
    return experiments.SketchParams(
        args.kind, args.length, depth=args.depth, hash_count=args.hashes, seed=args.seed
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="sketchsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic corpus with controlled Dice targets")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--pairs", type=_positive_int, default=1001)
    p.add_argument("--unique", type=_positive_int, default=67)
    p.add_argument("--strlen", type=_positive_int, default=10)
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("ingest", help="parse and filter listening-history triplets")
    p.add_argument("triplets", type=Path, help="TSV file: user<TAB>song<TAB>count (gzip ok)")
    p.add_argument("--out", type=Path, required=True, help="filtered profiles TSV")
    p.add_argument("--min-distinct", type=_nonneg_int, default=50)

    p = sub.add_parser("sketch", help="sketch one profile into a wire envelope")
    p.add_argument("profile", type=Path, help="profile TSV")
    p.add_argument("--out", type=Path, required=True, help="envelope output path")
    p.add_argument("--user", help="user id when the TSV holds several profiles")
    _add_sketch_flags(p)

    p = sub.add_parser("compare", help="similarity of two profiles or two envelopes")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--user-a", help="user id to pick from a multi-profile TSV")
    p.add_argument("--user-b", help="user id to pick from b")
    p.add_argument("--metric", choices=("dice", "cosine"), default="dice")
    p.add_argument("--truth", action="store_true", help="also print the exact score (profile inputs only)")
    _add_sketch_flags(p)

    p = sub.add_parser("grid", help="RMSE sweep over sketch dimensions")
    p.add_argument("--corpus", type=Path, required=True, help="corpus manifest.json")
    p.add_argument("--out", type=Path, required=True, help="grid CSV output")
    p.add_argument("--kind", choices=("cbf", "cms"), default=DEFAULT_KIND)
    p.add_argument("--dims", type=_int_list, default=list(experiments.DEFAULT_DIMS),
                   help="comma-separated lengths/widths")
    p.add_argument("--depths", type=_int_list, default=list(experiments.DEFAULT_DEPTHS),
                   help="comma-separated hash counts (cbf) or row counts (cms)")
    p.add_argument("--metric", choices=("dice", "cosine"), default="dice")
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("threshold", help="classification report at a relevance threshold")
    p.add_argument("--corpus", type=Path, required=True, help="corpus manifest.json")
    p.add_argument("--out", type=Path, required=True, help="report CSV output")
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    p.add_argument("--metric", choices=("dice", "cosine"), default="dice")
    _add_sketch_flags(p)

    return parser


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _cmd_gen(args) -> int:
    pairs = datasets.generate_synthetic(args.seed, args.pairs, args.unique, args.strlen)
    manifest = datasets.write_corpus(
        args.out, pairs, seed=args.seed, target_unique=args.unique, string_length=args.strlen
    )
    _log(f"wrote {manifest} ({len(pairs)} pairs, base cardinality {pairs[0].base.cardinality()})")
    return EXIT_OK


def _cmd_ingest(args) -> int:
    records = datasets.ingest_triplets(args.triplets)
    profiles = datasets.build_user_profiles(records, args.min_distinct)
    total_users = len({r.user for r in records})
    distinct_songs = len({song for profile in profiles.values() for song, _ in profile.items()})
    total_plays = sum(profile.cardinality() for profile in profiles.values())
    datasets.write_profiles(args.out, profiles)
    _log(
        f"kept {len(profiles)} of {total_users} users "
        f"(min {args.min_distinct} distinct songs), "
        f"{distinct_songs} distinct songs, {total_plays} recorded plays -> {args.out}"
    )
    return EXIT_OK


def _load_profile(path: Path, user: str | None) -> Multiset:
    profiles = datasets.read_profiles(path)
    if user is not None:
        if user not in profiles:
            raise ValueError(f"user {user!r} not found in {path}")
        return profiles[user]
    if len(profiles) != 1:
        sample = ", ".join(list(profiles)[:5])
        raise ValueError(
            f"{path} holds {len(profiles)} profiles; pick one with --user (e.g. {sample})"
        )
    return next(iter(profiles.values()))


def _is_envelope(path: Path) -> bool:
    with open(path, "rb") as handle:
        return handle.read(4) == wire.MAGIC


def _cmd_sketch(parser, args) -> int:
    params = _sketch_params(parser, args)
    profile = _load_profile(args.profile, args.user)
    sketch = _build_sketch(profile, params)
    if sketch.saturated:
        _log("warning: at least one counter saturated")
    data = wire.encode(sketch)
    args.out.write_bytes(data)
    _log(f"wrote {args.out} ({len(data)} bytes)")
    return EXIT_OK


def _build_sketch(profile: Multiset, params: experiments.SketchParams):
    if params.kind == "cbf":
        return CountingBloomFilter.from_multiset(profile, params.width, params.hash_count, params.seed)
    return CountMinSketch.from_multiset(profile, params.width, params.depth, params.seed)


def _cmd_compare(parser, args) -> int:
    envelopes = _is_envelope(args.a), _is_envelope(args.b)
    if any(envelopes) and not all(envelopes):
        raise ValueError("cannot compare an envelope with a profile; sketch the profile first")
    if all(envelopes):
        if args.truth:
            parser.error("--truth needs profile inputs; envelopes carry no exact counts")
        a = wire.decode(args.a.read_bytes())
        b = wire.decode(args.b.read_bytes())
        witness = wire.compatibility_check(metrics.witness_of(a), metrics.witness_of(b))
        if witness.kind == "bf":
            raise ValueError("plain Bloom filter envelopes carry no counts to compare")
        estimate = _METRIC_FNS[(witness.kind, args.metric)](a, b)
        print(f"estimate\t{estimate!r}")
        return EXIT_OK
    params = _sketch_params(parser, args)
    left = _load_profile(args.a, args.user_a)
    right = _load_profile(args.b, args.user_b)
    estimate = _METRIC_FNS[(params.kind, args.metric)](
        _build_sketch(left, params), _build_sketch(right, params)
    )
    print(f"estimate\t{estimate!r}")
    if args.truth:
        truth_fn = dice if args.metric == "dice" else cosine
        truth = truth_fn(left, right)
        print(f"truth\t{truth!r}")
        print(f"error\t{estimate - truth!r}")
    return EXIT_OK


def _cmd_grid(args) -> int:
    corpus = datasets.load_corpus(args.corpus)
    grid = experiments.GridSpec(args.kind, args.dims, args.depths, metric=args.metric, seed=args.seed)
    _log(f"grid: {args.kind} {len(grid.dims)}x{len(grid.depths)} cells over {len(corpus)} pairs")
    cells = experiments.run_grid(corpus, grid)
    for (dim, depth), value in cells.items():
        _log(f"  dim={dim} depth={depth} rmse={'n/a' if value is None else f'{value:.6f}'}")
    experiments.write_grid_csv(args.out, cells, grid)
    _log(f"wrote {args.out}")
    return EXIT_OK


def _cmd_threshold(parser, args) -> int:
    params = _sketch_params(parser, args)
    corpus = datasets.load_corpus(args.corpus)
    run = experiments.run_pairwise(corpus, params, args.metric)
    report = experiments.threshold_report(run.results, args.threshold)
    experiments.write_threshold_csv(args.out, report)
    _log(
        f"threshold {report.threshold}: tp={report.true_positives} fp={report.false_positives} "
        f"tn={report.true_negatives} fn={report.false_negatives} "
        f"max_overshoot={report.max_overshoot:.6f} -> {args.out}"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:  # argparse reports usage problems itself
        return int(exit_.code or 0)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "sketch":
            return _cmd_sketch(parser, args)
        if args.command == "compare":
            return _cmd_compare(parser, args)
        if args.command == "grid":
            return _cmd_grid(args)
        if args.command == "threshold":
            return _cmd_threshold(parser, args)
        parser.error(f"unknown command {args.command!r}")
    except SystemExit as exit_:
        return int(exit_.code or 0)
    except metrics.IncompatibleSketchError as exc:
        _log(f"sketchsim: incompatible sketches: {', '.join(exc.mismatched_fields)}")
        return EXIT_COMPAT
    except (
        UndefinedSimilarityError,
        wire.WireFormatError,
        datasets.TripletParseError,
        datasets.GenerationError,
        ValueError,
        OSError,
    ) as exc:
        _log(f"sketchsim: error: {exc}")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
