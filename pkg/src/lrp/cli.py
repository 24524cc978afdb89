"""Command-line interface.

Exit codes: 0 success, 1 bad arguments or incompatible settings, 2 data
problems (unreadable files, malformed datasets or stores), 3 verification
failure.
"""

import argparse
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from .backend import available_backends, code_grid
from .core import Method, descriptor
from .datasets import DatasetKind, load_manifest
from .errors import (
    DecodeError,
    EmptyIndex,
    FormatError,
    HeterogeneousEntries,
    ImageTooSmall,
    LayoutMismatch,
    LrpError,
    TooFewEntries,
    TooSmallAfterResize,
    VerificationFailure,
)
from .evaluation import compute_descriptors, evaluate
from .imageops import ResizePolicy, load_gray
from .index import build_index, load_index, read_meta, save_index
from .oracle import verify_equivalence
from .similarity import DistanceKind
from .storage import save_descriptor

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3

#: Failures caused by what is on disk, as opposed to how it was asked for.
_DATA_ERRORS = (
    FileNotFoundError,
    DecodeError,
    TooSmallAfterResize,
    ImageTooSmall,
    LayoutMismatch,
    FormatError,
    HeterogeneousEntries,
    EmptyIndex,
    TooFewEntries,
)

#: Known dataset shapes for ``evaluate --expect``.
_EXPECTED_SHAPES = {
    "kimia24": {"kind": DatasetKind.PATCH_TO_SCAN, "train": 27055, "test": 1325, "labels": 24},
    "ct168": {"kind": DatasetKind.LEAVE_ONE_OUT, "items": 168, "labels": 3},
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this tool reserves 2 for data."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _select_backend(name: str | None) -> None:
    if name is None:
        return
    have = available_backends()
    if name not in have:
        raise ValueError(f"backend {name!r} is not available here (have: {', '.join(have)})")
    os.environ["LRP_BACKEND"] = name


def _policy(args) -> ResizePolicy:
    return ResizePolicy.parse(args.resize)


def _dataset_kind(args) -> DatasetKind | None:
    return None if args.kind == "auto" else DatasetKind.from_string(args.kind)


def _add_common(sub, resize_default="native"):
    sub.add_argument("--resize", default=resize_default, metavar="WxH|native",
                     help=f"resample images before extraction (default: {resize_default})")
    sub.add_argument("--normalize", choices=("on", "off"), default="on",
                     help="store unit-sum histograms (on) or raw counts (off)")
    sub.add_argument("--backend", choices=("fast", "numpy"), default=None,
                     help="force a kernel backend (default: fastest available)")


def cmd_extract(args) -> int:
    _select_backend(args.backend)
    method = Method.from_string(args.method)
    policy = _policy(args)
    normalize = args.normalize == "on"
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    used_names = set()
    failures = 0
    for image_path in args.images:
        try:
            gray = load_gray(image_path, policy)
            desc = descriptor(gray, method=method, normalize=normalize)
        except (FileNotFoundError, DecodeError, TooSmallAfterResize, ImageTooSmall) as exc:
            print(f"error: {exc}", file=sys.stderr)
            failures += 1
            continue
        name = Path(image_path).stem
        serial = 2
        while name in used_names:
            name = f"{Path(image_path).stem}-{serial}"
            serial += 1
        used_names.add(name)
        target = out_dir / f"{name}.lrp"
        save_descriptor(desc, target)
        print(f"{image_path}\t{target}\t{method.value}\t{desc.bins.shape[0]}")
    if failures:
        print(f"error: {failures} of {len(args.images)} images failed", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_index(args) -> int:
    _select_backend(args.backend)
    method = Method.from_string(args.method)
    kind = DistanceKind.from_string(args.distance)
    policy = _policy(args)
    normalize = args.normalize == "on"
    manifest = load_manifest(args.dataset, kind=_dataset_kind(args))
    items = manifest.train if manifest.kind is DatasetKind.PATCH_TO_SCAN else manifest.items
    entries = compute_descriptors(
        manifest, items, method, policy, normalize, args.cache_dir, args.threads
    )
    index = build_index(entries, method, kind)
    save_index(index, args.out, extra_meta={"resize": policy.tag})
    print(
        f"indexed {len(entries)} descriptors from {manifest.name} "
        f"({manifest.kind.value}) into {args.out}"
    )
    print(
        f"method={method.value} distance={kind.value} resize={policy.tag} "
        f"normalize={'on' if normalize else 'off'}"
    )
    return EXIT_OK


def cmd_search(args) -> int:
    _select_backend(args.backend)
    kind = DistanceKind.from_string(args.distance) if args.distance else None
    index = load_index(args.index, kind=kind)
    meta = read_meta(args.index)
    resize_text = args.resize if args.resize else meta.get("resize", "native")
    policy = ResizePolicy.parse(resize_text)
    gray = load_gray(args.image, policy)
    query = descriptor(gray, method=index.method, normalize=index.normalized)
    result = index.top_k(query, k=args.k, query_id=str(args.image))
    print("rank\tdistance\tid\tlabel")
    for rank, hit in enumerate(result.ranked, start=1):
        print(f"{rank}\t{hit.distance!r}\t{hit.id}\t{hit.label}")
    return EXIT_OK


def _check_expected_shape(name: str, manifest) -> None:
    shape = _EXPECTED_SHAPES[name]
    problems = []
    if manifest.kind is not shape["kind"]:
        problems.append(f"kind is {manifest.kind.value}, expected {shape['kind'].value}")
    if "train" in shape and len(manifest.train) != shape["train"]:
        problems.append(f"{len(manifest.train)} train items, expected {shape['train']}")
    if "test" in shape and len(manifest.test) != shape["test"]:
        problems.append(f"{len(manifest.test)} test items, expected {shape['test']}")
    if "items" in shape and len(manifest.items) != shape["items"]:
        problems.append(f"{len(manifest.items)} items, expected {shape['items']}")
    if len(manifest.labels) != shape["labels"]:
        problems.append(f"{len(manifest.labels)} labels, expected {shape['labels']}")
    if problems:
        raise LayoutMismatch(f"dataset does not match --expect {name}: " + "; ".join(problems))


def cmd_evaluate(args) -> int:
    _select_backend(args.backend)
    methods = (
        (Method.MEDIAN, Method.MINMAX)
        if args.method == "both"
        else (Method.from_string(args.method),)
    )
    kinds = (
        tuple(DistanceKind)
        if args.distance == "all"
        else (DistanceKind.from_string(args.distance),)
    )
    policy = _policy(args)
    manifest = load_manifest(args.dataset, kind=_dataset_kind(args))
    if args.expect:
        _check_expected_shape(args.expect, manifest)
    report = evaluate(
        manifest,
        methods=methods,
        kinds=kinds,
        policy=policy,
        normalize=args.normalize == "on",
        cache_dir=args.cache_dir,
        threads=args.threads,
    )
    print(report.human_table())
    for line in report.machine_lines():
        print(line)
    best = report.best()
    print(
        f"best: method={best.method.value} distance={best.kind.value} "
        + " ".join(f"{k}={v:.6f}" for k, v in best.metrics.items())
    )
    if args.trace_dir:
        trace_dir = Path(args.trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)
        for cell in report.cells:
            target = trace_dir / f"{cell.method.value}-{cell.kind.value}.tsv"
            target.write_text(cell.trace_tsv(), encoding="utf-8")
        print(f"wrote {len(report.cells)} trace files to {trace_dir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials == 0:
        print("warning: 0 trials requested; nothing was checked", file=sys.stderr)
        print("verify: vacuous pass (0 trials)")
        return EXIT_OK
    backends = (args.backend,) if args.backend else available_backends()
    failed = False
    for name in backends:
        outcome = verify_equivalence(
            seed=args.seed,
            trials=args.trials,
            min_size=args.min_size,
            max_size=args.max_size,
            backend_name=name,
        )
        status = "pass" if outcome.passed else "FAIL"
        print(f"backend={name} trials={outcome.trials} failures={len(outcome.failures)} {status}")
        for line in outcome.failures:
            print(f"  {line}", file=sys.stderr)
        failed = failed or not outcome.passed
    if failed:
        print("error: kernel output differs from the brute-force reference", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _percentile(samples: list[float], fraction: float) -> float:
    ordered = sorted(samples)
    position = min(len(ordered) - 1, max(0, round(fraction * (len(ordered) - 1))))
    return ordered[position]


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    image = rng.integers(0, 256, size=(args.size, args.size), dtype=np.uint8)
    pixels = args.size * args.size
    print(f"image={args.size}x{args.size} repeats={args.repeats} seed={args.seed}")
    print("backend\tmethod\tmin_ms\tmedian_ms\tp95_ms\tmpix_per_s")
    medians = {}
    for name in available_backends():
        for method in (Method.MEDIAN, Method.MINMAX):
            code_grid(image, method.value, backend=name)  # warm up
            samples = []
            for _ in range(args.repeats):
                start = time.perf_counter()
                code_grid(image, method.value, backend=name)
                samples.append((time.perf_counter() - start) * 1000.0)
            med = statistics.median(samples)
            medians[(name, method.value)] = med
            throughput = pixels / (med * 1e-3) / 1e6
            print(
                f"{name}\t{method.value}\t{min(samples):.2f}\t{med:.2f}"
                f"\t{_percentile(samples, 0.95):.2f}\t{throughput:.1f}"
            )
    if ("fast", "median") in medians and ("numpy", "median") in medians:
        for method in ("median", "minmax"):
            ratio = medians[("numpy", method)] / medians[("fast", method)]
            print(f"speedup {method}: {ratio:.1f}x (fast over numpy)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lrp", description="Local Radon pattern descriptors")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    extract = commands.add_parser("extract", help="compute descriptors for image files")
    extract.add_argument("images", nargs="+", metavar="IMAGE")
    extract.add_argument("--method", choices=("median", "minmax"), default="median")
    extract.add_argument("--out-dir", default=".", help="where to write .lrp files")
    _add_common(extract)
    extract.set_defaults(func=cmd_extract)

    index = commands.add_parser("index", help="build a search index from a dataset")
    index.add_argument("dataset", metavar="DATASET_DIR")
    index.add_argument("--out", required=True, metavar="INDEX_DIR")
    index.add_argument("--method", choices=("median", "minmax"), default="median")
    index.add_argument("--distance", choices=[k.value for k in DistanceKind], default="l1",
                       help="default distance stored with the index")
    index.add_argument("--kind", choices=("auto", "patch-to-scan", "leave-one-out"),
                       default="auto", help="dataset layout (default: detect)")
    index.add_argument("--cache-dir", default=None, help="descriptor cache directory")
    index.add_argument("--threads", type=int, default=1)
    _add_common(index)
    index.set_defaults(func=cmd_index)

    search = commands.add_parser("search", help="query an index with an image")
    search.add_argument("index", metavar="INDEX_DIR")
    search.add_argument("image", metavar="IMAGE")
    search.add_argument("--k", type=int, default=5, help="results to print (default: 5)")
    search.add_argument("--distance", choices=[k.value for k in DistanceKind], default=None,
                        help="override the index's stored distance")
    search.add_argument("--resize", default=None, metavar="WxH|native",
                        help="override the resize policy stored with the index")
    search.add_argument("--backend", choices=("fast", "numpy"), default=None)
    search.set_defaults(func=cmd_search)

    ev = commands.add_parser("evaluate", help="score retrieval accuracy on a dataset")
    ev.add_argument("dataset", metavar="DATASET_DIR")
    ev.add_argument("--method", choices=("median", "minmax", "both"), default="both")
    ev.add_argument("--distance", choices=[k.value for k in DistanceKind] + ["all"],
                    default="all")
    ev.add_argument("--kind", choices=("auto", "patch-to-scan", "leave-one-out"),
                    default="auto")
    ev.add_argument("--expect", choices=sorted(_EXPECTED_SHAPES), default=None,
                    help="fail unless the dataset has a known shape")
    ev.add_argument("--cache-dir", default=None, help="descriptor cache directory")
    ev.add_argument("--threads", type=int, default=1)
    ev.add_argument("--trace-dir", default=None, help="write per-query TSV traces here")
    _add_common(ev)
    ev.set_defaults(func=cmd_evaluate)

    verify = commands.add_parser("verify", help="check kernels against a brute-force reference")
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--min-size", type=int, default=3)
    verify.add_argument("--max-size", type=int, default=64)
    verify.add_argument("--backend", choices=("fast", "numpy"), default=None,
                        help="check one backend (default: all available)")
    verify.set_defaults(func=cmd_verify)

    bench = commands.add_parser("bench", help="time the kernels on every backend")
    bench.add_argument("--size", type=int, default=1000, help="square image side")
    bench.add_argument("--repeats", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (LrpError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
