"""Retrieval evaluation: accuracy metrics and the experiment driver.

Patch-to-scan datasets report three numbers.  Patch accuracy (eta_p) is
the fraction of test patches whose nearest training patch has the right
label.  Scan accuracy (eta_w) averages the per-scan accuracies, so small
scans count as much as large ones.  The combined score (eta_total) is
their product.  Leave-one-out pools report plain top-1 accuracy.

The first two are computed in exact rational arithmetic and converted to
float once at the end; on a balanced dataset eta_p and eta_w are therefore
bitwise equal, not merely close.
"""

import os
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .core import Method, descriptor
from .datasets import DatasetKind, DatasetManifest, ManifestItem
from .errors import EmptyResults, MissingScanSize
from .imageops import ResizePolicy, load_gray
from .index import Classification, IndexedDescriptor, build_index, leave_one_out
from .similarity import DistanceKind
from .storage import cache_key, load_descriptor, save_descriptor


def top1_accuracy(outcomes: list[Classification]) -> Fraction:
    """Correct top-1 matches over all queries, as an exact fraction."""
    if not outcomes:
        raise EmptyResults("no classification outcomes to score")
    correct = sum(1 for outcome in outcomes if outcome.correct)
    return Fraction(correct, len(outcomes))


def scan_accuracy(outcomes: list[Classification], scan_sizes: dict[str, int]) -> Fraction:
    """Mean of per-scan accuracies, each scan weighted equally.

    `scan_sizes` maps every scan label to its query count; a label that is
    missing, or has a non-positive size, raises `MissingScanSize`.
    """
    if not outcomes:
        raise EmptyResults("no classification outcomes to score")
    if not scan_sizes:
        raise MissingScanSize("no scan sizes given")
    correct_by_scan = Counter()
    for outcome in outcomes:
        label = outcome.true_label
        if label not in scan_sizes:
            raise MissingScanSize(f"no size recorded for scan {label!r}")
        if outcome.correct:
            correct_by_scan[label] += 1
    total = Fraction(0)
    for label, size in scan_sizes.items():
        if size <= 0:
            raise MissingScanSize(f"scan {label!r} has non-positive size {size}")
        total += Fraction(correct_by_scan[label], size)
    return total / len(scan_sizes)


def combined_accuracy(eta_p: Fraction, eta_w: Fraction) -> float:
    """Product of the two accuracies, taken in float."""
    return float(eta_p) * float(eta_w)


def confusion_counts(outcomes: list[Classification]) -> dict[tuple[str, str], int]:
    """(true_label, predicted_label) -> count."""
    return dict(Counter((o.true_label, o.predicted_label) for o in outcomes))


def compute_descriptors(
    manifest: DatasetManifest,
    items: list[ManifestItem],
    method: Method,
    policy: ResizePolicy = ResizePolicy(None),
    normalize: bool = True,
    cache_dir=None,
    threads: int = 1,
) -> list[IndexedDescriptor]:
    """Extract (or load cached) descriptors for `items`, in order.

    The cache is keyed on file content plus every extraction setting, so a
    stale entry cannot be returned for an edited image.  Thread count never
    changes the result, only the wall time.
    """
    cache_path = None
    if cache_dir is not None:
        cache_path = Path(cache_dir)
        cache_path.mkdir(parents=True, exist_ok=True)

    def build_one(item: ManifestItem) -> IndexedDescriptor:
        source = manifest.resolve(item)
        cached = None
        if cache_path is not None:
            raw = source.read_bytes()
            key = cache_key(raw, method, policy.tag, normalize)
            cached = cache_path / f"{key}.lrp"
            if cached.is_file():
                return IndexedDescriptor(item.path, item.label, load_descriptor(cached))
        desc = descriptor(load_gray(source, policy), method=method, normalize=normalize)
        if cached is not None:
            scratch = cached.with_suffix(f".tmp{os.getpid()}.{threading.get_ident()}")
            save_descriptor(desc, scratch)
            os.replace(scratch, cached)
        return IndexedDescriptor(item.path, item.label, desc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(build_one, items))
    return [build_one(item) for item in items]


@dataclass(frozen=True)
class EvaluationCell:
    """Scores for one (method, distance) combination."""

    method: Method
    kind: DistanceKind
    metrics: dict[str, float]
    exact: dict[str, Fraction]
    outcomes: list[Classification]

    def trace_tsv(self) -> str:
        """Per-query outcomes as TSV, one row per query."""
        lines = ["query_id\ttrue_label\tpredicted_label\tmatch_id\tdistance"]
        for o in self.outcomes:
            lines.append(
                f"{o.query_id}\t{o.true_label}\t{o.predicted_label}"
                f"\t{o.match_id}\t{o.distance!r}"
            )
        return "\n".join(lines) + "\n"


@dataclass
class EvaluationReport:
    dataset: str
    kind: DatasetKind
    resize: str
    normalized: bool
    n_queries: int
    n_references: int
    cells: list[EvaluationCell]

    @property
    def metric_names(self) -> list[str]:
        return list(self.cells[0].metrics) if self.cells else []

    def cell(self, method: Method, kind: DistanceKind) -> EvaluationCell:
        for candidate in self.cells:
            if candidate.method is method and candidate.kind is kind:
                return candidate
        raise KeyError(f"no cell for method={method.value} distance={kind.value}")

    def best(self, metric: str | None = None) -> EvaluationCell:
        """Cell with the highest value of `metric` (default: last metric)."""
        if not self.cells:
            raise EmptyResults("report has no cells")
        name = metric if metric is not None else self.metric_names[-1]
        return max(self.cells, key=lambda c: c.metrics[name])

    def human_table(self) -> str:
        """Fixed-width summary table; accuracies shown as percentages."""
        names = self.metric_names
        header = ["method", "distance"] + [f"{n} (%)" for n in names]
        rows = [header]
        for cell in self.cells:
            rows.append(
                [cell.method.value, cell.kind.value]
                + [f"{100.0 * cell.metrics[n]:.2f}" for n in names]
            )
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        out = [
            f"dataset={self.dataset} kind={self.kind.value} queries={self.n_queries} "
            f"references={self.n_references} resize={self.resize} "
            f"normalize={'on' if self.normalized else 'off'}"
        ]
        for idx, row in enumerate(rows):
            out.append("  ".join(col.ljust(widths[i]) for i, col in enumerate(row)).rstrip())
            if idx == 0:
                out.append("  ".join("-" * widths[i] for i in range(len(header))))
        return "\n".join(out) + "\n"

    def machine_lines(self) -> list[str]:
        """One key=value line per cell, for scripts to parse."""
        lines = []
        for cell in self.cells:
            parts = [
                f"dataset={self.dataset}",
                f"kind={self.kind.value}",
                f"method={cell.method.value}",
                f"distance={cell.kind.value}",
            ]
            parts += [f"{name}={cell.metrics[name]:.6f}" for name in cell.metrics]
            lines.append(" ".join(parts))
        return lines


def _score_patch_to_scan(
    outcomes: list[Classification], scan_sizes: dict[str, int]
) -> tuple[dict[str, float], dict[str, Fraction]]:
    eta_p = top1_accuracy(outcomes)
    eta_w = scan_accuracy(outcomes, scan_sizes)
    metrics = {
        "eta_p": float(eta_p),
        "eta_w": float(eta_w),
        "eta_total": combined_accuracy(eta_p, eta_w),
    }
    return metrics, {"eta_p": eta_p, "eta_w": eta_w}


def evaluate(
    manifest: DatasetManifest,
    methods: tuple[Method, ...] = (Method.MEDIAN, Method.MINMAX),
    kinds: tuple[DistanceKind, ...] = tuple(DistanceKind),
    policy: ResizePolicy = ResizePolicy(None),
    normalize: bool = True,
    cache_dir=None,
    threads: int = 1,
) -> EvaluationReport:
    """Run the full grid of methods x distances over one dataset."""
    cells = []
    if manifest.kind is DatasetKind.PATCH_TO_SCAN:
        train_items, test_items = manifest.train, manifest.test
        scan_sizes = dict(Counter(item.label for item in test_items))
        n_queries, n_references = len(test_items), len(train_items)
        for method in methods:
            train = compute_descriptors(
                manifest, train_items, method, policy, normalize, cache_dir, threads
            )
            test = compute_descriptors(
                manifest, test_items, method, policy, normalize, cache_dir, threads
            )
            base = build_index(train, method, kinds[0])
            for kind in kinds:
                index = replace(base, kind=kind)

                def classify(entry: IndexedDescriptor) -> Classification:
                    hit = index.top_k(entry.descriptor, k=1, query_id=entry.id).ranked[0]
                    return Classification(entry.id, entry.label, hit.label, hit.id, hit.distance)

                if threads > 1:
                    with ThreadPoolExecutor(max_workers=threads) as pool:
                        outcomes = list(pool.map(classify, test))
                else:
                    outcomes = [classify(entry) for entry in test]
                metrics, exact = _score_patch_to_scan(outcomes, scan_sizes)
                cells.append(EvaluationCell(method, kind, metrics, exact, outcomes))
    else:
        items = manifest.items
        n_queries = n_references = len(items)
        for method in methods:
            entries = compute_descriptors(
                manifest, items, method, policy, normalize, cache_dir, threads
            )
            for kind in kinds:
                outcomes = leave_one_out(entries, kind, threads=threads)
                accuracy = top1_accuracy(outcomes)
                cells.append(
                    EvaluationCell(
                        method,
                        kind,
                        {"accuracy": float(accuracy)},
                        {"accuracy": accuracy},
                        outcomes,
                    )
                )
    return EvaluationReport(
        dataset=manifest.name,
        kind=manifest.kind,
        resize=policy.tag,
        normalized=normalize,
        n_queries=n_queries,
        n_references=n_references,
        cells=cells,
    )
