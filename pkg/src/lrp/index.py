"""Descriptor store with exhaustive k-nearest-neighbor search.

Datasets here top out at a few tens of thousands of histograms, so the
index is a flat float64 matrix scanned exactly; ties break by insertion
order, which keeps every ranking deterministic and reproducible.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import LrpDescriptor, Method
from .errors import (
    EmptyIndex,
    FormatError,
    HeterogeneousEntries,
    IncompatibleQuery,
    TooFewEntries,
)
from .similarity import DistanceKind, distances_to_many
from .storage import descriptor_from_bytes, descriptor_to_bytes

META_FILE = "meta"
MANIFEST_FILE = "manifest.tsv"
DESCRIPTORS_FILE = "descriptors.bin"


@dataclass
class IndexedDescriptor:
    """One searchable entry: opaque id, class/scan label, histogram."""

    id: str
    label: str
    descriptor: LrpDescriptor


@dataclass(frozen=True)
class RankedHit:
    id: str
    label: str
    distance: float


@dataclass(frozen=True)
class Classification:
    """Top-1 outcome for one query."""

    query_id: str
    true_label: str
    predicted_label: str
    match_id: str
    distance: float

    @property
    def correct(self) -> bool:
        return self.true_label == self.predicted_label


@dataclass
class RetrievalResult:
    query_id: str
    ranked: list[RankedHit]
    k: int


@dataclass
class SearchIndex:
    """Immutable after build; concurrent read-only queries are safe."""

    method: Method
    kind: DistanceKind
    entries: list[IndexedDescriptor]
    normalized: bool
    _matrix: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.entries)

    def _check_query(self, query: LrpDescriptor) -> None:
        if query.method is not self.method:
            raise IncompatibleQuery(
                f"query is {query.method.value}, index is {self.method.value}"
            )
        if query.bins.shape != (self._matrix.shape[1],):
            raise IncompatibleQuery(
                f"query has {query.bins.size} bins, index has {self._matrix.shape[1]}"
            )
        if query.normalized != self.normalized:
            raise IncompatibleQuery("query and index disagree on normalization")

    def top_k(self, query: LrpDescriptor, k: int, query_id: str = "query") -> RetrievalResult:
        """Exhaustive scan: the k nearest entries, ascending by distance.

        Equal distances rank by ascending insertion order.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        self._check_query(query)
        dists = distances_to_many(query.bins, self._matrix, self.kind)
        order = np.argsort(dists, kind="stable")[: min(k, len(self.entries))]
        ranked = [
            RankedHit(self.entries[i].id, self.entries[i].label, float(dists[i]))
            for i in order
        ]
        return RetrievalResult(query_id=query_id, ranked=ranked, k=k)

    def classify_top1(self, query: LrpDescriptor, query_id: str = "query") -> str:
        """Label of the single best match."""
        return self.top_k(query, 1, query_id).ranked[0].label


def build_index(
    entries: list[IndexedDescriptor], method: Method, kind: DistanceKind
) -> SearchIndex:
    """Stack entries into a searchable matrix, validating homogeneity."""
    if not entries:
        raise EmptyIndex("cannot build an index from zero entries")
    normalized = entries[0].descriptor.normalized
    seen_ids = set()
    for entry in entries:
        desc = entry.descriptor
        if desc.method is not method:
            raise HeterogeneousEntries(
                f"entry {entry.id!r} is {desc.method.value}, index wants {method.value}"
            )
        if desc.bins.shape != (method.n_bins,):
            raise HeterogeneousEntries(f"entry {entry.id!r} has {desc.bins.size} bins")
        if desc.normalized != normalized:
            raise HeterogeneousEntries(f"entry {entry.id!r} disagrees on normalization")
        if entry.id in seen_ids:
            raise ValueError(f"duplicate id in index: {entry.id!r}")
        seen_ids.add(entry.id)
    matrix = np.ascontiguousarray(
        np.stack([e.descriptor.bins for e in entries]).astype(np.float64)
    )
    return SearchIndex(
        method=method, kind=kind, entries=list(entries), normalized=normalized, _matrix=matrix
    )


def leave_one_out(
    entries: list[IndexedDescriptor],
    kind: DistanceKind,
    threads: int = 1,
) -> list[Classification]:
    """Classify every entry against all the others (top-1).

    Returns one `Classification` per entry, in entry order.  Results are
    independent of ``threads``; the query entry itself is always excluded.
    """
    if len(entries) < 2:
        raise TooFewEntries("leave-one-out needs at least 2 entries")
    index = build_index(entries, entries[0].descriptor.method, kind)
    matrix = index._matrix

    def classify(i: int) -> Classification:
        dists = distances_to_many(matrix[i], matrix, kind)
        dists[i] = np.inf
        j = int(np.argmin(dists))  # first minimum = earliest insertion
        return Classification(
            query_id=entries[i].id,
            true_label=entries[i].label,
            predicted_label=entries[j].label,
            match_id=entries[j].id,
            distance=float(dists[j]),
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(classify, range(len(entries))))
    return [classify(i) for i in range(len(entries))]


def save_index(index: SearchIndex, directory, extra_meta: dict[str, str] | None = None) -> None:
    """Persist as meta + manifest.tsv + packed descriptors.bin.

    `extra_meta` lines (e.g. the resize policy used at extraction time) are
    appended to the meta file; keys must not collide with the core ones.
    """
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    offsets = []
    with open(root / DESCRIPTORS_FILE, "wb") as packed:
        for entry in index.entries:
            offsets.append(packed.tell())
            packed.write(descriptor_to_bytes(entry.descriptor))
    with open(root / MANIFEST_FILE, "w", encoding="utf-8") as manifest:
        for entry, offset in zip(index.entries, offsets):
            manifest.write(f"{entry.id}\t{entry.label}\t{offset}\n")
    core = {
        "method": index.method.value,
        "distance": index.kind.value,
        "normalized": str(int(index.normalized)),
        "entries": str(len(index.entries)),
    }
    for key in extra_meta or ():
        if key in core:
            raise ValueError(f"extra_meta key {key!r} collides with a core meta key")
    with open(root / META_FILE, "w", encoding="utf-8") as meta:
        for key, value in {**core, **(extra_meta or {})}.items():
            meta.write(f"{key}={value}\n")


def read_meta(directory) -> dict[str, str]:
    path = Path(directory) / META_FILE
    if not path.is_file():
        raise FormatError(f"not an index directory (missing {META_FILE}): {directory}")
    meta = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    return meta


def load_index(directory, kind: DistanceKind | None = None) -> SearchIndex:
    """Load a persisted index; ``kind`` overrides the stored default distance."""
    root = Path(directory)
    meta = read_meta(root)
    try:
        method = Method.from_string(meta["method"])
        stored_kind = DistanceKind.from_string(meta["distance"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad index meta in {root}: {exc}") from exc
    packed = (root / DESCRIPTORS_FILE).read_bytes()
    entries = []
    manifest_path = root / MANIFEST_FILE
    if not manifest_path.is_file():
        raise FormatError(f"not an index directory (missing {MANIFEST_FILE}): {root}")
    for line_no, line in enumerate(manifest_path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"{manifest_path}:{line_no}: expected 3 tab-separated fields")
        entry_id, label, offset_text = parts
        desc, _ = descriptor_from_bytes(packed, int(offset_text))
        entries.append(IndexedDescriptor(id=entry_id, label=label, descriptor=desc))
    if not entries:
        raise EmptyIndex(f"index at {root} has no entries")
    return build_index(entries, method, kind if kind is not None else stored_kind)
