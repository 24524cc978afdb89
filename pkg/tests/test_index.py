import numpy as np
import pytest

from lrp.core import LrpDescriptor, Method
from lrp.errors import (
    EmptyIndex,
    FormatError,
    HeterogeneousEntries,
    IncompatibleQuery,
    TooFewEntries,
)
from lrp.index import (
    IndexedDescriptor,
    build_index,
    leave_one_out,
    load_index,
    read_meta,
    save_index,
)
from lrp.similarity import DistanceKind


def _entry(entry_id, label, values, method=Method.MINMAX, normalized=True):
    bins = np.zeros(method.n_bins, dtype=np.float64)
    bins[: len(values)] = values
    return IndexedDescriptor(entry_id, label, LrpDescriptor(method, bins, normalized))


def _three_entry_index(kind=DistanceKind.CITY_BLOCK):
    entries = [
        _entry("a", "red", [1.0, 0.0, 0.0]),
        _entry("b", "green", [0.0, 1.0, 0.0]),
        _entry("c", "red", [0.5, 0.5, 0.0]),
    ]
    return build_index(entries, Method.MINMAX, kind)


def test_hand_computed_l1_ranking():
    index = _three_entry_index()
    query = _entry("q", "?", [1.0, 0.0, 0.0]).descriptor
    # L1 distances: a -> 0, c -> 1, b -> 2
    result = index.top_k(query, k=3)
    assert [hit.id for hit in result.ranked] == ["a", "c", "b"]
    assert [hit.distance for hit in result.ranked] == [0.0, 1.0, 2.0]
    assert index.classify_top1(query) == "red"


def test_query_in_index_ranks_itself_first():
    index = _three_entry_index()
    result = index.top_k(index.entries[1].descriptor, k=1)
    assert result.ranked[0].id == "b"
    assert result.ranked[0].distance == 0.0


def test_k_larger_than_index_returns_full_ranking():
    index = _three_entry_index()
    result = index.top_k(index.entries[0].descriptor, k=50)
    assert len(result.ranked) == 3
    assert result.k == 50


def test_k_must_be_positive():
    index = _three_entry_index()
    with pytest.raises(ValueError):
        index.top_k(index.entries[0].descriptor, k=0)


def test_equal_distances_rank_by_insertion_order():
    entries = [
        _entry("first", "x", [0.0, 1.0]),
        _entry("second", "x", [0.0, 1.0]),
        _entry("third", "x", [0.0, 1.0]),
    ]
    index = build_index(entries, Method.MINMAX, DistanceKind.CITY_BLOCK)
    result = index.top_k(entries[0].descriptor, k=3)
    assert [hit.id for hit in result.ranked] == ["first", "second", "third"]


def test_incompatible_queries_rejected():
    index = _three_entry_index()
    median_query = LrpDescriptor(Method.MEDIAN, np.zeros(4096), normalized=True)
    with pytest.raises(IncompatibleQuery):
        index.top_k(median_query, k=1)
    counts_query = LrpDescriptor(
        Method.MINMAX, np.zeros(2048, dtype=np.uint64), normalized=False
    )
    with pytest.raises(IncompatibleQuery):
        index.top_k(counts_query, k=1)


def test_build_validations():
    with pytest.raises(EmptyIndex):
        build_index([], Method.MINMAX, DistanceKind.CITY_BLOCK)
    mixed = [
        _entry("a", "x", [1.0]),
        IndexedDescriptor("b", "x", LrpDescriptor(Method.MEDIAN, np.zeros(4096), True)),
    ]
    with pytest.raises(HeterogeneousEntries):
        build_index(mixed, Method.MINMAX, DistanceKind.CITY_BLOCK)
    flag_mix = [_entry("a", "x", [1.0]), _entry("b", "x", [1.0], normalized=False)]
    with pytest.raises(HeterogeneousEntries):
        build_index(flag_mix, Method.MINMAX, DistanceKind.CITY_BLOCK)
    duplicates = [_entry("a", "x", [1.0]), _entry("a", "y", [0.5, 0.5])]
    with pytest.raises(ValueError):
        build_index(duplicates, Method.MINMAX, DistanceKind.CITY_BLOCK)


def test_leave_one_out_two_clusters():
    entries = [
        _entry("a0", "A", [0.9, 0.1, 0.0]),
        _entry("a1", "A", [0.8, 0.2, 0.0]),
        _entry("a2", "A", [0.85, 0.15, 0.0]),
        _entry("b0", "B", [0.0, 0.1, 0.9]),
        _entry("b1", "B", [0.0, 0.2, 0.8]),
        _entry("b2", "B", [0.0, 0.15, 0.85]),
    ]
    outcomes = leave_one_out(entries, DistanceKind.CITY_BLOCK)
    assert [o.query_id for o in outcomes] == [e.id for e in entries]
    for outcome in outcomes:
        assert outcome.match_id != outcome.query_id
        assert outcome.predicted_label == outcome.true_label
        assert outcome.correct
        assert outcome.distance > 0.0


def test_leave_one_out_never_self_matches_even_with_duplicates():
    entries = [
        _entry("twin1", "A", [0.5, 0.5]),
        _entry("twin2", "B", [0.5, 0.5]),
        _entry("other", "C", [1.0, 0.0]),
    ]
    outcomes = leave_one_out(entries, DistanceKind.CITY_BLOCK)
    for outcome in outcomes:
        assert outcome.match_id != outcome.query_id
    # twins pick each other at distance zero
    assert outcomes[0].match_id == "twin2"
    assert outcomes[1].match_id == "twin1"


def test_leave_one_out_threads_do_not_change_results():
    rng = np.random.default_rng(11)
    rows = rng.random((25, 2048))
    rows /= rows.sum(axis=1, keepdims=True)
    entries = [_entry(f"e{i}", f"c{i % 3}", rows[i]) for i in range(25)]
    sequential = leave_one_out(entries, DistanceKind.EUCLIDEAN, threads=1)
    threaded = leave_one_out(entries, DistanceKind.EUCLIDEAN, threads=4)
    assert sequential == threaded


def test_leave_one_out_needs_two_entries():
    with pytest.raises(TooFewEntries):
        leave_one_out([_entry("a", "x", [1.0])], DistanceKind.CITY_BLOCK)


def test_save_load_roundtrip(tmp_path):
    index = _three_entry_index(DistanceKind.CHI_SQUARED)
    target = tmp_path / "idx"
    save_index(index, target, extra_meta={"resize": "32x32"})
    loaded = load_index(target)
    assert loaded.method is Method.MINMAX
    assert loaded.kind is DistanceKind.CHI_SQUARED
    assert loaded.normalized == index.normalized
    assert [e.id for e in loaded.entries] == ["a", "b", "c"]
    assert [e.label for e in loaded.entries] == ["red", "green", "red"]
    for original, restored in zip(index.entries, loaded.entries):
        assert restored.descriptor == original.descriptor
    meta = read_meta(target)
    assert meta["resize"] == "32x32"
    assert meta["entries"] == "3"
    # distance can be overridden at load time
    assert load_index(target, kind=DistanceKind.COSINE).kind is DistanceKind.COSINE


def test_loaded_index_ranks_identically(tmp_path):
    index = _three_entry_index()
    save_index(index, tmp_path / "idx")
    loaded = load_index(tmp_path / "idx")
    query = index.entries[2].descriptor
    assert [h.id for h in loaded.top_k(query, 3).ranked] == [
        h.id for h in index.top_k(query, 3).ranked
    ]


def test_extra_meta_cannot_shadow_core_keys(tmp_path):
    index = _three_entry_index()
    with pytest.raises(ValueError):
        save_index(index, tmp_path / "idx", extra_meta={"method": "minmax"})


def test_load_rejects_non_index_directory(tmp_path):
    with pytest.raises(FormatError):
        load_index(tmp_path)
