from fractions import Fraction

import numpy as np
import pytest

import lrp.evaluation as ev
from lrp.core import Method
from lrp.datasets import DatasetKind, synthesize_dataset
from lrp.errors import EmptyResults, MissingScanSize
from lrp.evaluation import (
    combined_accuracy,
    compute_descriptors,
    confusion_counts,
    evaluate,
    scan_accuracy,
    top1_accuracy,
)
from lrp.index import Classification
from lrp.similarity import DistanceKind


def _outcome(query_id, true_label, predicted_label):
    return Classification(query_id, true_label, predicted_label, "m", 0.5)


def test_top1_accuracy_exact():
    outcomes = [_outcome(str(i), "a", "a" if i < 999 else "b") for i in range(1325)]
    assert top1_accuracy(outcomes) == Fraction(999, 1325)
    assert float(Fraction(999, 1325)) == pytest.approx(0.75396, abs=5e-6)


def test_top1_accuracy_empty():
    with pytest.raises(EmptyResults):
        top1_accuracy([])


def test_scan_accuracy_weights_scans_equally():
    # scan x: 10 of 10 correct; scan y: 0 of 30 correct
    outcomes = [_outcome(f"x{i}", "x", "x") for i in range(10)]
    outcomes += [_outcome(f"y{i}", "y", "x") for i in range(30)]
    sizes = {"x": 10, "y": 30}
    assert scan_accuracy(outcomes, sizes) == Fraction(1, 2)
    assert top1_accuracy(outcomes) == Fraction(1, 4)


def test_scan_accuracy_missing_or_bad_sizes():
    outcomes = [_outcome("q", "x", "x")]
    with pytest.raises(MissingScanSize):
        scan_accuracy(outcomes, {})
    with pytest.raises(MissingScanSize):
        scan_accuracy(outcomes, {"y": 5})
    with pytest.raises(MissingScanSize):
        scan_accuracy(outcomes, {"x": 0})


def test_combined_accuracy_examples():
    assert combined_accuracy(Fraction(1), Fraction(1)) == 1.0
    assert combined_accuracy(Fraction(1, 2), Fraction(1, 2)) == 0.25
    product = combined_accuracy(Fraction("0.7538"), Fraction("0.7202"))
    assert product == pytest.approx(0.54289, abs=5e-6)


def test_confusion_counts():
    outcomes = [_outcome("1", "a", "a"), _outcome("2", "a", "b"), _outcome("3", "a", "b")]
    assert confusion_counts(outcomes) == {("a", "a"): 1, ("a", "b"): 2}


@pytest.fixture(scope="module")
def loo_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("data") / "loo"
    return synthesize_dataset(root, seed=4, n_classes=3, per_class=4, image_size=32)


def test_compute_descriptors_order_and_threads(loo_manifest):
    sequential = compute_descriptors(loo_manifest, loo_manifest.items, Method.MEDIAN)
    threaded = compute_descriptors(
        loo_manifest, loo_manifest.items, Method.MEDIAN, threads=4
    )
    assert [e.id for e in sequential] == [i.path for i in loo_manifest.items]
    for one, two in zip(sequential, threaded):
        assert one.id == two.id and one.descriptor == two.descriptor


def test_descriptor_cache_round_trip(tmp_path, loo_manifest, monkeypatch):
    cache = tmp_path / "cache"
    first = compute_descriptors(
        loo_manifest, loo_manifest.items, Method.MINMAX, cache_dir=cache
    )
    assert list(cache.glob("*.lrp"))

    def exploding(path, policy):
        raise AssertionError("cache should have satisfied this request")

    monkeypatch.setattr(ev, "load_gray", exploding)
    second = compute_descriptors(
        loo_manifest, loo_manifest.items, Method.MINMAX, cache_dir=cache
    )
    for one, two in zip(first, second):
        assert one.descriptor == two.descriptor


def test_evaluate_leave_one_out_grid(loo_manifest, tmp_path):
    report = evaluate(loo_manifest, cache_dir=tmp_path / "cache")
    assert report.kind is DatasetKind.LEAVE_ONE_OUT
    assert report.n_queries == 12
    assert len(report.cells) == 2 * 4
    for cell in report.cells:
        assert set(cell.metrics) == {"accuracy"}
        assert 0.0 <= cell.metrics["accuracy"] <= 1.0
        assert len(cell.outcomes) == 12
    chosen = report.cell(Method.MEDIAN, DistanceKind.CITY_BLOCK)
    assert chosen.method is Method.MEDIAN and chosen.kind is DistanceKind.CITY_BLOCK
    with pytest.raises(KeyError):
        report.cell(Method.MEDIAN, DistanceKind.CITY_BLOCK).metrics["x"]


def test_evaluate_patch_to_scan_balanced_eta(tmp_path):
    manifest = synthesize_dataset(tmp_path / "p2s", seed=6, n_classes=3, per_class=3,
                                  image_size=32, kind=DatasetKind.PATCH_TO_SCAN)
    report = evaluate(manifest, methods=(Method.MEDIAN,),
                      kinds=(DistanceKind.CITY_BLOCK,))
    cell = report.cells[0]
    assert set(cell.metrics) == {"eta_p", "eta_w", "eta_total"}
    # balanced scans make the patch and scan accuracies identical, exactly
    assert cell.exact["eta_p"] == cell.exact["eta_w"]
    assert cell.metrics["eta_p"] == cell.metrics["eta_w"]
    assert cell.metrics["eta_total"] == cell.metrics["eta_p"] * cell.metrics["eta_w"]


def test_report_output_formats(loo_manifest):
    report = evaluate(loo_manifest, methods=(Method.MINMAX,),
                      kinds=(DistanceKind.CITY_BLOCK, DistanceKind.COSINE))
    table = report.human_table()
    assert "method" in table and "accuracy (%)" in table
    assert "minmax" in table
    lines = report.machine_lines()
    assert len(lines) == 2
    for line in lines:
        pairs = dict(part.split("=", 1) for part in line.split())
        assert pairs["dataset"] == report.dataset
        assert pairs["method"] == "minmax"
        float(pairs["accuracy"])
    best = report.best()
    assert best.metrics["accuracy"] == max(c.metrics["accuracy"] for c in report.cells)


def test_trace_tsv_shape(loo_manifest):
    report = evaluate(loo_manifest, methods=(Method.MEDIAN,),
                      kinds=(DistanceKind.CITY_BLOCK,))
    lines = report.cells[0].trace_tsv().strip().splitlines()
    assert lines[0] == "query_id\ttrue_label\tpredicted_label\tmatch_id\tdistance"
    assert len(lines) == 1 + 12
    for line in lines[1:]:
        fields = line.split("\t")
        assert len(fields) == 5
        float(fields[4])


def test_evaluate_threads_do_not_change_results(tmp_path):
    manifest = synthesize_dataset(tmp_path / "p2s", seed=8, n_classes=2, per_class=3,
                                  image_size=24, kind=DatasetKind.PATCH_TO_SCAN)
    one = evaluate(manifest, methods=(Method.MINMAX,), kinds=(DistanceKind.EUCLIDEAN,))
    two = evaluate(manifest, methods=(Method.MINMAX,), kinds=(DistanceKind.EUCLIDEAN,),
                   threads=3)
    assert one.cells[0].outcomes == two.cells[0].outcomes
    assert one.cells[0].metrics == two.cells[0].metrics
