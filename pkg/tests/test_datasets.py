import hashlib
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from lrp.datasets import (
    DatasetKind,
    DatasetManifest,
    ManifestItem,
    load_manifest,
    synthesize_dataset,
    write_manifest,
)
from lrp.errors import LayoutMismatch


def _tree_digest(root):
    digest = hashlib.sha256()
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def test_kind_from_string():
    assert DatasetKind.from_string("patch-to-scan") is DatasetKind.PATCH_TO_SCAN
    assert DatasetKind.from_string("LEAVE-ONE-OUT") is DatasetKind.LEAVE_ONE_OUT
    with pytest.raises(ValueError):
        DatasetKind.from_string("holdout")


def test_synthesize_leave_one_out(tmp_path):
    manifest = synthesize_dataset(tmp_path / "ds", seed=1, n_classes=3, per_class=4,
                                  image_size=24)
    assert manifest.kind is DatasetKind.LEAVE_ONE_OUT
    assert len(manifest) == 12
    assert manifest.labels == ["stripes00", "stripes01", "stripes02"]
    assert all(item.split == "all" for item in manifest.items)
    for item in manifest.items:
        path = manifest.resolve(item)
        assert path.is_file()
        with Image.open(path) as img:
            assert img.mode == "L"
            assert img.size == (24, 24)


def test_synthesize_patch_to_scan_is_balanced(tmp_path):
    manifest = synthesize_dataset(tmp_path / "ds", seed=1, n_classes=2, per_class=3,
                                  image_size=16, kind=DatasetKind.PATCH_TO_SCAN)
    assert manifest.kind is DatasetKind.PATCH_TO_SCAN
    assert len(manifest.train) == 6
    assert len(manifest.test) == 6
    for label in manifest.labels:
        assert sum(1 for i in manifest.train if i.label == label) == 3
        assert sum(1 for i in manifest.test if i.label == label) == 3


def test_synthesis_is_byte_deterministic(tmp_path):
    first = tmp_path / "one"
    second = tmp_path / "two"
    synthesize_dataset(first, seed=9, n_classes=2, per_class=3, image_size=20)
    synthesize_dataset(second, seed=9, n_classes=2, per_class=3, image_size=20)
    assert _tree_digest(first) == _tree_digest(second)
    different = tmp_path / "three"
    synthesize_dataset(different, seed=10, n_classes=2, per_class=3, image_size=20)
    assert _tree_digest(first) != _tree_digest(different)


def test_classes_are_visually_distinct(tmp_path):
    manifest = synthesize_dataset(tmp_path / "ds", seed=2, n_classes=2, per_class=1,
                                  image_size=32)
    a, b = (np.asarray(Image.open(manifest.resolve(i))) for i in manifest.items)
    assert not np.array_equal(a, b)


def test_manifest_file_preferred_over_scan(tmp_path):
    manifest = synthesize_dataset(tmp_path / "ds", seed=1, n_classes=2, per_class=2,
                                  image_size=16)
    # rewrite the manifest to a single item; loading must honor the file
    trimmed = DatasetManifest(manifest.name, manifest.kind, manifest.root,
                              manifest.items[:1])
    write_manifest(trimmed)
    assert len(load_manifest(tmp_path / "ds")) == 1


def test_directory_scan_fallback(tmp_path):
    manifest = synthesize_dataset(tmp_path / "ds", seed=1, n_classes=2, per_class=2,
                                  image_size=16)
    (tmp_path / "ds" / "manifest.tsv").unlink()
    rescanned = load_manifest(tmp_path / "ds")
    assert rescanned.kind is DatasetKind.LEAVE_ONE_OUT
    assert sorted(i.path for i in rescanned.items) == sorted(i.path for i in manifest.items)


def test_patch_to_scan_scan_fallback(tmp_path):
    synthesize_dataset(tmp_path / "ds", seed=1, n_classes=2, per_class=2,
                       image_size=16, kind=DatasetKind.PATCH_TO_SCAN)
    (tmp_path / "ds" / "manifest.tsv").unlink()
    rescanned = load_manifest(tmp_path / "ds")
    assert rescanned.kind is DatasetKind.PATCH_TO_SCAN
    assert len(rescanned.train) == 4
    assert len(rescanned.test) == 4


def test_requested_kind_must_match(tmp_path):
    synthesize_dataset(tmp_path / "ds", seed=1, n_classes=2, per_class=2, image_size=16)
    with pytest.raises(LayoutMismatch):
        load_manifest(tmp_path / "ds", kind=DatasetKind.PATCH_TO_SCAN)


def test_empty_root_rejected(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(LayoutMismatch):
        load_manifest(tmp_path / "empty")
    with pytest.raises(LayoutMismatch):
        load_manifest(tmp_path / "nonexistent")


def test_malformed_manifest_lines_rejected(tmp_path):
    root = tmp_path / "ds"
    synthesize_dataset(root, seed=1, n_classes=2, per_class=2, image_size=16)
    (root / "manifest.tsv").write_text("too\tfew\n")
    with pytest.raises(LayoutMismatch):
        load_manifest(root)


def test_manifest_missing_file_rejected(tmp_path):
    root = tmp_path / "ds"
    synthesize_dataset(root, seed=1, n_classes=2, per_class=2, image_size=16)
    (root / "manifest.tsv").write_text("ghost.png\tstripes00\tall\n")
    with pytest.raises(LayoutMismatch):
        load_manifest(root)


def test_manifest_with_mixed_split_vocabulary_rejected(tmp_path):
    root = tmp_path / "ds"
    manifest = synthesize_dataset(root, seed=1, n_classes=2, per_class=2, image_size=16)
    first, second = manifest.items[0], manifest.items[1]
    (root / "manifest.tsv").write_text(
        f"{first.path}\t{first.label}\tall\n{second.path}\t{second.label}\ttrain\n"
    )
    with pytest.raises(LayoutMismatch):
        load_manifest(root)


def test_manifest_comments_and_blanks_ignored(tmp_path):
    root = tmp_path / "ds"
    manifest = synthesize_dataset(root, seed=1, n_classes=2, per_class=2, image_size=16)
    item = manifest.items[0]
    (root / "manifest.tsv").write_text(
        f"# header comment\n\n{item.path}\t{item.label}\tall\n"
    )
    loaded = load_manifest(root)
    assert [i.path for i in loaded.items] == [item.path]


def test_generator_argument_validation(tmp_path):
    with pytest.raises(ValueError):
        synthesize_dataset(tmp_path / "x", n_classes=1)
    with pytest.raises(ValueError):
        synthesize_dataset(tmp_path / "x", per_class=0)
    with pytest.raises(ValueError):
        synthesize_dataset(tmp_path / "x", image_size=2)
