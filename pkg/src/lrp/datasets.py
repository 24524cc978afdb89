"""Dataset manifests, on-disk layouts, and a synthetic texture generator.

Two evaluation protocols are supported.  A patch-to-scan dataset has
disjoint train and test splits (classify each test patch against the
training set).  A leave-one-out dataset is a single pool where each image
is matched against every other image.

On disk, a dataset root either contains a ``manifest.tsv`` file
(``path<TAB>label<TAB>split`` per line, paths relative to the root) or
follows one of two directory layouts:

    patch-to-scan:   root/train/<label>/*.png  and  root/test/<label>/*.png
    leave-one-out:   root/<label>/*.png

The synthetic generator writes oriented-stripe textures whose class is the
stripe direction.  Generation is deterministic: the same seed regenerates
byte-identical files.
"""

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import LayoutMismatch

MANIFEST_NAME = "manifest.tsv"

#: Raster extensions recognized by the directory scanner.
IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


class DatasetKind(enum.Enum):
    PATCH_TO_SCAN = "patch-to-scan"
    LEAVE_ONE_OUT = "leave-one-out"

    @classmethod
    def from_string(cls, name: str) -> "DatasetKind":
        for kind in cls:
            if kind.value == name.lower():
                return kind
        choices = ", ".join(kind.value for kind in cls)
        raise ValueError(f"unknown dataset kind {name!r}; expected one of: {choices}")


@dataclass(frozen=True)
class ManifestItem:
    """One image: path relative to the dataset root, class label, split."""

    path: str
    label: str
    split: str  # "train", "test", or "all"


@dataclass
class DatasetManifest:
    name: str
    kind: DatasetKind
    root: Path
    items: list[ManifestItem]

    def subset(self, split: str) -> list[ManifestItem]:
        return [item for item in self.items if item.split == split]

    @property
    def train(self) -> list[ManifestItem]:
        return self.subset("train")

    @property
    def test(self) -> list[ManifestItem]:
        return self.subset("test")

    @property
    def labels(self) -> list[str]:
        return sorted({item.label for item in self.items})

    def resolve(self, item: ManifestItem) -> Path:
        return self.root / item.path

    def __len__(self) -> int:
        return len(self.items)


def write_manifest(manifest: DatasetManifest) -> Path:
    """Write the manifest.tsv for a dataset root; returns the file path."""
    target = manifest.root / MANIFEST_NAME
    lines = [f"{item.path}\t{item.label}\t{item.split}" for item in manifest.items]
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def _read_manifest_file(root: Path, kind: DatasetKind | None) -> DatasetManifest:
    items = []
    splits_seen = set()
    text = (root / MANIFEST_NAME).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise LayoutMismatch(
                f"{root / MANIFEST_NAME}:{lineno}: expected 3 tab-separated fields, "
                f"got {len(fields)}"
            )
        path, label, split = (field.strip() for field in fields)
        if split not in ("train", "test", "all"):
            raise LayoutMismatch(
                f"{root / MANIFEST_NAME}:{lineno}: split must be train, test, or all, "
                f"got {split!r}"
            )
        if not (root / path).is_file():
            raise LayoutMismatch(f"{root / MANIFEST_NAME}:{lineno}: missing file {path!r}")
        items.append(ManifestItem(path=path, label=label, split=split))
        splits_seen.add(split)
    if not items:
        raise LayoutMismatch(f"{root / MANIFEST_NAME}: no entries")

    if splits_seen == {"all"}:
        inferred = DatasetKind.LEAVE_ONE_OUT
    elif splits_seen == {"train", "test"}:
        inferred = DatasetKind.PATCH_TO_SCAN
    else:
        raise LayoutMismatch(
            f"{root / MANIFEST_NAME}: splits must be either all 'all' or a mix of "
            f"'train' and 'test' only, got {sorted(splits_seen)}"
        )
    if kind is not None and kind is not inferred:
        raise LayoutMismatch(
            f"{root}: manifest describes a {inferred.value} dataset, "
            f"but {kind.value} was requested"
        )
    return DatasetManifest(name=root.name, kind=inferred, root=root, items=items)


def _scan_class_dirs(parent: Path, split: str) -> list[ManifestItem]:
    items = []
    for class_dir in sorted(p for p in parent.iterdir() if p.is_dir()):
        for file in sorted(class_dir.iterdir()):
            if file.is_file() and file.suffix.lower() in IMAGE_EXTENSIONS:
                rel = file.relative_to(parent.parent if split != "all" else parent)
                items.append(ManifestItem(path=str(rel), label=class_dir.name, split=split))
    return items


def load_manifest(root, kind: DatasetKind | None = None) -> DatasetManifest:
    """Load a dataset description from `root`.

    Prefers an explicit manifest.tsv; otherwise infers one of the two
    directory layouts.  `kind` restricts what is accepted.  Raises
    `LayoutMismatch` when the directory matches neither layout, is empty,
    or contradicts the requested kind.
    """
    root = Path(root)
    if not root.is_dir():
        raise LayoutMismatch(f"dataset root {root} is not a directory")
    if (root / MANIFEST_NAME).is_file():
        return _read_manifest_file(root, kind)

    has_split_dirs = (root / "train").is_dir() and (root / "test").is_dir()
    if has_split_dirs and kind is not DatasetKind.LEAVE_ONE_OUT:
        items = _scan_class_dirs(root / "train", "train")
        items += _scan_class_dirs(root / "test", "test")
        if not items:
            raise LayoutMismatch(f"{root}: train/ and test/ exist but contain no images")
        return DatasetManifest(
            name=root.name, kind=DatasetKind.PATCH_TO_SCAN, root=root, items=items
        )

    if kind is DatasetKind.PATCH_TO_SCAN:
        raise LayoutMismatch(
            f"{root}: patch-to-scan layout needs train/ and test/ subdirectories"
        )
    items = _scan_class_dirs(root, "all")
    if not items:
        raise LayoutMismatch(
            f"{root}: found neither {MANIFEST_NAME}, train/+test/ directories, "
            f"nor per-class image directories"
        )
    return DatasetManifest(name=root.name, kind=DatasetKind.LEAVE_ONE_OUT, root=root, items=items)


def _stripe_texture(rng: np.random.Generator, size: int, angle_deg: float) -> np.ndarray:
    """One oriented-stripe texture patch with mild per-image variation."""
    theta = np.deg2rad(angle_deg + rng.uniform(-4.0, 4.0))
    freq = rng.uniform(0.10, 0.16)  # cycles per pixel, well under Nyquist
    phase = rng.uniform(0.0, 2.0 * np.pi)
    amplitude = rng.uniform(80.0, 100.0)
    rows, cols = np.mgrid[0:size, 0:size].astype(np.float64)
    ramp = cols * np.cos(theta) + rows * np.sin(theta)
    wave = 127.5 + amplitude * np.sin(2.0 * np.pi * freq * ramp + phase)
    noise = rng.integers(-6, 7, size=(size, size))
    return np.clip(np.rint(wave) + noise, 0, 255).astype(np.uint8)


def _write_png(path: Path, pixels: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(pixels, mode="L").save(path, format="PNG")


def synthesize_dataset(
    root,
    seed: int = 0,
    n_classes: int = 3,
    per_class: int = 10,
    image_size: int = 64,
    kind: DatasetKind = DatasetKind.LEAVE_ONE_OUT,
) -> DatasetManifest:
    """Generate a balanced synthetic texture dataset under `root`.

    Class c has stripe direction c * 180/n_classes degrees.  For
    patch-to-scan, `per_class` images go to each of train and test.  Every
    image is seeded independently from (seed, split, class, index), so
    regeneration with the same arguments is byte-identical.
    """
    if n_classes < 2:
        raise ValueError("need at least 2 classes")
    if per_class < 1:
        raise ValueError("need at least 1 image per class")
    if image_size < 3:
        raise ValueError("image_size must be at least 3")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    splits = ("train", "test") if kind is DatasetKind.PATCH_TO_SCAN else ("all",)
    items = []
    for split_code, split in enumerate(splits):
        for class_idx in range(n_classes):
            label = f"stripes{class_idx:02d}"
            angle = 180.0 * class_idx / n_classes
            for image_idx in range(per_class):
                rng = np.random.default_rng([seed, split_code, class_idx, image_idx])
                pixels = _stripe_texture(rng, image_size, angle)
                if kind is DatasetKind.PATCH_TO_SCAN:
                    rel = f"{split}/{label}/{label}_{image_idx:04d}.png"
                else:
                    rel = f"{label}/{label}_{image_idx:04d}.png"
                _write_png(root / rel, pixels)
                items.append(ManifestItem(path=rel, label=label, split=split))
    manifest = DatasetManifest(name=root.name, kind=kind, root=root, items=items)
    write_manifest(manifest)
    return manifest
