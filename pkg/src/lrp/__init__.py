"""Local Radon pattern descriptors for grayscale texture retrieval.

Each interior pixel of an image is summarized by twelve line sums over its
3x3 neighborhood (three parallel lines in each of four directions), the
sums are binarized into a 12-bit or 11-bit code, and the image becomes a
histogram of those codes.  The package bundles the descriptor, a
brute-force reference implementation for verification, histogram
distances, an exact nearest-neighbor index, dataset handling, and
evaluation drivers, all behind the ``lrp`` command-line tool.

>>> import numpy as np, lrp
>>> image = np.random.default_rng(0).integers(0, 256, (64, 64), dtype=np.uint8)
>>> desc = lrp.descriptor(image, method=lrp.Method.MEDIAN)
>>> desc.bins.shape
(4096,)
"""

from . import errors
from .backend import available_backends, code_grid, default_backend, projection_grid
from .core import (
    LrpDescriptor,
    Method,
    binarize_median,
    binarize_minmax,
    descriptor,
    local_projections,
)
from .datasets import (
    DatasetKind,
    DatasetManifest,
    ManifestItem,
    load_manifest,
    synthesize_dataset,
    write_manifest,
)
from .evaluation import (
    EvaluationCell,
    EvaluationReport,
    combined_accuracy,
    compute_descriptors,
    confusion_counts,
    evaluate,
    scan_accuracy,
    top1_accuracy,
)
from .imageops import ResizePolicy, load_gray, resize_bilinear, to_grayscale
from .index import (
    Classification,
    IndexedDescriptor,
    RankedHit,
    RetrievalResult,
    SearchIndex,
    build_index,
    leave_one_out,
    load_index,
    save_index,
)
from .kernels import Direction, RadonKernel, kernel_bank
from .oracle import (
    VerifyOutcome,
    reference_descriptor,
    reference_median_code,
    reference_minmax_code,
    reference_projections,
    require_equivalence,
    verify_equivalence,
)
from .similarity import DistanceKind, distance, distances_to_many
from .storage import load_descriptor, save_descriptor

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "DatasetKind",
    "DatasetManifest",
    "Direction",
    "DistanceKind",
    "EvaluationCell",
    "EvaluationReport",
    "IndexedDescriptor",
    "LrpDescriptor",
    "ManifestItem",
    "Method",
    "RadonKernel",
    "RankedHit",
    "ResizePolicy",
    "RetrievalResult",
    "SearchIndex",
    "VerifyOutcome",
    "available_backends",
    "binarize_median",
    "binarize_minmax",
    "build_index",
    "code_grid",
    "combined_accuracy",
    "compute_descriptors",
    "confusion_counts",
    "default_backend",
    "descriptor",
    "distance",
    "distances_to_many",
    "errors",
    "evaluate",
    "kernel_bank",
    "leave_one_out",
    "load_descriptor",
    "load_gray",
    "load_index",
    "load_manifest",
    "local_projections",
    "projection_grid",
    "reference_descriptor",
    "reference_median_code",
    "reference_minmax_code",
    "reference_projections",
    "require_equivalence",
    "resize_bilinear",
    "save_descriptor",
    "save_index",
    "scan_accuracy",
    "synthesize_dataset",
    "to_grayscale",
    "top1_accuracy",
    "verify_equivalence",
    "write_manifest",
]
