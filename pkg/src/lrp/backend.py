"""Backend selection: compiled extension when present, NumPy otherwise.

The environment variable ``LRP_BACKEND`` forces a choice (``fast`` or
``numpy``); by default the compiled extension is used whenever it imported
cleanly.  Both backends are bit-identical by contract, which the test suite
and the ``lrp verify`` subcommand enforce against a brute-force oracle.
"""

import os

import numpy as np

from . import _npkernels

try:
    from . import _cykernels
except ImportError:
    _cykernels = None

FAST = "fast"
NUMPY = "numpy"


def available_backends() -> tuple[str, ...]:
    """Backends usable in this process, fastest first."""
    if _cykernels is not None:
        return (FAST, NUMPY)
    return (NUMPY,)


def default_backend() -> str:
    forced = os.environ.get("LRP_BACKEND")
    if forced:
        if forced not in (FAST, NUMPY):
            raise ValueError(f"LRP_BACKEND must be 'fast' or 'numpy', got {forced!r}")
        if forced == FAST and _cykernels is None:
            raise ValueError("LRP_BACKEND=fast but the compiled extension is not available")
        return forced
    return FAST if _cykernels is not None else NUMPY


def _resolve(backend: str | None):
    name = backend if backend is not None else default_backend()
    if name == FAST:
        if _cykernels is None:
            raise ValueError("compiled backend requested but not available")
        return _cykernels
    if name == NUMPY:
        return _npkernels
    raise ValueError(f"unknown backend: {name!r}")


def projection_grid(image: np.ndarray, backend: str | None = None) -> np.ndarray:
    """(H-2, W-2, 12) int16 projection vectors; see `lrp.core.local_projections`."""
    return _resolve(backend).projection_grid(np.ascontiguousarray(image, dtype=np.uint8))


def code_grid(image: np.ndarray, method: str, backend: str | None = None) -> np.ndarray:
    """(H-2, W-2) uint16 binarized codes for 'median' or 'minmax'."""
    return _resolve(backend).code_grid(np.ascontiguousarray(image, dtype=np.uint8), method)
