"""Image decoding, grayscale conversion, and deterministic bilinear resize.

Descriptor histograms depend on every preprocessing choice, so the rules
are frozen: BT.601 luma weights (0.299, 0.587, 0.114) with round-half-up in
exact integer arithmetic, and bilinear resampling with half-pixel-center
(align_corners=false) sampling, rounded half-up once at the end.  The same
file yields the same pixels on every platform.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, TooSmallAfterResize

#: PIL modes decodable here, directly or after a palette expansion.
_SUPPORTED_MODES = {"1", "L", "LA", "P", "RGB", "RGBA"}


@dataclass(frozen=True)
class ResizePolicy:
    """Target (width, height), or native size when ``target`` is None."""

    target: tuple[int, int] | None = None

    def __post_init__(self):
        if self.target is not None:
            w, h = self.target
            if w < 3 or h < 3:
                raise ValueError(f"resize target must be at least 3x3, got {w}x{h}")

    @classmethod
    def native(cls) -> "ResizePolicy":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "ResizePolicy":
        """Parse 'native' or 'WxH' (e.g. '250x250')."""
        cleaned = text.strip().lower()
        if cleaned == "native":
            return cls.native()
        try:
            w_text, h_text = cleaned.split("x")
            return cls((int(w_text), int(h_text)))
        except ValueError:
            raise ValueError(f"bad resize spec {text!r}; expected 'native' or 'WxH'") from None

    @property
    def tag(self) -> str:
        """Stable string form, used in cache keys and index metadata."""
        if self.target is None:
            return "native"
        return f"{self.target[0]}x{self.target[1]}"


def to_grayscale(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma of an (H, W, 3) integer array, rounded half-up."""
    channels = rgb.astype(np.uint32)
    r, g, b = channels[..., 0], channels[..., 1], channels[..., 2]
    return ((299 * r + 587 * g + 114 * b + 500) // 1000).astype(np.uint8)


def _axis_coords(n_src: int, n_dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Half-pixel-center sampling, clamped to the source extent.
    x = (np.arange(n_dst, dtype=np.float64) + 0.5) * (n_src / n_dst) - 0.5
    x = np.clip(x, 0.0, n_src - 1.0)
    lo = np.floor(x).astype(np.intp)
    hi = np.minimum(lo + 1, n_src - 1)
    return lo, hi, x - lo


def resize_bilinear(gray: np.ndarray, width: int, height: int) -> np.ndarray:
    """Separable bilinear resize of a 2D uint8 array to width x height."""
    src = np.asarray(gray, dtype=np.float64)
    src_h, src_w = src.shape
    if (src_w, src_h) == (width, height):
        return np.asarray(gray, dtype=np.uint8).copy()
    x_lo, x_hi, x_frac = _axis_coords(src_w, width)
    y_lo, y_hi, y_frac = _axis_coords(src_h, height)
    rows = src[:, x_lo] * (1.0 - x_frac) + src[:, x_hi] * x_frac
    blended = rows[y_lo, :] * (1.0 - y_frac[:, None]) + rows[y_hi, :] * y_frac[:, None]
    return np.clip(np.floor(blended + 0.5), 0.0, 255.0).astype(np.uint8)


def load_gray(path, policy: ResizePolicy = ResizePolicy(None)) -> np.ndarray:
    """Decode a raster file (PNG/TIFF/JPEG/BMP) into a 2D uint8 array.

    Color images are converted with the fixed luma weights; alpha channels
    are dropped.  Raises FileNotFoundError, `DecodeError` for undecodable
    files or unsupported color spaces, and `TooSmallAfterResize` when the
    final image has a dimension below 3.
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise FileNotFoundError(f"no such image file: {file_path}")
    try:
        with Image.open(file_path) as img:
            mode = img.mode
            if mode not in _SUPPORTED_MODES:
                raise DecodeError(
                    f"{file_path}: unsupported color space {mode!r}; "
                    f"expected 8-bit grayscale, palette, or RGB(A)"
                )
            if mode == "P":
                img = img.convert("RGB")
            elif mode == "1":
                img = img.convert("L")
            pixels = np.asarray(img)
    except UnidentifiedImageError as exc:
        raise DecodeError(f"{file_path}: cannot decode ({exc})") from exc
    except OSError as exc:
        raise DecodeError(f"{file_path}: decode failed ({exc})") from exc

    if pixels.ndim == 2:
        gray = pixels.astype(np.uint8)
    elif pixels.ndim == 3 and pixels.shape[2] in (2, 3, 4):
        if pixels.shape[2] == 2:  # LA: luminance already present
            gray = pixels[..., 0].astype(np.uint8)
        else:
            gray = to_grayscale(pixels[..., :3])
    else:
        raise DecodeError(f"{file_path}: unexpected pixel layout {pixels.shape}")

    if policy.target is not None:
        gray = resize_bilinear(gray, *policy.target)
    height, width = gray.shape
    if height < 3 or width < 3:
        raise TooSmallAfterResize(f"{file_path}: {width}x{height} after resize policy")
    return gray
