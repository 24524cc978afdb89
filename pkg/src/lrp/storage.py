"""Binary descriptor records and on-disk search-index layout.

Descriptor record (little-endian):

    magic   4 bytes  b"LRP1"
    method  u8       0 = median, 1 = minmax
    norm    u8       0 = raw counts, 1 = normalized
    count   u32      number of bins
    bins    count *  f64 (normalized) or u64 (counts)

Records are self-delimiting, so an index packs them back to back in one
``descriptors.bin`` file, addressed by byte offsets from ``manifest.tsv``
(three tab-separated columns: id, label, offset).  A small ``meta`` file of
key=value lines records the index profile.
"""

import hashlib
import struct
from pathlib import Path

import numpy as np

from .core import LrpDescriptor, Method
from .errors import FormatError

MAGIC = b"LRP1"
_HEADER = struct.Struct("<4sBBI")

_METHOD_BYTE = {Method.MEDIAN: 0, Method.MINMAX: 1}
_BYTE_METHOD = {v: k for k, v in _METHOD_BYTE.items()}


def descriptor_to_bytes(desc: LrpDescriptor) -> bytes:
    header = _HEADER.pack(MAGIC, _METHOD_BYTE[desc.method], int(desc.normalized), desc.bins.size)
    payload = desc.bins.astype("<f8" if desc.normalized else "<u8").tobytes()
    return header + payload


def descriptor_from_bytes(buffer: bytes, offset: int = 0) -> tuple[LrpDescriptor, int]:
    """Parse one record; returns (descriptor, offset just past the record)."""
    end_header = offset + _HEADER.size
    if end_header > len(buffer):
        raise FormatError("truncated descriptor header")
    magic, method_byte, norm_byte, count = _HEADER.unpack_from(buffer, offset)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if method_byte not in _BYTE_METHOD or norm_byte not in (0, 1):
        raise FormatError(f"bad method/normalization bytes ({method_byte}, {norm_byte})")
    method = _BYTE_METHOD[method_byte]
    if count != method.n_bins:
        raise FormatError(f"{method.value} record claims {count} bins, expected {method.n_bins}")
    end = end_header + 8 * count
    if end > len(buffer):
        raise FormatError("truncated descriptor payload")
    dtype = "<f8" if norm_byte else "<u8"
    bins = np.frombuffer(buffer, dtype=dtype, count=count, offset=end_header).copy()
    desc = LrpDescriptor(method=method, bins=bins, normalized=bool(norm_byte), source_dims=None)
    return desc, end


def save_descriptor(desc: LrpDescriptor, path) -> None:
    Path(path).write_bytes(descriptor_to_bytes(desc))


def load_descriptor(path) -> LrpDescriptor:
    desc, _ = descriptor_from_bytes(Path(path).read_bytes())
    return desc


def cache_key(file_bytes: bytes, method: Method, resize_tag: str, normalize: bool) -> str:
    """Disk-cache key for a descriptor: file content plus extraction settings."""
    digest = hashlib.sha256()
    digest.update(file_bytes)
    digest.update(f"|{method.value}|{resize_tag}|{int(normalize)}".encode())
    return digest.hexdigest()
