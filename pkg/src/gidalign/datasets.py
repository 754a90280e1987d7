"""Dataset ingestion (MNIST IDX, CIFAR-10 binary), preparation and PGM/PPM IO.

All decoders return float64 intensities in [0, 1] (byte / 255).
"""

from __future__ import annotations

import gzip
import io
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .validation import as_hwc, check_image

#: ITU-R BT.601 luma weights used by :func:`to_grayscale`.
GRAYSCALE_WEIGHTS = (0.299, 0.587, 0.114)

IDX_UBYTE = 0x08
CIFAR_RECORD = 1 + 3 * 32 * 32
NUM_CLASSES = 10

# prepared side length per dataset
PAD_SIZE = {"mnist": 32, "cifar10": 46}


class FormatError(ValueError):
    """Malformed binary or image file. ``offset`` is the failing byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass
class LabeledImageSet:
    images: np.ndarray
    labels: np.ndarray
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.images) != len(self.labels):
            raise ValueError(
                f"{len(self.images)} images but {len(self.labels)} labels")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= NUM_CLASSES):
            raise ValueError("labels must lie in 0..9")

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, index) -> "LabeledImageSet":
        return LabeledImageSet(self.images[index], self.labels[index], self.name,
                               dict(self.metadata))


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    return source.read()


def _parse_idx(buf: bytes, expected_ndim: int, what: str) -> tuple[tuple[int, ...], np.ndarray]:
    if len(buf) < 4:
        raise FormatError(f"truncated IDX header in {what}", len(buf))
    if buf[0] != 0 or buf[1] != 0:
        raise FormatError(f"bad IDX magic {buf[:2].hex()} in {what}", 0)
    if buf[2] != IDX_UBYTE:
        raise FormatError(f"unsupported IDX dtype code 0x{buf[2]:02x} in {what}", 2)
    ndim = buf[3]
    if ndim != expected_ndim:
        raise FormatError(
            f"{what} must have {expected_ndim} dimension(s), header says {ndim}", 3)
    end = 4 + 4 * ndim
    if len(buf) < end:
        raise FormatError(f"truncated IDX dimension list in {what}", len(buf))
    dims = struct.unpack(f">{ndim}I", buf[4:end])
    size = int(np.prod(dims, dtype=np.int64))
    if len(buf) - end < size:
        raise FormatError(
            f"truncated IDX payload in {what}: expected {size} bytes, found {len(buf) - end}",
            len(buf))
    if len(buf) - end > size:
        raise FormatError(f"trailing bytes after IDX payload in {what}", end + size)
    payload = np.frombuffer(buf, dtype=np.uint8, count=size, offset=end)
    return dims, payload


def load_idx_images(source) -> np.ndarray:
    """Decode an IDX3 unsigned-byte image file into ``(N, H, W)`` floats."""
    dims, payload = _parse_idx(_read_bytes(source), 3, "image file")
    return payload.reshape(dims).astype(np.float64) / 255.0


def load_idx_labels(source) -> np.ndarray:
    """Decode an IDX1 unsigned-byte label file."""
    buf = _read_bytes(source)
    dims, payload = _parse_idx(buf, 1, "label file")
    bad = np.flatnonzero(payload >= NUM_CLASSES)
    if bad.size:
        raise FormatError(f"label {payload[bad[0]]} out of range 0..9", 8 + int(bad[0]))
    return payload.astype(np.int64)


def write_idx(array, sink) -> None:
    """Encode a uint8 array in IDX format (inverse of the loaders)."""
    arr = np.asarray(array)
    if arr.dtype != np.uint8:
        raise ValueError("write_idx only supports uint8 payloads")
    sink.write(bytes([0, 0, IDX_UBYTE, arr.ndim]))
    sink.write(struct.pack(f">{arr.ndim}I", *arr.shape))
    sink.write(np.ascontiguousarray(arr).tobytes())


def load_cifar10(source, name: str = "cifar10") -> LabeledImageSet:
    """Decode CIFAR-10 binary records into 32x32x3 images.

    Each 3073-byte record holds a label byte followed by the R, G and B
    planes, each 1024 bytes in row-major order.
    """
    buf = _read_bytes(source)
    if len(buf) % CIFAR_RECORD:
        raise FormatError(
            f"CIFAR-10 stream length {len(buf)} is not a multiple of {CIFAR_RECORD}",
            len(buf) - len(buf) % CIFAR_RECORD)
    records = np.frombuffer(buf, dtype=np.uint8).reshape(-1, CIFAR_RECORD)
    labels = records[:, 0].astype(np.int64)
    bad = np.flatnonzero(labels >= NUM_CLASSES)
    if bad.size:
        raise FormatError(f"label {labels[bad[0]]} out of range 0..9",
                          int(bad[0]) * CIFAR_RECORD)
    planes = records[:, 1:].reshape(-1, 3, 32, 32)
    images = planes.transpose(0, 2, 3, 1).astype(np.float64) / 255.0
    return LabeledImageSet(images, labels, name)


def to_grayscale(img) -> np.ndarray:
    """BT.601 luma of an RGB image ``(H, W, 3)`` or stack ``(N, H, W, 3)``."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim < 3 or arr.shape[-1] != 3:
        raise ValueError(f"to_grayscale needs 3 channels, got shape {arr.shape}")
    r, g, b = GRAYSCALE_WEIGHTS
    return np.clip(r * arr[..., 0] + g * arr[..., 1] + b * arr[..., 2], 0.0, 1.0)


def pad_centered(img, target_h: int, target_w: int) -> np.ndarray:
    """Zero-pad symmetrically to ``target_h x target_w``.

    The spatial axes are 0 and 1 for ``(H, W)``/``(H, W, C)`` input and 1 and
    2 for a 4-d stack ``(N, H, W, C)``.
    """
    arr = np.asarray(img, dtype=np.float64)
    spatial = (1, 2) if arr.ndim == 4 else (0, 1)
    h, w = arr.shape[spatial[0]], arr.shape[spatial[1]]
    dh, dw = target_h - h, target_w - w
    if dh < 0 or dw < 0:
        raise ValueError(f"cannot pad {h}x{w} down to {target_h}x{target_w}")
    if dh % 2 or dw % 2:
        raise ValueError(
            f"padding {h}x{w} to {target_h}x{target_w} is not symmetric (odd difference)")
    widths = [(0, 0)] * arr.ndim
    widths[spatial[0]] = (dh // 2, dh // 2)
    widths[spatial[1]] = (dw // 2, dw // 2)
    return np.pad(arr, widths)


def _pad_stack(images: np.ndarray, size: int) -> np.ndarray:
    if images.ndim == 3:
        return pad_centered(images[..., None], size, size)[..., 0]
    return pad_centered(images, size, size)


def prepare(images: np.ndarray, dataset: str) -> np.ndarray:
    """Standard preparation: grayscale (RGB only), then centred zero padding."""
    if images.ndim == 4 and images.shape[-1] == 3:
        images = to_grayscale(images)
    return _pad_stack(images, PAD_SIZE[dataset])


# --- file discovery ---------------------------------------------------------

_MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
_CIFAR_FILES = {
    "train": tuple(f"data_batch_{i}.bin" for i in range(1, 6)),
    "test": ("test_batch.bin",),
}


def _open_maybe_gz(path: Path) -> bytes:
    data = path.read_bytes()
    return gzip.decompress(data) if data[:2] == b"\x1f\x8b" else data


def _find(data_dir: Path, name: str, subdirs) -> Path:
    variants = [name, name + ".gz", name.replace("-idx", ".idx"),
                name.replace("-idx", ".idx") + ".gz"]
    for sub in subdirs:
        for v in variants:
            p = data_dir / sub / v
            if p.is_file():
                return p
    raise FileNotFoundError(f"{name} not found under {data_dir}")


def load_mnist(data_dir, split: str = "train") -> LabeledImageSet:
    """Read the MNIST IDX pair for ``split`` ('train' or 't10k'/'test')."""
    split = "test" if split in ("test", "t10k") else split
    data_dir = Path(data_dir)
    img_name, lbl_name = _MNIST_FILES[split]
    subdirs = ("", "mnist", "MNIST/raw")
    images = load_idx_images(_open_maybe_gz(_find(data_dir, img_name, subdirs)))
    labels = load_idx_labels(_open_maybe_gz(_find(data_dir, lbl_name, subdirs)))
    if len(images) != len(labels):
        raise FormatError(f"MNIST {split}: {len(images)} images but {len(labels)} labels")
    return LabeledImageSet(images, labels, f"mnist-{split}")


def load_cifar10_dir(data_dir, split: str = "train") -> LabeledImageSet:
    """Read every CIFAR-10 binary batch of ``split`` and concatenate them."""
    data_dir = Path(data_dir)
    subdirs = ("", "cifar-10-batches-bin", "cifar10")
    parts = [load_cifar10(_open_maybe_gz(_find(data_dir, f, subdirs)))
             for f in _CIFAR_FILES[split]]
    images = np.concatenate([p.images for p in parts])
    labels = np.concatenate([p.labels for p in parts])
    return LabeledImageSet(images, labels, f"cifar10-{split}")


def load_prepared(dataset: str, data_dir, split: str) -> LabeledImageSet:
    """Load ``split`` of ``dataset`` and apply grayscale + padding."""
    if dataset == "mnist":
        raw = load_mnist(data_dir, split)
    elif dataset == "cifar10":
        raw = load_cifar10_dir(data_dir, split)
    else:
        raise ValueError(f"unknown dataset {dataset!r}")
    meta = {"grayscale": "bt601" if raw.images.ndim == 4 else "none",
            "pad": PAD_SIZE[dataset]}
    return LabeledImageSet(prepare(raw.images, dataset), raw.labels, raw.name, meta)


# --- PGM / PPM --------------------------------------------------------------

def quantize(img) -> np.ndarray:
    """Round-half-up to 8-bit codes."""
    return np.floor(np.asarray(img, dtype=np.float64) * 255.0 + 0.5).astype(np.uint8)


def write_pgm(img, sink) -> None:
    """Write a 1-channel image as binary PGM (P5) or 3-channel as PPM (P6)."""
    img = as_hwc(check_image(img))
    h, w, c = img.shape
    if c == 1:
        magic = b"P5"
    elif c == 3:
        magic = b"P6"
    else:
        raise ValueError(f"PGM/PPM supports 1 or 3 channels, got {c}")
    sink.write(magic + f"\n{w} {h}\n255\n".encode("ascii"))
    sink.write(quantize(img).tobytes())


def _header_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(buf):
            raise FormatError("truncated PGM/PPM header", pos)
        if buf[pos:pos + 1] == b"#":
            while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace():
            pos += 1
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(buf) or not buf[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after PGM/PPM header", pos)
    return tokens, pos + 1


def read_pgm(source) -> np.ndarray:
    """Read binary PGM (P5, returns ``(H, W)``) or PPM (P6, ``(H, W, 3)``)."""
    buf = _read_bytes(source)
    tokens, start = _header_tokens(buf, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported netpbm magic {magic!r}", 0)
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError("non-numeric PGM/PPM header field", 2) from None
    if w < 1 or h < 1:
        raise FormatError(f"invalid PGM/PPM size {w}x{h}", 2)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (only 255)", start - 1)
    c = 1 if magic == b"P5" else 3
    size = w * h * c
    if len(buf) - start < size:
        raise FormatError(f"truncated raster: expected {size} bytes", len(buf))
    pix = np.frombuffer(buf, dtype=np.uint8, count=size, offset=start)
    img = pix.reshape(h, w, c).astype(np.float64) / 255.0
    return img[:, :, 0] if c == 1 else img


def read_pgm_file(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_pgm(fh)


def write_pgm_file(img, path) -> None:
    buf = io.BytesIO()
    write_pgm(img, buf)
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)
