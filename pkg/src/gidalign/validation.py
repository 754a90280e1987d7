"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np


def check_image(img, *, copy: bool = False, name: str = "img") -> np.ndarray:
    """Validate a single image and return it as a float64 array.

    An image is a 2-d ``(H, W)`` array or a 3-d ``(H, W, C)`` array with all
    intensities in [0, 1].
    """
    arr = np.array(img, dtype=np.float64, copy=copy) if copy else np.asarray(img, dtype=np.float64)
    if arr.ndim not in (2, 3):
        raise ValueError(f"{name} must be 2-d (H, W) or 3-d (H, W, C), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1 or (arr.ndim == 3 and arr.shape[2] < 1):
        raise ValueError(f"{name} has an empty dimension: {arr.shape}")
    _check_range(arr, name)
    return arr


def check_image_stack(images, *, name: str = "images") -> np.ndarray:
    """Validate a homogeneous stack ``(N, H, W)`` or ``(N, H, W, C)``.

    A sequence of differently-shaped images raises ``ValueError``.
    """
    if isinstance(images, np.ndarray):
        arr = images.astype(np.float64, copy=False)
    else:
        images = list(images)
        if not images:
            return np.zeros((0, 1, 1), dtype=np.float64)
        shapes = {np.shape(im) for im in images}
        if len(shapes) != 1:
            raise ValueError(f"{name} have heterogeneous shapes: {sorted(shapes)}")
        arr = np.stack([np.asarray(im, dtype=np.float64) for im in images])
    if arr.ndim not in (3, 4):
        raise ValueError(
            f"{name} must be (N, H, W) or (N, H, W, C), got shape {arr.shape}")
    if arr.shape[0] and 0 in arr.shape[1:]:
        raise ValueError(f"{name} has an empty dimension: {arr.shape}")
    _check_range(arr, name)
    return arr


def as_hwc(img: np.ndarray) -> np.ndarray:
    """View a 2-d image as ``(H, W, 1)``; 3-d input is returned as is."""
    return img[:, :, None] if img.ndim == 2 else img


def _check_range(arr: np.ndarray, name: str) -> None:
    if arr.size == 0:
        return
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    lo, hi = arr.min(), arr.max()
    if lo < 0.0 or hi > 1.0:
        raise ValueError(
            f"{name} intensities must lie in [0, 1], got range [{lo}, {hi}]")
