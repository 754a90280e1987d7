"""Rotation of images about their centre with zero fill.

Rotation is done by inverse mapping: every output pixel at centred offset
``(i, j)`` reads the input at::

    (cy, cx) + [[cos a, -sin a],
                [sin a,  cos a]] @ (i, j)

which turns image content by ``+a`` in the ``atan2(row, col)`` convention
used by :mod:`gidalign.geometry`. Stencil neighbours that fall off the grid
read as zero, and so does any source coordinate outside
``[0, H-1] x [0, W-1]``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .geometry import image_center
from .validation import check_image, check_image_stack

_SNAP = 1e-15
_CUBIC_A = -0.5  # Catmull-Rom


class InterpMethod(str, enum.Enum):
    NEAREST = "nearest"
    BILINEAR = "bilinear"
    BICUBIC = "bicubic"

    @classmethod
    def parse(cls, value) -> "InterpMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown interpolation {value!r}; expected one of {choices}") from None


def rotation_cos_sin(alpha: float) -> tuple[float, float]:
    """cos/sin of ``alpha`` with sub-ulp residues snapped to zero.

    Keeps multiples of pi/2 (and full turns) on the pixel lattice.
    """
    c, s = math.cos(alpha), math.sin(alpha)
    if abs(c) < _SNAP:
        c = 0.0
    if abs(s) < _SNAP:
        s = 0.0
    return c, s


def _cubic_weight(x: np.ndarray) -> np.ndarray:
    a = _CUBIC_A
    x = np.abs(x)
    x2, x3 = x * x, x * x * x
    near = (a + 2.0) * x3 - (a + 3.0) * x2 + 1.0
    far = a * x3 - 5.0 * a * x2 + 8.0 * a * x - 4.0 * a
    return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))


def sample_points(stack: np.ndarray, rows: np.ndarray, cols: np.ndarray,
                  method) -> np.ndarray:
    """Sample a stack of images at per-image coordinate grids.

    Parameters
    ----------
    stack : ndarray of shape (N, H, W, C)
    rows, cols : ndarray of shape (N, ...)
        Source coordinates; the trailing shape is arbitrary.
    method : InterpMethod or str

    Returns
    -------
    ndarray of shape rows.shape + (C,)
    """
    method = InterpMethod.parse(method)
    n, h, w, _ = stack.shape
    rows = np.asarray(rows, dtype=np.float64)
    cols = np.asarray(cols, dtype=np.float64)
    inside = (rows >= 0) & (rows <= h - 1) & (cols >= 0) & (cols <= w - 1)
    r = np.where(inside, rows, 0.0)
    c = np.where(inside, cols, 0.0)

    pad = 2
    padded = np.pad(stack, ((0, 0), (pad, pad), (pad, pad), (0, 0)))
    img_idx = np.arange(n).reshape((n,) + (1,) * (rows.ndim - 1))

    if method is InterpMethod.NEAREST:
        # coordinates are non-negative here, so this is round-half-away-from-zero
        ri = np.floor(r + 0.5).astype(np.intp)
        ci = np.floor(c + 0.5).astype(np.intp)
        out = padded[img_idx, ri + pad, ci + pad]
    else:
        r0 = np.floor(r)
        c0 = np.floor(c)
        fr = (r - r0)[..., None]
        fc = (c - c0)[..., None]
        r0 = r0.astype(np.intp) + pad
        c0 = c0.astype(np.intp) + pad
        if method is InterpMethod.BILINEAR:
            top = (1.0 - fc) * padded[img_idx, r0, c0] + fc * padded[img_idx, r0, c0 + 1]
            bot = (1.0 - fc) * padded[img_idx, r0 + 1, c0] + fc * padded[img_idx, r0 + 1, c0 + 1]
            out = (1.0 - fr) * top + fr * bot
        else:
            offs = np.arange(-1, 3)
            wr = _cubic_weight(fr[..., None] - offs)  # (..., 1, 4)
            wc = _cubic_weight(fc[..., None] - offs)
            out = 0.0
            for a, da in enumerate(offs):
                row_sum = 0.0
                for b, db in enumerate(offs):
                    row_sum = row_sum + wc[..., b] * padded[img_idx, r0 + da, c0 + db]
                out = out + wr[..., a] * row_sum
            out = np.clip(out, 0.0, 1.0)

    return np.where(inside[..., None], out, 0.0)


def sample(img, row: float, col: float, channel: int = 0,
           method=InterpMethod.BILINEAR) -> float:
    """Interpolated intensity of one channel at a real-valued coordinate."""
    img = check_image(img)
    stack = img.reshape((1,) + img.shape[:2] + (-1,))
    if not 0 <= channel < stack.shape[-1]:
        raise ValueError(f"channel {channel} out of range for {stack.shape[-1]} channels")
    value = sample_points(stack, np.array([[row]]), np.array([[col]]), method)
    return float(value[0, 0, channel])


def rotate_stack(images, alphas, method=InterpMethod.BILINEAR) -> np.ndarray:
    """Rotate each image of a stack about its centre by its own angle.

    Parameters
    ----------
    images : array_like of shape (N, H, W) or (N, H, W, C)
    alphas : float or array_like of shape (N,)
        Rotation angles in radians, one per image (a scalar is broadcast).
    method : InterpMethod or str

    Returns
    -------
    ndarray with the same shape as ``images``.
    """
    stack = check_image_stack(images)
    n = stack.shape[0]
    alphas = np.broadcast_to(np.asarray(alphas, dtype=np.float64), (n,))
    if n == 0:
        return stack.copy()
    squeeze = stack.ndim == 3
    hwc = stack[..., None] if squeeze else stack
    _, h, w, _ = hwc.shape
    ctr = image_center(h, w)
    di = (np.arange(h, dtype=np.float64) - ctr.cy)[None, :, None]
    dj = (np.arange(w, dtype=np.float64) - ctr.cx)[None, None, :]
    cs = np.array([rotation_cos_sin(a) for a in alphas])
    cos_a = cs[:, 0, None, None]
    sin_a = cs[:, 1, None, None]
    rows = ctr.cy + cos_a * di - sin_a * dj
    cols = ctr.cx + sin_a * di + cos_a * dj
    out = sample_points(hwc, rows, cols, method)
    # exact identity for zero-angle entries, whatever the kernel
    ident = (cs[:, 0] == 1.0) & (cs[:, 1] == 0.0)
    if ident.any():
        out[ident] = hwc[ident]
    return out[..., 0] if squeeze else out


def rotate_about_center(img, alpha: float, method=InterpMethod.BILINEAR) -> np.ndarray:
    """Rotate an image by ``alpha`` radians about ``image_center(H, W)``.

    Output keeps the input's shape; uncovered regions are zero.
    """
    img = check_image(img)
    return rotate_stack(img[None], [alpha], method)[0]
