"""General Intensity Direction: orientation estimation and canonicalization.

The orientation of an image is the intensity-weighted circular mean of the
directions of all its pixels about the image centre. Canonicalization
rotates the image by minus that angle, so the intensity mass ends up
pointing along the +column axis and the output's own estimate is close to 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DEFAULT_DEGENERACY_EPSILON,
    OrientationEstimate,
    centered_angle_grid,
    resultant,
    scale_normalized,
)
from .validation import as_hwc, check_image, check_image_stack
from .warp import InterpMethod, rotate_stack


class ChannelMode(str, enum.Enum):
    AGGREGATE = "aggregate"
    PER_CHANNEL = "per-channel"

    @classmethod
    def parse(cls, value) -> "ChannelMode":
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace("_", "-")
        try:
            return cls(v)
        except ValueError:
            raise ValueError(
                f"unknown channel mode {value!r}; expected 'aggregate' or 'per-channel'") from None


@dataclass(frozen=True)
class GidConfig:
    interp: InterpMethod = InterpMethod.BILINEAR
    channel_mode: ChannelMode = ChannelMode.AGGREGATE
    degeneracy_epsilon: float = DEFAULT_DEGENERACY_EPSILON

    def __post_init__(self):
        object.__setattr__(self, "interp", InterpMethod.parse(self.interp))
        object.__setattr__(self, "channel_mode", ChannelMode.parse(self.channel_mode))
        if not self.degeneracy_epsilon > 0:
            raise ValueError("degeneracy_epsilon must be > 0")


def _trig_grids(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    theta = centered_angle_grid(h, w)
    return np.sin(theta), np.cos(theta)


def _estimate_weights(weights: np.ndarray, epsilon: float) -> list[OrientationEstimate]:
    """Estimates for a stack of weight maps ``(N, H, W)``."""
    n, h, w = weights.shape
    sin_t, cos_t = _trig_grids(h, w)
    flat = np.ascontiguousarray(weights.reshape(n, -1))
    sin_t, cos_t = sin_t.ravel(), cos_t.ravel()
    q = scale_normalized(flat)
    # row-wise reductions, not BLAS, so a result never depends on batch size
    raw_sin, raw_cos = (flat * sin_t).sum(axis=1), (flat * cos_t).sum(axis=1)
    q_sin, q_cos = (q * sin_t).sum(axis=1), (q * cos_t).sum(axis=1)
    totals = flat.sum(axis=1)
    return [resultant(float(raw_sin[i]), float(raw_cos[i]), float(totals[i]), epsilon,
                      angle_sums=(float(q_sin[i]), float(q_cos[i])))
            for i in range(n)]


def estimate_orientation(img, mode=ChannelMode.AGGREGATE,
                         epsilon: float = DEFAULT_DEGENERACY_EPSILON):
    """Global intensity-weighted orientation of an image.

    Parameters
    ----------
    img : array_like of shape (H, W) or (H, W, C)
        Intensities in [0, 1].
    mode : ChannelMode or str
        ``aggregate`` weights each pixel by its mean over channels and
        returns a single estimate. ``per-channel`` returns a tuple with one
        estimate per channel.
    epsilon : float
        Relative degeneracy threshold.

    Returns
    -------
    OrientationEstimate or tuple of OrientationEstimate
    """
    img = as_hwc(check_image(img))
    mode = ChannelMode.parse(mode)
    if mode is ChannelMode.AGGREGATE:
        weights = img[None, :, :, 0] if img.shape[2] == 1 else img.mean(axis=2)[None]
        return _estimate_weights(weights, epsilon)[0]
    return tuple(_estimate_weights(np.moveaxis(img, 2, 0), epsilon))


def estimate_orientation_stack(images, epsilon: float = DEFAULT_DEGENERACY_EPSILON
                               ) -> list[OrientationEstimate]:
    """Aggregate-mode estimates for every image of a stack."""
    stack = check_image_stack(images)
    if stack.shape[0] == 0:
        return []
    weights = stack if stack.ndim == 3 else stack.mean(axis=3)
    return _estimate_weights(weights, epsilon)


def canonicalize(img, cfg: GidConfig | None = None):
    """Rotate an image into its canonical frame.

    Returns
    -------
    out : ndarray
        Same shape as ``img``. Degenerate images are returned unchanged.
    estimate : OrientationEstimate or tuple of OrientationEstimate
        The estimate(s) used; a tuple in per-channel mode.
    """
    cfg = cfg or GidConfig()
    img = check_image(img)
    if cfg.channel_mode is ChannelMode.PER_CHANNEL and img.ndim == 3:
        ests = estimate_orientation(img, cfg.channel_mode, cfg.degeneracy_epsilon)
        channels = np.moveaxis(img, 2, 0)
        alphas = [0.0 if e.degenerate else -e.angle for e in ests]
        out = rotate_stack(channels, alphas, cfg.interp)
        for k, e in enumerate(ests):
            if e.degenerate:
                out[k] = channels[k]
        return np.moveaxis(out, 0, 2), ests
    out, ests = canonicalize_batch(img[None], cfg)
    return out[0], ests[0]


def canonicalize_batch(imgs, cfg: GidConfig | None = None):
    """Canonicalize a homogeneous batch of images, preserving order.

    Parameters
    ----------
    imgs : sequence of images or ndarray of shape (N, H, W[, C])
    cfg : GidConfig, optional

    Returns
    -------
    out : ndarray of shape (N, H, W[, C])
    estimates : list
    """
    cfg = cfg or GidConfig()
    stack = check_image_stack(imgs)
    if stack.shape[0] == 0:
        return stack.copy(), []
    if cfg.channel_mode is ChannelMode.PER_CHANNEL and stack.ndim == 4:
        pairs = [canonicalize(im, cfg) for im in stack]
        return np.stack([p[0] for p in pairs]), [p[1] for p in pairs]
    ests = estimate_orientation_stack(stack, cfg.degeneracy_epsilon)
    alphas = np.array([0.0 if e.degenerate else -e.angle for e in ests])
    out = rotate_stack(stack, alphas, cfg.interp)
    degenerate = np.array([e.degenerate for e in ests])
    if degenerate.any():
        out[degenerate] = stack[degenerate]
    return out, ests
