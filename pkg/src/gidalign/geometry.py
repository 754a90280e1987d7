"""Coordinate-frame and circular-statistics primitives.

Angles are plain floats in radians, kept in the half-open range [-pi, pi).
The angular origin is the +column axis and angles grow towards +row, i.e.
``atan2(row_offset, col_offset)`` with rows pointing down the screen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

#: Relative resultant length below which an orientation is considered undefined.
DEFAULT_DEGENERACY_EPSILON = 1e-9


def wrap_angle(a):
    """Wrap an angle (scalar or array) into [-pi, pi).

    Values already inside the range are returned unchanged.
    """
    if np.ndim(a) == 0:
        a = float(a)
        if -math.pi <= a < math.pi:
            return a
        r = (a + math.pi) % TWO_PI - math.pi
        # float modulo can land exactly on the open end
        return -math.pi if r >= math.pi else r
    a = np.asarray(a, dtype=np.float64)
    inside = (a >= -math.pi) & (a < math.pi)
    r = np.mod(a + math.pi, TWO_PI) - math.pi
    r = np.where(r >= math.pi, -math.pi, r)
    return np.where(inside, a, r)


def angle_difference(a, b):
    """Signed wrapped difference ``a - b`` in [-pi, pi)."""
    return wrap_angle(np.subtract(a, b))


@dataclass(frozen=True)
class Center:
    """Pivot of an image, in (row, column) pixel units."""

    cy: float
    cx: float


@dataclass(frozen=True)
class OrientationEstimate:
    """Result of an intensity-weighted circular mean.

    Attributes
    ----------
    angle : float
        Mean direction in [-pi, pi). Zero when ``degenerate``.
    magnitude : float
        Resultant length ``hypot(S_sin, S_cos)``.
    degenerate : bool
        True when the resultant is too short for the angle to mean anything.
    """

    angle: float
    magnitude: float
    degenerate: bool

    @property
    def angle_deg(self) -> float:
        return math.degrees(self.angle)


def image_center(height: int, width: int) -> Center:
    """Return ``((H - 1) / 2, (W - 1) / 2)``."""
    for name, n in (("height", height), ("width", width)):
        if int(n) != n or n < 1:
            raise ValueError(f"invalid {name}: {n!r} (must be a positive integer)")
    return Center((height - 1) / 2.0, (width - 1) / 2.0)


def pixel_angle(row_offset: float, col_offset: float) -> float:
    """Direction of a centred coordinate; ``pixel_angle(0, 0) == 0``."""
    return wrap_angle(math.atan2(row_offset, col_offset))


def centered_angle_grid(height: int, width: int) -> np.ndarray:
    """Per-pixel angles about the image centre, shape ``(H, W)``."""
    c = image_center(height, width)
    rows = np.arange(height, dtype=np.float64) - c.cy
    cols = np.arange(width, dtype=np.float64) - c.cx
    return wrap_angle(np.arctan2(rows[:, None], cols[None, :]))


# weights are renormalised by their peak onto this fixed-point grid before the
# angle is taken, so a global intensity scale cancels bit-for-bit
_ANGLE_GRID = float(2 ** 20)


def scale_normalized(weights: np.ndarray) -> np.ndarray:
    """Weights divided by their row-wise peak, rounded to a 2**-20 grid.

    Accepts shape ``(n,)`` or ``(N, n)``. All-zero rows stay zero.
    """
    w = np.asarray(weights, dtype=np.float64)
    peak = w.max(axis=-1, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    return np.rint(w / safe * _ANGLE_GRID)


def resultant(s_sin: float, s_cos: float, total_weight: float,
              epsilon: float = DEFAULT_DEGENERACY_EPSILON,
              angle_sums: tuple[float, float] | None = None) -> OrientationEstimate:
    """Build an estimate from accumulated sine/cosine sums.

    ``angle_sums`` optionally supplies the (sin, cos) pair the angle is read
    from; magnitude and degeneracy always use ``s_sin``/``s_cos``.
    """
    magnitude = math.hypot(s_sin, s_cos)
    # an all-zero weight vector has no direction either
    degenerate = total_weight <= 0.0 or magnitude < epsilon * total_weight
    if degenerate:
        return OrientationEstimate(0.0, magnitude, True)
    a_sin, a_cos = angle_sums if angle_sums is not None else (s_sin, s_cos)
    return OrientationEstimate(wrap_angle(math.atan2(a_sin, a_cos)), magnitude, False)


def weighted_circular_mean(weights, angles,
                           epsilon: float = DEFAULT_DEGENERACY_EPSILON
                           ) -> OrientationEstimate:
    """Intensity-weighted circular mean of a set of angles.

    Parameters
    ----------
    weights : array_like of shape (n,)
        Non-negative weights.
    angles : array_like of shape (n,)
        Angles in radians.
    epsilon : float
        Relative degeneracy threshold; the estimate is flagged degenerate
        when the resultant length is below ``epsilon * sum(weights)``.

    Returns
    -------
    OrientationEstimate
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    t = np.asarray(angles, dtype=np.float64).ravel()
    if w.shape != t.shape:
        raise ValueError(
            f"weights and angles differ in length ({w.size} != {t.size})")
    if w.size == 0:
        raise ValueError("weighted_circular_mean needs at least one term")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    sin_t, cos_t = np.sin(t), np.cos(t)
    q = scale_normalized(w)
    return resultant(float(np.dot(w, sin_t)), float(np.dot(w, cos_t)),
                     float(w.sum()), epsilon,
                     angle_sums=(float(np.dot(q, sin_t)), float(np.dot(q, cos_t))))
