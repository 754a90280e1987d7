"""Slow, independent reference implementations used as test oracles.

Nothing here imports the package under test.
"""

import math

from mpmath import mp, mpf


def bilinear_rotate(img, alpha):
    """Per-pixel inverse rotation about the centre, bilinear, zero fill.

    ``img`` is a list of rows. The output pixel at centred offset (i, j)
    reads the source at (cy, cx) + R(alpha) (i, j), with
    R = [[cos, -sin], [sin, cos]].
    """
    h, w = len(img), len(img[0])
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ca, sa = math.cos(alpha), math.sin(alpha)

    def px(r, c):
        if 0 <= r < h and 0 <= c < w:
            return img[r][c]
        return 0.0

    out = [[0.0] * w for _ in range(h)]
    for r in range(h):
        for c in range(w):
            i, j = r - cy, c - cx
            sr = cy + ca * i - sa * j
            sc = cx + sa * i + ca * j
            if not (0 <= sr <= h - 1 and 0 <= sc <= w - 1):
                continue
            r0, c0 = math.floor(sr), math.floor(sc)
            fr, fc = sr - r0, sc - c0
            out[r][c] = ((1 - fr) * (1 - fc) * px(r0, c0) + (1 - fr) * fc * px(r0, c0 + 1)
                         + fr * (1 - fc) * px(r0 + 1, c0) + fr * fc * px(r0 + 1, c0 + 1))
    return out


def circular_mean_mp(weights, angles, dps=50):
    """Weighted circular mean in arbitrary precision: (angle, magnitude)."""
    mp.dps = dps
    s = sum(mpf(w) * mp.sin(mpf(a)) for w, a in zip(weights, angles))
    c = sum(mpf(w) * mp.cos(mpf(a)) for w, a in zip(weights, angles))
    return float(mp.atan2(s, c)), float(mp.sqrt(s * s + c * c))


def image_orientation_mp(img, dps=50):
    """Orientation of a 2-d list image by direct summation over all pixels."""
    mp.dps = dps
    h, w = len(img), len(img[0])
    cy, cx = mpf(h - 1) / 2, mpf(w - 1) / 2
    weights, angles = [], []
    for r in range(h):
        for c in range(w):
            weights.append(img[r][c])
            angles.append(mp.atan2(r - cy, c - cx))
    return circular_mean_mp(weights, angles, dps)


def rot90_ccw_in_angle(img):
    """Exact lattice rotation that adds +pi/2 to every pixel direction.

    Offset (i, j) moves to (j, -i): new[cy + j][cx - i] = old[cy + i][cx + j].
    Square images only.
    """
    n = len(img)
    out = [[0.0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            # i = r - cy, j = c - cx, new row = cy + j = c, new col = cx - i = n - 1 - r
            out[c][n - 1 - r] = img[r][c]
    return out
