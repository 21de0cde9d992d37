"""Image representation and geometric resampling.

An image is a numpy float array with intensities in [0, 1]: shape (h, w)
for grayscale or (h, w, 3) for RGB. All operations are pure and return new
arrays; inputs are never mutated.

Rotation comes in two flavours. `rotate_circular` rotates only the
inscribed central disc of a square image, zeroing the corners, so content
is preserved under repeated rotation. `rotate_standard` is the usual
rotation onto an enlarged canvas, used once a rotation estimate is known
and the original image must be corrected.
"""

from __future__ import annotations

import math

import numpy as np

from .angles import wrap_angle

__all__ = [
    "check_image",
    "check_square_image",
    "to_grayscale",
    "center_square_crop",
    "resize_bilinear",
    "bilinear_sample",
    "rotate_circular",
    "rotate_standard",
]

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def check_image(img) -> np.ndarray:
    """Validate an image array and return it as float64.

    Accepts (h, w) grayscale or (h, w, 3) RGB with intensities in [0, 1].
    """
    arr = np.asarray(img, dtype=float)
    if arr.ndim == 2:
        pass
    elif arr.ndim == 3 and arr.shape[2] == 3:
        pass
    else:
        raise ValueError(
            f"expected (h, w) or (h, w, 3) image, got shape {arr.shape}"
        )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image intensities must lie in [0, 1]")
    return arr


def check_square_image(img) -> np.ndarray:
    """Validate an image and require equal height and width."""
    arr = check_image(img)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square image, got {arr.shape[:2]}")
    return arr


def to_grayscale(img) -> np.ndarray:
    """Convert RGB to single-channel luma; grayscale passes through."""
    arr = check_image(img)
    if arr.ndim == 2:
        return arr
    gray = (
        LUMA_WEIGHTS[0] * arr[:, :, 0]
        + LUMA_WEIGHTS[1] * arr[:, :, 1]
        + LUMA_WEIGHTS[2] * arr[:, :, 2]
    )
    return np.clip(gray, 0.0, 1.0)


def center_square_crop(img) -> np.ndarray:
    """Crop the largest central square; content is preserved verbatim."""
    arr = check_image(img)
    h, w = arr.shape[:2]
    s = min(h, w)
    y0 = (h - s) // 2
    x0 = (w - s) // 2
    return arr[y0 : y0 + s, x0 : x0 + s].copy()


def _sample_channel(chan: np.ndarray, xs: np.ndarray, ys: np.ndarray, fill: float) -> np.ndarray:
    """Bilinear sample of a 2-D channel at real coordinates.

    Corners falling outside [0, w-1] x [0, h-1] contribute `fill`.
    """
    h, w = chan.shape
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = xs - x0
    fy = ys - y0

    out = np.zeros(xs.shape, dtype=float)
    for dy, dx, wgt in (
        (0, 0, (1 - fx) * (1 - fy)),
        (0, 1, fx * (1 - fy)),
        (1, 0, (1 - fx) * fy),
        (1, 1, fx * fy),
    ):
        cx = x0 + dx
        cy = y0 + dy
        inside = (cx >= 0) & (cx < w) & (cy >= 0) & (cy < h)
        vals = np.where(
            inside,
            chan[np.clip(cy, 0, h - 1), np.clip(cx, 0, w - 1)],
            fill,
        )
        out += wgt * vals
    return out


def _sample_image(arr: np.ndarray, xs: np.ndarray, ys: np.ndarray, fill: float) -> np.ndarray:
    if arr.ndim == 2:
        return _sample_channel(arr, xs, ys, fill)
    return np.stack(
        [_sample_channel(arr[:, :, c], xs, ys, fill) for c in range(arr.shape[2])],
        axis=-1,
    )


def bilinear_sample(img, x: float, y: float, ch: int = 0) -> float:
    """Bilinear interpolation at a single real-valued pixel coordinate.

    Corners outside the image contribute the fill value 0. Integer
    coordinates return the exact pixel.
    """
    arr = check_image(img)
    chan = arr if arr.ndim == 2 else arr[:, :, ch]
    if arr.ndim == 2 and ch != 0:
        raise IndexError(f"channel {ch} out of range for grayscale image")
    return float(
        _sample_channel(chan, np.asarray([x], dtype=float), np.asarray([y], dtype=float), 0.0)[0]
    )


def resize_bilinear(img, w: int, h: int) -> np.ndarray:
    """Resize with bilinear interpolation and edge clamping.

    The source coordinate for output index i is (i + 0.5) * src/dst - 0.5,
    clamped to the valid source range.
    """
    arr = check_image(img)
    if w < 1 or h < 1:
        raise ValueError(f"target size must be >= 1, got {w}x{h}")
    src_h, src_w = arr.shape[:2]
    if (src_h, src_w) == (h, w):
        return arr.copy()
    xs = (np.arange(w, dtype=float) + 0.5) * (src_w / w) - 0.5
    ys = (np.arange(h, dtype=float) + 0.5) * (src_h / h) - 0.5
    xs = np.clip(xs, 0.0, src_w - 1.0)
    ys = np.clip(ys, 0.0, src_h - 1.0)
    gx, gy = np.meshgrid(xs, ys)
    return np.clip(_sample_image(arr, gx, gy, 0.0), 0.0, 1.0)


_QUADRANT_TRIG = {0.0: (1.0, 0.0), 90.0: (0.0, 1.0), 180.0: (-1.0, 0.0), 270.0: (0.0, -1.0)}


def _inverse_rotation_offsets(dx, dy, theta_deg: float):
    """Source-space offset that maps to output offset (dx, dy) under theta.

    Raster coordinates (y down): positive theta moves the left-of-center
    pixel to above-center. Multiples of 90 degrees use exact trig values so
    they resolve to exact pixel permutations.
    """
    quadrant = _QUADRANT_TRIG.get(theta_deg % 360.0)
    if quadrant is not None:
        c, s = quadrant
    else:
        rad = math.radians(theta_deg)
        c, s = math.cos(rad), math.sin(rad)
    return c * dx + s * dy, -s * dx + c * dy


def rotate_circular(img, theta) -> np.ndarray:
    """Rotate the inscribed central disc of a square image.

    Output has the same size. Pixels outside the disc of radius s/2 around
    the center (s-1)/2 are set to 0; pixels inside are bilinearly sampled
    from the source (fill 0 beyond the edge).
    """
    arr = check_square_image(img)
    theta = wrap_angle(theta)
    s = arr.shape[0]
    c = (s - 1) / 2.0
    r = s / 2.0

    idx = np.arange(s, dtype=float) - c
    dx, dy = np.meshgrid(idx, idx)
    inside = dx * dx + dy * dy <= r * r

    sx, sy = _inverse_rotation_offsets(dx, dy, theta)
    out = _sample_image(arr, sx + c, sy + c, 0.0)
    mask = inside if arr.ndim == 2 else inside[:, :, None]
    out = np.where(mask, out, 0.0)
    return np.clip(out, 0.0, 1.0)


def rotate_standard(img, theta, fill: float = 0.0) -> np.ndarray:
    """Rotate onto an enlarged canvas covering the rotated bounding box.

    Out-of-source samples take `fill`. No circular mask is applied.
    """
    arr = check_image(img)
    theta = wrap_angle(theta)
    h, w = arr.shape[:2]
    rad = math.radians(theta)
    ac, as_ = abs(math.cos(rad)), abs(math.sin(rad))
    out_w = int(round(w * ac + h * as_))
    out_h = int(round(w * as_ + h * ac))
    out_w = max(out_w, 1)
    out_h = max(out_h, 1)

    cx_out = (out_w - 1) / 2.0
    cy_out = (out_h - 1) / 2.0
    cx_in = (w - 1) / 2.0
    cy_in = (h - 1) / 2.0

    dx, dy = np.meshgrid(
        np.arange(out_w, dtype=float) - cx_out,
        np.arange(out_h, dtype=float) - cy_out,
    )
    sx, sy = _inverse_rotation_offsets(dx, dy, theta)
    out = _sample_image(arr, sx + cx_in, sy + cy_in, fill)
    return np.clip(out, 0.0, 1.0)
