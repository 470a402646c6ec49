"""Masked 2D convolution: the stage that turns stylized strokes into hair.

Semantics shared by both paths:
  - correlation orientation (no kernel flip); the kernel center addresses
    the source pixel, other cells its neighbors
  - destination-masked, source-unmasked: only mask pixels are rewritten,
    but they may read surrounding pixels, which is what blends hair into
    scalp and background
  - reads come from the original image only (no in-place feedback)
  - out-of-image reads clamp to the nearest edge pixel, which keeps sum-1
    kernels exact on constant images all the way to the borders
  - RGB is convolved, alpha is copied; results clamp to [0, 1]
  - accumulation is float64 regardless of storage

convolve_naive iterates every kernel cell and is the in-tree oracle for
convolve_fast, which iterates only the nonzero taps (streak kernels are
mostly zeros) and may process the masked bounding box in row tiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import DegeneratePolygonError, Point
from .kernels import Kernel
from .raster import DimensionMismatchError, Image


class NonConstantImageError(ValueError):
    """brightness_response is only defined on constant images."""


@dataclass(frozen=True)
class RegionMask:
    """Boolean pixel-membership grid matching a target image's dimensions."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=bool)
        if b.ndim != 2:
            raise ValueError(f"mask must be 2D, got shape {b.shape}")
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def full(cls, width: int, height: int) -> "RegionMask":
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def empty(cls, width: int, height: int) -> "RegionMask":
        return cls(np.zeros((height, width), dtype=bool))

    def count(self) -> int:
        return int(self.bits.sum())


def rasterize_polygon(polygon: Sequence[Point], width: int, height: int) -> RegionMask:
    """Scanline fill: pixel (x, y) is set iff its center (x+0.5, y+0.5)
    is inside the polygon under the even-odd rule."""
    if len(polygon) < 3:
        raise DegeneratePolygonError(
            f"polygon needs >=3 vertices, got {len(polygon)}"
        )
    bits = np.zeros((height, width), dtype=bool)
    n = len(polygon)
    for row in range(height):
        yc = row + 0.5
        crossings = []
        for i in range(n):
            x1, y1 = polygon[i]
            x2, y2 = polygon[(i + 1) % n]
            if (y1 <= yc < y2) or (y2 <= yc < y1):
                crossings.append(x1 + (yc - y1) * (x2 - x1) / (y2 - y1))
        crossings.sort()
        for a, b in zip(crossings[0::2], crossings[1::2]):
            # centers x+0.5 in the half-open span [a, b)
            x_lo = max(0, int(np.ceil(a - 0.5)))
            x_hi = min(width - 1, int(np.ceil(b - 0.5)) - 1)
            if x_hi >= x_lo:
                bits[row, x_lo : x_hi + 1] = True
    return RegionMask(bits)


def _check_mask_dims(img: Image, mask: RegionMask | None):
    if mask is not None and (mask.width, mask.height) != (img.width, img.height):
        raise DimensionMismatchError(
            f"mask {mask.width}x{mask.height} != image {img.width}x{img.height}"
        )


def _padded_rgb(img: Image, radius: int) -> np.ndarray:
    return np.pad(
        img.data[:, :, :3], ((radius, radius), (radius, radius), (0, 0)), mode="edge"
    )


def convolve_naive(img: Image, k: Kernel, mask: RegionMask | None = None) -> Image:
    """Reference path: visits every kernel cell, zeros included."""
    _check_mask_dims(img, mask)
    h, w = img.height, img.width
    r = k.radius
    padded = _padded_rgb(img, r)
    acc = np.zeros((h, w, 3), dtype=np.float64)
    for ky in range(k.size):
        for kx in range(k.size):
            coeff = k.coeffs[ky, kx]
            acc += coeff * padded[ky : ky + h, kx : kx + w]
    np.clip(acc, 0.0, 1.0, out=acc)
    out = img.data.copy()
    if mask is None:
        out[:, :, :3] = acc
    else:
        out[mask.bits, :3] = acc[mask.bits]
    return Image(out, _validate=False)


def convolve_fast(
    img: Image, k: Kernel, mask: RegionMask, tile_rows: int | None = None
) -> Image:
    """Sparse path: iterates only nonzero taps, restricted to the mask's
    bounding box, optionally in row tiles. Matches convolve_naive within
    1e-6 per channel (summation order is the only difference)."""
    _check_mask_dims(img, mask)
    out = img.data.copy()
    if not mask.bits.any():
        return Image(out, _validate=False)

    rows = np.flatnonzero(mask.bits.any(axis=1))
    cols = np.flatnonzero(mask.bits.any(axis=0))
    y0, y1 = int(rows[0]), int(rows[-1])
    x0, x1 = int(cols[0]), int(cols[-1])
    r = k.radius
    taps = k.taps()

    padded = _padded_rgb(img, r)
    if tile_rows is None or tile_rows <= 0:
        tile_rows = y1 - y0 + 1
    for ty in range(y0, y1 + 1, tile_rows):
        ty1 = min(ty + tile_rows - 1, y1)
        th = ty1 - ty + 1
        tw = x1 - x0 + 1
        acc = np.zeros((th, tw, 3), dtype=np.float64)
        for dx, dy, coeff in taps:
            acc += coeff * padded[
                ty + dy + r : ty + dy + r + th, x0 + dx + r : x0 + dx + r + tw
            ]
        np.clip(acc, 0.0, 1.0, out=acc)
        sub = mask.bits[ty : ty1 + 1, x0 : x1 + 1]
        region = out[ty : ty1 + 1, x0 : x1 + 1]
        region[sub, :3] = acc[sub]
    return Image(out, _validate=False)


def brightness_response(img: Image, k: Kernel) -> np.ndarray:
    """Convolve a constant image and return its (constant) RGB response.

    Test instrument for the kernel-sum brightness law: a kernel with
    coefficient sum s maps a constant c to clamp(s*c). Raises
    NonConstantImageError when the input is not constant.
    """
    first = img.data[0, 0]
    if not np.all(img.data == first):
        raise NonConstantImageError("brightness_response requires a constant image")
    out = convolve_naive(img, k)
    return out.data[0, 0, :3].copy()
