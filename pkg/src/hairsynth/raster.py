"""Float-sample RGBA raster images and the pixel operations built on them.

Samples live in a (height, width, 4) float64 array with every channel in
[0, 1]. All operations are pure: callers' images are never mutated, results
are fresh arrays. Quantization to 8-bit happens only at encode time
(see codecs), so the three pipeline stages never cascade rounding error.
No gamma or color-space handling: arithmetic is on stored values as-is.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class DimensionMismatchError(ValueError):
    """Two images (or an image and a mask) must share dimensions."""


class EmptyRegionError(ValueError):
    """A region argument selected zero pixels."""


@dataclass(frozen=True)
class Color:
    """RGBA color, each component in [0, 1]."""

    r: float
    g: float
    b: float
    a: float = 1.0

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"color component {name}={v} outside [0, 1]")

    def rgba(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b, self.a], dtype=np.float64)


@dataclass(frozen=True)
class PixelCoord:
    """Integer pixel address: x column (left to right), y row (top down)."""

    x: int
    y: int


class Image:
    """Value-semantic RGBA raster with float64 channels in [0, 1]."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray, _validate: bool = True):
        if data.ndim != 3 or data.shape[2] != 4:
            raise ValueError(f"expected (h, w, 4) samples, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        data = np.asarray(data, dtype=np.float64)
        if _validate:
            if not np.all((data >= 0.0) & (data <= 1.0)):
                bad = float(data.min()), float(data.max())
                raise ValueError(f"channel values outside [0, 1]: min/max {bad}")
        self.data = data

    @classmethod
    def new(cls, width: int, height: int, fill: Color = Color(0, 0, 0, 1)) -> "Image":
        if width < 1 or height < 1:
            raise ValueError("image dimensions must be positive")
        data = np.empty((height, width, 4), dtype=np.float64)
        data[:, :] = fill.rgba()
        return cls(data, _validate=False)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "Image":
        return Image(self.data.copy(), _validate=False)

    def pixel(self, x: int, y: int) -> np.ndarray:
        return self.data[y, x]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Image)
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return f"Image({self.width}x{self.height})"


def _check_mask(img: Image, mask: np.ndarray | None) -> np.ndarray | None:
    if mask is None:
        return None
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (img.height, img.width):
        raise DimensionMismatchError(
            f"mask shape {mask.shape} != image shape {(img.height, img.width)}"
        )
    return mask


def composite_over(dst: Image, src: Image, region: np.ndarray | None = None) -> Image:
    """Source-over alpha compositing of src onto dst (straight alpha).

    Pixels outside `region` (a boolean (h, w) mask) are copied from dst
    bit-exact. Fully transparent src pixels leave dst pixels untouched.
    """
    if (dst.width, dst.height) != (src.width, src.height):
        raise DimensionMismatchError(
            f"src {src.width}x{src.height} != dst {dst.width}x{dst.height}"
        )
    region = _check_mask(dst, region)

    d = dst.data
    s = src.data
    sa = s[:, :, 3:4]
    da = d[:, :, 3:4]
    out_a = sa + da * (1.0 - sa)
    safe_a = np.where(out_a > 0.0, out_a, 1.0)
    out_rgb = (sa * s[:, :, :3] + da * (1.0 - sa) * d[:, :, :3]) / safe_a
    blended = np.concatenate([out_rgb, out_a], axis=2)
    # sa == 0 must be an exact no-op on dst, immune to rounding.
    blended = np.where(sa == 0.0, d, blended)
    if region is not None:
        blended = np.where(region[:, :, None], blended, d)
    return Image(np.clip(blended, 0.0, 1.0), _validate=False)


def mean_intensity(img: Image, region: np.ndarray | None = None) -> np.ndarray:
    """Arithmetic per-channel mean over the region (whole image if None)."""
    region = _check_mask(img, region)
    if region is None:
        return img.data.reshape(-1, 4).mean(axis=0)
    if not region.any():
        raise EmptyRegionError("region selects no pixels")
    return img.data[region].mean(axis=0)


def image_checksum(img: Image) -> str:
    """SHA-256 over dimensions and the 8-bit quantized RGBA samples.

    Quantization uses the same round-half-up rule as PNG/PPM encode, so the
    checksum is stable across any encoder and across runs.
    """
    q = quantize_u8(img.data)
    h = hashlib.sha256()
    h.update(img.width.to_bytes(8, "big"))
    h.update(img.height.to_bytes(8, "big"))
    h.update(q.tobytes())
    return h.hexdigest()


def quantize_u8(samples: np.ndarray) -> np.ndarray:
    """Map [0,1] floats to bytes with round-half-up, clamped to [0, 255]."""
    return np.clip(np.floor(samples * 255.0 + 0.5), 0, 255).astype(np.uint8)
