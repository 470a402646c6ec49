"""Patch boundary refinement: linear intensity interpolation across seams.

After filtering, a patch's pixels can jump discontinuously against the
surrounding image. For every mask-boundary pixel with a significant
cross-boundary intensity change, two axis-aligned anchor pixels are picked,
band_width pixels to either side of the boundary, and every pixel strictly
between them is rewritten with the linear interpolation of the anchor
intensities: one equation form for vertical pairs (distinct y) and one for
horizontal pairs (shared y / distinct x). Anchors keep their values; RGB is
interpolated per channel, alpha is never touched.

Anchor selection is deterministic: boundary pixels are visited in row-major
order and overlapping fill segments resolve by first writer wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import RegionMask
from .raster import DimensionMismatchError, Image, PixelCoord


class AxisDispatchError(ValueError):
    """Wrong interpolation equation for the pair's orientation."""


@dataclass(frozen=True)
class RefineParams:
    """band_width: anchor distance each side of the boundary;
    jump_threshold: per-channel intensity difference counting as significant."""

    band_width: int = 3
    jump_threshold: float = 0.1

    def __post_init__(self):
        if self.band_width < 1:
            raise ValueError(f"band_width must be >=1, got {self.band_width}")
        if not 0.0 <= self.jump_threshold <= 1.0:
            raise ValueError(
                f"jump_threshold must be in [0, 1], got {self.jump_threshold}"
            )


@dataclass(frozen=True)
class BoundaryPair:
    """Axis-aligned anchor pixels and their captured RGB intensities."""

    p1: PixelCoord
    p2: PixelCoord
    i1: np.ndarray
    i2: np.ndarray

    def __post_init__(self):
        if self.p1 == self.p2:
            raise ValueError("anchor points must be distinct")
        if self.p1.x != self.p2.x and self.p1.y != self.p2.y:
            raise ValueError("anchor points must share a row or a column")
        object.__setattr__(self, "i1", np.asarray(self.i1, dtype=np.float64))
        object.__setattr__(self, "i2", np.asarray(self.i2, dtype=np.float64))

    @property
    def axis(self) -> str:
        """'h' when the pair shares a row, 'v' when it shares a column."""
        return "h" if self.p1.y == self.p2.y else "v"


def interp_vertical(pair: BoundaryPair, y: float) -> np.ndarray:
    """Intensity at row y on a vertical pair:
    Ip = (y - y2)/(y1 - y2) * I1 + (y1 - y)/(y1 - y2) * I2."""
    y1, y2 = pair.p1.y, pair.p2.y
    if y1 == y2:
        raise AxisDispatchError(
            "pair shares a row (same y); use interp_horizontal"
        )
    return ((y - y2) / (y1 - y2)) * pair.i1 + ((y1 - y) / (y1 - y2)) * pair.i2


def interp_horizontal(pair: BoundaryPair, x: float) -> np.ndarray:
    """Intensity at column x on a horizontal pair:
    Ip = (x2 - x)/(x2 - x1) * I1 + (x - x1)/(x2 - x1) * I2."""
    x1, x2 = pair.p1.x, pair.p2.x
    if x1 == x2:
        raise AxisDispatchError(
            "pair shares a column (same x); use interp_vertical"
        )
    return ((x2 - x) / (x2 - x1)) * pair.i1 + ((x - x1) / (x2 - x1)) * pair.i2


_UP, _DOWN, _LEFT, _RIGHT = (0, -1), (0, 1), (-1, 0), (1, 0)


def find_boundary_pairs(
    img: Image, mask: RegionMask, params: RefineParams
) -> list[BoundaryPair]:
    """Detect significant seams along the mask boundary.

    For each in-mask pixel with an in-image 4-neighbor outside the mask
    (row-major order): choose the crossing axis (the larger immediate
    cross-boundary jump when both axes cross; ties prefer vertical), place
    anchors band_width pixels inside and outside (shortened toward the
    boundary when geometry forces it, at least 1 each side, else skip), and
    emit the pair when the anchors' max-channel difference exceeds
    jump_threshold.
    """
    if (mask.width, mask.height) != (img.width, img.height):
        raise DimensionMismatchError(
            f"mask {mask.width}x{mask.height} != image {img.width}x{img.height}"
        )
    bits = mask.bits
    h, w = img.height, img.width
    rgb = img.data[:, :, :3]

    def in_image(x: int, y: int) -> bool:
        return 0 <= x < w and 0 <= y < h

    def jump_at(bx: int, by: int, nx: int, ny: int) -> float:
        return float(np.abs(rgb[by, bx] - rgb[ny, nx]).max())

    # Vectorized pre-pass: in-mask pixels with an in-image neighbor outside.
    outside = np.zeros((h, w), dtype=bool)
    outside[1:, :] |= ~bits[:-1, :]
    outside[:-1, :] |= ~bits[1:, :]
    outside[:, 1:] |= ~bits[:, :-1]
    outside[:, :-1] |= ~bits[:, 1:]
    boundary_ys, boundary_xs = np.nonzero(bits & outside)  # row-major order

    pairs: list[BoundaryPair] = []
    for by, bx in zip(boundary_ys.tolist(), boundary_xs.tolist()):
        out_v = [
            d for d in (_UP, _DOWN)
            if in_image(bx + d[0], by + d[1]) and not bits[by + d[1], bx + d[0]]
        ]
        out_h = [
            d for d in (_LEFT, _RIGHT)
            if in_image(bx + d[0], by + d[1]) and not bits[by + d[1], bx + d[0]]
        ]
        if not out_v and not out_h:
            continue
        if out_v and out_h:
            jv = max(jump_at(bx, by, bx + d[0], by + d[1]) for d in out_v)
            jh = max(jump_at(bx, by, bx + d[0], by + d[1]) for d in out_h)
            dirs = out_v if jv >= jh else out_h  # tie prefers vertical
        else:
            dirs = out_v or out_h
        if len(dirs) == 2:
            j0 = jump_at(bx, by, bx + dirs[0][0], by + dirs[0][1])
            j1 = jump_at(bx, by, bx + dirs[1][0], by + dirs[1][1])
            # tie prefers the negative (up/left) direction, listed first
            outward = dirs[0] if j0 >= j1 else dirs[1]
        else:
            outward = dirs[0]

        pair = _make_pair(rgb, bits, w, h, bx, by, outward, params.band_width)
        if pair is None:
            continue
        if float(np.abs(pair.i1 - pair.i2).max()) > params.jump_threshold:
            pairs.append(pair)
    return pairs


def _make_pair(
    rgb: np.ndarray,
    bits: np.ndarray,
    w: int,
    h: int,
    bx: int,
    by: int,
    outward: tuple[int, int],
    band: int,
) -> BoundaryPair | None:
    ox, oy = outward
    p1 = None
    for k in range(band, 0, -1):  # shorten toward the boundary if forced
        x, y = bx - k * ox, by - k * oy
        if 0 <= x < w and 0 <= y < h and bits[y, x]:
            p1 = PixelCoord(x, y)
            break
    if p1 is None:
        return None
    p2 = None
    for k in range(band, 0, -1):
        x, y = bx + k * ox, by + k * oy
        if 0 <= x < w and 0 <= y < h and not bits[y, x]:
            p2 = PixelCoord(x, y)
            break
    if p2 is None:
        return None
    return BoundaryPair(
        p1=p1, p2=p2, i1=rgb[p1.y, p1.x].copy(), i2=rgb[p2.y, p2.x].copy()
    )


def refine_boundary(img: Image, mask: RegionMask, params: RefineParams) -> Image:
    """Detect seams and fill them: find_boundary_pairs + fill_boundary_pairs."""
    return fill_boundary_pairs(img, find_boundary_pairs(img, mask, params))


def fill_boundary_pairs(img: Image, pairs: list[BoundaryPair]) -> Image:
    """Fill every emitted pair's in-between pixels with interpolated RGB.

    Anchors themselves are not written by their own pair; overlapping
    segments resolve per pixel by first writer wins, in emission order.
    All other pixels are copied bit-exact.
    """
    out = img.copy()
    written = np.zeros((img.height, img.width), dtype=bool)
    for pair in pairs:
        if pair.axis == "h":
            y = pair.p1.y
            step = 1 if pair.p2.x > pair.p1.x else -1
            for x in range(pair.p1.x + step, pair.p2.x, step):
                if written[y, x]:
                    continue
                out.data[y, x, :3] = np.clip(interp_horizontal(pair, x), 0.0, 1.0)
                written[y, x] = True
        else:
            x = pair.p1.x
            step = 1 if pair.p2.y > pair.p1.y else -1
            for y in range(pair.p1.y + step, pair.p2.y, step):
                if written[y, x]:
                    continue
                out.data[y, x, :3] = np.clip(interp_vertical(pair, y), 0.0, 1.0)
                written[y, x] = True
    return out


def pairs_debug_dump(pairs: list[BoundaryPair]) -> str:
    """Golden-test format: one 'x1,y1,x2,y2,axis' line per pair."""
    return "\n".join(
        f"{p.p1.x},{p.p1.y},{p.p2.x},{p.p2.y},{p.axis}" for p in pairs
    )
