"""Directional streak convolution kernels.

A streak kernel's nonzero coefficients lie along an oriented path through
the kernel center: a straight line at `angle_deg` when curvature is zero,
otherwise a circular arc of signed curvature tangent to that angle at the
center. Cells within thickness/2 of the path get a Gaussian weight in the
arc-length distance from the center; everything else is exactly zero. The
grid is then scaled so the coefficients sum to `target_sum` (1 preserves
image brightness; other sums brighten or darken deliberately).

Angles are measured from the +x axis, clockwise, with y growing downward,
so 0 degrees smears horizontally and 90 degrees smears down the image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import Image


class KernelError(ValueError):
    """Invalid kernel construction request."""


@dataclass(frozen=True, eq=False)
class Kernel:
    """Odd-sized square coefficient grid, every coefficient in [0, 1]."""

    coeffs: np.ndarray

    def __eq__(self, other) -> bool:
        return isinstance(other, Kernel) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise KernelError(f"kernel must be square, got shape {c.shape}")
        if c.shape[0] % 2 == 0 or c.shape[0] < 1:
            raise KernelError(f"kernel size must be odd and >=1, got {c.shape[0]}")
        if np.any(c < 0.0) or np.any(c > 1.0):
            raise KernelError("kernel coefficients must lie in [0, 1]")
        object.__setattr__(self, "coeffs", c)

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    @property
    def radius(self) -> int:
        return self.coeffs.shape[0] // 2

    def coeff_sum(self) -> float:
        return float(self.coeffs.sum())

    def taps(self) -> list[tuple[int, int, float]]:
        """Nonzero (dx, dy, coeff) triples relative to the kernel center."""
        r = self.radius
        ys, xs = np.nonzero(self.coeffs)
        return [
            (int(x) - r, int(y) - r, float(self.coeffs[y, x]))
            for y, x in zip(ys, xs)
        ]


@dataclass(frozen=True)
class StreakKernelParams:
    """Parametric controls for the streak family.

    size: odd grid size; larger grids smear farther (longer-looking hair).
    angle_deg: streak direction, 0 = horizontal, clockwise with y down.
    curvature: signed 1/pixels; 0 is a straight streak, sign picks the
        bend side, magnitude the curl tightness.
    thickness: width of the path band that receives nonzero weight.
    falloff_sigma: Gaussian decay scale of tap weight with arc length.
    target_sum: post-normalization coefficient sum (1 = brightness neutral).
    """

    size: int = 19
    angle_deg: float = 0.0
    curvature: float = 0.0
    thickness: float = 1.2
    falloff_sigma: float = 5.0
    target_sum: float = 1.0

    def __post_init__(self):
        if self.size < 3 or self.size % 2 == 0:
            raise KernelError(f"size must be odd and >=3, got {self.size}")
        if self.thickness < 0.5:
            raise KernelError(f"thickness must be >=0.5, got {self.thickness}")
        if self.falloff_sigma <= 0.0:
            raise KernelError(f"falloff_sigma must be >0, got {self.falloff_sigma}")
        if self.target_sum <= 0.0:
            raise KernelError(f"target_sum must be >0, got {self.target_sum}")


_STRAIGHT_CURVATURE_EPS = 1e-9


def make_streak_kernel(p: StreakKernelParams) -> Kernel:
    """Build the streak kernel for the given parameters."""
    r = p.size // 2
    theta = math.radians(p.angle_deg)
    dir_x, dir_y = math.cos(theta), math.sin(theta)

    # Cell centers relative to the kernel center.
    ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
    xs = xs.astype(np.float64)
    ys = ys.astype(np.float64)

    if abs(p.curvature) < _STRAIGHT_CURVATURE_EPS:
        # Straight path: signed projection gives arc length, rejection the
        # perpendicular distance.
        along = xs * dir_x + ys * dir_y
        across = np.abs(xs * (-dir_y) + ys * dir_x)
        arc = np.abs(along)
    else:
        # Circle tangent to the direction at the kernel center; the center
        # of curvature sits at signed radius 1/curvature along the normal.
        radius_signed = 1.0 / p.curvature
        nx, ny = -dir_y, dir_x
        cx, cy = radius_signed * nx, radius_signed * ny
        radius = abs(radius_signed)
        d_center = np.hypot(xs - cx, ys - cy)
        across = np.abs(d_center - radius)
        # Arc length = radius * angle between the kernel center and the
        # cell's nearest point on the circle, as seen from the circle center.
        a0 = math.atan2(0.0 - cy, 0.0 - cx)
        ang = np.arctan2(ys - cy, xs - cx) - a0
        ang = np.abs((ang + math.pi) % (2.0 * math.pi) - math.pi)
        arc = radius * ang

    on_path = across <= p.thickness / 2.0
    assert bool(on_path[r, r]), "center cell always lies on the path"
    weights = np.where(
        on_path, np.exp(-(arc**2) / (2.0 * p.falloff_sigma**2)), 0.0
    )
    total = float(weights.sum())
    coeffs = weights * (p.target_sum / total)
    return Kernel(coeffs)


def identity_kernel(size: int) -> Kernel:
    """Center coefficient 1, all others 0. Convolution no-op fixture."""
    if size < 1 or size % 2 == 0:
        raise KernelError(f"size must be odd and >=1, got {size}")
    c = np.zeros((size, size), dtype=np.float64)
    c[size // 2, size // 2] = 1.0
    return Kernel(c)


def normalize_kernel(k: Kernel, target_sum: float = 1.0) -> Kernel:
    """Rescale coefficients so they sum to target_sum."""
    if target_sum <= 0.0:
        raise KernelError(f"target_sum must be >0, got {target_sum}")
    total = float(np.abs(k.coeffs).sum())
    if total == 0.0:
        raise KernelError("cannot normalize an all-zero kernel")
    return Kernel(k.coeffs * (target_sum / total))


def kernel_preview(k: Kernel, scale: int = 1) -> Image:
    """Visualize the grid: zero cells white, positive cells red-shaded.

    Red intensity is proportional to coeff / max coeff; `scale` upsamples
    with hard cell edges.
    """
    if scale < 1:
        raise ValueError(f"scale must be >=1, got {scale}")
    c = k.coeffs
    cmax = float(c.max())
    t = c / cmax if cmax > 0.0 else np.zeros_like(c)
    rgba = np.empty((k.size, k.size, 4), dtype=np.float64)
    rgba[:, :, 0] = 1.0
    rgba[:, :, 1] = 1.0 - t
    rgba[:, :, 2] = 1.0 - t
    rgba[:, :, 3] = 1.0
    if scale > 1:
        rgba = np.repeat(np.repeat(rgba, scale, axis=0), scale, axis=1)
    return Image(rgba, _validate=False)
