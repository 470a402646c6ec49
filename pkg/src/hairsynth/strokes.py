"""Stylized hair stroke generation and rasterization (the drawing stage).

A patch's strokes are a pure function of (patch, seed). Stroke roots come
from stratified sampling: a jittered grid over the polygon's bounding box
with rejection against the polygon, which avoids clumping at low density.
Every per-stroke random draw happens on a substream keyed by the stroke
index, so stroke k never depends on how many values other strokes consumed.

Stroke spines grow from their root along the patch direction (plus angular
jitter), carry a single-sinusoid lateral waviness, and are truncated where
the baseline leaves the polygon: drawn hair stays inside its patch, so a
patch render touches nothing beyond the polygon dilated by stroke width,
waviness amplitude and the 1px antialiasing ramp.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    DegeneratePolygonError,
    Point,
    point_in_polygon,
    polygon_area,
    polygon_bounds,
    polygon_is_simple,
)
from .kernels import Kernel, StreakKernelParams
from .raster import Color, Image
from .rng import SplitMix64

__all__ = [
    "HairStroke",
    "StrokeParams",
    "HairPatch",
    "polygon_area",
    "generate_strokes",
    "rasterize_stroke",
    "draw_patch",
    "strokes_to_json",
]

# Fixed taper: tips narrow to this fraction of the base width.
TAPER_RATIO = 0.2
# Generated strokes composite at full opacity (opaque ink).
STROKE_OPACITY = 1.0

_ROOT_KEY = 0x526F6F74  # stream tags for substream derivation
_STROKE_KEY = 0x5374726B


@dataclass(frozen=True)
class HairStroke:
    """One drawn hair: a tapered, antialiased polyline."""

    spine: tuple[Point, ...]
    base_width: float
    tip_width: float
    color: Color
    opacity: float

    def __post_init__(self):
        if len(self.spine) < 2:
            raise ValueError(f"spine needs >=2 points, got {len(self.spine)}")
        if self.base_width <= 0.0:
            raise ValueError(f"base_width must be >0, got {self.base_width}")
        if not 0.0 <= self.tip_width <= self.base_width:
            raise ValueError("tip_width must satisfy 0 <= tip <= base (hairs taper)")
        if not 0.0 <= self.opacity <= 1.0:
            # 0 is allowed as the degenerate invisible stroke.
            raise ValueError(f"opacity must be in [0, 1], got {self.opacity}")


@dataclass(frozen=True)
class StrokeParams:
    """Statistical controls for a patch's stroke population."""

    density: float = 6.0  # strokes per 1000 px^2
    length_range: tuple[float, float] = (12.0, 28.0)
    width_range: tuple[float, float] = (1.2, 2.4)
    color_base: Color = field(default_factory=lambda: Color(0.13, 0.09, 0.05))
    color_jitter: float = 0.04
    waviness_amp: float = 1.0
    waviness_freq: float = 1.2  # cycles per 100 px of stroke length
    direction_deg: float = 90.0  # 0 = rightward, clockwise (y down)
    spread_deg: float = 12.0
    segments_per_stroke: int = 12

    def __post_init__(self):
        if self.density < 0.0:
            raise ValueError(f"density must be >=0, got {self.density}")
        for name in ("length_range", "width_range"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0.0:
                raise ValueError(f"{name} must satisfy 0 <= min <= max, got {lo}..{hi}")
        if self.width_range[0] <= 0.0:
            raise ValueError("width_range minimum must be >0")
        if not 0.0 <= self.color_jitter <= 1.0:
            raise ValueError(f"color_jitter must be in [0, 1], got {self.color_jitter}")
        if self.waviness_amp < 0.0 or self.waviness_freq < 0.0:
            raise ValueError("waviness amplitude/frequency must be >=0")
        if self.spread_deg < 0.0:
            raise ValueError(f"spread_deg must be >=0, got {self.spread_deg}")
        if self.segments_per_stroke < 2:
            raise ValueError(
                f"segments_per_stroke must be >=2, got {self.segments_per_stroke}"
            )


@dataclass(frozen=True)
class HairPatch:
    """User-authored polygonal region plus its per-stage parameters."""

    polygon: tuple[Point, ...]
    stroke_params: StrokeParams = field(default_factory=StrokeParams)
    kernel_params: StreakKernelParams | Kernel = field(
        default_factory=StreakKernelParams
    )
    refine_params: "RefineParams | None" = None

    def __post_init__(self):
        polygon_area(self.polygon)  # raises DegeneratePolygonError
        if not polygon_is_simple(self.polygon):
            raise DegeneratePolygonError("polygon is self-intersecting")
        object.__setattr__(self, "polygon", tuple(map(tuple, self.polygon)))
        if self.refine_params is None:
            from .refine import RefineParams

            object.__setattr__(self, "refine_params", RefineParams())

    def kernel(self) -> Kernel:
        if isinstance(self.kernel_params, Kernel):
            return self.kernel_params
        from .kernels import make_streak_kernel

        return make_streak_kernel(self.kernel_params)


def stroke_count(density: float, area: float) -> int:
    """Count law: round(density * area / 1000), rounding half up."""
    return int(math.floor(density * area / 1000.0 + 0.5))


def _sample_roots(
    polygon: tuple[Point, ...], n: int, rng: SplitMix64
) -> list[Point]:
    """Stratified roots: jittered grid over the bbox, rejected to the polygon."""
    if n == 0:
        return []
    area = polygon_area(polygon)
    x0, y0, x1, y1 = polygon_bounds(polygon)
    bw, bh = x1 - x0, y1 - y0
    if bw <= 0.0 or bh <= 0.0:
        raise DegeneratePolygonError("polygon bounding box is degenerate")
    # Cell count sized so one pass over the grid yields ~n in-polygon hits.
    m = max(1, int(math.ceil(n * (bw * bh) / area)))
    nx = max(1, int(math.ceil(math.sqrt(m * bw / bh))))
    ny = max(1, int(math.ceil(m / nx)))
    cell_w, cell_h = bw / nx, bh / ny

    roots: list[Point] = []
    for p in range(10_000):
        for j in range(nx * ny):
            stream = rng.substream(_ROOT_KEY, p, j)
            cx, cy = j % nx, j // nx
            x = x0 + (cx + stream.next_float()) * cell_w
            y = y0 + (cy + stream.next_float()) * cell_h
            if point_in_polygon(x, y, polygon):
                roots.append((x, y))
                if len(roots) == n:
                    return roots
    raise DegeneratePolygonError(
        "could not place stroke roots inside polygon (zero usable area?)"
    )


def generate_strokes(patch: HairPatch, seed: int) -> list[HairStroke]:
    """Generate the patch's stroke population. Deterministic in (patch, seed)."""
    sp = patch.stroke_params
    area = polygon_area(patch.polygon)
    n = stroke_count(sp.density, area)
    rng = SplitMix64(seed)
    roots = _sample_roots(patch.polygon, n, rng)

    strokes: list[HairStroke] = []
    for k, root in enumerate(roots):
        s = rng.substream(_STROKE_KEY, k)
        angle = math.radians(sp.direction_deg + s.uniform(-sp.spread_deg, sp.spread_deg))
        length = s.uniform(*sp.length_range)
        base_width = s.uniform(*sp.width_range)
        phase = s.uniform(0.0, 2.0 * math.pi)
        jr = s.uniform(-sp.color_jitter, sp.color_jitter)
        jg = s.uniform(-sp.color_jitter, sp.color_jitter)
        jb = s.uniform(-sp.color_jitter, sp.color_jitter)
        cb = sp.color_base
        color = Color(
            min(1.0, max(0.0, cb.r + jr)),
            min(1.0, max(0.0, cb.g + jg)),
            min(1.0, max(0.0, cb.b + jb)),
            cb.a,
        )
        spine = _build_spine(patch.polygon, root, angle, length, sp, phase)
        strokes.append(
            HairStroke(
                spine=spine,
                base_width=base_width,
                tip_width=base_width * TAPER_RATIO,
                color=color,
                opacity=STROKE_OPACITY,
            )
        )
    return strokes


def _build_spine(
    polygon: tuple[Point, ...],
    root: Point,
    angle: float,
    length: float,
    sp: StrokeParams,
    phase: float,
) -> tuple[Point, ...]:
    """March from the root along the growth direction, truncating the
    baseline at the polygon boundary, then add sinusoidal lateral offset."""
    dx, dy = math.cos(angle), math.sin(angle)
    px, py = -dy, dx  # lateral (perpendicular) direction
    step = length / sp.segments_per_stroke

    baseline: list[tuple[float, float, float]] = [(root[0], root[1], 0.0)]
    for i in range(1, sp.segments_per_stroke + 1):
        t = i * step
        bx, by = root[0] + t * dx, root[1] + t * dy
        if not point_in_polygon(bx, by, polygon):
            break
        baseline.append((bx, by, t))
    if len(baseline) < 2:
        # Root sits against the boundary heading out; keep a sub-pixel stub.
        t = min(0.5, step)
        baseline.append((root[0] + t * dx, root[1] + t * dy, t))

    spine = []
    for bx, by, t in baseline:
        lateral = sp.waviness_amp * math.sin(
            2.0 * math.pi * sp.waviness_freq * t / 100.0 + phase
        )
        spine.append((bx + lateral * px, by + lateral * py))
    return tuple(spine)


def rasterize_stroke(img: Image, stroke: HairStroke) -> Image:
    """Composite one antialiased, tapered stroke over the image.

    Per-pixel coverage is clamp(halfwidth - dist + 0.5, 0, 1) where dist is
    the distance from the pixel center to the spine and halfwidth tapers
    linearly with arc length. Pixels farther than width/2 + 1 from the
    spine are untouched; out-of-bounds spine portions clip silently.
    """
    out = img.copy()
    _rasterize_stroke_into(out.data, stroke)
    return out


def _rasterize_stroke_into(data: np.ndarray, stroke: HairStroke) -> None:
    height, width = data.shape[:2]
    pts = np.asarray(stroke.spine, dtype=np.float64)

    pad = stroke.base_width / 2.0 + 1.5
    x_lo = max(0, int(math.floor(pts[:, 0].min() - pad)))
    x_hi = min(width - 1, int(math.ceil(pts[:, 0].max() + pad)))
    y_lo = max(0, int(math.floor(pts[:, 1].min() - pad)))
    y_hi = min(height - 1, int(math.ceil(pts[:, 1].max() + pad)))
    if x_lo > x_hi or y_lo > y_hi:
        return

    ys, xs = np.mgrid[y_lo : y_hi + 1, x_lo : x_hi + 1]
    cx = xs + 0.5
    cy = ys + 0.5

    best_d2 = np.full(cx.shape, np.inf)
    best_arc = np.zeros(cx.shape)
    arc_acc = 0.0
    for i in range(len(pts) - 1):
        ax, ay = pts[i]
        bx, by = pts[i + 1]
        sx, sy = bx - ax, by - ay
        seg_len2 = sx * sx + sy * sy
        if seg_len2 == 0.0:
            continue
        seg_len = math.sqrt(seg_len2)
        t = np.clip(((cx - ax) * sx + (cy - ay) * sy) / seg_len2, 0.0, 1.0)
        ddx = cx - (ax + t * sx)
        ddy = cy - (ay + t * sy)
        d2 = ddx * ddx + ddy * ddy
        closer = d2 < best_d2
        best_d2 = np.where(closer, d2, best_d2)
        best_arc = np.where(closer, arc_acc + t * seg_len, best_arc)
        arc_acc += seg_len
    if arc_acc == 0.0:
        return

    frac = best_arc / arc_acc
    halfwidth = (stroke.base_width + (stroke.tip_width - stroke.base_width) * frac) / 2.0
    coverage = np.clip(halfwidth - np.sqrt(best_d2) + 0.5, 0.0, 1.0)

    sa = coverage * stroke.opacity * stroke.color.a
    region = data[y_lo : y_hi + 1, x_lo : x_hi + 1]
    da = region[:, :, 3]
    out_a = sa + da * (1.0 - sa)
    safe_a = np.where(out_a > 0.0, out_a, 1.0)
    src_rgb = np.array([stroke.color.r, stroke.color.g, stroke.color.b])
    blended = np.empty_like(region)
    blended[:, :, :3] = (
        sa[:, :, None] * src_rgb + (da * (1.0 - sa))[:, :, None] * region[:, :, :3]
    ) / safe_a[:, :, None]
    blended[:, :, 3] = out_a
    touched = sa > 0.0
    region[touched] = np.clip(blended[touched], 0.0, 1.0)


def draw_patch(img: Image, patch: HairPatch, seed: int) -> Image:
    """Render all of a patch's strokes in generation (painter's) order."""
    strokes = generate_strokes(patch, seed)
    out = img.copy()
    for stroke in strokes:
        _rasterize_stroke_into(out.data, stroke)
    return out


def strokes_to_json(strokes: list[HairStroke]) -> str:
    """Deterministic debug serialization used by golden tests."""
    payload = [
        {
            "spine": [[x, y] for x, y in s.spine],
            "base_width": s.base_width,
            "tip_width": s.tip_width,
            "color": [s.color.r, s.color.g, s.color.b, s.color.a],
            "opacity": s.opacity,
        }
        for s in strokes
    ]
    return json.dumps(payload, separators=(",", ":"))
