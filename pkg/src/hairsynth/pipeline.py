"""Stage orchestration: draw, filter and refine each patch in scene order.

Patches execute in list order; a later patch's strokes composite over an
earlier patch's refined output. Each patch gets its own seed, mixed from
the global seed and the patch index, so inserting or removing a patch never
perturbs the strokes of the others. The whole render is a pure function of
(image, scene): identical inputs give byte-identical encoded outputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .filters import convolve_fast, rasterize_polygon
from .geometry import polygon_area
from .raster import Image, image_checksum
from .refine import fill_boundary_pairs, find_boundary_pairs
from .rng import derive_seed
from .scene import SceneSpec, SceneValidationError
from .strokes import HairPatch, _rasterize_stroke_into, generate_strokes

_PATCH_SEED_KEY = 0x50617463

STAGE_ORDER = {"draw": 0, "filter": 1, "refine": 2}


class PipelineError(RuntimeError):
    """Stage failure annotated with patch index and stage name."""

    def __init__(self, patch_index: int, stage: str, cause: Exception):
        super().__init__(f"patch {patch_index}, stage {stage}: {cause}")
        self.patch_index = patch_index
        self.stage = stage
        self.__cause__ = cause


@dataclass(frozen=True)
class StageTiming:
    patch: int
    stage: str
    ms: float


@dataclass
class RenderReport:
    """Per-patch, per-executed-stage timings plus counts and the output
    checksum, emitted as a flat key=value text artifact."""

    timings: list[StageTiming] = field(default_factory=list)
    stroke_counts: dict[int, int] = field(default_factory=dict)
    pair_counts: dict[int, int] = field(default_factory=dict)
    checksum: str = ""

    def to_text(self) -> str:
        lines = [f"checksum={self.checksum}"]
        by_patch: dict[int, list[StageTiming]] = {}
        for t in self.timings:
            by_patch.setdefault(t.patch, []).append(t)
        for patch in sorted(by_patch):
            if patch in self.stroke_counts:
                lines.append(f"patch.{patch}.strokes={self.stroke_counts[patch]}")
            for t in sorted(by_patch[patch], key=lambda t: STAGE_ORDER[t.stage]):
                lines.append(f"patch.{patch}.{t.stage}.ms={t.ms:.3f}")
            if patch in self.pair_counts:
                lines.append(f"patch.{patch}.refine.pairs={self.pair_counts[patch]}")
        return "\n".join(lines) + "\n"


def clip_patch_to_image(patch: HairPatch, width: int, height: int) -> HairPatch:
    """Clip the patch polygon to the image rectangle.

    Patches fully inside pass through untouched; protruding ones are clipped
    (Sutherland-Hodgman) and must keep positive area.
    """
    xs = [p[0] for p in patch.polygon]
    ys = [p[1] for p in patch.polygon]
    if min(xs) >= 0 and min(ys) >= 0 and max(xs) <= width and max(ys) <= height:
        return patch

    from .geometry import clip_polygon_to_rect

    clipped = clip_polygon_to_rect(patch.polygon, float(width), float(height))
    deduped: list[tuple[float, float]] = []
    for pt in clipped:
        if not deduped or abs(pt[0] - deduped[-1][0]) + abs(pt[1] - deduped[-1][1]) > 1e-9:
            deduped.append(pt)
    if len(deduped) >= 2 and (
        abs(deduped[0][0] - deduped[-1][0]) + abs(deduped[0][1] - deduped[-1][1]) <= 1e-9
    ):
        deduped.pop()
    try:
        area = polygon_area(deduped) if len(deduped) >= 3 else 0.0
    except ValueError:
        area = 0.0
    if area <= 0.0:
        raise SceneValidationError("polygon", "lies outside the image bounds")
    try:
        return HairPatch(
            polygon=tuple(deduped),
            stroke_params=patch.stroke_params,
            kernel_params=patch.kernel_params,
            refine_params=patch.refine_params,
        )
    except ValueError:
        # Rect clipping of a non-convex polygon can leave collinear boundary
        # bridges that fail the simplicity check; the region is still valid
        # for even-odd rasterization, so bypass re-validation.
        clipped_patch = object.__new__(HairPatch)
        object.__setattr__(clipped_patch, "polygon", tuple(deduped))
        object.__setattr__(clipped_patch, "stroke_params", patch.stroke_params)
        object.__setattr__(clipped_patch, "kernel_params", patch.kernel_params)
        object.__setattr__(clipped_patch, "refine_params", patch.refine_params)
        return clipped_patch


def patch_seed(global_seed: int, patch_index: int) -> int:
    """SplitMix-style mix of the scene seed and the patch's list position."""
    return derive_seed(global_seed, _PATCH_SEED_KEY, patch_index)


def run_pipeline(img: Image, scene: SceneSpec) -> tuple[Image, RenderReport]:
    """Render the scene onto the image, honoring the scene's stage gate."""
    report = RenderReport()
    limit = STAGE_ORDER[scene.stage]
    out = img.copy()

    for i, patch in enumerate(scene.patches):
        seed = patch_seed(scene.seed, i)

        stage = "draw"
        try:
            t0 = time.perf_counter()
            eff = clip_patch_to_image(patch, img.width, img.height)
            strokes = generate_strokes(eff, seed)
            for stroke in strokes:
                _rasterize_stroke_into(out.data, stroke)
            report.timings.append(
                StageTiming(i, "draw", (time.perf_counter() - t0) * 1000.0)
            )
            report.stroke_counts[i] = len(strokes)

            # A patch that drew nothing is a no-op: filtering or refining it
            # would alter untouched source pixels.
            if not strokes:
                continue

            if limit >= STAGE_ORDER["filter"]:
                stage = "filter"
                t0 = time.perf_counter()
                mask = rasterize_polygon(eff.polygon, img.width, img.height)
                out = convolve_fast(out, eff.kernel(), mask)
                report.timings.append(
                    StageTiming(i, "filter", (time.perf_counter() - t0) * 1000.0)
                )

            if limit >= STAGE_ORDER["refine"]:
                stage = "refine"
                t0 = time.perf_counter()
                pairs = find_boundary_pairs(out, mask, eff.refine_params)
                out = fill_boundary_pairs(out, pairs)
                report.timings.append(
                    StageTiming(i, "refine", (time.perf_counter() - t0) * 1000.0)
                )
                report.pair_counts[i] = len(pairs)
        except Exception as e:
            raise PipelineError(i, stage, e) from e

    report.checksum = image_checksum(out)
    return out, report
