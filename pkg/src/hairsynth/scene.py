"""Scene documents: the declarative JSON form of a full render job.

A scene is a single JSON object:

    {"image": "photo.png",          # optional source path (CLI may override)
     "seed": 42,                    # optional, default 0
     "stage": "refine",             # optional: draw | filter | refine
     "patches": [                   # list of hair patches (may be empty)
       {"polygon": [[x, y], ...],
        "strokes": {"density": 6.0, "length": [12, 28], "width": [1.2, 2.4],
                    "color": [r, g, b], "color_jitter": 0.04,
                    "waviness_amp": 1.0, "waviness_freq": 1.2,
                    "direction_deg": 90, "spread_deg": 12},
        "kernel": {"size": 19, "angle_deg": 0, "curvature": 0,
                   "thickness": 1.2, "sigma": 5.0, "sum": 1.0}
                  -- or -- {"coeffs": [[...], ...]},
        "refine": {"band_width": 3, "jump_threshold": 0.1}}]}

Parsing is strict: unknown keys anywhere are errors (typo protection), every
violated constraint is reported with its field path, and all sub-objects and
fields are optional with the defaults above.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .kernels import Kernel, KernelError, StreakKernelParams
from .raster import Color
from .refine import RefineParams
from .strokes import HairPatch, StrokeParams

STAGES = ("draw", "filter", "refine")


class SceneSyntaxError(ValueError):
    """Scene bytes are not valid JSON."""


class SceneValidationError(ValueError):
    """Scene JSON violates the format; message starts with the field path."""

    def __init__(self, path: str, constraint: str):
        super().__init__(f"{path}: {constraint}")
        self.path = path
        self.constraint = constraint


@dataclass(frozen=True)
class SceneSpec:
    """Validated render job: patches plus global seed and stage gate."""

    patches: tuple[HairPatch, ...] = ()
    seed: int = 0
    stage: str = "refine"
    image: str | None = None

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}, got {self.stage!r}")


def _require_object(value, path):
    if not isinstance(value, dict):
        raise SceneValidationError(path, "must be an object")
    return value


def _check_keys(obj: dict, path: str, allowed: set[str]):
    for key in obj:
        if key not in allowed:
            raise SceneValidationError(f"{path}.{key}" if path else key, "unknown key")


def _number(obj, path, key, default):
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SceneValidationError(f"{path}.{key}", "must be a number")
    return float(v)


def _integer(obj, path, key, default):
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SceneValidationError(f"{path}.{key}", "must be an integer")
    return v


def _pair(obj, path, key, default):
    if key not in obj:
        return default
    v = obj[key]
    if (
        not isinstance(v, list)
        or len(v) != 2
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)
    ):
        raise SceneValidationError(f"{path}.{key}", "must be [min, max] numbers")
    return (float(v[0]), float(v[1]))


def _parse_color(obj, path, key, default):
    if key not in obj:
        return default
    v = obj[key]
    if (
        not isinstance(v, list)
        or len(v) != 3
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)
    ):
        raise SceneValidationError(f"{path}.{key}", "must be [r, g, b] numbers")
    try:
        return Color(float(v[0]), float(v[1]), float(v[2]))
    except ValueError as e:
        raise SceneValidationError(f"{path}.{key}", str(e)) from e


def _parse_polygon(obj, path):
    if "polygon" not in obj:
        raise SceneValidationError(f"{path}.polygon", "is required")
    v = obj["polygon"]
    if not isinstance(v, list) or len(v) < 3:
        raise SceneValidationError(f"{path}.polygon", "must be a list of >=3 [x, y] pairs")
    pts = []
    for i, p in enumerate(v):
        if (
            not isinstance(p, list)
            or len(p) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in p)
        ):
            raise SceneValidationError(f"{path}.polygon[{i}]", "must be an [x, y] pair")
        pts.append((float(p[0]), float(p[1])))
    return tuple(pts)


_STROKE_KEYS = {
    "density",
    "length",
    "width",
    "color",
    "color_jitter",
    "waviness_amp",
    "waviness_freq",
    "direction_deg",
    "spread_deg",
}


def _parse_strokes(obj, path) -> StrokeParams:
    defaults = StrokeParams()
    if obj is None:
        return defaults
    obj = _require_object(obj, path)
    _check_keys(obj, path, _STROKE_KEYS)
    try:
        return StrokeParams(
            density=_number(obj, path, "density", defaults.density),
            length_range=_pair(obj, path, "length", defaults.length_range),
            width_range=_pair(obj, path, "width", defaults.width_range),
            color_base=_parse_color(obj, path, "color", defaults.color_base),
            color_jitter=_number(obj, path, "color_jitter", defaults.color_jitter),
            waviness_amp=_number(obj, path, "waviness_amp", defaults.waviness_amp),
            waviness_freq=_number(obj, path, "waviness_freq", defaults.waviness_freq),
            direction_deg=_number(obj, path, "direction_deg", defaults.direction_deg),
            spread_deg=_number(obj, path, "spread_deg", defaults.spread_deg),
        )
    except SceneValidationError:
        raise
    except ValueError as e:
        raise SceneValidationError(path, str(e)) from e


_KERNEL_KEYS = {"size", "angle_deg", "curvature", "thickness", "sigma", "sum"}


def _parse_kernel(obj, path) -> StreakKernelParams | Kernel:
    defaults = StreakKernelParams()
    if obj is None:
        return defaults
    obj = _require_object(obj, path)
    if "coeffs" in obj:
        _check_keys(obj, path, {"coeffs"})
        grid = obj["coeffs"]
        if not isinstance(grid, list) or not all(isinstance(r, list) for r in grid):
            raise SceneValidationError(f"{path}.coeffs", "must be a 2D number grid")
        try:
            return Kernel(np.asarray(grid, dtype=float))
        except (KernelError, ValueError) as e:
            raise SceneValidationError(f"{path}.coeffs", str(e)) from e
    _check_keys(obj, path, _KERNEL_KEYS)
    size = _integer(obj, path, "size", defaults.size)
    if size < 3 or size % 2 == 0:
        raise SceneValidationError(f"{path}.size", "must be odd and >= 3")
    try:
        return StreakKernelParams(
            size=size,
            angle_deg=_number(obj, path, "angle_deg", defaults.angle_deg),
            curvature=_number(obj, path, "curvature", defaults.curvature),
            thickness=_number(obj, path, "thickness", defaults.thickness),
            falloff_sigma=_number(obj, path, "sigma", defaults.falloff_sigma),
            target_sum=_number(obj, path, "sum", defaults.target_sum),
        )
    except SceneValidationError:
        raise
    except (KernelError, ValueError) as e:
        raise SceneValidationError(path, str(e)) from e


def _parse_refine(obj, path) -> RefineParams:
    defaults = RefineParams()
    if obj is None:
        return defaults
    obj = _require_object(obj, path)
    _check_keys(obj, path, {"band_width", "jump_threshold"})
    try:
        return RefineParams(
            band_width=_integer(obj, path, "band_width", defaults.band_width),
            jump_threshold=_number(
                obj, path, "jump_threshold", defaults.jump_threshold
            ),
        )
    except SceneValidationError:
        raise
    except ValueError as e:
        raise SceneValidationError(path, str(e)) from e


def _parse_patch(obj, path) -> HairPatch:
    obj = _require_object(obj, path)
    _check_keys(obj, path, {"polygon", "strokes", "kernel", "refine"})
    polygon = _parse_polygon(obj, path)
    strokes = _parse_strokes(obj.get("strokes"), f"{path}.strokes")
    kernel = _parse_kernel(obj.get("kernel"), f"{path}.kernel")
    refine = _parse_refine(obj.get("refine"), f"{path}.refine")
    try:
        return HairPatch(
            polygon=polygon,
            stroke_params=strokes,
            kernel_params=kernel,
            refine_params=refine,
        )
    except ValueError as e:
        raise SceneValidationError(f"{path}.polygon", str(e)) from e


def parse_scene(data: bytes | str) -> SceneSpec:
    """Parse and fully validate a scene document."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SceneSyntaxError(f"scene is not UTF-8: {e}") from e
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise SceneSyntaxError(
            f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(doc, dict):
        raise SceneValidationError("$", "top level must be an object")
    _check_keys(doc, "", {"image", "seed", "stage", "patches"})

    image = doc.get("image")
    if image is not None and not isinstance(image, str):
        raise SceneValidationError("image", "must be a string path")
    seed = _integer(doc, "", "seed", 0)
    stage = doc.get("stage", "refine")
    if stage not in STAGES:
        raise SceneValidationError("stage", f"must be one of {', '.join(STAGES)}")
    if "patches" not in doc:
        raise SceneValidationError("patches", "is required")
    raw_patches = doc["patches"]
    if not isinstance(raw_patches, list):
        raise SceneValidationError("patches", "must be a list")
    patches = tuple(
        _parse_patch(p, f"patches[{i}]") for i, p in enumerate(raw_patches)
    )
    return SceneSpec(patches=patches, seed=seed, stage=stage, image=image)


def serialize_scene(scene: SceneSpec) -> str:
    """Canonical JSON form; parse(serialize(s)) reconstructs s exactly."""
    doc: dict = {}
    if scene.image is not None:
        doc["image"] = scene.image
    doc["seed"] = scene.seed
    doc["stage"] = scene.stage
    doc["patches"] = []
    for patch in scene.patches:
        sp = patch.stroke_params
        p: dict = {
            "polygon": [[x, y] for x, y in patch.polygon],
            "strokes": {
                "density": sp.density,
                "length": list(sp.length_range),
                "width": list(sp.width_range),
                "color": [sp.color_base.r, sp.color_base.g, sp.color_base.b],
                "color_jitter": sp.color_jitter,
                "waviness_amp": sp.waviness_amp,
                "waviness_freq": sp.waviness_freq,
                "direction_deg": sp.direction_deg,
                "spread_deg": sp.spread_deg,
            },
        }
        if isinstance(patch.kernel_params, Kernel):
            p["kernel"] = {"coeffs": patch.kernel_params.coeffs.tolist()}
        else:
            kp = patch.kernel_params
            p["kernel"] = {
                "size": kp.size,
                "angle_deg": kp.angle_deg,
                "curvature": kp.curvature,
                "thickness": kp.thickness,
                "sigma": kp.falloff_sigma,
                "sum": kp.target_sum,
            }
        rp = patch.refine_params
        p["refine"] = {
            "band_width": rp.band_width,
            "jump_threshold": rp.jump_threshold,
        }
        doc["patches"].append(p)
    return json.dumps(doc, indent=2)
