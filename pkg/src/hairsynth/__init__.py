"""hairsynth: photorealistic hair synthesis on 2D raster images.

Pipeline per patch: draw stylized strokes, filter them with a directional
streak kernel, then smooth the patch boundary by linear intensity
interpolation. Exposed as a library, a CLI (hairsynth render/kernel/
validate/serve) and a local HTTP service backing the interactive editor.
"""

from .codecs import MalformedImageError, UnsupportedImageError, decode_image, encode_image
from .filters import (
    RegionMask,
    brightness_response,
    convolve_fast,
    convolve_naive,
    rasterize_polygon,
)
from .geometry import DegeneratePolygonError
from .kernels import (
    Kernel,
    KernelError,
    StreakKernelParams,
    identity_kernel,
    kernel_preview,
    make_streak_kernel,
    normalize_kernel,
)
from .raster import (
    Color,
    DimensionMismatchError,
    EmptyRegionError,
    Image,
    PixelCoord,
    composite_over,
    image_checksum,
    mean_intensity,
)
from .refine import (
    AxisDispatchError,
    BoundaryPair,
    RefineParams,
    find_boundary_pairs,
    interp_horizontal,
    interp_vertical,
    refine_boundary,
)
from .pipeline import PipelineError, RenderReport, run_pipeline
from .scene import (
    SceneSpec,
    SceneSyntaxError,
    SceneValidationError,
    parse_scene,
    serialize_scene,
)
from .strokes import (
    HairPatch,
    HairStroke,
    StrokeParams,
    draw_patch,
    generate_strokes,
    polygon_area,
    rasterize_stroke,
)

__version__ = "0.1.0"
