"""Command line interface.

Subcommands:
  render    render a scene onto an image (optionally stopping at a stage)
  kernel    build a streak kernel and write its preview image
  validate  check a scene document and report the first violation
  serve     run the local HTTP service for the interactive editor

Exit codes: 0 success, 1 usage error, 2 invalid input or validation error,
3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .codecs import MalformedImageError, UnsupportedImageError, decode_image, encode_image
from .kernels import KernelError, StreakKernelParams, kernel_preview, make_streak_kernel
from .pipeline import run_pipeline
from .scene import STAGES, SceneSyntaxError, SceneValidationError, parse_scene

DEFAULT_PORT = 8137
PORT_ENV_VAR = "HAIRSYNTH_PORT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hairsynth", description="Photorealistic hair synthesis on 2D images"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a scene onto an image")
    render.add_argument("--image", help="source image (PNG or PPM); overrides the scene's image path")
    render.add_argument("--scene", required=True, help="scene JSON document")
    render.add_argument("--out", required=True, help="output image path (.png or .ppm)")
    render.add_argument("--stage", choices=STAGES, help="stop after this stage")
    render.add_argument("--report", help="write the render report (key=value lines) here")
    render.set_defaults(func=cmd_render)

    kernel = sub.add_parser("kernel", help="build a streak kernel preview")
    kernel.add_argument("--size", type=int, default=19)
    kernel.add_argument("--angle", type=float, default=0.0)
    kernel.add_argument("--curvature", type=float, default=0.0)
    kernel.add_argument("--thickness", type=float, default=1.2)
    kernel.add_argument("--sigma", type=float, default=5.0)
    kernel.add_argument("--sum", type=float, default=1.0, dest="target_sum")
    kernel.add_argument("--scale", type=int, default=1, help="integer cell upscale")
    kernel.add_argument("--preview", required=True, help="output PNG path")
    kernel.set_defaults(func=cmd_kernel)

    validate = sub.add_parser("validate", help="validate a scene document")
    validate.add_argument("--scene", required=True)
    validate.set_defaults(func=cmd_validate)

    serve = sub.add_parser("serve", help="run the local HTTP service")
    serve.add_argument(
        "--port",
        type=int,
        default=None,
        help=f"loopback port (default {DEFAULT_PORT}, env {PORT_ENV_VAR})",
    )
    serve.add_argument("--assets", help="static directory for the editor UI")
    serve.set_defaults(func=cmd_serve)
    return parser


def cmd_render(args) -> int:
    scene = parse_scene(Path(args.scene).read_bytes())
    image_path = args.image or scene.image
    if image_path is None:
        print("error: no source image (--image or scene 'image')", file=sys.stderr)
        return 2
    img = decode_image(Path(image_path).read_bytes())
    if args.stage:
        scene = type(scene)(
            patches=scene.patches, seed=scene.seed, stage=args.stage, image=scene.image
        )
    out, report = run_pipeline(img, scene)
    fmt = "ppm" if args.out.lower().endswith(".ppm") else "png"
    Path(args.out).write_bytes(encode_image(out, fmt))
    if args.report:
        Path(args.report).write_text(report.to_text())
    return 0


def cmd_kernel(args) -> int:
    params = StreakKernelParams(
        size=args.size,
        angle_deg=args.angle,
        curvature=args.curvature,
        thickness=args.thickness,
        falloff_sigma=args.sigma,
        target_sum=args.target_sum,
    )
    img = kernel_preview(make_streak_kernel(params), scale=args.scale)
    Path(args.preview).write_bytes(encode_image(img, "png"))
    return 0


def cmd_validate(args) -> int:
    parse_scene(Path(args.scene).read_bytes())
    print("OK")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    assets = Path(args.assets) if args.assets else None
    app = create_app(assets_dir=assets)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return 0


_INPUT_ERRORS = (
    SceneSyntaxError,
    SceneValidationError,
    MalformedImageError,
    UnsupportedImageError,
    KernelError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    ValueError,
)


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage problems and 0 for --help
        return 0 if e.code == 0 else 1
    try:
        return args.func(args)
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 3
    except Exception as e:  # anything else is a bug, not bad input
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
