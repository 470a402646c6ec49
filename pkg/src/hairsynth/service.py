"""Local HTTP facade over the pipeline for the interactive editor.

Sessions are in-memory only: POST an image to open one, PUT scene revisions
against it (optimistic concurrency via If-Match), then render staged
previews. Rendering never mutates the scene; repeated renders at the same
revision return byte-identical PNGs, and a CLI render of the exported scene
produces exactly the same bytes.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .codecs import decode_image, encode_image
from .kernels import KernelError, StreakKernelParams, kernel_preview, make_streak_kernel
from .pipeline import clip_patch_to_image, run_pipeline
from .raster import Image
from .scene import (
    STAGES,
    SceneSpec,
    SceneSyntaxError,
    SceneValidationError,
    parse_scene,
    serialize_scene,
)

DEFAULT_MAX_PIXELS = 16_000_000  # 16 MP upload ceiling
PREVIEW_SCALE = 8


class ApiError(Exception):
    def __init__(self, status: int, error: str, fieldpath: str | None = None):
        super().__init__(error)
        self.status = status
        self.error = error
        self.fieldpath = fieldpath

    def response(self) -> JSONResponse:
        body: dict = {"error": self.error}
        if self.fieldpath:
            body["field"] = self.fieldpath
        return JSONResponse(status_code=self.status, content=body)


@dataclass
class Session:
    image: Image
    scene: SceneSpec = field(default_factory=SceneSpec)
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    renders: dict = field(default_factory=dict)  # (revision, stage) -> (png, report)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, image) -> str:
        sid = secrets.token_hex(16)
        with self._lock:
            self._sessions[sid] = Session(image=image)
        return sid

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise ApiError(404, f"unknown session {sid}")
        return session


def _validate_scene_for_image(scene: SceneSpec, width: int, height: int):
    for i, patch in enumerate(scene.patches):
        try:
            clip_patch_to_image(patch, width, height)
        except SceneValidationError as e:
            raise ApiError(422, "polygon lies outside the image bounds",
                           f"patches[{i}].polygon") from e


def _render_at(session: Session, stage: str) -> tuple[bytes, str, int]:
    """Render (or reuse) the session's current scene at a stage gate."""
    with session.lock:
        revision = session.revision
        scene = session.scene
        cached = session.renders.get((revision, stage))
    if cached is not None:
        return cached[0], cached[1], revision
    staged = SceneSpec(
        patches=scene.patches, seed=scene.seed, stage=stage, image=scene.image
    )
    out, report = run_pipeline(session.image, staged)
    png = encode_image(out, "png")
    report_text = report.to_text()
    with session.lock:
        if session.revision == revision:
            session.renders[(revision, stage)] = (png, report_text)
    return png, report_text, revision


def create_app(
    assets_dir: Path | None = None, max_pixels: int = DEFAULT_MAX_PIXELS
) -> FastAPI:
    app = FastAPI(title="hairsynth service", docs_url=None, redoc_url=None)
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return exc.response()

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        try:
            image = decode_image(body)
        except ValueError as e:
            raise ApiError(422, f"undecodable image: {e}") from e
        if image.width * image.height > max_pixels:
            raise ApiError(
                413,
                f"image has {image.width * image.height} pixels, "
                f"limit is {max_pixels}",
            )
        sid = store.create(image)
        return JSONResponse(status_code=201, content={"id": sid, "revision": 0})

    @app.put("/sessions/{sid}/scene")
    async def put_scene(sid: str, request: Request):
        session = store.get(sid)
        if_match = request.headers.get("If-Match")
        if if_match is None:
            raise ApiError(409, "missing If-Match revision header")
        try:
            expected = int(if_match.strip().strip('"'))
        except ValueError as e:
            raise ApiError(409, f"If-Match is not a revision number: {if_match!r}") from e
        body = await request.body()
        try:
            scene = parse_scene(body)
        except SceneSyntaxError as e:
            raise ApiError(422, str(e)) from e
        except SceneValidationError as e:
            raise ApiError(422, e.constraint, e.path) from e
        _validate_scene_for_image(scene, session.image.width, session.image.height)
        with session.lock:
            if session.revision != expected:
                raise ApiError(
                    409,
                    f"revision mismatch: expected {expected}, "
                    f"current {session.revision}",
                )
            session.scene = scene
            session.revision += 1
            session.renders.clear()
            return {"revision": session.revision}

    @app.get("/sessions/{sid}/scene")
    def get_scene(sid: str):
        session = store.get(sid)
        with session.lock:
            text = serialize_scene(session.scene)
            revision = session.revision
        return Response(
            content=text,
            media_type="application/json",
            headers={"X-Revision": str(revision)},
        )

    def _stage_or_422(stage: str | None) -> str:
        if stage is None:
            return "refine"
        if stage not in STAGES:
            raise ApiError(422, f"stage must be one of {', '.join(STAGES)}", "stage")
        return stage

    @app.post("/sessions/{sid}/render")
    def render(sid: str, stage: str | None = None):
        session = store.get(sid)
        png, report_text, revision = _render_at(session, _stage_or_422(stage))
        return Response(
            content=png,
            media_type="image/png",
            headers={
                "X-Revision": str(revision),
                "X-Render-Report": report_text.replace("\n", ";").rstrip(";"),
            },
        )

    @app.get("/sessions/{sid}/result")
    def result(sid: str, stage: str | None = None):
        session = store.get(sid)
        png, _, revision = _render_at(session, _stage_or_422(stage))
        return Response(
            content=png,
            media_type="image/png",
            headers={"X-Revision": str(revision)},
        )

    @app.get("/kernel/preview")
    def preview(
        size: str = "19",
        angle_deg: str = "0",
        curvature: str = "0",
        thickness: str = "1.2",
        sigma: str = "5.0",
    ):
        try:
            params = StreakKernelParams(
                size=int(size),
                angle_deg=float(angle_deg),
                curvature=float(curvature),
                thickness=float(thickness),
                falloff_sigma=float(sigma),
            )
        except (KernelError, ValueError) as e:
            raise ApiError(422, f"invalid kernel parameters: {e}", "kernel") from e
        img = kernel_preview(make_streak_kernel(params), scale=PREVIEW_SCALE)
        return Response(content=encode_image(img, "png"), media_type="image/png")

    if assets_dir is not None and assets_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="editor")

    return app
