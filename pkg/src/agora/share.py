"""Upload-and-view HTTP service for graph documents.

Writes need the static bearer token; reads are open. Uploads are immutable:
ids are random URL-safe capability tokens and there is no overwrite or delete
endpoint. An upload becomes visible only once its metadata record is in
place, so concurrent readers never observe a half-written file.
"""

from __future__ import annotations

import hmac
import json
import os
import secrets
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from starlette.middleware.cors import CORSMiddleware

from .errors import GraphFormatError, ParseError
from .formats import parse_bytes, sniff_format

MAX_UPLOAD_BYTES = 50 * 1024 * 1024

_MEDIA_TYPES = {
    "gexf": "application/xml",
    "gml": "text/plain; charset=utf-8",
    "json": "application/json",
}

_FALLBACK_VIEW = """<!DOCTYPE html>
<html>
<head><meta charset="utf-8"><title>graph {id}</title></head>
<body>
<h1>Shared graph {id}</h1>
<p>The interactive viewer assets are not installed on this server.</p>
<p>Download the document: <a href="/graphs/{id}">/graphs/{id}</a></p>
</body>
</html>
"""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "message": message})


def create_app(
    data_dir: str | Path,
    token: str,
    viewer_dist: str | Path | None = None,
    max_bytes: int = MAX_UPLOAD_BYTES,
) -> FastAPI:
    """Build the service around a storage directory and a static upload token."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    viewer_dir = Path(viewer_dist) if viewer_dist else None
    if viewer_dir is None:
        packaged = Path(__file__).parent / "viewer_dist"
        if packaged.exists():
            viewer_dir = packaged

    app = FastAPI(title="agora share", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )

    def meta_path(graph_id: str) -> Path:
        return data_dir / f"{graph_id}.meta.json"

    def load_meta(graph_id: str) -> dict | None:
        if not graph_id or not graph_id.replace("-", "").replace("_", "").isalnum():
            return None
        path = meta_path(graph_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    @app.post("/graphs", status_code=201)
    async def upload(request: Request):
        auth = request.headers.get("authorization", "")
        scheme, _, presented = auth.partition(" ")
        if scheme.lower() != "bearer" or not hmac.compare_digest(presented, token):
            return _error(401, "unauthorized", "missing or invalid upload token")
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > max_bytes:
            return _error(413, "too_large", f"uploads are limited to {max_bytes} bytes")
        body = await request.body()
        if len(body) > max_bytes:
            return _error(413, "too_large", f"uploads are limited to {max_bytes} bytes")
        fmt = sniff_format(body)
        try:
            parse_bytes(body, fmt)
        except ParseError as err:
            return _error(422, "parse_error", str(err))
        except GraphFormatError as err:
            return _error(422, "parse_error", f"{type(err).__name__}: {err}")

        graph_id = secrets.token_urlsafe(16)
        filename = request.query_params.get("filename") or f"graph.{fmt}"
        blob_path = data_dir / f"{graph_id}.{fmt}"
        tmp = blob_path.with_suffix(blob_path.suffix + ".tmp")
        tmp.write_bytes(body)
        os.replace(tmp, blob_path)
        meta = {
            "id": graph_id,
            "filename": filename,
            "size": len(body),
            "uploaded_at": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "format": fmt,
        }
        tmp_meta = meta_path(graph_id).with_suffix(".tmp")
        tmp_meta.write_text(json.dumps(meta), encoding="utf-8")
        os.replace(tmp_meta, meta_path(graph_id))
        return JSONResponse(
            status_code=201, content={"id": graph_id, "view_url": f"/view/{graph_id}"}
        )

    @app.get("/graphs/{graph_id}/meta")
    def graph_meta(graph_id: str):
        meta = load_meta(graph_id)
        if meta is None:
            return _error(404, "not_found", f"no shared graph {graph_id!r}")
        return JSONResponse(content=meta)

    @app.get("/graphs/{graph_id}")
    def graph_bytes(graph_id: str):
        meta = load_meta(graph_id)
        if meta is None:
            return _error(404, "not_found", f"no shared graph {graph_id!r}")
        blob = data_dir / f"{graph_id}.{meta['format']}"
        return FileResponse(
            blob,
            media_type=_MEDIA_TYPES[meta["format"]],
            filename=meta["filename"],
            content_disposition_type="inline",
        )

    @app.get("/view/{graph_id}")
    def view(graph_id: str):
        meta = load_meta(graph_id)
        if meta is None:
            return _error(404, "not_found", f"no shared graph {graph_id!r}")
        if viewer_dir is not None and (viewer_dir / "index.html").exists():
            html = (viewer_dir / "index.html").read_text(encoding="utf-8")
            # the viewer references its assets relatively so it also runs from
            # a plain directory; served under /view/{id} they live at /assets/
            html = html.replace('src="./viewer.js"', 'src="/assets/viewer.js"')
            html = html.replace('href="./viewer.css"', 'href="/assets/viewer.css"')
            return HTMLResponse(html)
        return HTMLResponse(_FALLBACK_VIEW.replace("{id}", graph_id))

    if viewer_dir is not None and viewer_dir.exists():
        from starlette.staticfiles import StaticFiles

        app.mount("/assets", StaticFiles(directory=viewer_dir), name="assets")

    @app.get("/healthz")
    def healthz():
        return Response(content="ok", media_type="text/plain")

    return app
