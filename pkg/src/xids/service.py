"""HTTP gateway: score, explain, review, and registry endpoints under /v1.

All bodies are JSON; errors render as {"code": ..., "message": ...}. When
XIDS_API_TOKEN is set, requests must carry it in the X-Api-Token header.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from .alerts import AlertStore, ReviewConflict
from .encoding import encode_record
from .labeling import LabelRegistry
from .nslkdd import FlowRecord, normalize_features
from .pipeline import Explainer, LoadedArtifacts, load_artifacts
from .shapley import summarize


class ScoreRequest(BaseModel):
    record: dict | None = None
    vector: list[float] | None = None


class ExplainRequest(ScoreRequest):
    source_ref: str = ""
    explain_normals: bool = False


class ReviewRequest(BaseModel):
    action: str
    analyst_label: str | None = None
    analyst: str = ""
    note: str = ""


class RegisterRequest(BaseModel):
    auto_label: str
    analyst_label: str
    analyst: str = ""
    note: str = ""


def _http_error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def create_app(
    artifacts_dir: str | Path,
    registry_path: str | Path | None = None,
    alerts_path: str | Path | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    arts: LoadedArtifacts = load_artifacts(artifacts_dir)
    explainer = Explainer(arts.model, arts.schema, arts.background, arts.config)
    registry = LabelRegistry(registry_path)
    alerts = AlertStore(alerts_path)
    token = os.environ.get("XIDS_API_TOKEN")

    app = FastAPI(title="xids gateway", version="1")

    @app.exception_handler(HTTPException)
    async def handle_http(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_request", "message": str(exc.errors()[:1])},
        )

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if token and request.url.path.startswith("/v1"):
            if request.headers.get("x-api-token") != token:
                return JSONResponse(
                    status_code=401,
                    content={"code": "unauthorized", "message": "missing or bad X-Api-Token"},
                )
        return await call_next(request)

    def vector_from(req: ScoreRequest) -> np.ndarray:
        if (req.record is None) == (req.vector is None):
            raise _http_error(422, "invalid_request", "provide exactly one of record or vector")
        if req.vector is not None:
            x = np.asarray(req.vector, dtype=float)
            if x.size != arts.schema.width:
                raise _http_error(
                    422, "schema_mismatch",
                    f"vector has {x.size} values, schema expects {arts.schema.width} "
                    f"(fingerprint {arts.schema.fingerprint[:12]})",
                )
            return x
        try:
            features = normalize_features(req.record)
        except ValueError as exc:
            raise _http_error(422, "invalid_request", str(exc))
        record = FlowRecord(features=features, attack_label=str(req.record.get("attack_label", "unlabeled")))
        x, _ = encode_record(record, arts.schema)
        return x

    @app.post("/v1/score")
    def score(req: ScoreRequest):
        x = vector_from(req)
        s, label = explainer.score(x)
        return {"score": s, "class": label}

    @app.post("/v1/explain")
    def explain(req: ExplainRequest):
        x = vector_from(req)
        result = explainer.explain_vector(
            x, registry=registry, explain_normals=req.explain_normals,
        )
        if "auto_label" not in result or result["class"] == 0:
            # normals never alert; explained ones return the attribution inline
            return {**result, "alert": None}
        alert = alerts.create(
            source_ref=req.source_ref,
            score=result["score"],
            label_class=result["class"],
            attribution=result["phi"],
            base_value=result["base_value"],
            auto_label=result["auto_label"],
            resolution_kind=result["resolution"]["kind"],
            resolution_label=result["resolution"]["analyst_label"],
        )
        return {"score": result["score"], "class": result["class"], "alert": alert.to_dict()}

    @app.get("/v1/alerts")
    def list_alerts(status: str | None = None):
        return {"alerts": [a.to_dict() for a in alerts.list(status=status)]}

    @app.get("/v1/alerts/{alert_id}")
    def get_alert(alert_id: str):
        try:
            return alerts.get(alert_id).to_dict()
        except KeyError:
            raise _http_error(404, "not_found", f"no alert {alert_id!r}")

    @app.post("/v1/alerts/{alert_id}/review")
    def review_alert(alert_id: str, req: ReviewRequest):
        # pure status transition; renames feed the registry through
        # POST /v1/labels, which the console calls first
        try:
            alert = alerts.review(
                alert_id, req.action, analyst_label=req.analyst_label,
                analyst=req.analyst, note=req.note,
            )
        except KeyError:
            raise _http_error(404, "not_found", f"no alert {alert_id!r}")
        except ReviewConflict as exc:
            raise _http_error(409, "conflict", str(exc))
        except ValueError as exc:
            raise _http_error(422, "invalid_request", str(exc))
        return alert.to_dict()

    @app.post("/v1/labels")
    def register_label(req: RegisterRequest):
        try:
            entry = registry.register(
                req.auto_label, req.analyst_label, analyst=req.analyst, note=req.note,
            )
        except ValueError as exc:
            raise _http_error(422, "invalid_request", str(exc))
        return {
            "auto_label": entry.auto_label,
            "analyst_label": entry.analyst_label,
            "analyst": entry.analyst,
            "note": entry.note,
        }

    @app.get("/v1/registry")
    def get_registry():
        return {"entries": registry.to_dict()}

    @app.get("/v1/summary")
    def get_summary():
        from .shapley import Attribution

        attrs = []
        for a in alerts.list():
            columns = tuple(sorted(a.attribution))
            values = np.array([a.attribution[c] for c in columns])
            attrs.append(Attribution(
                columns=columns, values=values, base_value=a.base_value,
                prediction=a.base_value + float(values.sum()),
                mode="sampled", n_coalitions=0,
                inputs=np.full(len(columns), np.nan),
            ))
        if not attrs:
            return {"mean_abs": {}, "ordering": [], "points": {}}
        return summarize(attrs).to_dict()

    @app.get("/v1/report")
    def get_report():
        return arts.report_doc

    if frontend_dir and Path(frontend_dir).exists():
        frontend = Path(frontend_dir)

        @app.get("/")
        def index():
            return FileResponse(frontend / "index.html")

        @app.get("/{asset_path:path}")
        def assets(asset_path: str):
            target = (frontend / asset_path).resolve()
            if frontend.resolve() in target.parents and target.is_file():
                return FileResponse(target)
            raise _http_error(404, "not_found", f"no asset {asset_path!r}")

    return app
