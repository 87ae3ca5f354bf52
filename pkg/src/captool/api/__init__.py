"""FastAPI application factory wrapping a portfolio service."""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from captool import store
from captool.errors import (
    AssessmentNotFinalized,
    CapError,
    DuplicateSession,
    IllegalTransition,
    StaleVersion,
    UnknownArtifact,
    UnknownContribution,
    UnknownFeature,
    UnknownRequest,
    UnknownSession,
)
from captool.service import PortfolioService
from captool.store import Portfolio

_NOT_FOUND = (UnknownSession, UnknownArtifact, UnknownContribution, UnknownFeature, UnknownRequest)
_CONFLICT = (IllegalTransition, StaleVersion, DuplicateSession, AssessmentNotFinalized)


def status_for(error: CapError) -> int:
    if isinstance(error, _NOT_FOUND):
        return 404
    if isinstance(error, _CONFLICT):
        return 409
    return 400


def create_app(service: PortfolioService | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the app; without an explicit service, loads the portfolio named
    by CAP_PORTFOLIO (fresh empty portfolio when unset or missing). Pass
    ``ui_dir`` to serve the workshop board at /ui from the same origin."""
    if service is None:
        path = os.environ.get("CAP_PORTFOLIO")
        if path and Path(path).exists():
            service = PortfolioService(store.load(path), path=path, autosave=True)
        else:
            service = PortfolioService(Portfolio(), path=path or None, autosave=bool(path))

    app = FastAPI(title="captool", version="0.1.0")
    app.state.service = service
    # No credentials in scope, so a permissive policy lets a separately hosted
    # board talk to the API during workshops.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(CapError)
    async def cap_error_handler(_: Request, exc: CapError):
        return JSONResponse(status_code=status_for(exc), content=jsonable_encoder(exc.to_dict()))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "validation_error",
                "message": "request validation failed",
                "details": {"errors": jsonable_encoder(exc.errors())},
            },
        )

    from captool.api.routes import router

    app.include_router(router)
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
