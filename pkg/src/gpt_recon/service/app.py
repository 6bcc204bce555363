"""FastAPI application exposing the verification pipeline."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ReconstructionError
from ..instances import get_builtin
from ..operational import parse_document
from ..pipeline import (
    exit_code_for,
    instance_from_document,
    is_builtin_name,
    list_builtins,
    run_battery,
)
from .schemas import (
    BuiltinsResponse,
    CheckRequest,
    CheckResponse,
    HealthResponse,
    ReportPayload,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="gpt-recon",
        version=__version__,
        description=(
            "Reconstructs the algebraic structure carried by operational "
            "statistics tables and verifies the operator-algebra axiom battery."
        ),
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse()

    @app.get("/builtins", response_model=BuiltinsResponse)
    def builtins() -> BuiltinsResponse:
        return BuiltinsResponse(builtins=list_builtins())

    @app.post("/check", response_model=CheckResponse)
    def check(request: CheckRequest) -> CheckResponse:
        try:
            if request.builtin is not None:
                name = request.builtin.strip()
                if not is_builtin_name(name):
                    raise HTTPException(
                        status_code=400,
                        detail=f"unknown builtin {name!r}; available: {list_builtins()}",
                    )
                instance = get_builtin(name)
            else:
                doc = parse_document(request.theory.as_document_dict())
                instance = instance_from_document(
                    doc, request.tolerance, name=request.name or "document"
                )
            report = run_battery(
                instance,
                tolerance=request.tolerance,
                samples=request.samples,
                seed=request.seed,
            )
        except ReconstructionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return CheckResponse(
            instance=report.instance_name,
            exit_code=exit_code_for(report),
            report=ReportPayload(**report.to_dict()),
        )

    return app


app = create_app()
