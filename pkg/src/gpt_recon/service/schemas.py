"""Request and response models for the verification service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator


class ProductSpec(BaseModel):
    kind: Literal["pointwise", "matrix", "tensor"]
    data: Any | None = None


class InvolutionSpec(BaseModel):
    kind: Literal["identity", "conjugate-transpose", "matrix"]
    data: Any | None = None


class TheoryPayload(BaseModel):
    """A theory document, mirroring the JSON input file schema."""

    preparations: list[str]
    outcomes: list[str]
    statistics: list[list[float]]
    product: ProductSpec | None = None
    involution: InvolutionSpec | None = None
    unit_column: int | None = None

    def as_document_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "preparations": self.preparations,
            "outcomes": self.outcomes,
            "statistics": self.statistics,
        }
        if self.product is not None:
            payload["product"] = self.product.model_dump()
        if self.involution is not None:
            payload["involution"] = self.involution.model_dump()
        if self.unit_column is not None:
            payload["unit_column"] = self.unit_column
        return payload


class CheckRequest(BaseModel):
    """Verify one source: exactly one of ``builtin`` or ``theory``."""

    builtin: str | None = None
    theory: TheoryPayload | None = None
    name: str | None = None
    tolerance: float = Field(default=1e-9, gt=0.0)
    samples: int = Field(default=1000, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "CheckRequest":
        if (self.builtin is None) == (self.theory is None):
            raise ValueError("provide exactly one of 'builtin' or 'theory'")
        return self


class StagePayload(BaseModel):
    name: str
    verdict: str
    residual: float
    witness: dict[str, Any] | None = None
    detail: dict[str, Any] | None = None


class ReportPayload(BaseModel):
    instance: str
    tolerance: float
    samples: int
    seed: int
    all_pass: bool
    stages: list[StagePayload]


class CheckResponse(BaseModel):
    instance: str
    exit_code: int
    report: ReportPayload


class BuiltinsResponse(BaseModel):
    builtins: list[str]


class HealthResponse(BaseModel):
    status: str = "ok"
