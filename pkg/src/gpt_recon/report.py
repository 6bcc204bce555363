"""Axiom verification reports and their serialisation.

A report is an ordered list of stage results, one per axiom battery stage.
Serialisation is canonical — sorted keys, no whitespace, no timestamps —
so identical runs produce byte-identical output.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
NOT_APPLICABLE = "NOT-APPLICABLE"

VERDICTS = (PASS, FAIL, NOT_APPLICABLE)

#: Canonical stage order of the axiom battery.
STAGE_ORDER = (
    "separation",
    "duality-dims",
    "norm-axioms",
    "submultiplicativity",
    "uniform-bound",
    "isometry",
    "projections",
    "complements",
    "involution",
    "cstar-identity",
    "support-norm-equality",
    "predual-duality",
)


def vector_payload(vec: np.ndarray) -> dict[str, list[float]]:
    """JSON-safe encoding of a complex vector."""
    arr = np.asarray(vec, dtype=complex).ravel()
    return {"re": [float(x) for x in arr.real], "im": [float(x) for x in arr.imag]}


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return vector_payload(value)
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.complexfloating, complex)):
        return {"re": float(np.real(value)), "im": float(np.imag(value))}
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    return value


@dataclass(frozen=True)
class StageResult:
    """Outcome of one stage: verdict, worst residual and optional witness."""

    name: str
    verdict: str
    residual: float = 0.0
    witness: dict[str, Any] | None = None
    detail: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        if self.name not in STAGE_ORDER:
            raise ValueError(f"unknown stage name {self.name!r}")
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if not np.isfinite(self.residual) or self.residual < 0.0:
            raise ValueError(f"stage residual must be finite and >= 0, got {self.residual}")


@dataclass(frozen=True)
class AxiomReport:
    """Full battery result for one theory instance."""

    instance_name: str
    tolerance: float
    samples: int
    seed: int
    stages: tuple[StageResult, ...] = field(repr=False)

    def __post_init__(self) -> None:
        names = tuple(s.name for s in self.stages)
        if names != STAGE_ORDER:
            raise ValueError(
                f"report must contain each stage exactly once in canonical order; got {names}"
            )

    def stage(self, name: str) -> StageResult:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def all_pass(self) -> bool:
        """True when no applicable stage failed."""
        return all(s.verdict != FAIL for s in self.stages)

    def verdict_map(self) -> dict[str, str]:
        return {s.name: s.verdict for s in self.stages}

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance_name,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "seed": self.seed,
            "all_pass": self.all_pass(),
            "stages": [
                {
                    "name": s.name,
                    "verdict": s.verdict,
                    "residual": float(s.residual),
                    "witness": _json_safe(s.witness),
                    "detail": _json_safe(s.detail),
                }
                for s in self.stages
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "AxiomReport":
        stages = tuple(
            StageResult(
                name=s["name"],
                verdict=s["verdict"],
                residual=float(s["residual"]),
                witness=s.get("witness"),
                detail=s.get("detail"),
            )
            for s in payload["stages"]
        )
        return cls(
            instance_name=payload["instance"],
            tolerance=float(payload["tolerance"]),
            samples=int(payload["samples"]),
            seed=int(payload["seed"]),
            stages=stages,
        )


def render_report(report: AxiomReport, format: str = "json") -> bytes:
    """Serialise a report canonically as JSON, or human-readably as text."""
    if format == "json":
        payload = json.dumps(
            report.to_dict(), sort_keys=True, separators=(",", ":"), allow_nan=False
        )
        return payload.encode() + b"\n"
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")

    width = max(len(n) for n in STAGE_ORDER)
    lines = [
        f"instance   {report.instance_name}",
        f"tolerance  {report.tolerance:g}",
        f"samples    {report.samples}",
        f"seed       {report.seed}",
        "",
    ]
    for s in report.stages:
        lines.append(f"{s.name:<{width}}  {s.verdict:<14}  residual {s.residual:.3e}")
        if s.verdict == FAIL and s.witness:
            lines.append(f"{'':<{width}}  witness: {json.dumps(_json_safe(s.witness), sort_keys=True)}")
    lines.append("")
    lines.append("RESULT: " + ("all stages pass" if report.all_pass() else "FAILURES detected"))
    return ("\n".join(lines) + "\n").encode()


def write_report(report: AxiomReport, path: str | Path, format: str = "json") -> None:
    """Write a rendered report atomically (temp file + rename)."""
    path = Path(path)
    data = render_report(report, format)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
