"""Command-line client for the verification service.

By default the CLI talks to an in-process instance of the HTTP service, so
no server needs to be running; ``--server URL`` points it at a remote one
instead.  Exit codes: 0 — every applicable stage passed; 1 — input could
not be parsed or validated; 2 — the battery reports failures; 3 — internal
error.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path
from typing import Any

import click
import httpx

from .pipeline import is_builtin_name
from .report import AxiomReport, render_report, write_report

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILURES = 2
EXIT_INTERNAL = 3


def _request(server: str | None, method: str, path: str, payload: dict | None = None) -> httpx.Response:
    """Issue one request, against a remote server or the in-process app."""
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.request(method, path, json=payload)

    from .service.app import create_app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://gpt-recon.local", timeout=600.0
        ) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _post_check(server: str | None, payload: dict) -> dict[str, Any]:
    try:
        response = _request(server, "POST", "/check", payload)
    except httpx.HTTPError as exc:
        _fail(f"cannot reach verification service: {exc}", EXIT_INTERNAL)
    if response.status_code in (400, 422):
        detail = response.json().get("detail", "invalid input")
        _fail(f"{detail}", EXIT_INPUT)
    if response.status_code != 200:
        _fail(f"service returned HTTP {response.status_code}", EXIT_INTERNAL)
    return response.json()


@click.group()
def main() -> None:
    """Reconstruct and verify algebraic structure from statistics tables."""


@main.command()
@click.argument("source")
@click.option(
    "--tolerance",
    type=float,
    default=1e-9,
    envvar="GPT_RECON_TOLERANCE",
    show_default=True,
    help="Numerical tolerance for every stage (env: GPT_RECON_TOLERANCE).",
)
@click.option("--samples", type=int, default=1000, show_default=True, help="Random samples per stage.")
@click.option("--seed", type=int, default=0, show_default=True, help="Base random seed.")
@click.option("--report", "report_path", type=click.Path(), default=None, help="Write the report here.")
@click.option(
    "--format",
    "format_",
    type=click.Choice(["json", "text"]),
    default="json",
    show_default=True,
    help="Report rendering.",
)
@click.option("--server", default=None, help="URL of a running service (default: in-process).")
def check(
    source: str,
    tolerance: float,
    samples: int,
    seed: int,
    report_path: str | None,
    format_: str,
    server: str | None,
) -> None:
    """Run the axiom battery on SOURCE (a builtin name or a JSON file)."""
    if tolerance <= 0:
        _fail("tolerance must be positive", EXIT_INPUT)
    if samples < 1:
        _fail("samples must be >= 1", EXIT_INPUT)

    payload: dict = {"tolerance": tolerance, "samples": samples, "seed": seed}
    if is_builtin_name(source):
        payload["builtin"] = source.strip()
    else:
        path = Path(source)
        try:
            document = json.loads(path.read_text())
        except OSError as exc:
            _fail(f"cannot read {path}: {exc}", EXIT_INPUT)
        except json.JSONDecodeError as exc:
            _fail(f"{path} is not valid JSON: {exc}", EXIT_INPUT)
        if not isinstance(document, dict):
            _fail(f"{path} must contain a JSON object", EXIT_INPUT)
        payload["theory"] = document
        payload["name"] = path.name

    body = _post_check(server, payload)
    try:
        report = AxiomReport.from_dict(body["report"])
        exit_code = int(body["exit_code"])
    except (KeyError, TypeError, ValueError) as exc:
        _fail(f"malformed service response: {exc}", EXIT_INTERNAL)

    if report_path:
        write_report(report, report_path, format_)
    else:
        click.echo(render_report(report, format_).decode(), nl=False)
    sys.exit(exit_code)


@main.command("list-builtins")
@click.option("--server", default=None, help="URL of a running service (default: in-process).")
def list_builtins_cmd(server: str | None) -> None:
    """List the built-in theory instances."""
    try:
        response = _request(server, "GET", "/builtins")
    except httpx.HTTPError as exc:
        _fail(f"cannot reach verification service: {exc}", EXIT_INTERNAL)
    if response.status_code != 200:
        _fail(f"service returned HTTP {response.status_code}", EXIT_INTERNAL)
    for name in response.json()["builtins"]:
        click.echo(name)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the verification service as an HTTP server."""
    import uvicorn

    uvicorn.run("gpt_recon.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
