"""Clients for the HTTP service.

LocalClient mounts the application in-process through an ASGI transport, so
the command line works without a running server and with identical behaviour.
RemoteClient talks to a served instance over the network.
"""

from __future__ import annotations

import asyncio
from typing import Any, Optional

import httpx


class ServiceError(RuntimeError):
    """The service answered with an error status."""

    def __init__(self, status_code: int, detail: str) -> None:
        super().__init__(f"service returned {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


def _parse(response: httpx.Response) -> Any:
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except Exception:
            detail = response.text
        raise ServiceError(response.status_code, str(detail))
    return response.json()


class LocalClient:
    """In-process client; requests never leave the interpreter."""

    def __init__(self) -> None:
        from .service.app import create_app
        self._app = create_app()

    def get(self, path: str) -> Any:
        return self._request("GET", path, None)

    def post(self, path: str, payload: dict) -> Any:
        return self._request("POST", path, payload)

    def _request(self, method: str, path: str, payload: Optional[dict]) -> Any:
        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://maserlab.local",
                                         timeout=None) as client:
                return await client.request(method, path, json=payload)

        return _parse(asyncio.run(go()))


class RemoteClient:
    """Client for a service instance reachable over HTTP."""

    def __init__(self, base_url: str, timeout: float = 600.0) -> None:
        self._client = httpx.Client(base_url=base_url, timeout=timeout)

    def get(self, path: str) -> Any:
        return _parse(self._client.get(path))

    def post(self, path: str, payload: dict) -> Any:
        return _parse(self._client.post(path, json=payload))
