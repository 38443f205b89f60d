"""Shared fixtures: the five-pair German example corpus and a local
embedding service stub speaking the /embed protocol."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from semetrics import EvalPair
from semetrics import test_hash_embed as hash_embed

# Five German reference/prediction pairs exercising the interesting metric
# behaviors: near-miss grammar, word reordering, compound confusion,
# morphology, and synonym + number swaps.
TABLE2_PAIRS = [
    EvalPair(
        id="p1",
        reference="Andererseits seien strategische Entscheide für den Rückgang verantwortlich.",
        hypothesis="Andererseits sei ein strategischer Entscheid für den Rückgang verantwortlich.",
    ),
    EvalPair(
        id="p2",
        reference="Boeing lehnte eine Stellungnahme ab.",
        hypothesis="Boeing hat den Stellungnahme abgelehnt.",
    ),
    EvalPair(
        id="p3",
        reference="Wegen des Brandes war die Dorfstrasse für mehrere Stunden gesperrt.",
        hypothesis="Wegen des Brandes war die Dorfstrafe mehrere Stunden gesperrt.",
    ),
    EvalPair(
        id="p4",
        reference="Aus Syrien stammten im Mai 52 Asylbewerber.",
        hypothesis="Aus Syrien stammten im Mai 52 Asylwerber.",
    ),
    EvalPair(
        id="p5",
        reference="Inzwischen ist es kurz vor 22 Uhr.",
        hypothesis="Mittlerweile ist es kurz vor 10 Uhr.",
    ),
]


@pytest.fixture
def table2_pairs():
    return list(TABLE2_PAIRS)


class _StubHandler(BaseHTTPRequestHandler):
    server_version = "stub-embed/0"

    def log_message(self, *args):  # keep test output clean
        pass

    def do_GET(self):
        if self.path != "/health":
            self._send(404, {"error": "not found"})
            return
        self._send(200, {"status": "ok", "model": "stub-hash", "dim": 256})

    def do_POST(self):
        if self.path != "/embed":
            self._send(404, {"error": "not found"})
            return
        state = self.server.state
        if state["fail_statuses"]:
            code = state["fail_statuses"].pop(0)
            self._send(code, {"error": f"injected {code}"})
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            payload = json.loads(self.rfile.read(length))
            texts = payload["texts"]
            assert isinstance(texts, list)
        except Exception:
            self._send(400, {"error": "malformed request"})
            return
        state["requests"].append(list(texts))
        rows = [hash_embed(t).tolist() for t in texts]
        if state["drop_last_vector"] and rows:
            rows = rows[:-1]
        self._send(200, {"dim": 256, "embeddings": rows})

    def _send(self, code, payload):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class StubEmbedServer:
    """Local HTTP stand-in for the embedding service, hash-backed."""

    def __init__(self):
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self._httpd.state = {"fail_statuses": [], "requests": [],
                             "drop_last_vector": False}
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self._httpd.server_address[1]}"

    @property
    def state(self) -> dict:
        return self._httpd.state

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._httpd.shutdown()
        self._httpd.server_close()
        self._thread.join(timeout=5)


@pytest.fixture
def embed_server():
    with StubEmbedServer() as server:
        yield server
