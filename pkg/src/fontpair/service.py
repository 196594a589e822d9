"""Read-only HTTP query service over one immutable engine snapshot.

Endpoints (JSON bodies):

* ``GET /fonts?role={header|follower}``            -> ``{"fonts": [...]}``
* ``GET /recommend?header=<id>&method=<m>&n=<N>``  -> ``{"recommendations": [{font_id, score}]}``
* ``GET /score?header=<id>&follower=<id>&method=<m>`` -> ``{"score": <float>}``
* ``POST /comparisons`` with ``{header, follower_a, follower_b, choice}``
  appends one record to the comparison log (the only write path).

Every response is a deterministic function of (snapshot, request); the
comparison log is an append-only file guarded by a lock.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .snapshot import EngineSnapshot, SnapshotError
from .study_analytics import ComparisonRecord, write_comparison


def make_server(
    snapshot: EngineSnapshot,
    host: str = "127.0.0.1",
    port: int = 8765,
    comparison_log: str | Path = "comparisons.log",
) -> ThreadingHTTPServer:
    """Build (but do not start) the service; call ``serve_forever`` to run it."""
    log_path = Path(comparison_log)
    log_lock = threading.Lock()

    class QueryHandler(BaseHTTPRequestHandler):
        def log_message(self, fmt: str, *args) -> None:  # quiet by default
            pass

        def _reply(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _error(self, status: int, message: str) -> None:
            self._reply(status, {"error": message})

        def do_GET(self) -> None:  # noqa: N802 (http.server API)
            url = urlparse(self.path)
            query = {k: v[0] for k, v in parse_qs(url.query).items()}
            try:
                if url.path == "/fonts":
                    role = query.get("role", "")
                    self._reply(200, {"fonts": list(snapshot.fonts(role))})
                elif url.path == "/recommend":
                    header = query.get("header", "")
                    method = query.get("method", "dsknn")
                    n = int(query.get("n", "5"))
                    ranked = snapshot.recommend(method, header, n)
                    self._reply(
                        200,
                        {
                            "header": header,
                            "method": method,
                            "recommendations": [
                                {"font_id": fid, "score": score} for fid, score in ranked
                            ],
                        },
                    )
                elif url.path == "/score":
                    method = query.get("method", "dsknn")
                    score = snapshot.score(
                        method, query.get("header", ""), query.get("follower", "")
                    )
                    self._reply(200, {"score": score})
                else:
                    self._error(404, f"no such endpoint: {url.path}")
            except KeyError as exc:
                self._error(404, str(exc).strip("'\""))
            except (SnapshotError, ValueError) as exc:
                self._error(400, str(exc))

        def do_POST(self) -> None:  # noqa: N802
            url = urlparse(self.path)
            if url.path != "/comparisons":
                self._error(404, f"no such endpoint: {url.path}")
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
                header = payload["header"]
                follower_a = payload["follower_a"]
                follower_b = payload["follower_b"]
                choice = payload["choice"]
            except (json.JSONDecodeError, KeyError) as exc:
                self._error(400, f"malformed comparison payload: {exc}")
                return
            if header not in snapshot.header_store:
                self._error(404, f"unknown font id: {header}")
                return
            if choice in ("a", follower_a):
                hits = (1, 0)
            elif choice in ("b", follower_b):
                hits = (0, 1)
            else:
                self._error(400, f"choice must name a side, got {choice!r}")
                return
            record = ComparisonRecord(
                id=f"{header}|{follower_a}|{follower_b}",
                hit1=hits[0],
                hit2=hits[1],
                method1=follower_a,
                method2=follower_b,
            )
            with log_lock:
                write_comparison(log_path, record)
            self._reply(201, {"status": "recorded", "id": record.id})

    return ThreadingHTTPServer((host, port), QueryHandler)


def serve(
    snapshot: EngineSnapshot,
    host: str = "127.0.0.1",
    port: int = 8765,
    comparison_log: str | Path = "comparisons.log",
) -> None:
    """Run the service until interrupted."""
    server = make_server(snapshot, host, port, comparison_log)
    try:
        server.serve_forever()
    finally:
        server.server_close()
