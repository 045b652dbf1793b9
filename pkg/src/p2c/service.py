"""Stateless HTTP conversion service over one shared immutable engine.

Endpoints:
    POST /convert   {"pinyin": [..], "k": int?, "mode": str?, "lexicons": [..]?}
                    -> {"results": [{"surface", "score", "nodes": [..]}]}
    GET  /health    -> {"status": "ok", "engine": {..config echo..}}
    GET  /lattice?pinyin=wo+men  -> the debug lattice as JSON

Requests never mutate the engine, so the threading server needs no locks.
Malformed requests get a 400 with {"error": message}; unexpected faults get
a 500 rather than a dropped connection.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .engine import convert
from .errors import P2CError
from .lattice import build_lattice, inject_words


def _path_payload(path):
    return {
        "surface": path.surface,
        "score": path.score,
        "nodes": [{"start": s, "end": e, "surface": surf, "kind": kind}
                  for s, e, surf, kind in path.spans()],
    }


def _lattice_payload(lattice):
    return {
        "n": lattice.n,
        "incomplete": lattice.incomplete,
        "nodes": [{"start": nd.start, "end": nd.end, "surface": nd.surface,
                   "kind": nd.kind}
                  for nd in sorted(lattice.all_nodes(),
                                   key=lambda nd: (nd.start, nd.order))],
    }


class ConvertHandler(BaseHTTPRequestHandler):
    engine = None          # set by make_server on the subclass
    server_version = "p2c"
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default; tests stay clean
        pass

    def _reply(self, status, payload):
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _fail(self, status, message):
        self._reply(status, {"error": message})

    def do_GET(self):
        url = urlparse(self.path)
        if url.path == "/health":
            self._reply(200, {"status": "ok",
                              "engine": self.engine.config_echo()})
            return
        if url.path == "/lattice":
            query = parse_qs(url.query)
            pinyin = tuple(" ".join(query.get("pinyin", [""])).split())
            if not pinyin:
                self._fail(400, "missing pinyin query parameter")
                return
            try:
                lattice = build_lattice(pinyin, self.engine.char_dict)
                for lx in self.engine.lexicons:
                    inject_words(lattice, lx)
            except P2CError as exc:
                self._fail(400, str(exc))
                return
            self._reply(200, _lattice_payload(lattice))
            return
        self._fail(404, f"unknown path {url.path}")

    def do_POST(self):
        if urlparse(self.path).path != "/convert":
            self._fail(404, f"unknown path {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length).decode("utf-8"))
            if not isinstance(body, dict):
                raise ValueError("body must be a JSON object")
            pinyin = body["pinyin"]
            if (not isinstance(pinyin, list)
                    or not all(isinstance(s, str) for s in pinyin)):
                raise ValueError("pinyin must be a list of strings")
            k = body.get("k")
            if k is not None and (not isinstance(k, int) or k < 1):
                raise ValueError("k must be a positive integer")
            mode = body.get("mode")
            if mode is not None and mode not in ("emission", "combined"):
                raise ValueError(f"unknown mode {mode!r}")
            lexicons = body.get("lexicons")
            if lexicons is not None and (
                    not isinstance(lexicons, list)
                    or not all(isinstance(s, str) for s in lexicons)):
                raise ValueError("lexicons must be a list of names")
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            self._fail(400, f"bad request: {exc}")
            return
        try:
            paths = convert(pinyin, self.engine, k=k, mode=mode,
                            lexicon_names=lexicons)
        except P2CError as exc:
            self._fail(400, str(exc))
            return
        except Exception as exc:  # pragma: no cover - defensive
            self._fail(500, f"internal error: {exc}")
            return
        self._reply(200, {"results": [_path_payload(p) for p in paths]})


def make_server(engine, host="127.0.0.1", port=8025):
    """ThreadingHTTPServer bound to (host, port); port 0 picks a free one."""
    handler = type("BoundConvertHandler", (ConvertHandler,),
                   {"engine": engine})
    return ThreadingHTTPServer((host, port), handler)


def serve(engine, host="127.0.0.1", port=8025):
    """Run until interrupted; returns cleanly on Ctrl-C."""
    server = make_server(engine, host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
