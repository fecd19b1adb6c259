"""
Lokalna usługa HTTP rejestru

    POST /models                  {"model": base64, "owner_id": str}            -> rekord
    GET  /models/{id}                                                           -> rekord
    POST /models/{id}/query       żądanie przewodowe wyroczni                   -> embeddingi
    POST /disputes                {"accuser_id", "responder_id",
                                   "target_model": base64, "suspect_model": base64} -> spór
    POST /disputes/{id}/resolve   {"seed": int} (opcjonalnie)                   -> spór
    GET  /disputes/{id}                                                         -> spór
"""
import base64
import binascii
import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, Any, Optional, Tuple

import numpy as np

from attacks.oracle import answer_query
from config.settings import Config
from core.exceptions import GroveError, RegistryError
from data.graph_dataset import GraphDataset
from .disputes import open_dispute, resolve
from .store import ModelRegistry

logger = logging.getLogger(__name__)

_MODEL = re.compile(r"^/models/([\w.-]+)$")
_MODEL_QUERY = re.compile(r"^/models/([\w.-]+)/query$")
_DISPUTE = re.compile(r"^/disputes/([\w.-]+)$")
_RESOLVE = re.compile(r"^/disputes/([\w.-]+)/resolve$")


def _decode_model(payload: Dict[str, Any], key: str) -> bytes:
    try:
        return base64.b64decode(payload[key], validate=True)
    except KeyError:
        raise RegistryError(f"missing field {key}")
    except (binascii.Error, TypeError, ValueError):
        raise RegistryError(f"field {key} is not valid base64")


class RegistryServer:
    """
    Serwer rejestru nad ModelRegistry

    Rozstrzyganie sporów wymaga grafu i D_v weryfikatora; C_sim jest
    pobierany z rejestru dla modelu oskarżyciela.
    """

    def __init__(self, registry: ModelRegistry, graph: Optional[GraphDataset] = None, d_v=None,
                 host: str = Config.HOST, port: int = Config.PORT,
                 verification_digest: Optional[str] = None):
        self.registry = registry
        self.graph = graph
        self.d_v = None if d_v is None else np.asarray(d_v, dtype=np.int64)
        self.verification_digest = verification_digest
        self.httpd = ThreadingHTTPServer((host, port), self._handler_class())
        self._thread: Optional[threading.Thread] = None

    @property
    def url(self) -> str:
        host, port = self.httpd.server_address[:2]
        return f"http://{host}:{port}"

    # Obsługa tras

    def route(self, method: str, path: str, payload: Dict[str, Any]) -> Tuple[int, Dict[str, Any]]:
        if method == "POST" and path == "/models":
            record = self.registry.register(_decode_model(payload, "model"), str(payload.get("owner_id", "")))
            return 201, record.to_dict()
        if method == "GET" and _MODEL.match(path):
            return 200, self.registry.get(_MODEL.match(path).group(1)).to_dict()
        if method == "POST" and _MODEL_QUERY.match(path):
            model = self.registry.load_model(_MODEL_QUERY.match(path).group(1))
            return 200, answer_query(model, payload)
        if method == "POST" and path == "/disputes":
            dispute = open_dispute(
                self.registry,
                self.registry.get(str(payload.get("accuser_id"))),
                self.registry.get(str(payload.get("responder_id"))),
                _decode_model(payload, "target_model"),
                _decode_model(payload, "suspect_model"),
            )
            return 201, dispute.to_dict()
        if method == "POST" and _RESOLVE.match(path):
            if self.graph is None or self.d_v is None:
                raise RegistryError("this registry server has no verification dataset configured")
            dispute = self.registry.get_dispute(_RESOLVE.match(path).group(1))
            csim = self.registry.load_csim(dispute.accuser_record.model_id) if not dispute.status.terminal else None
            resolved = resolve(self.registry, dispute, csim, self.graph, self.d_v,
                               seed=int(payload.get("seed", 0)), verification_digest=self.verification_digest)
            return 200, resolved.to_dict()
        if method == "GET" and _DISPUTE.match(path):
            return 200, self.registry.get_dispute(_DISPUTE.match(path).group(1)).to_dict()
        return 404, {"error": f"no route for {method} {path}"}

    def _handler_class(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def _respond(self, status: int, body: Dict[str, Any]) -> None:
                data = json.dumps(body).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def _dispatch(self, method: str) -> None:
                try:
                    length = int(self.headers.get("Content-Length") or 0)
                    raw = self.rfile.read(length) if length else b""
                    payload = json.loads(raw) if raw else {}
                    status, body = server.route(method, self.path, payload)
                except json.JSONDecodeError as e:
                    status, body = 400, {"error": f"invalid JSON body: {e}"}
                except RegistryError as e:
                    status = 404 if str(e).startswith("unknown") else 400
                    body = {"error": str(e)}
                except GroveError as e:
                    status, body = 400, {"error": str(e)}
                except Exception as e:
                    logger.exception("Błąd obsługi żądania")
                    status, body = 500, {"error": str(e)}
                self._respond(status, body)

            def do_GET(self):
                self._dispatch("GET")

            def do_POST(self):
                self._dispatch("POST")

            def log_message(self, format, *args):
                logger.debug(f"{self.address_string()} {format % args}")

        return Handler

    # Cykl życia

    def start(self) -> "RegistryServer":
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        logger.info(f"Rejestr nasłuchuje na {self.url}")
        return self

    def serve_forever(self) -> None:
        logger.info(f"Rejestr nasłuchuje na {self.url}")
        self.httpd.serve_forever()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
