"""Local HTTP/JSON service over a pipeline artifact directory.

Serves the cluster-explorer endpoints (dendrogram, threshold cuts,
scenario detail, grids, metrics) plus a static UI directory when one is
provided. All pipeline artifacts are treated as immutable; the only
mutable state is ``labels.json``, whose writes are serialized under a
lock and performed atomically (write-then-rename).
"""
from __future__ import annotations

import json
import os
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from scenex import hac
from scenex.validation import LABEL_SOURCES

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".map": "application/json",
}

_INDEX_FALLBACK = """<!DOCTYPE html>
<html><head><title>scenario artifacts</title></head>
<body>
<h1>Scenario artifact service</h1>
<p>No UI bundle configured. JSON endpoints:</p>
<ul>
<li>GET /api/dendrogram</li>
<li>GET /api/clusters?threshold=x</li>
<li>GET /api/scenarios</li>
<li>GET /api/scenario/{id}</li>
<li>GET /api/grid/{id}/{channel}</li>
<li>GET /api/metrics</li>
<li>GET /api/background</li>
<li>GET /api/labels, POST /api/labels</li>
</ul>
</body></html>
"""


class ArtifactStore:
    """Loads a run's artifacts once and answers endpoint queries."""

    def __init__(self, artifact_dir, ui_dir=None):
        self.dir = Path(artifact_dir)
        manifest_path = self.dir / "run_manifest.json"
        if not manifest_path.exists():
            raise FileNotFoundError(f"no run_manifest.json under {self.dir}")
        self.manifest = self._read_json(manifest_path)
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self._labels_lock = threading.Lock()
        self._grid_cache: dict[str, dict] = {}
        self._grid_lock = threading.Lock()

        self.scenarios: dict[str, dict] = {}
        scen_path = self.dir / "scenarios.json"
        if scen_path.exists():
            for s in self._read_json(scen_path)["scenarios"]:
                self.scenarios[s["scenario_id"]] = s
        self.keyframes = self._optional("keyframes.json") or {}
        self.dendrogram_dict = self._optional("dendrogram.json")
        self.dendrogram = (
            hac.dendrogram_from_dict(self.dendrogram_dict) if self.dendrogram_dict else None
        )
        self.metrics = self._optional("metrics.json")
        self.summary = self._optional("recording_summary.json")

    @staticmethod
    def _read_json(path: Path):
        return json.loads(path.read_text(encoding="utf-8"))

    def _optional(self, name: str):
        path = self.dir / name
        return self._read_json(path) if path.exists() else None

    def scenario_summaries(self) -> list[dict]:
        labels = self.load_labels()["labels"]
        out = []
        for sid in sorted(self.scenarios):
            s = self.scenarios[sid]
            out.append(
                {
                    "scenario_id": sid,
                    "category": s["category"],
                    "frame_start": s["frame_start"],
                    "frame_end": s["frame_end"],
                    "ego_id": s["interaction"]["ego_id"],
                    "challenger_id": s["interaction"]["challenger_id"],
                    "challenger_class": s["challenger"]["class"],
                    "pet": s["interaction"]["pet"],
                    "min_distance": s["interaction"]["min_distance"],
                    "n_others": len(s["others"]),
                    "label": labels.get(sid),
                }
            )
        return out

    def scenario_detail(self, sid: str) -> dict | None:
        s = self.scenarios.get(sid)
        if s is None:
            return None
        detail = dict(s)
        detail["key_frame"] = self.keyframes.get(sid)
        detail["label"] = self.load_labels()["labels"].get(sid)
        return detail

    def clusters_at(self, threshold: float) -> dict:
        d = self.dendrogram
        assignments = hac.cut(d, threshold)
        ids = d.row_ids if d.row_ids is not None else [str(i) for i in range(d.n_samples)]
        groups: dict[int, list[str]] = {}
        for sid, c in zip(ids, assignments):
            groups.setdefault(int(c), []).append(sid)
        return {
            "threshold": threshold,
            "n_clusters": len(groups),
            "clusters": [
                {"cluster_id": c, "size": len(groups[c]), "scenario_ids": sorted(groups[c])}
                for c in sorted(groups)
            ],
        }

    def grid_channel(self, sid: str, channel: str) -> dict | None:
        if sid not in self.scenarios:
            return None
        with self._grid_lock:
            tensor = self._grid_cache.get(sid)
        if tensor is None:
            path = self.dir / "grids" / f"{sid}.json"
            if not path.exists():
                return None
            tensor = self._read_json(path)
            with self._grid_lock:
                self._grid_cache[sid] = tensor
        if channel not in tensor["channel_names"]:
            return None
        return {
            "scenario_id": sid,
            "channel": channel,
            "height": tensor["height"],
            "width": tensor["width"],
            "values": tensor["channels"][channel],
        }

    def background(self) -> dict | None:
        if self.summary is None:
            return None
        return {
            "recording_id": self.summary["recording_id"],
            "traffic_space_name": self.summary["traffic_space_name"],
            "extent": self.summary["background_extent"],
        }

    def load_labels(self) -> dict:
        path = self.dir / "labels.json"
        with self._labels_lock:
            if path.exists():
                return self._read_json(path)
        return {"labels": {}, "source": "manual"}

    def store_labels(self, updates: dict) -> dict:
        if not isinstance(updates, dict):
            raise ValueError("labels payload must be an object of scenario_id -> label")
        for sid, label in updates.items():
            if not isinstance(label, str) or not label:
                raise ValueError(f"label for {sid!r} must be a nonempty string")
            if sid not in self.scenarios:
                raise KeyError(f"unknown scenario {sid!r}")
        path = self.dir / "labels.json"
        tmp = self.dir / "labels.json.tmp"
        with self._labels_lock:
            current = {"labels": {}, "source": "manual"}
            if path.exists():
                current = self._read_json(path)
            current["labels"].update(updates)
            if current.get("source") not in LABEL_SOURCES:
                current["source"] = "manual"
            tmp.write_text(
                json.dumps(current, sort_keys=True, indent=2) + "\n", encoding="utf-8"
            )
            os.replace(tmp, path)
            return current


class ScenexServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, store: ArtifactStore):
        super().__init__(address, _Handler)
        self.store = store


class _Handler(BaseHTTPRequestHandler):
    server: ScenexServer

    def log_message(self, format, *args):
        pass

    def _send(self, status: int, body: bytes, content_type: str):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _json(self, obj, status: int = 200):
        self._send(status, json.dumps(obj).encode("utf-8"), "application/json")

    def _error(self, status: int, message: str):
        self._json({"error": message}, status=status)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        store = self.server.store
        parsed = urllib.parse.urlparse(self.path)
        parts = [p for p in parsed.path.split("/") if p]

        if not parts or parts[0] != "api":
            self._static(parsed.path)
            return
        route = parts[1] if len(parts) > 1 else ""
        if route == "dendrogram":
            if store.dendrogram_dict is None:
                self._error(404, "dendrogram not built")
            else:
                self._json(store.dendrogram_dict)
        elif route == "clusters":
            if store.dendrogram is None:
                self._error(404, "dendrogram not built")
                return
            query = urllib.parse.parse_qs(parsed.query)
            raw = query.get("threshold", [None])[0]
            if raw is None:
                self._error(400, "missing threshold parameter")
                return
            try:
                threshold = float(raw)
            except ValueError:
                self._error(400, f"malformed threshold {raw!r}")
                return
            if not threshold >= 0.0:
                self._error(400, "threshold must be >= 0")
                return
            self._json(store.clusters_at(threshold))
        elif route == "scenarios" and len(parts) == 2:
            self._json(store.scenario_summaries())
        elif route == "scenario" and len(parts) == 3:
            detail = store.scenario_detail(urllib.parse.unquote(parts[2]))
            if detail is None:
                self._error(404, f"unknown scenario {parts[2]!r}")
            else:
                self._json(detail)
        elif route == "grid" and len(parts) == 4:
            sid = urllib.parse.unquote(parts[2])
            channel = urllib.parse.unquote(parts[3])
            grid = store.grid_channel(sid, channel)
            if grid is None:
                self._error(404, f"no grid for scenario {sid!r} channel {channel!r}")
            else:
                self._json(grid)
        elif route == "metrics":
            if store.metrics is None:
                self._error(404, "metrics not built")
            else:
                self._json(store.metrics)
        elif route == "background":
            bg = store.background()
            if bg is None:
                self._error(404, "recording summary not built")
            else:
                self._json(bg)
        elif route == "labels":
            self._json(store.load_labels())
        else:
            self._error(404, f"unknown endpoint {parsed.path!r}")

    def do_POST(self):
        store = self.server.store
        parsed = urllib.parse.urlparse(self.path)
        if parsed.path != "/api/labels":
            self._error(404, f"unknown endpoint {parsed.path!r}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length).decode("utf-8")) if length else {}
        except (ValueError, UnicodeDecodeError):
            self._error(400, "request body is not valid JSON")
            return
        updates = payload.get("labels") if isinstance(payload, dict) else None
        if updates is None:
            self._error(400, 'expected a JSON body like {"labels": {"<scenario_id>": "<label>"}}')
            return
        try:
            current = store.store_labels(updates)
        except KeyError as exc:
            self._error(400, str(exc.args[0]))
            return
        except ValueError as exc:
            self._error(400, str(exc))
            return
        self._json(current)

    def _static(self, path: str):
        store = self.server.store
        if store.ui_dir is None:
            if path in ("/", "/index.html"):
                self._send(200, _INDEX_FALLBACK.encode("utf-8"), "text/html; charset=utf-8")
            else:
                self._error(404, "no UI bundle configured")
            return
        rel = urllib.parse.unquote(path.lstrip("/")) or "index.html"
        target = (store.ui_dir / rel).resolve()
        if not str(target).startswith(str(store.ui_dir) + os.sep) and target != store.ui_dir:
            self._error(404, "not found")
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._error(404, "not found")
            return
        ctype = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)


def create_server(artifact_dir, host: str = "127.0.0.1", port: int = 8008, ui_dir=None) -> ScenexServer:
    """Build a ready-to-run server; port 0 picks a free port."""
    store = ArtifactStore(artifact_dir, ui_dir=ui_dir)
    return ScenexServer((host, port), store)


def serve(artifact_dir, host: str = "127.0.0.1", port: int = 8008, ui_dir=None):
    """Blocking entry point used by the CLI ``serve`` subcommand."""
    httpd = create_server(artifact_dir, host=host, port=port, ui_dir=ui_dir)
    address = httpd.server_address
    print(f"serving artifacts from {artifact_dir} at http://{address[0]}:{address[1]}/")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
