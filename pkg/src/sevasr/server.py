"""HTTP API for the adjudication queue, plus static hosting for the UI.

Endpoints (JSON):
  GET  /queue?limit=N                pending candidates, weakest rules first
  GET  /candidate/{utt}/{sys}/{idx}  candidate + context + suggestion + history
  POST /annotate                     record a decision (server stamps the time)
  GET  /progress                     counters the UI displays
  GET  /export                       effective labels document
  GET  /schema                       selectable categories/subtypes with labels

Anything else is served from the UI directory when one is configured.
Appends to the annotation log are linearized by the session lock, so
concurrent requests are safe.
"""

from __future__ import annotations

import json
import mimetypes
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from .annotation import AnnotationError, AnnotationSession, export_effective
from .classifier import (
    CATEGORIES,
    CATEGORY_LABELS,
    SUBTYPE_CATEGORY,
    SUBTYPE_HELP,
    SUBTYPE_LABELS,
    Suggestion,
)
from .corpus import Corpus

_CANDIDATE_RE = re.compile(r"^/candidate/([^/]+)/([^/]+)/(\d+)$")

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>sevasr</title></head>
<body><h1>sevasr annotation API</h1>
<p>No UI directory configured. The JSON API is live: /queue, /progress,
/schema, /export, /candidate/{utterance}/{system}/{index}, POST /annotate.</p>
</body></html>
"""


def _quoted_words(rationale: str) -> list[str]:
    """Cue words the UI underlines: the quoted fragments of the rationale."""
    words: list[str] = []
    for fragment in re.findall(r"'([^']+)'", rationale):
        for w in fragment.split():
            if w not in words:
                words.append(w)
    return words


def schema_document() -> dict:
    return {
        "categories": [
            {
                "id": cat,
                "label": CATEGORY_LABELS[cat],
                "subtypes": [
                    {"id": st, "label": SUBTYPE_LABELS[st], "help": SUBTYPE_HELP[st]}
                    for st in sorted(SUBTYPE_CATEGORY)
                    if SUBTYPE_CATEGORY[st] == cat
                ],
            }
            for cat in CATEGORIES
        ]
    }


def _queue_item(s: Suggestion) -> dict:
    return {
        "utterance_id": s.candidate.utterance_id,
        "system_id": s.candidate.system_id,
        "ref_index": s.candidate.ref_index,
        "ref_word": s.candidate.ref_word,
        "hyp_words": list(s.candidate.hyp_words),
        "segment_kind": s.candidate.segment_kind,
        "category": s.suggestion.category,
        "subtype": s.suggestion.subtype,
        "confidence": s.suggestion.confidence,
        "rationale": s.suggestion.rationale,
    }


class AnnotationServer(ThreadingHTTPServer):
    """HTTP server wired to one annotation session and its corpus."""

    daemon_threads = True

    def __init__(
        self,
        address: tuple[str, int],
        session: AnnotationSession,
        corpus: Corpus,
        system_stats: dict | None = None,
        ui_dir: str | Path | None = None,
        quiet: bool = False,
    ) -> None:
        super().__init__(address, _Handler)
        self.session = session
        self.corpus = corpus
        self.system_stats = system_stats or {}
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.quiet = quiet

    def export_document(self) -> dict:
        return export_effective(
            self.session.log_path, self.session.suggestions, self.system_stats
        )


class _Handler(BaseHTTPRequestHandler):
    server: AnnotationServer

    def log_message(self, fmt: str, *args) -> None:  # noqa: A003
        if not self.server.quiet:
            super().log_message(fmt, *args)

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status=status)

    def do_OPTIONS(self) -> None:  # noqa: N802
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self) -> None:  # noqa: N802
        parsed = urlparse(self.path)
        path = unquote(parsed.path)
        if path == "/queue":
            params = parse_qs(parsed.query)
            limit = None
            if "limit" in params:
                try:
                    limit = max(0, int(params["limit"][0]))
                except ValueError:
                    return self._send_error_json(400, "limit must be an integer")
            pending = self.server.session.queue()
            items = pending if limit is None else pending[:limit]
            return self._send_json(
                {"pending": len(pending), "items": [_queue_item(s) for s in items]}
            )
        if path == "/progress":
            progress = self.server.session.progress()
            doc = self.server.export_document()
            progress["category_totals"] = doc["category_totals"]
            return self._send_json(progress)
        if path == "/export":
            return self._send_json(self.server.export_document())
        if path == "/schema":
            return self._send_json(schema_document())
        match = _CANDIDATE_RE.match(path)
        if match:
            return self._candidate(match.group(1), match.group(2), int(match.group(3)))
        return self._static(path)

    def _candidate(self, utt_id: str, sys_id: str, ref_index: int) -> None:
        session = self.server.session
        corpus = self.server.corpus
        suggestion = session.suggestion((utt_id, sys_id, ref_index))
        if suggestion is None:
            return self._send_error_json(404, f"unknown candidate {(utt_id, sys_id, ref_index)}")
        try:
            utterance = corpus.utterance(utt_id)
            ref_tokens = corpus.ref_tokens(utt_id)
            hyp_tokens = corpus.hyp_tokens(utt_id, sys_id)
            hypothesis_text = corpus.hypothesis(utt_id, sys_id).hypothesis_text
        except KeyError:
            return self._send_error_json(404, f"utterance {utt_id!r} not in corpus")
        ids = corpus.utterance_ids
        pos = ids.index(utt_id)
        neighbors = {
            "previous": (
                {"utterance_id": ids[pos - 1], "reference": corpus.utterance(ids[pos - 1]).reference_text}
                if pos > 0
                else None
            ),
            "next": (
                {"utterance_id": ids[pos + 1], "reference": corpus.utterance(ids[pos + 1]).reference_text}
                if pos + 1 < len(ids)
                else None
            ),
        }
        record = suggestion.to_dict()
        return self._send_json(
            {
                "candidate": record,
                "suggestion": {
                    "category": suggestion.suggestion.category,
                    "subtype": suggestion.suggestion.subtype,
                    "decided": suggestion.suggestion.decided,
                    "confidence": suggestion.suggestion.confidence,
                    "rationale": suggestion.suggestion.rationale,
                },
                "reference_text": utterance.reference_text,
                "hypothesis_text": hypothesis_text,
                "reference_tokens": [
                    {"surface": t.surface, "normalized": t.normalized} for t in ref_tokens
                ],
                "hypothesis_tokens": [
                    {"surface": t.surface, "normalized": t.normalized} for t in hyp_tokens
                ],
                "cue_words": _quoted_words(suggestion.suggestion.rationale),
                "neighbors": neighbors,
                "annotations": [
                    r.to_dict()
                    for r in session.annotations_for((utt_id, sys_id, ref_index))
                ],
            }
        )

    def do_POST(self) -> None:  # noqa: N802
        path = unquote(urlparse(self.path).path)
        if path != "/annotate":
            return self._send_error_json(404, f"no POST route {path}")
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError):
            return self._send_error_json(400, "body must be JSON")
        required = ("annotator", "utterance_id", "system_id", "ref_index", "category", "subtype")
        missing = [k for k in required if k not in body]
        if missing:
            return self._send_error_json(400, f"missing fields: {missing}")
        try:
            record, appended = self.server.session.stamp_and_record(
                annotator=str(body["annotator"]),
                utterance_id=str(body["utterance_id"]),
                system_id=str(body["system_id"]),
                ref_index=int(body["ref_index"]),
                category=str(body["category"]),
                subtype=str(body["subtype"]),
                note=str(body.get("note", "")),
            )
        except AnnotationError as exc:
            status = 404 if "unknown candidate" in str(exc) else 400
            return self._send_error_json(status, str(exc))
        except ValueError as exc:
            return self._send_error_json(400, str(exc))
        return self._send_json(
            {
                "ok": True,
                "appended": appended,
                "record": record.to_dict(),
                "pending": len(self.server.session.queue()),
            }
        )

    def _static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        if path in ("", "/"):
            if ui_dir is None:
                body = _FALLBACK_PAGE.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            path = "/index.html"
        if ui_dir is None:
            return self._send_error_json(404, f"no route {path}")
        target = (ui_dir / path.lstrip("/")).resolve()
        try:
            target.relative_to(ui_dir.resolve())
        except ValueError:
            return self._send_error_json(404, "not found")
        if not target.is_file():
            return self._send_error_json(404, f"no route {path}")
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    session: AnnotationSession,
    corpus: Corpus,
    system_stats: dict | None = None,
    ui_dir: str | Path | None = None,
    host: str = "127.0.0.1",
    port: int = 8765,
    quiet: bool = False,
) -> AnnotationServer:
    return AnnotationServer((host, port), session, corpus, system_stats, ui_dir, quiet)


def run_server(server: AnnotationServer) -> None:
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def start_in_thread(server: AnnotationServer) -> threading.Thread:
    """Start serve_forever on a daemon thread (used by tests)."""
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread
