"""Human adjudication log and effective label state.

Annotations live in an append-only JSONL log: every decision is one
record, overrides are new records, and the latest timestamp wins.  Logs
from several annotators merge by concatenation.  Replaying any log prefix
reproduces the effective state, and an acknowledged append is flushed and
fsynced so it survives a crash.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .classifier import Suggestion, validate_label

Key = tuple[str, str, int]


class AnnotationError(ValueError):
    """Raised for rejected records or corrupt logs."""


def utc_timestamp() -> str:
    """Sortable UTC timestamp: 2026-01-31T12:00:00.000000Z."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass(frozen=True)
class AnnotationRecord:
    timestamp: str
    annotator: str
    utterance_id: str
    system_id: str
    ref_index: int
    category: str
    subtype: str
    note: str = ""
    supersedes: str | None = None

    def __post_init__(self) -> None:
        validate_label(self.category, self.subtype)
        if not self.annotator:
            raise AnnotationError("annotator must be non-empty")

    @property
    def key(self) -> Key:
        return (self.utterance_id, self.system_id, self.ref_index)

    def payload_fingerprint(self) -> tuple:
        """Identity of the decision itself, used for retry deduplication."""
        return (self.key, self.annotator, self.category, self.subtype, self.note)

    def to_dict(self) -> dict:
        d = {
            "timestamp": self.timestamp,
            "annotator": self.annotator,
            "utterance_id": self.utterance_id,
            "system_id": self.system_id,
            "ref_index": self.ref_index,
            "category": self.category,
            "subtype": self.subtype,
            "note": self.note,
        }
        if self.supersedes is not None:
            d["supersedes"] = self.supersedes
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationRecord":
        return cls(
            timestamp=d["timestamp"],
            annotator=d["annotator"],
            utterance_id=d["utterance_id"],
            system_id=d["system_id"],
            ref_index=int(d["ref_index"]),
            category=d["category"],
            subtype=d["subtype"],
            note=d.get("note", ""),
            supersedes=d.get("supersedes"),
        )


def read_log(path: str | Path) -> list[AnnotationRecord]:
    """Read a log file; a corrupt line fails the whole read with its number."""
    path = Path(path)
    if not path.exists():
        return []
    records: list[AnnotationRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(AnnotationRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise AnnotationError(f"{path}:{lineno}: corrupt log line ({exc})") from exc
    return records


def append_record(path: str | Path, record: AnnotationRecord) -> None:
    """Durably append one record (flush + fsync before returning)."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def effective_records(records: Iterable[AnnotationRecord]) -> dict[Key, AnnotationRecord]:
    """Latest record per candidate; ties on timestamp go to the later line."""
    state: dict[Key, AnnotationRecord] = {}
    for record in records:
        current = state.get(record.key)
        if current is None or record.timestamp >= current.timestamp:
            state[record.key] = record
    return state


class AnnotationSession:
    """Adjudication queue over suggestions plus the append-only log.

    The queue holds undecided candidates without a human record, ordered by
    ascending confidence (weakest rules first).  Appends are serialized
    through a lock so concurrent HTTP requests linearize.
    """

    def __init__(
        self, suggestions: Sequence[Suggestion], log_path: str | Path
    ) -> None:
        self.log_path = Path(log_path)
        self._suggestions: dict[Key, Suggestion] = {}
        for s in suggestions:
            if s.key in self._suggestions:
                raise AnnotationError(f"duplicate suggestion for candidate {s.key}")
            self._suggestions[s.key] = s
        self._lock = threading.Lock()
        log_records = read_log(self.log_path)
        self._annotated: dict[Key, AnnotationRecord] = effective_records(log_records)
        self._record_count = len(log_records)

    @property
    def suggestions(self) -> list[Suggestion]:
        return list(self._suggestions.values())

    def suggestion(self, key: Key) -> Suggestion | None:
        return self._suggestions.get(key)

    def annotations_for(self, key: Key) -> list[AnnotationRecord]:
        return [r for r in read_log(self.log_path) if r.key == key]

    def queue(self, limit: int | None = None) -> list[Suggestion]:
        pending = [
            s
            for s in self._suggestions.values()
            if not s.suggestion.decided and s.key not in self._annotated
        ]
        pending.sort(key=lambda s: (s.suggestion.confidence, s.key))
        return pending if limit is None else pending[:limit]

    def progress(self) -> dict:
        total = len(self._suggestions)
        decided_auto = sum(1 for s in self._suggestions.values() if s.suggestion.decided)
        human = sum(1 for k in self._annotated if k in self._suggestions)
        pending = len(self.queue())
        return {
            "total_candidates": total,
            "auto_decided": decided_auto,
            "human_annotated": human,
            "pending": pending,
            "log_records": self._record_count,
        }

    def record(self, record: AnnotationRecord) -> tuple[AnnotationRecord, bool]:
        """Validate, durably append, and apply one annotation.

        Returns (stored_record, appended).  A retry carrying the same
        payload as the candidate's latest record by the same annotator is
        acknowledged without a second append.
        """
        if record.key not in self._suggestions:
            raise AnnotationError(f"unknown candidate {record.key}")
        with self._lock:
            current = self._annotated.get(record.key)
            if (
                current is not None
                and current.payload_fingerprint() == record.payload_fingerprint()
            ):
                return current, False
            append_record(self.log_path, record)
            self._record_count += 1
            if current is None or record.timestamp >= current.timestamp:
                self._annotated[record.key] = record
            return record, True

    def stamp_and_record(
        self,
        annotator: str,
        utterance_id: str,
        system_id: str,
        ref_index: int,
        category: str,
        subtype: str,
        note: str = "",
    ) -> tuple[AnnotationRecord, bool]:
        """Build a server-stamped record and apply it."""
        current = self._annotated.get((utterance_id, system_id, ref_index))
        record = AnnotationRecord(
            timestamp=utc_timestamp(),
            annotator=annotator,
            utterance_id=utterance_id,
            system_id=system_id,
            ref_index=ref_index,
            category=category,
            subtype=subtype,
            note=note,
            supersedes=current.timestamp if current is not None else None,
        )
        return self.record(record)


def open_session(
    suggestions: Sequence[Suggestion], log_path: str | Path
) -> AnnotationSession:
    """Open a session over a suggestion set and a (possibly empty) log."""
    return AnnotationSession(suggestions, log_path)


def export_effective(
    log_path: str | Path,
    suggestions: Sequence[Suggestion],
    system_stats: dict | None = None,
) -> dict:
    """Final label per candidate: human record, else decided auto, else pending.

    Pure function of (log bytes, suggestions): the output carries no clock
    or environment state, so two runs are byte-identical once serialized.
    """
    annotated = effective_records(read_log(log_path))
    labels = []
    totals = {c: 0 for c in ("Lex", "Gram", "Cotx", "Fail")}
    pending = 0
    for s in sorted(suggestions, key=lambda s: s.key):
        human = annotated.get(s.key)
        if human is not None:
            status, source = "final", "human"
            category, subtype = human.category, human.subtype
            annotator: str | None = human.annotator
            decided_at: str | None = human.timestamp
        elif s.suggestion.decided:
            status, source = "final", "auto"
            category, subtype = s.suggestion.category, s.suggestion.subtype
            annotator = None
            decided_at = None
        else:
            status, source = "pending", "none"
            category, subtype = None, None
            annotator = None
            decided_at = None
            pending += 1
        if status == "final" and category is not None:
            totals[category] += 1
        labels.append(
            {
                "utterance_id": s.candidate.utterance_id,
                "system_id": s.candidate.system_id,
                "ref_index": s.candidate.ref_index,
                "status": status,
                "source": source,
                "category": category,
                "subtype": subtype,
                "annotator": annotator,
                "decided_at": decided_at,
            }
        )
    return {
        "labels": labels,
        "category_totals": totals,
        "pending": pending,
        "systems": dict(sorted((system_stats or {}).items())),
    }


def write_labels(doc: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def read_labels(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
