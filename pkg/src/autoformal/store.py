"""Versioned, append-only project persistence.

A project is a plain directory of JSON files plus an event journal
(`journal.ndjson`, one event per line, gapless sequence numbers) and a
derived index (`index.json`). Content-addressed artifacts (theory
versions, prompt transcripts) are write-once; the index is recomputable
by folding the journal, and `replay_journal` checks that it actually is.
"""

from __future__ import annotations

import json
import os
import secrets
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional

from .canonical import canonical_json_bytes, content_hash, normalize_newlines
from .concepts import ConceptGraph
from .fsutil import ImmutableOverwrite, utc_now_iso, write_once
from .gateway import PromptTranscript, TranscriptStore
from .ingest import SourceDocument, StatementRecord
from .prover import CheckResult, ProofAttempt

__all__ = [
    "Origin",
    "EventKind",
    "Event",
    "TheoryVersion",
    "Verdict",
    "WorkbenchStore",
    "ProjectNotFound",
    "ProjectLocked",
    "UnknownVersion",
    "CorruptLineage",
    "JournalGap",
    "ProjectionMismatch",
    "InvariantViolation",
    "compute_version_id",
]


class ProjectNotFound(FileNotFoundError):
    pass


class ProjectLocked(RuntimeError):
    def __init__(self, pid: int):
        super().__init__(f"project is locked by pid {pid}")
        self.pid = pid


class UnknownVersion(KeyError):
    pass


class CorruptLineage(RuntimeError):
    pass


class JournalGap(RuntimeError):
    def __init__(self, seq: int):
        super().__init__(f"journal is missing sequence number {seq}")
        self.seq = seq


class ProjectionMismatch(RuntimeError):
    def __init__(self, details: str):
        super().__init__(f"journal projection disagrees with index: {details}")
        self.details = details


class InvariantViolation(ValueError):
    pass


class Origin(Enum):
    LLM = "llm"
    REPAIR = "repair"
    MERGE = "merge"
    HUMAN = "human"


class EventKind(Enum):
    INGESTED = "ingested"
    EXTRACTED = "extracted"
    PROMPTED = "prompted"
    GENERATED = "generated"
    REPAIRED = "repaired"
    MERGED = "merged"
    CHECKED = "checked"
    PROVED = "proved"
    HUMAN_EDIT = "human_edit"
    VERDICT = "verdict"


_ORIGIN_EVENT = {
    Origin.LLM: EventKind.GENERATED,
    Origin.REPAIR: EventKind.REPAIRED,
    Origin.MERGE: EventKind.MERGED,
    Origin.HUMAN: EventKind.HUMAN_EDIT,
}


@dataclass(frozen=True)
class Event:
    seq: int
    kind: EventKind
    payload_ref: str
    at: str

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind.value, "payload_ref": self.payload_ref, "at": self.at}

    @classmethod
    def from_json(cls, obj: dict) -> "Event":
        return cls(seq=obj["seq"], kind=EventKind(obj["kind"]), payload_ref=obj["payload_ref"], at=obj["at"])


def compute_version_id(text: str) -> str:
    return "thv-" + content_hash(normalize_newlines(text))[:16]


@dataclass
class TheoryVersion:
    version_id: str
    parent_id: Optional[str]
    origin: Origin
    stmt_ids: tuple[str, ...]
    text: str
    created_at: str
    author_note: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def meta_json(self) -> dict:
        return {
            "version_id": self.version_id,
            "parent_id": self.parent_id,
            "origin": self.origin.value,
            "stmt_ids": list(self.stmt_ids),
            "created_at": self.created_at,
            "author_note": self.author_note,
            "extra": self.extra,
        }

    @classmethod
    def from_meta(cls, meta: dict, text: str) -> "TheoryVersion":
        return cls(
            version_id=meta["version_id"],
            parent_id=meta.get("parent_id"),
            origin=Origin(meta["origin"]),
            stmt_ids=tuple(meta.get("stmt_ids", [])),
            text=text,
            created_at=meta.get("created_at", ""),
            author_note=meta.get("author_note"),
            extra=meta.get("extra", {}),
        )


@dataclass
class Verdict:
    verdict_id: str
    gate: str
    decision: str
    note: str
    created_at: str

    def to_json(self) -> dict:
        return {
            "verdict_id": self.verdict_id,
            "gate": self.gate,
            "decision": self.decision,
            "note": self.note,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Verdict":
        return cls(
            verdict_id=obj["verdict_id"],
            gate=obj["gate"],
            decision=obj["decision"],
            note=obj.get("note", ""),
            created_at=obj.get("created_at", ""),
        )


def stmt_key(stmt_ids) -> str:
    return ",".join(sorted(stmt_ids))


_EMPTY_INDEX: dict = {
    "documents": [],
    "statements": [],
    "theories": [],
    "latest": {},
    "checks": {},
    "proofs": {},
    "verdicts": {},
}

_SUBDIRS = (
    "documents",
    "statements",
    "transcripts",
    "theories",
    "checks",
    "proofs",
    "abstractions",
    "verdicts",
    "runs",
)


class _Lock:
    """Advisory single-writer lock backed by a pid-stamped lock file.

    Re-entrant within the owning store instance. A lock left behind by a
    dead process is treated as stale and replaced.
    """

    def __init__(self, path: Path):
        self.path = path
        self.token = secrets.token_hex(8)
        self.depth = 0

    def acquire(self) -> None:
        if self.depth > 0:
            self.depth += 1
            return
        payload = canonical_json_bytes({"pid": os.getpid(), "token": self.token})
        while True:
            try:
                fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                holder = self._read_holder()
                if holder is None:
                    continue
                pid, token = holder
                if token == self.token:
                    break
                if not _pid_alive(pid):
                    try:
                        self.path.unlink()
                    except FileNotFoundError:
                        pass
                    continue
                raise ProjectLocked(pid)
            else:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(payload)
                break
        self.depth = 1

    def release(self) -> None:
        if self.depth == 0:
            return
        self.depth -= 1
        if self.depth == 0:
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass

    def _read_holder(self) -> Optional[tuple[int, str]]:
        try:
            obj = json.loads(self.path.read_text("utf-8"))
            return int(obj["pid"]), str(obj["token"])
        except (FileNotFoundError, ValueError, KeyError):
            return None

    def __enter__(self) -> "_Lock":
        self.acquire()
        return self

    def __exit__(self, *exc) -> None:
        self.release()


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


class WorkbenchStore:
    def __init__(self, root: Path, clock: Callable[[], str] = utc_now_iso):
        self.root = Path(root)
        self.clock = clock
        self._lock = _Lock(self.root / "lock")
        self.transcripts = TranscriptStore(self.root / "transcripts")

    # ------------------------------------------------------------------
    # lifecycle

    @classmethod
    def init_project(
        cls,
        root: Path,
        project_id: Optional[str] = None,
        config: Optional[dict] = None,
        clock: Callable[[], str] = utc_now_iso,
    ) -> "WorkbenchStore":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        if (root / "project.json").exists():
            raise InvariantViolation(f"{root} already holds a project")
        for sub in _SUBDIRS:
            (root / sub).mkdir(exist_ok=True)
        store = cls(root, clock=clock)
        project = {
            "project_id": project_id or root.name or "project",
            "created_at": clock(),
            "documents": [],
            "config": config or {},
        }
        _write_json(root / "project.json", project)
        (root / "journal.ndjson").write_bytes(b"")
        _write_json(root / "index.json", _EMPTY_INDEX)
        return store

    @classmethod
    def open(cls, root: Path, clock: Callable[[], str] = utc_now_iso) -> "WorkbenchStore":
        root = Path(root)
        if not (root / "project.json").is_file():
            raise ProjectNotFound(str(root))
        return cls(root, clock=clock)

    def lock(self) -> _Lock:
        return self._lock

    @property
    def project(self) -> dict:
        return _read_json(self.root / "project.json")

    @property
    def project_id(self) -> str:
        return self.project["project_id"]

    # ------------------------------------------------------------------
    # journal and index plumbing

    def events(self) -> list[Event]:
        out = []
        path = self.root / "journal.ndjson"
        if not path.exists():
            return out
        for line in path.read_text("utf-8").splitlines():
            if line.strip():
                out.append(Event.from_json(json.loads(line)))
        return out

    def read_index(self) -> dict:
        return _read_json(self.root / "index.json")

    def _append_event(self, kind: EventKind, payload_ref: str) -> Event:
        with self._lock:
            events = self.events()
            seq = events[-1].seq + 1 if events else 1
            event = Event(seq=seq, kind=kind, payload_ref=payload_ref, at=self.clock())
            with open(self.root / "journal.ndjson", "ab") as fh:
                fh.write(canonical_json_bytes(event.to_json()) + b"\n")
            index = self.read_index()
            self._fold_event(index, event)
            _write_json(self.root / "index.json", index)
            return event

    def _fold_event(self, index: dict, event: Event) -> None:
        ref = event.payload_ref
        if event.kind is EventKind.INGESTED:
            _append_unique(index["documents"], ref)
        elif event.kind is EventKind.EXTRACTED:
            _append_unique(index["statements"], ref)
        elif event.kind in (
            EventKind.GENERATED,
            EventKind.REPAIRED,
            EventKind.MERGED,
            EventKind.HUMAN_EDIT,
        ):
            if ref.startswith("thv-"):
                _append_unique(index["theories"], ref)
                meta = _read_json(self.root / "theories" / f"{ref}.meta.json")
                index["latest"][stmt_key(meta.get("stmt_ids", []))] = ref
        elif event.kind is EventKind.CHECKED:
            obj = _read_json(self.root / "checks" / f"{ref}.json")
            index["checks"][obj["version_id"]] = ref
        elif event.kind is EventKind.PROVED:
            obj = _read_json(self.root / "proofs" / f"{ref}.json")
            index["proofs"].setdefault(obj["version_id"], {})[obj["formula_name"]] = ref
        elif event.kind is EventKind.VERDICT:
            obj = _read_json(self.root / "verdicts" / f"{ref}.json")
            index["verdicts"][obj["gate"]] = {"decision": obj["decision"], "verdict_id": ref}
        # PROMPTED events reference transcripts, which the index does not track

    def replay_journal(self) -> dict:
        events = self.events()
        for i, event in enumerate(events):
            if event.seq != i + 1:
                raise JournalGap(i + 1)
        projection = json.loads(json.dumps(_EMPTY_INDEX))
        for event in events:
            self._fold_event(projection, event)
        index = self.read_index()
        if projection != index:
            details = _first_difference(projection, index)
            raise ProjectionMismatch(details)
        return projection

    # ------------------------------------------------------------------
    # documents and statements

    def put_document(self, doc: SourceDocument) -> str:
        with self._lock:
            write_once(
                self.root / "documents" / f"{doc.doc_id}.json",
                canonical_json_bytes(doc.to_json()) + b"\n",
            )
            project = self.project
            if doc.doc_id not in project["documents"]:
                project["documents"].append(doc.doc_id)
                _write_json(self.root / "project.json", project)
            self._append_event(EventKind.INGESTED, doc.doc_id)
            return doc.doc_id

    def get_document(self, doc_id: str) -> SourceDocument:
        path = self.root / "documents" / f"{doc_id}.json"
        if not path.exists():
            raise KeyError(doc_id)
        return SourceDocument.from_json(_read_json(path))

    def list_documents(self) -> list[str]:
        return list(self.read_index()["documents"])

    def put_statement(self, record: StatementRecord) -> str:
        if not record.body_latex.strip():
            raise InvariantViolation("statement body is empty")
        with self._lock:
            write_once(
                self.root / "statements" / f"{record.stmt_id}.json",
                canonical_json_bytes(record.to_json()) + b"\n",
            )
            self._append_event(EventKind.EXTRACTED, record.stmt_id)
            return record.stmt_id

    def get_statement(self, stmt_id: str) -> StatementRecord:
        path = self.root / "statements" / f"{stmt_id}.json"
        if not path.exists():
            raise KeyError(stmt_id)
        return StatementRecord.from_json(_read_json(path))

    def list_statements(self) -> list[str]:
        return list(self.read_index()["statements"])

    # ------------------------------------------------------------------
    # graph (derived, deterministic from statements: no journal event)

    def put_graph(self, graph: ConceptGraph) -> None:
        with self._lock:
            _write_json(self.root / "graph.json", graph.to_json())

    def get_graph(self) -> ConceptGraph:
        path = self.root / "graph.json"
        if not path.exists():
            raise KeyError("graph")
        return ConceptGraph.from_json(_read_json(path))

    def has_graph(self) -> bool:
        return (self.root / "graph.json").exists()

    # ------------------------------------------------------------------
    # transcripts and abstractions

    def put_transcript(self, transcript: PromptTranscript) -> str:
        with self._lock:
            self.transcripts.put(transcript)
            self._append_event(EventKind.PROMPTED, transcript.request_hash)
            return transcript.request_hash

    def put_abstraction(self, stmt_id: str, text: str, template: str = "abstract", version: int = 1) -> str:
        abs_id = f"abs-{stmt_id}"
        payload = {"stmt_id": stmt_id, "text": text, "template": template, "template_version": version}
        with self._lock:
            # keyed by statement, not content-addressed: re-abstraction
            # with a different model legitimately replaces the text
            _write_json(self.root / "abstractions" / f"{abs_id}.json", payload)
            self._append_event(EventKind.GENERATED, abs_id)
            return abs_id

    def get_abstraction(self, stmt_id: str) -> Optional[dict]:
        path = self.root / "abstractions" / f"abs-{stmt_id}.json"
        if not path.exists():
            return None
        return _read_json(path)

    # ------------------------------------------------------------------
    # theory versions

    def put_theory(
        self,
        text: str,
        origin: Origin,
        stmt_ids,
        parent_id: Optional[str] = None,
        author_note: Optional[str] = None,
        extra: Optional[dict] = None,
    ) -> TheoryVersion:
        if not text.strip():
            raise InvariantViolation("theory text is empty")
        if origin is Origin.HUMAN and not (author_note and author_note.strip()):
            raise InvariantViolation("origin=human requires an author note")
        text = normalize_newlines(text)
        version_id = compute_version_id(text)
        with self._lock:
            if parent_id is not None and not self._theory_exists(parent_id):
                raise UnknownVersion(parent_id)
            meta_path = self.root / "theories" / f"{version_id}.meta.json"
            if meta_path.exists():
                version = self.get_theory(version_id)
            else:
                version = TheoryVersion(
                    version_id=version_id,
                    parent_id=parent_id,
                    origin=origin,
                    stmt_ids=tuple(stmt_ids),
                    text=text,
                    created_at=self.clock(),
                    author_note=author_note,
                    extra=extra or {},
                )
                write_once(self.root / "theories" / f"{version_id}.pvs", text.encode("utf-8"))
                write_once(meta_path, canonical_json_bytes(version.meta_json()) + b"\n")
            self._append_event(_ORIGIN_EVENT[version.origin], version_id)
            return version

    def _theory_exists(self, version_id: str) -> bool:
        return (self.root / "theories" / f"{version_id}.meta.json").exists()

    def get_theory(self, version_id: str) -> TheoryVersion:
        meta_path = self.root / "theories" / f"{version_id}.meta.json"
        text_path = self.root / "theories" / f"{version_id}.pvs"
        if not meta_path.exists() or not text_path.exists():
            raise UnknownVersion(version_id)
        return TheoryVersion.from_meta(_read_json(meta_path), text_path.read_text("utf-8"))

    def list_theories(self) -> list[str]:
        return list(self.read_index()["theories"])

    def lineage(self, version_id: str) -> list[TheoryVersion]:
        chain: list[TheoryVersion] = []
        seen: set[str] = set()
        current: Optional[str] = version_id
        while current is not None:
            if current in seen:
                raise CorruptLineage(f"cycle through {current}")
            seen.add(current)
            version = self.get_theory(current)
            chain.append(version)
            current = version.parent_id
            if current is not None and not self._theory_exists(current):
                raise CorruptLineage(f"{version.version_id} references missing parent {current}")
        chain.reverse()
        return chain

    def latest_version_for(self, stmt_ids) -> Optional[str]:
        return self.read_index()["latest"].get(stmt_key(stmt_ids))

    # ------------------------------------------------------------------
    # checks, proofs, verdicts, stage runs

    def put_check(self, version_id: str, result: CheckResult) -> str:
        if not self._theory_exists(version_id):
            raise UnknownVersion(version_id)
        stable = {
            "version_id": version_id,
            "backend": result.backend,
            "parse_ok": result.parse_ok,
            "typecheck_ok": result.typecheck_ok,
            "diagnostics": [d.to_json() for d in result.diagnostics],
        }
        check_id = "chk-" + content_hash(canonical_json_bytes(stable).decode("utf-8"))[:12]
        payload = {"check_id": check_id, "version_id": version_id, **result.to_json()}
        with self._lock:
            # id covers the stable outcome; timing fields may differ
            # between runs, so the file is plainly overwritten
            _write_json(self.root / "checks" / f"{check_id}.json", payload)
            self._append_event(EventKind.CHECKED, check_id)
            return check_id

    def get_check(self, check_id: str) -> dict:
        path = self.root / "checks" / f"{check_id}.json"
        if not path.exists():
            raise KeyError(check_id)
        return _read_json(path)

    def check_for(self, version_id: str) -> Optional[dict]:
        check_id = self.read_index()["checks"].get(version_id)
        return self.get_check(check_id) if check_id else None

    def put_proof(self, version_id: str, attempt: ProofAttempt) -> str:
        if not self._theory_exists(version_id):
            raise UnknownVersion(version_id)
        stable = {
            "version_id": version_id,
            "formula_name": attempt.formula_name,
            "tactic_script": attempt.tactic_script,
            "status": attempt.status.value,
        }
        attempt_id = "prf-" + content_hash(canonical_json_bytes(stable).decode("utf-8"))[:12]
        payload = {"attempt_id": attempt_id, "version_id": version_id, **attempt.to_json()}
        with self._lock:
            _write_json(self.root / "proofs" / f"{attempt_id}.json", payload)
            self._append_event(EventKind.PROVED, attempt_id)
            return attempt_id

    def get_proof(self, attempt_id: str) -> dict:
        path = self.root / "proofs" / f"{attempt_id}.json"
        if not path.exists():
            raise KeyError(attempt_id)
        return _read_json(path)

    def proof_for(self, version_id: str, formula_name: str) -> Optional[dict]:
        attempt_id = self.read_index()["proofs"].get(version_id, {}).get(formula_name)
        return self.get_proof(attempt_id) if attempt_id else None

    def put_verdict(self, gate: str, decision: str, note: str) -> Verdict:
        if decision not in ("approve", "reject"):
            raise InvariantViolation(f"decision must be approve or reject, got {decision!r}")
        if not note.strip():
            raise InvariantViolation("a verdict requires a note")
        with self._lock:
            events = self.events()
            seq = events[-1].seq + 1 if events else 1
            verdict = Verdict(
                verdict_id=f"vrd-{seq:06d}",
                gate=gate,
                decision=decision,
                note=note,
                created_at=self.clock(),
            )
            _write_json(self.root / "verdicts" / f"{verdict.verdict_id}.json", verdict.to_json())
            self._append_event(EventKind.VERDICT, verdict.verdict_id)
            return verdict

    def gate_decision(self, gate: str) -> Optional[str]:
        entry = self.read_index()["verdicts"].get(gate)
        return entry["decision"] if entry else None

    def put_run(self, run: dict) -> str:
        with self._lock:
            run_id = run["run_id"]
            _write_json(self.root / "runs" / f"{run_id}.json", run)
            return run_id

    def next_run_id(self, stage: str) -> str:
        existing = len(list((self.root / "runs").glob("run-*.json")))
        return f"run-{existing + 1:04d}-{stage}"

    def get_run(self, run_id: str) -> dict:
        path = self.root / "runs" / f"{run_id}.json"
        if not path.exists():
            raise KeyError(run_id)
        return _read_json(path)

    # counts only the content-addressed artifact classes, the ones that
    # must not grow when a completed stage is re-run on unchanged inputs
    def artifact_counts(self) -> dict:
        return {
            "documents": len(list((self.root / "documents").glob("*.json"))),
            "statements": len(list((self.root / "statements").glob("*.json"))),
            "transcripts": len(list((self.root / "transcripts").glob("*.json"))),
            "theories": len(list((self.root / "theories").glob("*.pvs"))),
            "checks": len(list((self.root / "checks").glob("*.json"))),
            "proofs": len(list((self.root / "proofs").glob("*.json"))),
        }


def _append_unique(items: list, value: str) -> None:
    if value not in items:
        items.append(value)


def _write_json(path: Path, obj: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(canonical_json_bytes(obj) + b"\n")
    os.replace(tmp, path)


def _read_json(path: Path) -> dict:
    return json.loads(path.read_text("utf-8"))


def _first_difference(projection: dict, index: dict) -> str:
    keys = sorted(set(projection) | set(index))
    for key in keys:
        if projection.get(key) != index.get(key):
            return f"key {key!r}: journal yields {projection.get(key)!r}, index holds {index.get(key)!r}"
    return "structures differ"
