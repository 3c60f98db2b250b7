"""HTTP JSON API over project stores and the pipeline.

Mutations are serialized per project through the store's advisory lock;
stage runs execute on a background thread, one active run per project,
and are polled through run ids.
"""

from __future__ import annotations

import difflib
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .canonical import normalize_newlines
from .config import WorkbenchConfig
from .pipeline import STAGES, Pipeline
from .pvs.linter import lint_text
from .pvs.prelude import DEFAULT_RENAMES, load_prelude
from .store import (
    InvariantViolation,
    Origin,
    ProjectLocked,
    ProjectNotFound,
    UnknownVersion,
    WorkbenchStore,
)

__all__ = ["create_app", "ApiException"]


class ApiException(Exception):
    def __init__(self, http_status: int, code: str, message: str, detail: Optional[str] = None):
        super().__init__(message)
        self.http_status = http_status
        self.code = code
        self.message = message
        self.detail = detail

    def body(self) -> dict:
        return {
            "http_status": self.http_status,
            "code": self.code,
            "message": self.message,
            "detail": self.detail,
        }


class _ProjectHandle:
    def __init__(self, root: Path):
        self.root = root
        self.store = WorkbenchStore.open(root)
        self.runs_lock = threading.Lock()
        self.active_run: Optional[str] = None

    def config(self) -> WorkbenchConfig:
        snapshot = self.store.project.get("config") or {}
        return WorkbenchConfig.from_json(snapshot) if snapshot else WorkbenchConfig()

    def pipeline(self) -> Pipeline:
        return Pipeline(self.store, self.config())


def create_app(project_roots: list[Path], cors_origins: Optional[list[str]] = None) -> FastAPI:
    if not project_roots:
        raise ValueError("at least one project root is required")
    handles: dict[str, _ProjectHandle] = {}
    for root in project_roots:
        handle = _ProjectHandle(Path(root))
        handles[handle.store.project_id] = handle

    app = FastAPI(title="autoformal review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    # run bookkeeping shared across projects: run_id -> status record
    run_states: dict[str, dict] = {}
    run_states_lock = threading.Lock()
    prelude = load_prelude()

    @app.exception_handler(ApiException)
    async def _api_error(request: Request, exc: ApiException):
        return JSONResponse(status_code=exc.http_status, content=exc.body())

    def project(pid: str) -> _ProjectHandle:
        handle = handles.get(pid)
        if handle is None:
            raise ApiException(404, "unknown_project", f"no project named {pid!r}")
        return handle

    def renames(handle: _ProjectHandle) -> dict[str, str]:
        table = dict(DEFAULT_RENAMES)
        table.update(handle.config().repair.renames)
        return table

    # ------------------------------------------------------------------

    @app.get("/api/projects")
    def list_projects():
        out = []
        for pid, handle in handles.items():
            index = handle.store.read_index()
            out.append(
                {
                    "project_id": pid,
                    "root": str(handle.root),
                    "documents": len(index["documents"]),
                    "statements": len(index["statements"]),
                    "theories": len(index["theories"]),
                }
            )
        return out

    @app.get("/api/projects/{pid}/statements")
    def list_statements(pid: str):
        handle = project(pid)
        store = handle.store
        rows = []
        for stmt_id in store.list_statements():
            stmt = store.get_statement(stmt_id)
            row = stmt.to_json()
            row["latest_version"] = store.latest_version_for([stmt_id])
            row["abstraction"] = store.get_abstraction(stmt_id)
            rows.append(row)
        return rows

    @app.get("/api/projects/{pid}/documents")
    def list_documents(pid: str):
        store = project(pid).store
        return [
            {"doc_id": d, "title": store.get_document(d).title}
            for d in store.list_documents()
        ]

    @app.get("/api/projects/{pid}/documents/{doc_id}")
    def get_document(pid: str, doc_id: str):
        store = project(pid).store
        try:
            return store.get_document(doc_id).to_json()
        except KeyError:
            raise ApiException(404, "unknown_document", f"no document {doc_id!r}")

    @app.get("/api/projects/{pid}/graph")
    def get_graph(pid: str):
        store = project(pid).store
        try:
            return store.get_graph().to_json()
        except KeyError:
            raise ApiException(404, "no_graph", "the graph stage has not run yet")

    @app.get("/api/projects/{pid}/theories/{version_id}")
    def get_theory(pid: str, version_id: str):
        handle = project(pid)
        store = handle.store
        try:
            version = store.get_theory(version_id)
        except UnknownVersion:
            raise ApiException(404, "unknown_version", f"no theory version {version_id!r}")
        diags = lint_text(version.text, prelude=prelude, rename_table=renames(handle))
        payload = version.meta_json()
        payload["text"] = version.text
        payload["diagnostics"] = [d.to_json() for d in diags]
        payload["check"] = store.check_for(version_id)
        payload["is_latest"] = store.latest_version_for(version.stmt_ids) == version_id
        return payload

    @app.put("/api/projects/{pid}/theories/{version_id}")
    def put_theory(pid: str, version_id: str, body: dict):
        handle = project(pid)
        store = handle.store
        try:
            parent = store.get_theory(version_id)
        except UnknownVersion:
            raise ApiException(404, "unknown_version", f"no theory version {version_id!r}")
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            raise ApiException(400, "missing_text", "body must carry non-empty 'text'")
        if normalize_newlines(text) == parent.text:
            # content addressing: identical bytes are the same version
            return JSONResponse(
                status_code=200,
                content={"version_id": version_id, "created": False},
            )
        latest = store.latest_version_for(parent.stmt_ids)
        if latest != version_id:
            raise ApiException(
                409,
                "stale_version",
                f"{version_id} is not the latest version for its statements",
                detail=f"latest is {latest}",
            )
        note = body.get("author_note")
        if not isinstance(note, str) or not note.strip():
            raise ApiException(400, "author_note_required", "an edit requires an author note")
        try:
            child = store.put_theory(
                text,
                Origin.HUMAN,
                parent.stmt_ids,
                parent_id=version_id,
                author_note=note,
            )
        except ProjectLocked as exc:
            raise ApiException(423, "project_locked", str(exc))
        except InvariantViolation as exc:
            raise ApiException(409, "immutable_overwrite", str(exc))
        return JSONResponse(
            status_code=201,
            content={"version_id": child.version_id, "created": True},
        )

    @app.get("/api/projects/{pid}/theories/{version_id}/lineage")
    def get_lineage(pid: str, version_id: str):
        store = project(pid).store
        try:
            chain = store.lineage(version_id)
        except UnknownVersion:
            raise ApiException(404, "unknown_version", f"no theory version {version_id!r}")
        return [v.meta_json() for v in chain]

    @app.get("/api/projects/{pid}/gates")
    def get_gates(pid: str):
        handle = project(pid)
        return {"pending": handle.pipeline().pending_gates()}

    @app.post("/api/projects/{pid}/stages/{stage}")
    def post_stage(pid: str, stage: str, body: Optional[dict] = None):
        handle = project(pid)
        if stage not in STAGES:
            raise ApiException(404, "unknown_stage", f"no stage named {stage!r}")
        options = (body or {}).get("options", {})
        with handle.runs_lock:
            if handle.active_run is not None:
                raise ApiException(
                    409, "run_in_progress", f"run {handle.active_run} is still active"
                )
            try:
                with handle.store.lock():
                    run_id = handle.store.next_run_id(stage)
            except ProjectLocked as exc:
                raise ApiException(423, "project_locked", str(exc))
            handle.active_run = run_id
        with run_states_lock:
            run_states[run_id] = {"run_id": run_id, "project_id": pid, "stage": stage, "status": "running"}

        def worker():
            record: dict
            try:
                run = handle.pipeline().run_stage(stage, options, run_id=run_id)
                record = run.to_json()
            except Exception as exc:
                record = {
                    "run_id": run_id,
                    "stage": stage,
                    "status": "failed",
                    "notes": str(exc),
                }
            record["project_id"] = pid
            with run_states_lock:
                run_states[run_id] = record
            with handle.runs_lock:
                handle.active_run = None

        threading.Thread(target=worker, daemon=True).start()
        return JSONResponse(status_code=202, content={"run_id": run_id, "status": "running"})

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        with run_states_lock:
            state = run_states.get(run_id)
        if state is not None:
            return state
        for pid, handle in handles.items():
            try:
                record = handle.store.get_run(run_id)
                record["project_id"] = pid
                return record
            except KeyError:
                continue
        raise ApiException(404, "unknown_run", f"no run {run_id!r}")

    @app.post("/api/projects/{pid}/verdicts")
    def post_verdict(pid: str, body: dict):
        handle = project(pid)
        gate = body.get("gate")
        decision = body.get("decision")
        note = body.get("note", "")
        if not gate or decision not in ("approve", "reject"):
            raise ApiException(400, "bad_verdict", "body must carry 'gate' and a valid 'decision'")
        pending = handle.pipeline().pending_gates()
        if gate not in pending:
            raise ApiException(
                409,
                "gate_not_pending",
                f"gate {gate!r} is not awaiting a verdict",
                detail=f"pending: {pending}",
            )
        try:
            verdict = handle.store.put_verdict(gate, decision, note)
        except ProjectLocked as exc:
            raise ApiException(423, "project_locked", str(exc))
        except InvariantViolation as exc:
            raise ApiException(400, "bad_verdict", str(exc))
        return JSONResponse(status_code=201, content=verdict.to_json())

    @app.get("/api/projects/{pid}/diff")
    def get_diff(
        pid: str,
        from_id: Optional[str] = Query(default=None, alias="from"),
        to_id: Optional[str] = Query(default=None, alias="to"),
    ):
        handle = project(pid)
        if not from_id or not to_id:
            raise ApiException(400, "missing_params", "both 'from' and 'to' are required")
        try:
            old = handle.store.get_theory(from_id)
            new = handle.store.get_theory(to_id)
        except UnknownVersion as exc:
            raise ApiException(404, "unknown_version", f"no theory version {exc}")
        diff = "".join(
            difflib.unified_diff(
                old.text.splitlines(keepends=True),
                new.text.splitlines(keepends=True),
                fromfile=from_id,
                tofile=to_id,
            )
        )
        return {"from": from_id, "to": to_id, "diff": diff}

    return app
