"""Command-line surface for the workbench.

Exit codes: 0 success, 1 stage or tool failure, 2 usage error,
3 stopped at a human gate.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .canonical import canonical_json_str
from .config import WorkbenchConfig, load_config
from .gateway import ReplayMiss
from .pipeline import STAGES, Pipeline, StageFailed, UpstreamIncomplete
from .pvs.diagnostics import Severity
from .pvs.linter import lint_text
from .pvs.parser import parse_theory
from .pvs.prelude import DEFAULT_RENAMES, load_prelude
from .pvs.printer import print_theory
from .store import ProjectLocked, ProjectNotFound, WorkbenchStore

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NEEDS_HUMAN = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autoformal",
        description="Turn mathematical statements into checked PVS theories.",
    )
    parser.add_argument("--project", default=".", help="project directory (default: .)")
    parser.add_argument("--config", default=None, help="configuration JSON file")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("init", help="create a new project directory")
    p.add_argument("dir")
    p.add_argument("--fixture", action="store_true", help="seed the bundled demo corpus")

    p = sub.add_parser("ingest", help="add a source document to the project")
    p.add_argument("file")

    sub.add_parser("extract", help="extract statements from ingested documents")

    p = sub.add_parser("graph", help="build the concept dependency graph")
    p.add_argument("--export", default=None, help="write the graph to a .dot or .json file")

    sub.add_parser("abstract", help="produce abstract restatements via the LLM")
    sub.add_parser("formalize", help="generate one theory per statement via the LLM")

    p = sub.add_parser("repair", help="apply rule-based fixes to generated theories")
    p.add_argument("--dry-run", action="store_true", help="plan edits without modifying anything")

    p = sub.add_parser("merge", help="combine per-statement theories into one")
    p.add_argument("--name", default=None, help="merged theory name")

    p = sub.add_parser("check", help="parse and typecheck the merged theory")
    p.add_argument("--backend", choices=["stub", "pvs"], default=None)
    p.add_argument("--version", default=None, help="theory version id to check")

    p = sub.add_parser("prove", help="attempt a proof of one formula")
    p.add_argument("formula")
    p.add_argument("--tactic", default="grind")
    p.add_argument("--version", default=None, help="theory version id to prove in")

    p = sub.add_parser("run", help="run all stages in order")
    p.add_argument("--stop-at", choices=list(STAGES), default=None)

    sub.add_parser("report", help="print the per-statement status matrix")

    p = sub.add_parser("serve", help="serve the review API over HTTP")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("lint", help="lint a theory file")
    p.add_argument("file")

    p = sub.add_parser("fmt", help="print a theory file in canonical form")
    p.add_argument("file")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except ProjectNotFound as exc:
        return _fail(args, f"no project at {exc}")
    except ProjectLocked as exc:
        return _fail(args, str(exc))
    except UpstreamIncomplete as exc:
        return _fail(args, str(exc))
    except StageFailed as exc:
        return _fail(args, str(exc))
    except ReplayMiss as exc:
        return _fail(args, f"no recorded transcript for request {exc}")
    except OSError as exc:
        return _fail(args, str(exc))


def _fail(args, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    if getattr(args, "json", False):
        print(canonical_json_str({"error": message}))
    return EXIT_FAILURE


def _emit(args, payload, human: str) -> None:
    if args.json:
        print(canonical_json_str(payload))
    elif human:
        print(human)


def _load_cfg(args, store: Optional[WorkbenchStore] = None) -> WorkbenchConfig:
    if args.config:
        return load_config(Path(args.config))
    if store is not None:
        snapshot = store.project.get("config") or {}
        if snapshot:
            return WorkbenchConfig.from_json(snapshot)
    return WorkbenchConfig()


def _open(args) -> WorkbenchStore:
    return WorkbenchStore.open(Path(args.project))


def _pipeline(args) -> Pipeline:
    store = _open(args)
    return Pipeline(store, _load_cfg(args, store))


def _stage_exit(run) -> int:
    if run.status == "ok":
        return EXIT_OK
    if run.status == "needs_human":
        return EXIT_NEEDS_HUMAN
    return EXIT_FAILURE


def _run_payload(run) -> dict:
    return run.to_json()


# ----------------------------------------------------------------------
# command handlers


def _cmd_init(args) -> int:
    target = Path(args.dir)
    if args.fixture:
        from .fixtures import seed_fixture_project

        config = load_config(Path(args.config)) if args.config else None
        store, _ = seed_fixture_project(target, config=config)
    else:
        config = _load_cfg(args)
        store = WorkbenchStore.init_project(target, config=config.to_json())
    _emit(args, {"project": str(target), "project_id": store.project_id}, f"initialized {target}")
    return EXIT_OK


def _cmd_ingest(args) -> int:
    pipe = _pipeline(args)
    run = pipe.run_stage("ingest", {"path": args.file})
    _emit(args, _run_payload(run), f"ingested {args.file}: documents {', '.join(run.outputs)}")
    return _stage_exit(run)


def _cmd_extract(args) -> int:
    pipe = _pipeline(args)
    run = pipe.run_stage("extract")
    _emit(args, _run_payload(run), f"extracted {len(run.outputs)} statements")
    return _stage_exit(run)


def _cmd_graph(args) -> int:
    pipe = _pipeline(args)
    run = pipe.run_stage("graph")
    graph = pipe.store.get_graph()
    if args.export:
        out = Path(args.export)
        if out.suffix == ".dot":
            from .concepts import to_dot

            out.write_text(to_dot(graph), "utf-8")
        else:
            out.write_bytes(canonical_json_str(graph.to_json()).encode("utf-8") + b"\n")
    if args.json:
        print(canonical_json_str(graph.to_json()))
    else:
        print(run.notes)
    return _stage_exit(run)


def _cmd_abstract(args) -> int:
    pipe = _pipeline(args)
    run = pipe.run_stage("abstract")
    _emit(args, _run_payload(run), f"abstracted {len(run.outputs)} statements")
    return _stage_exit(run)


def _cmd_formalize(args) -> int:
    pipe = _pipeline(args)
    run = pipe.run_stage("formalize")
    _emit(args, _run_payload(run), f"generated {len(run.outputs)} theories")
    return _stage_exit(run)


def _cmd_repair(args) -> int:
    pipe = _pipeline(args)
    run = pipe.run_stage("repair", {"dry_run": args.dry_run})
    if args.dry_run:
        _emit(args, _run_payload(run), run.notes)
    else:
        _emit(args, _run_payload(run), f"repaired {len(run.outputs)} theories" + (f" ({run.notes})" if run.notes else ""))
    return _stage_exit(run)


def _cmd_merge(args) -> int:
    pipe = _pipeline(args)
    options = {"name": args.name} if args.name else {}
    run = pipe.run_stage("merge", options)
    human = (
        f"merged into {run.outputs[0]}" if run.outputs else f"merge blocked: {run.notes}"
    )
    _emit(args, _run_payload(run), human)
    return _stage_exit(run)


def _cmd_check(args) -> int:
    pipe = _pipeline(args)
    options = {}
    if args.backend:
        options["backend"] = args.backend
    if args.version:
        options["version_id"] = args.version
    run = pipe.run_stage("check", options)
    result = pipe.store.get_check(run.outputs[0]) if run.outputs else {}
    if args.json:
        print(canonical_json_str(result))
    else:
        verdict = "clean" if result.get("typecheck_ok") else "has errors"
        print(f"check {run.inputs[0]}: {verdict} ({len(result.get('diagnostics', []))} diagnostics)")
    return _stage_exit(run)


def _cmd_prove(args) -> int:
    pipe = _pipeline(args)
    options = {"formula": args.formula, "tactic": args.tactic}
    if args.version:
        options["version_id"] = args.version
    run = pipe.run_stage("prove", options)
    attempt = pipe.store.get_proof(run.outputs[0]) if run.outputs else {}
    if args.json:
        print(canonical_json_str(attempt))
    else:
        print(run.notes)
    return _stage_exit(run)


def _cmd_run(args) -> int:
    pipe = _pipeline(args)
    runs = pipe.run_all(stop_at=args.stop_at)
    payload = [r.to_json() for r in runs]
    if args.json:
        print(canonical_json_str(payload))
    else:
        for run in runs:
            line = f"{run.stage}: {run.status}"
            if run.notes:
                line += f" ({run.notes})"
            print(line)
    statuses = {run.status for run in runs}
    if "needs_human" in statuses:
        return EXIT_NEEDS_HUMAN
    if "failed" in statuses:
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_report(args) -> int:
    store = _open(args)
    pipe = Pipeline(store, _load_cfg(args, store))
    index = store.read_index()
    stmt_ids = store.list_statements()
    merged_id = store.latest_version_for(stmt_ids) if stmt_ids else None
    merged_check = store.check_for(merged_id) if merged_id else None
    merged_proofs = index["proofs"].get(merged_id, {}) if merged_id else {}
    rows = []
    for stmt_id in stmt_ids:
        stmt = store.get_statement(stmt_id)
        latest = store.latest_version_for([stmt_id])
        version = store.get_theory(latest) if latest else None
        repaired = bool(version) and not pipe._has_errors(version.text)
        proved = ""
        if merged_proofs:
            attempt = store.get_proof(sorted(merged_proofs.values())[0])
            proved = attempt["status"]
        rows.append(
            {
                "stmt_id": stmt_id,
                "label": stmt.label,
                "kind": stmt.kind.value,
                "extracted": True,
                "formalized": latest is not None,
                "repaired": repaired,
                "checked": bool(merged_check and merged_check.get("typecheck_ok")),
                "proved": proved,
            }
        )
    if args.json:
        print(canonical_json_str({"statements": rows, "merged_version": merged_id}))
    else:
        header = f"{'statement':14s} {'kind':12s} {'extracted':>9s} {'formalized':>10s} {'repaired':>8s} {'checked':>7s} {'proved':>12s}"
        print(header)
        for row in rows:
            name = row["label"] or row["stmt_id"]
            print(
                f"{name:14s} {row['kind']:12s} {_mark(row['extracted']):>9s} "
                f"{_mark(row['formalized']):>10s} {_mark(row['repaired']):>8s} "
                f"{_mark(row['checked']):>7s} {row['proved'] or '-':>12s}"
            )
        if merged_id:
            print(f"merged version: {merged_id}")
    return EXIT_OK


def _mark(value: bool) -> str:
    return "yes" if value else "-"


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = _open(args)  # fail fast if the project is missing
    app = create_app([Path(args.project)])
    _emit(
        args,
        {"host": args.host, "port": args.port, "project": store.project_id},
        f"serving {store.project_id} on http://{args.host}:{args.port}",
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _cmd_lint(args) -> int:
    text = Path(args.file).read_text("utf-8")
    config = _try_project_cfg(args)
    renames = dict(DEFAULT_RENAMES)
    if config:
        renames.update(config.repair.renames)
    diags = lint_text(text, prelude=load_prelude(), rename_table=renames)
    if args.json:
        print(canonical_json_str([d.to_json() for d in diags]))
    else:
        for d in diags:
            print(f"{args.file}:{d.line}:{d.column} {d.code} {d.message}")
        if not diags:
            print(f"{args.file}: clean")
    has_errors = any(d.severity is Severity.ERROR for d in diags)
    return EXIT_FAILURE if has_errors else EXIT_OK


def _try_project_cfg(args) -> Optional[WorkbenchConfig]:
    try:
        if args.config:
            return load_config(Path(args.config))
        store = WorkbenchStore.open(Path(args.project))
        snapshot = store.project.get("config") or {}
        return WorkbenchConfig.from_json(snapshot) if snapshot else None
    except (ProjectNotFound, OSError, ValueError):
        return None


def _cmd_fmt(args) -> int:
    text = Path(args.file).read_text("utf-8")
    result = parse_theory(text)
    if result.ast is None:
        for d in result.diagnostics:
            print(f"{args.file}:{d.line}:{d.column} {d.code} {d.message}", file=sys.stderr)
        return EXIT_FAILURE
    formatted = print_theory(result.ast)
    if args.write:
        Path(args.file).write_text(formatted, "utf-8")
        _emit(args, {"file": args.file, "changed": formatted != text}, f"formatted {args.file}")
    elif args.json:
        print(canonical_json_str({"text": formatted}))
    else:
        sys.stdout.write(formatted)
    return EXIT_OK


_HANDLERS = {
    "init": _cmd_init,
    "ingest": _cmd_ingest,
    "extract": _cmd_extract,
    "graph": _cmd_graph,
    "abstract": _cmd_abstract,
    "formalize": _cmd_formalize,
    "repair": _cmd_repair,
    "merge": _cmd_merge,
    "check": _cmd_check,
    "prove": _cmd_prove,
    "run": _cmd_run,
    "report": _cmd_report,
    "serve": _cmd_serve,
    "lint": _cmd_lint,
    "fmt": _cmd_fmt,
}


if __name__ == "__main__":
    sys.exit(main())
