"""Stage orchestration over a project store.

Stages run in a fixed order (ingest, extract, graph, summarize, abstract,
formalize, repair, merge, check, prove). LLM-backed stages walk statements
in concept-graph topological order; repair and merge pause at human gates
when residual errors or required approvals stand in the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .concepts import build_graph, topo_order
from .config import WorkbenchConfig
from .gateway import ChatMessage, ChatRequest, FailingTransport, Gateway, PromptTranscript
from .ingest import StatementRecord, extract_statements, normalize_markup
from .merge import MergePlan, merge
from .prompts import PromptTemplate, TemplateRegistry, extract_code_blocks, render
from .prover import ProofStatus, check, prove
from .pvs.diagnostics import Severity
from .pvs.linter import lint_text
from .pvs.nodes import DeclKind
from .pvs.parser import parse_theory
from .pvs.prelude import DEFAULT_RENAMES, load_prelude
from .pvs.printer import print_theory
from .repair import repair_to_fixpoint
from .store import Origin, WorkbenchStore

__all__ = [
    "STAGES",
    "StageRun",
    "Pipeline",
    "UpstreamIncomplete",
    "StageFailed",
    "build_abstract_request",
    "build_formalize_request",
    "display_label",
]

STAGES = (
    "ingest",
    "extract",
    "graph",
    "summarize",
    "abstract",
    "formalize",
    "repair",
    "merge",
    "check",
    "prove",
)


class UpstreamIncomplete(RuntimeError):
    pass


class StageFailed(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class StageRun:
    run_id: str
    stage: str
    status: str  # ok | needs_human | failed
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    notes: str = ""
    created_at: str = ""

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "stage": self.stage,
            "status": self.status,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "notes": self.notes,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StageRun":
        return cls(
            run_id=obj["run_id"],
            stage=obj["stage"],
            status=obj["status"],
            inputs=list(obj.get("inputs", [])),
            outputs=list(obj.get("outputs", [])),
            notes=obj.get("notes", ""),
            created_at=obj.get("created_at", ""),
        )


def display_label(stmt: StatementRecord) -> str:
    if stmt.label:
        return f"{stmt.kind.value}-{stmt.label}"
    return stmt.stmt_id


def build_abstract_request(
    template: PromptTemplate,
    config: WorkbenchConfig,
    stmt: StatementRecord,
    context: list[tuple[str, str]],
) -> ChatRequest:
    context_block = "\n".join(f"{label}: {text}" for label, text in context) or "(none)"
    body = render(template, {"statement_body": stmt.body_latex, "context_block": context_block})
    return ChatRequest(
        messages=[ChatMessage("system", template.role_preamble), ChatMessage("user", body)],
        model_id=config.gateway.model_id,
        temperature=config.gateway.temperature,
        max_tokens=config.gateway.max_tokens,
    )


def build_formalize_request(
    template: PromptTemplate,
    config: WorkbenchConfig,
    stmt: StatementRecord,
    abstraction_text: str,
    context_theories: list[str],
) -> ChatRequest:
    if config.pipeline.abstraction_mode == "replace":
        abstraction = abstraction_text
    else:
        abstraction = f"{abstraction_text}\n\nOriginal statement:\n{stmt.body_latex}"
    context_block = "\n\n".join(context_theories) or "(none)"
    body = render(
        template,
        {
            "abstraction": abstraction,
            "statement_label": display_label(stmt),
            "context_block": context_block,
        },
    )
    return ChatRequest(
        messages=[ChatMessage("system", template.role_preamble), ChatMessage("user", body)],
        model_id=config.gateway.model_id,
        temperature=config.gateway.temperature,
        max_tokens=config.gateway.max_tokens,
    )


class Pipeline:
    def __init__(
        self,
        store: WorkbenchStore,
        config: Optional[WorkbenchConfig] = None,
        registry: Optional[TemplateRegistry] = None,
        gateway: Optional[Gateway] = None,
    ):
        self.store = store
        self.config = config or WorkbenchConfig()
        self.registry = registry or TemplateRegistry(
            self.config.template_dir if self.config.template_dir else None
        )
        if gateway is not None:
            self.gateway = gateway
        else:
            transport = FailingTransport() if self.config.gateway_mode == "replay" else None
            self.gateway = Gateway(self.config.gateway, store.transcripts, transport=transport)
        self.prelude = load_prelude()

    # ------------------------------------------------------------------

    def run_stage(
        self, stage: str, options: Optional[dict] = None, run_id: Optional[str] = None
    ) -> StageRun:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        options = options or {}
        handler: Callable[[dict], StageRun] = getattr(self, f"_stage_{stage}")
        with self.store.lock():
            if run_id is None:
                run_id = self.store.next_run_id(stage)
            try:
                run = handler(options)
            except (UpstreamIncomplete, StageFailed):
                raise
            except Exception as exc:
                run = StageRun(run_id=run_id, stage=stage, status="failed", notes=str(exc))
                run.created_at = self.store.clock()
                self.store.put_run(run.to_json())
                raise StageFailed(stage, exc) from exc
            run.run_id = run_id
            run.created_at = self.store.clock()
            self.store.put_run(run.to_json())
            return run

    def run_all(self, stop_at: Optional[str] = None) -> list[StageRun]:
        if not self.store.list_documents():
            raise UpstreamIncomplete("project has no documents to process")
        if stop_at is not None and stop_at not in STAGES:
            raise ValueError(f"unknown stage {stop_at!r}")
        runs: list[StageRun] = []
        for stage in STAGES:
            if stage == "summarize" and not self.config.pipeline.summarize:
                continue
            run = self.run_stage(stage)
            runs.append(run)
            if run.status != "ok":
                break
            if stage == stop_at:
                break
        return runs

    # ------------------------------------------------------------------
    # gates

    def pending_gates(self) -> list[str]:
        """Gate keys currently blocking the pipeline, in stage order."""
        gates: list[str] = []
        for stmt in self._statements_in_topo():
            version_id = self.store.latest_version_for([stmt.stmt_id])
            if version_id is None:
                continue
            version = self.store.get_theory(version_id)
            if self._has_errors(version.text):
                gate = f"repair:{version_id}"
                if self.store.gate_decision(gate) != "approve":
                    gates.append(gate)
        if self.config.pipeline.require_merge_approval and not self._merged_version_id():
            if self.store.gate_decision("merge") != "approve":
                gates.append("merge")
        return gates

    def _has_errors(self, text: str) -> bool:
        diags = lint_text(text, prelude=self.prelude, rename_table=self._renames())
        return any(d.severity is Severity.ERROR for d in diags)

    def _renames(self) -> dict[str, str]:
        table = dict(DEFAULT_RENAMES)
        table.update(self.config.repair.renames)
        return table

    # ------------------------------------------------------------------
    # stage handlers (run under the store lock)

    def _stage_ingest(self, options: dict) -> StageRun:
        from .ingest import load_document

        path = options.get("path")
        if path is not None:
            from pathlib import Path

            doc = load_document(Path(path).read_bytes())
            self.store.put_document(doc)
        docs = self.store.list_documents()
        if not docs:
            raise UpstreamIncomplete("no documents: ingest a source file first")
        return StageRun(run_id="", stage="ingest", status="ok", outputs=list(docs))

    def _stage_extract(self, options: dict) -> StageRun:
        docs = self._active_documents()
        if not docs:
            raise UpstreamIncomplete("no documents to extract from")
        outputs: list[str] = []
        for doc_id in docs:
            doc = self.store.get_document(doc_id)
            for record in extract_statements(doc):
                self.store.put_statement(record)
                outputs.append(record.stmt_id)
        if not outputs:
            raise StageFailed("extract", ValueError("documents contain no statements"))
        return StageRun(run_id="", stage="extract", status="ok", inputs=list(docs), outputs=outputs)

    def _stage_graph(self, options: dict) -> StageRun:
        stmt_ids = self.store.list_statements()
        if not stmt_ids:
            raise UpstreamIncomplete("no statements: run extract first")
        records = [self.store.get_statement(s) for s in stmt_ids]
        graph = build_graph(records)
        self.store.put_graph(graph)
        return StageRun(
            run_id="",
            stage="graph",
            status="ok",
            inputs=stmt_ids,
            outputs=["graph"],
            notes=f"{len(graph.nodes)} nodes, {len(graph.edges)} edges",
        )

    def _stage_summarize(self, options: dict) -> StageRun:
        from .ingest import load_document

        docs = self.store.list_documents()
        if not docs:
            raise UpstreamIncomplete("no documents to summarize")
        template = self.registry.get("summarize")
        outputs: list[str] = []
        for doc_id in docs:
            doc = self.store.get_document(doc_id)
            req = ChatRequest(
                messages=[
                    ChatMessage("system", template.role_preamble),
                    ChatMessage("user", render(template, {"document_body": doc.raw_text})),
                ],
                model_id=self.config.gateway.model_id,
                temperature=self.config.gateway.temperature,
                max_tokens=self.config.gateway.max_tokens,
            )
            transcript = self.gateway.complete(req, self.config.gateway_mode)
            self.store.put_transcript(transcript)
            summary = load_document(transcript.response_text.encode("utf-8"))
            self.store.put_document(summary)
            outputs.append(summary.doc_id)
        project = self.store.project
        project["summary_docs"] = outputs
        from .store import _write_json

        _write_json(self.store.root / "project.json", project)
        return StageRun(run_id="", stage="summarize", status="ok", inputs=docs, outputs=outputs)

    def _active_documents(self) -> list[str]:
        project = self.store.project
        if self.config.pipeline.summarize and project.get("summary_docs"):
            return list(project["summary_docs"])
        return [d for d in self.store.list_documents() if d not in project.get("summary_docs", [])]

    def _stage_abstract(self, options: dict) -> StageRun:
        stmts = self._statements_in_topo()
        if not stmts:
            raise UpstreamIncomplete("no statements: run extract and graph first")
        if not self.store.has_graph():
            raise UpstreamIncomplete("no concept graph: run graph first")
        template = self.registry.get("abstract")
        context: list[tuple[str, str]] = []
        outputs: list[str] = []
        for stmt in stmts:
            req = build_abstract_request(template, self.config, stmt, context)
            transcript = self.gateway.complete(req, self.config.gateway_mode)
            self.store.put_transcript(transcript)
            text = transcript.response_text.strip()
            abs_id = self.store.put_abstraction(
                stmt.stmt_id, text, template.template_id, template.version
            )
            outputs.append(abs_id)
            context.append((display_label(stmt), text))
        return StageRun(
            run_id="",
            stage="abstract",
            status="ok",
            inputs=[s.stmt_id for s in stmts],
            outputs=outputs,
        )

    def _stage_formalize(self, options: dict) -> StageRun:
        stmts = self._statements_in_topo()
        if not stmts:
            raise UpstreamIncomplete("no statements: run extract and graph first")
        template = self.registry.get("formalize")
        context_theories: list[str] = []
        outputs: list[str] = []
        for stmt in stmts:
            abstraction = self.store.get_abstraction(stmt.stmt_id)
            if abstraction is None:
                raise UpstreamIncomplete(f"statement {stmt.stmt_id} has no abstraction yet")
            req = build_formalize_request(
                template, self.config, stmt, abstraction["text"], context_theories
            )
            transcript = self.gateway.complete(req, self.config.gateway_mode)
            self.store.put_transcript(transcript)
            blocks = extract_code_blocks(transcript.response_text)
            if not blocks:
                raise StageFailed(
                    "formalize", ValueError(f"response for {stmt.stmt_id} contains no theory")
                )
            text = blocks[0].text
            version = self.store.put_theory(text, Origin.LLM, [stmt.stmt_id])
            outputs.append(version.version_id)
            # later prompts see what this stage produced, not later
            # repairs, so replayed requests stay byte-stable across runs
            context_theories.append(version.text)
        return StageRun(
            run_id="",
            stage="formalize",
            status="ok",
            inputs=[s.stmt_id for s in stmts],
            outputs=outputs,
        )

    def _stage_repair(self, options: dict) -> StageRun:
        stmts = self._statements_in_topo()
        if not stmts:
            raise UpstreamIncomplete("no statements")
        dry_run = bool(options.get("dry_run"))
        renames = self._renames()
        inputs: list[str] = []
        outputs: list[str] = []
        blocked: list[str] = []
        planned: list[str] = []
        for stmt in stmts:
            version_id = self.store.latest_version_for([stmt.stmt_id])
            if version_id is None:
                raise UpstreamIncomplete(f"statement {stmt.stmt_id} has no generated theory yet")
            inputs.append(version_id)
            version = self.store.get_theory(version_id)
            outcome = repair_to_fixpoint(
                version.text,
                max_passes=self.config.repair.max_passes,
                prelude=self.prelude,
                rename_table=renames,
            )
            if dry_run:
                for entry in outcome.log.entries:
                    planned.append(f"{version_id}: {entry.rule_id} @ {entry.span_start}")
                continue
            if outcome.text != version.text:
                child = self.store.put_theory(
                    outcome.text,
                    Origin.REPAIR,
                    version.stmt_ids,
                    parent_id=version_id,
                    extra={
                        "repair_log": [e.to_json() for e in outcome.log.entries],
                        "passes": outcome.passes,
                    },
                )
                outputs.append(child.version_id)
                final_id = child.version_id
            else:
                final_id = version_id
            residual = [d for d in outcome.remaining if d.severity is Severity.ERROR]
            if residual and self.store.gate_decision(f"repair:{final_id}") != "approve":
                blocked.append(final_id)
        if dry_run:
            return StageRun(
                run_id="",
                stage="repair",
                status="ok",
                inputs=inputs,
                notes="dry run; planned edits: " + ("; ".join(planned) if planned else "none"),
            )
        if blocked:
            return StageRun(
                run_id="",
                stage="repair",
                status="needs_human",
                inputs=inputs,
                outputs=outputs,
                notes="residual errors in: " + ", ".join(blocked),
            )
        return StageRun(run_id="", stage="repair", status="ok", inputs=inputs, outputs=outputs)

    def _stage_merge(self, options: dict) -> StageRun:
        stmts = self._statements_in_topo()
        if not stmts:
            raise UpstreamIncomplete("no statements")
        member_ids: list[str] = []
        unclean: list[str] = []
        for stmt in stmts:
            version_id = self.store.latest_version_for([stmt.stmt_id])
            if version_id is None:
                raise UpstreamIncomplete(f"statement {stmt.stmt_id} has no theory to merge")
            member_ids.append(version_id)
            version = self.store.get_theory(version_id)
            if self._has_errors(version.text):
                if self.store.gate_decision(f"repair:{version_id}") != "approve":
                    unclean.append(version_id)
        if unclean:
            return StageRun(
                run_id="",
                stage="merge",
                status="needs_human",
                inputs=member_ids,
                notes="members with unapproved errors: " + ", ".join(unclean),
            )
        if self.config.pipeline.require_merge_approval:
            if self.store.gate_decision("merge") != "approve":
                return StageRun(
                    run_id="",
                    stage="merge",
                    status="needs_human",
                    inputs=member_ids,
                    notes="merge requires an approval verdict (gate: merge)",
                )
        target = options.get("name") or self.config.pipeline.merge_name
        asts = []
        for version_id in member_ids:
            result = parse_theory(self.store.get_theory(version_id).text)
            if result.ast is None:
                raise StageFailed("merge", ValueError(f"{version_id} does not parse"))
            asts.append(result.ast)
        merged, notes = merge(MergePlan(target_name=target, source_theories=asts))
        all_stmts = [s.stmt_id for s in stmts]
        version = self.store.put_theory(
            print_theory(merged),
            Origin.MERGE,
            all_stmts,
            parent_id=member_ids[-1],
            extra={
                "sources": member_ids,
                "merge_notes": [n.to_json() for n in notes],
            },
        )
        return StageRun(
            run_id="",
            stage="merge",
            status="ok",
            inputs=member_ids,
            outputs=[version.version_id],
            notes=f"{len(notes)} merge notes",
        )

    def _merged_version_id(self) -> Optional[str]:
        stmt_ids = self.store.list_statements()
        if not stmt_ids:
            return None
        return self.store.latest_version_for(stmt_ids)

    def _stage_check(self, options: dict) -> StageRun:
        version_id = options.get("version_id") or self._merged_version_id()
        if version_id is None:
            raise UpstreamIncomplete("nothing to check: run merge first")
        version = self.store.get_theory(version_id)
        cfg = self.config.backend
        if options.get("backend"):
            from .prover import BackendConfig

            cfg = BackendConfig.from_json({**cfg.to_json(), "kind": options["backend"]})
        result = check(version.text, cfg=cfg, prelude=self.prelude)
        check_id = self.store.put_check(version_id, result)
        status = "ok" if result.typecheck_ok else "needs_human"
        notes = "" if result.typecheck_ok else f"{len(result.diagnostics)} diagnostics"
        return StageRun(
            run_id="",
            stage="check",
            status=status,
            inputs=[version_id],
            outputs=[check_id],
            notes=notes,
        )

    def _stage_prove(self, options: dict) -> StageRun:
        version_id = options.get("version_id") or self._merged_version_id()
        if version_id is None:
            raise UpstreamIncomplete("nothing to prove: run merge first")
        if self.store.check_for(version_id) is None:
            raise UpstreamIncomplete("version has not been checked yet")
        version = self.store.get_theory(version_id)
        formula = options.get("formula") or self._main_formula(version.text)
        if formula is None:
            raise StageFailed("prove", ValueError("theory declares no formulas"))
        tactic = options.get("tactic", "grind")
        attempt = prove(version.text, formula, tactic=tactic, cfg=self.config.backend)
        attempt_id = self.store.put_proof(version_id, attempt)
        ok = attempt.status in (ProofStatus.PROVED, ProofStatus.SKIPPED_STUB)
        return StageRun(
            run_id="",
            stage="prove",
            status="ok" if ok else "needs_human",
            inputs=[version_id],
            outputs=[attempt_id],
            notes=f"{formula}: {attempt.status.value}",
        )

    def _main_formula(self, text: str) -> Optional[str]:
        result = parse_theory(text)
        if result.ast is None:
            return None
        formulas = [d for d in result.ast.declarations if d.decl_kind is DeclKind.FORMULA_DECL]
        if not formulas:
            return None
        for decl in formulas:
            if (decl.formula_class or "").upper() == "THEOREM":
                return decl.name
        return formulas[0].name

    # ------------------------------------------------------------------

    def _statements_in_topo(self) -> list[StatementRecord]:
        stmt_ids = self.store.list_statements()
        if not stmt_ids:
            return []
        records = [self.store.get_statement(s) for s in stmt_ids]
        if self.store.has_graph():
            graph = self.store.get_graph()
            order = topo_order(graph)
            by_id = {r.stmt_id: r for r in records}
            return [by_id[s] for s in order if s in by_id]
        return records
