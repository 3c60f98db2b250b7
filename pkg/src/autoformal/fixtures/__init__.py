"""Bundled demo corpus: a small source document, canned LLM responses,
and a seeding helper that prepares a fully replayable project."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Optional

from ..canonical import normalize_newlines
from ..concepts import build_graph, topo_order
from ..config import PipelineSettings, WorkbenchConfig
from ..gateway import PromptTranscript, canonical_hash
from ..ingest import extract_statements, load_document
from ..pipeline import build_abstract_request, build_formalize_request, display_label
from ..prompts import TemplateRegistry, extract_code_blocks
from ..store import WorkbenchStore

__all__ = [
    "fixture_document_bytes",
    "fixture_raw_theory",
    "fixture_final_theory",
    "fixture_config",
    "seed_fixture_project",
    "RESPONSE_ORDER",
]

# canned responses by topological statement position
RESPONSE_ORDER = ("mappings", "cantor", "symbolic", "effective", "embedding")

_SEED_TIME = "2026-01-01T00:00:00Z"


def _data(name: str) -> str:
    return resources.files("autoformal.fixtures").joinpath(name).read_text("utf-8")


def fixture_document_bytes() -> bytes:
    return resources.files("autoformal.fixtures").joinpath("summary.tex").read_bytes()


def fixture_raw_theory() -> str:
    return _data("raw_mappings.pvs")


def fixture_final_theory() -> str:
    return _data("final_theory.pvs")


def fixture_config() -> WorkbenchConfig:
    config = WorkbenchConfig()
    config.gateway_mode = "replay"
    config.pipeline = PipelineSettings(merge_name="SummaryTheories")
    return config


def seed_fixture_project(
    root: Path,
    config: Optional[WorkbenchConfig] = None,
    require_merge_approval: bool = False,
) -> tuple[WorkbenchStore, WorkbenchConfig]:
    """Initialize a project holding the demo document plus transcripts
    for every LLM call the replay pipeline will make."""
    config = config or fixture_config()
    if require_merge_approval:
        config.pipeline.require_merge_approval = True
    store = WorkbenchStore.init_project(root, project_id="demo", config=config.to_json())
    doc = load_document(fixture_document_bytes())
    store.put_document(doc)

    records = extract_statements(doc)
    graph = build_graph(records)
    by_id = {r.stmt_id: r for r in records}
    ordered = [by_id[s] for s in topo_order(graph)]
    if len(ordered) != len(RESPONSE_ORDER):
        raise RuntimeError(
            f"fixture expects {len(RESPONSE_ORDER)} statements, found {len(ordered)}"
        )

    registry = TemplateRegistry(Path(config.template_dir) if config.template_dir else None)
    abstract_template = registry.get("abstract")
    formalize_template = registry.get("formalize")

    # replicate the pipeline's own context accumulation so the recorded
    # request hashes line up with what replay mode will look for
    abstract_context: list[tuple[str, str]] = []
    abstractions: list[str] = []
    for stmt, role in zip(ordered, RESPONSE_ORDER):
        response = _data(f"responses/abstract_{role}.txt")
        req = build_abstract_request(abstract_template, config, stmt, abstract_context)
        _record(store, req, response)
        text = response.strip()
        abstractions.append(text)
        abstract_context.append((display_label(stmt), text))

    theory_context: list[str] = []
    for stmt, role, abstraction in zip(ordered, RESPONSE_ORDER, abstractions):
        response = _data(f"responses/formalize_{role}.txt")
        req = build_formalize_request(
            formalize_template, config, stmt, abstraction, theory_context
        )
        _record(store, req, response)
        blocks = extract_code_blocks(response)
        theory_context.append(normalize_newlines(blocks[0].text))

    return store, config


def _record(store: WorkbenchStore, req, response_text: str) -> None:
    transcript = PromptTranscript(
        request_hash=canonical_hash(req),
        request=req,
        response_text=response_text,
        provider_meta={"model": req.model_id, "recorded": "fixture"},
        created_at=_SEED_TIME,
    )
    store.transcripts.put(transcript)
