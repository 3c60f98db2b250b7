"""Prompt templates: parsing, rendering, registry, code-block mining."""

import pytest

from autoformal.prompts import (
    MissingPlaceholder,
    TemplateRegistry,
    UnknownPlaceholder,
    extract_code_blocks,
    parse_template,
    render,
)


GOOD_TEMPLATE = """---
template_id: sample
version: 2
role_preamble: You check things.
required: subject, detail
---
Look at <<subject>> and report on <<detail>>.
"""


def test_parse_template_fields():
    t = parse_template(GOOD_TEMPLATE)
    assert t.template_id == "sample"
    assert t.version == 2
    assert t.role_preamble == "You check things."
    assert t.required_placeholders == ("subject", "detail")
    assert t.body_pattern.startswith("Look at <<subject>>")


def test_parse_template_requires_front_matter():
    with pytest.raises(ValueError):
        parse_template("no header here <<x>>")


def test_parse_template_rejects_placeholder_mismatch():
    undeclared = GOOD_TEMPLATE.replace("required: subject, detail", "required: subject")
    with pytest.raises(ValueError):
        parse_template(undeclared)
    unused = GOOD_TEMPLATE.replace(" and report on <<detail>>", "")
    with pytest.raises(ValueError):
        parse_template(unused)


def test_render_substitutes_all_placeholders():
    t = parse_template(GOOD_TEMPLATE)
    out = render(t, {"subject": "the graph", "detail": "edge counts"})
    assert out == "Look at the graph and report on edge counts.\n"


def test_render_missing_binding():
    t = parse_template(GOOD_TEMPLATE)
    with pytest.raises(MissingPlaceholder):
        render(t, {"subject": "x"})


def test_render_unknown_binding():
    t = parse_template(GOOD_TEMPLATE)
    with pytest.raises(UnknownPlaceholder):
        render(t, {"subject": "x", "detail": "y", "extra": "z"})


def test_render_is_single_pass():
    t = parse_template(GOOD_TEMPLATE)
    out = render(t, {"subject": "<<detail>>", "detail": "plain"})
    # placeholder-shaped text inside a binding stays verbatim
    assert "Look at <<detail>> and report on plain." in out


def test_render_preserves_braces_in_bindings():
    t = parse_template(GOOD_TEMPLATE)
    out = render(t, {"subject": "{n: nat | n > 0}", "detail": "\\begin{theorem}"})
    assert "{n: nat | n > 0}" in out
    assert "\\begin{theorem}" in out


def test_bundled_registry_contents():
    registry = TemplateRegistry()
    assert {"abstract", "formalize", "repair_assist", "summarize"} <= registry.ids()
    assert registry.versions("abstract") == [1]
    t = registry.get("formalize")
    assert t.version == 1
    assert "abstraction" in t.required_placeholders


def test_registry_latest_and_pinned_versions(tmp_path):
    (tmp_path / "probe.v1.txt").write_text(
        "---\ntemplate_id: probe\nversion: 1\nrequired: a\n---\nv1 <<a>>\n"
    )
    (tmp_path / "probe.v2.txt").write_text(
        "---\ntemplate_id: probe\nversion: 2\nrequired: a\n---\nv2 <<a>>\n"
    )
    registry = TemplateRegistry(tmp_path)
    assert registry.versions("probe") == [1, 2]
    assert registry.get("probe").version == 2
    assert registry.get("probe", version=1).body_pattern.startswith("v1")


def test_registry_rejects_duplicate_id_version(tmp_path):
    body = "---\ntemplate_id: dup\nversion: 1\nrequired:\n---\nstatic\n"
    (tmp_path / "a.txt").write_text(body)
    (tmp_path / "b.txt").write_text(body)
    with pytest.raises(ValueError):
        TemplateRegistry(tmp_path)


def test_registry_unknown_id(tmp_path):
    registry = TemplateRegistry(tmp_path)
    with pytest.raises(KeyError):
        registry.get("nothing")


def test_extract_fenced_blocks():
    text = (
        "Here you go:\n```pvs\nt: THEORY\nBEGIN\nEND t\n```\n"
        "and a note\n```\nplain block\n```\n"
    )
    blocks = extract_code_blocks(text)
    assert len(blocks) == 2
    assert blocks[0].language_tag == "pvs"
    assert blocks[0].text == "t: THEORY\nBEGIN\nEND t\n"
    assert blocks[1].language_tag is None
    start, end = blocks[0].origin_span
    assert text[start:end] == blocks[0].text


def test_extract_skips_empty_fences():
    blocks = extract_code_blocks("```\n\n```\n```pvs\nx: THEORY\nBEGIN\nEND x\n```")
    assert len(blocks) == 1


def test_extract_falls_back_to_bare_theory_text():
    text = "Sure, here is the theory:\n\ndemo: THEORY\nBEGIN\n  c: nat\nEND demo\n\nHope it helps."
    blocks = extract_code_blocks(text)
    assert len(blocks) == 1
    assert blocks[0].language_tag is None
    assert blocks[0].text.startswith("demo: THEORY")
    assert blocks[0].text.rstrip().endswith("END demo")


def test_extract_fallback_requires_end_line():
    assert extract_code_blocks("demo: THEORY\nBEGIN\n  unfinished") == []


def test_extract_nothing_found():
    assert extract_code_blocks("just prose, no code at all") == []
