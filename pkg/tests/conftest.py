"""Shared fixtures: seeded demo projects and common theory snippets."""

import sys

import pytest

from autoformal.fixtures import fixture_document_bytes, seed_fixture_project
from autoformal.ingest import extract_statements, load_document
from autoformal.pipeline import Pipeline


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance gate's one-line-per-criterion results."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None) if module else None
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)


CLEAN_THEORY = """Small: THEORY
BEGIN
  IMPORTING sets

  double(n: nat): nat = n + n

  double_even: LEMMA FORALL (n: nat): double(n) = n + n
END Small
"""


@pytest.fixture
def fixture_records():
    doc = load_document(fixture_document_bytes())
    return extract_statements(doc)


@pytest.fixture
def seeded_project(tmp_path):
    store, config = seed_fixture_project(tmp_path / "proj")
    return store, config


@pytest.fixture
def completed_project(tmp_path):
    """A fixture project run through every stage on the stub backend."""
    store, config = seed_fixture_project(tmp_path / "proj")
    pipeline = Pipeline(store, config)
    runs = pipeline.run_all()
    return store, config, runs
