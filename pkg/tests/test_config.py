"""Tests for workbench configuration loading and validation."""

import json

import pytest

from autoformal.config import (
    PipelineSettings,
    RepairSettings,
    WorkbenchConfig,
    load_config,
    save_config,
)
from autoformal.gateway import GatewayConfig


def test_defaults():
    cfg = WorkbenchConfig()
    assert cfg.gateway_mode == "replay"
    assert cfg.backend.kind == "stub"
    assert cfg.repair.max_passes == 5
    assert cfg.pipeline.merge_name == "Merged"
    assert cfg.pipeline.abstraction_mode == "supplement"
    assert cfg.template_dir is None


def test_invalid_gateway_mode():
    with pytest.raises(ValueError):
        WorkbenchConfig(gateway_mode="playback")


def test_invalid_abstraction_mode():
    with pytest.raises(ValueError):
        WorkbenchConfig(pipeline=PipelineSettings(abstraction_mode="augment"))


def test_json_roundtrip():
    cfg = WorkbenchConfig(
        gateway=GatewayConfig(model_id="big-model", temperature=0.4),
        gateway_mode="record",
        repair=RepairSettings(max_passes=2, renames={"old": "new"}),
        pipeline=PipelineSettings(
            summarize=True,
            abstraction_mode="replace",
            require_merge_approval=True,
            merge_name="Everything",
        ),
        template_dir="/tmp/templates",
    )
    back = WorkbenchConfig.from_json(cfg.to_json())
    assert back.to_json() == cfg.to_json()
    assert back.gateway.model_id == "big-model"
    assert back.repair.renames == {"old": "new"}
    assert back.pipeline.merge_name == "Everything"


def test_from_json_tolerates_sparse_input():
    cfg = WorkbenchConfig.from_json({"gateway_mode": "live"})
    assert cfg.gateway_mode == "live"
    assert cfg.repair.max_passes == 5
    assert cfg.pipeline.parallelism == 1


def test_from_json_rejects_bad_mode():
    with pytest.raises(ValueError):
        WorkbenchConfig.from_json({"gateway_mode": "sideways"})


def test_save_and_load(tmp_path):
    path = tmp_path / "config.json"
    cfg = WorkbenchConfig(gateway_mode="record")
    save_config(cfg, path)
    assert load_config(path).to_json() == cfg.to_json()


def test_save_writes_stable_bytes(tmp_path):
    cfg = WorkbenchConfig(repair=RepairSettings(renames={"b": "2", "a": "1"}))
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    save_config(cfg, p1)
    save_config(WorkbenchConfig.from_json(cfg.to_json()), p2)
    assert p1.read_bytes() == p2.read_bytes()
    # the file is plain JSON
    parsed = json.loads(p1.read_text())
    assert parsed["repair"]["renames"] == {"a": "1", "b": "2"}
