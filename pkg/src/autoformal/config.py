"""Workbench configuration: one JSON file covering the LLM gateway, the
prover backend, repair behavior, and pipeline policy."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .canonical import canonical_json_bytes
from .gateway import GatewayConfig
from .prover import BackendConfig

import json

__all__ = ["RepairSettings", "PipelineSettings", "WorkbenchConfig", "load_config", "save_config"]

GATEWAY_MODES = ("live", "record", "replay")
ABSTRACTION_MODES = ("supplement", "replace")


@dataclass
class RepairSettings:
    max_passes: int = 5
    llm_assist: bool = False
    renames: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"max_passes": self.max_passes, "llm_assist": self.llm_assist, "renames": dict(self.renames)}

    @classmethod
    def from_json(cls, obj: dict) -> "RepairSettings":
        return cls(
            max_passes=obj.get("max_passes", 5),
            llm_assist=obj.get("llm_assist", False),
            renames=dict(obj.get("renames", {})),
        )


@dataclass
class PipelineSettings:
    summarize: bool = False
    # whether the formalize prompt carries the abstraction alongside the
    # original statement ("supplement") or instead of it ("replace")
    abstraction_mode: str = "supplement"
    require_merge_approval: bool = False
    parallelism: int = 1
    merge_name: str = "Merged"

    def to_json(self) -> dict:
        return {
            "summarize": self.summarize,
            "abstraction_mode": self.abstraction_mode,
            "require_merge_approval": self.require_merge_approval,
            "parallelism": self.parallelism,
            "merge_name": self.merge_name,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PipelineSettings":
        return cls(
            summarize=obj.get("summarize", False),
            abstraction_mode=obj.get("abstraction_mode", "supplement"),
            require_merge_approval=obj.get("require_merge_approval", False),
            parallelism=obj.get("parallelism", 1),
            merge_name=obj.get("merge_name", "Merged"),
        )


@dataclass
class WorkbenchConfig:
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    gateway_mode: str = "replay"
    backend: BackendConfig = field(default_factory=BackendConfig)
    repair: RepairSettings = field(default_factory=RepairSettings)
    pipeline: PipelineSettings = field(default_factory=PipelineSettings)
    template_dir: str | None = None

    def __post_init__(self) -> None:
        if self.gateway_mode not in GATEWAY_MODES:
            raise ValueError(f"gateway_mode must be one of {GATEWAY_MODES}, got {self.gateway_mode!r}")
        if self.pipeline.abstraction_mode not in ABSTRACTION_MODES:
            raise ValueError(
                f"abstraction_mode must be one of {ABSTRACTION_MODES}, got {self.pipeline.abstraction_mode!r}"
            )

    def to_json(self) -> dict:
        return {
            "gateway": self.gateway.to_json(),
            "gateway_mode": self.gateway_mode,
            "backend": self.backend.to_json(),
            "repair": self.repair.to_json(),
            "pipeline": self.pipeline.to_json(),
            "template_dir": self.template_dir,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WorkbenchConfig":
        return cls(
            gateway=GatewayConfig.from_json(obj.get("gateway", {})),
            gateway_mode=obj.get("gateway_mode", "replay"),
            backend=BackendConfig.from_json(obj.get("backend", {})),
            repair=RepairSettings.from_json(obj.get("repair", {})),
            pipeline=PipelineSettings.from_json(obj.get("pipeline", {})),
            template_dir=obj.get("template_dir"),
        )


def load_config(path: Path) -> WorkbenchConfig:
    return WorkbenchConfig.from_json(json.loads(Path(path).read_text("utf-8")))


def save_config(config: WorkbenchConfig, path: Path) -> None:
    Path(path).write_bytes(canonical_json_bytes(config.to_json()) + b"\n")
