"""TOML scenario files.

Layout, one table per component, keys identical to the dataclass fields::

    name = "ddr-xdma"
    engine = "xdma"          # xdma | qdma | rdma-read | rdma-write
    mode = "msix"            # msix | polled
    description = "..."

    [link]      lanes, per_lane_gbps, effective_cap_gbps, max_payload_bytes,
                tlp_header_bytes, tlp_framing_bytes
    [fabric]    cap_gbps, contending_master, contention_factor_h2c, contention_factor_c2h
    [endpoint]  kind (bram | ddr4 | host-dram), capacity_bytes, peak_gbps,
                access_latency_ns, burst_bytes
    [dma]       max_channels, per_channel_cap_h2c_gbps, per_channel_cap_c2h_gbps,
                interleaved_cap_h2c_gbps, interleaved_cap_c2h_gbps (omit = unbounded),
                descriptor_granularity, descriptor_overhead_ns, setup_polled_us,
                setup_msix_us, queue_overhead_us
    [rdma]      link_gbps, read_setup_us, write_setup_us, round_trip_us, mtu_bytes,
                packet_overhead_bytes

Exactly one of ``[dma]`` / ``[rdma]`` is present.  Missing keys take the
dataclass defaults.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import tomli
import tomli_w

from .errors import ConfigError
from .model import (
    AxiFabricConfig,
    DmaEngineConfig,
    EngineKind,
    MemoryEndpointConfig,
    MemoryKind,
    OperatingMode,
    PcieLinkConfig,
    RdmaConfig,
    ScenarioConfig,
    validate_scenario,
)

_SECTIONS = {
    "link": PcieLinkConfig,
    "fabric": AxiFabricConfig,
    "endpoint": MemoryEndpointConfig,
    "dma": DmaEngineConfig,
    "rdma": RdmaConfig,
}


def _section_to_dict(obj) -> dict:
    out = {}
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        if value is None:
            continue
        if isinstance(value, MemoryKind):
            value = value.value
        out[f.name] = value
    return out


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    doc = {"name": cfg.name, "engine": cfg.engine.value, "mode": cfg.mode.value}
    if cfg.description:
        doc["description"] = cfg.description
    for key in _SECTIONS:
        section = getattr(cfg, key)
        if section is not None:
            doc[key] = _section_to_dict(section)
    return doc


def _build_section(key: str, table: dict):
    cls = _SECTIONS[key]
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(table) - set(known)
    if unknown:
        raise ConfigError(f"[{key}] has unknown keys: {', '.join(sorted(unknown))}")
    kwargs = dict(table)
    if key == "endpoint" and "kind" in kwargs:
        kwargs["kind"] = MemoryKind(kwargs["kind"])
    for name, value in kwargs.items():
        default = known[name].default
        if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
            kwargs[name] = float(value)
    return cls(**kwargs)


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    top = {"name", "engine", "mode", "description", *_SECTIONS}
    unknown = set(doc) - top
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    try:
        kwargs = {
            "name": doc["name"],
            "engine": EngineKind(doc["engine"]),
            "mode": OperatingMode(doc.get("mode", "msix")),
            "description": doc.get("description", ""),
        }
        for key in _SECTIONS:
            if key in doc:
                kwargs[key] = _build_section(key, doc[key])
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return validate_scenario(ScenarioConfig(**kwargs))


def dumps_scenario(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(scenario_to_dict(cfg))


def loads_scenario(text: str) -> ScenarioConfig:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return scenario_from_dict(doc)


def save_scenario(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(dumps_scenario(cfg), encoding="utf-8")


def load_scenario(path) -> ScenarioConfig:
    return loads_scenario(Path(path).read_text(encoding="utf-8"))
