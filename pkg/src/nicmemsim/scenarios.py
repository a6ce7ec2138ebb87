"""Built-in experiment presets.

Hardware constants are fixed in code; fitted values (engine caps,
contention factors) come from ``data/calibration.toml``, which is
regenerated by ``nicmemsim calibrate --write``.
"""

from __future__ import annotations

from dataclasses import replace
from functools import lru_cache
from importlib import resources
from typing import Optional

import tomli

from .errors import ConfigError
from .model import (
    AxiFabricConfig,
    DmaEngineConfig,
    EngineKind,
    GiB,
    MemoryEndpointConfig,
    MemoryKind,
    MiB,
    PcieLinkConfig,
    RdmaConfig,
    ScenarioConfig,
    validate_scenario,
)
from .params import apply_params

SCENARIO_NAMES = (
    "bram-xdma",
    "ddr-xdma",
    "ddr-microblaze",
    "ddr-petalinux",
    "rdma-bf2-read",
    "rdma-bf2-write",
)

# Alveo U250: PCIe Gen3 x16, AXI4 interconnect, one DDR4 DIMM
GEN3_X16 = PcieLinkConfig(lanes=16, per_lane_gbps=1.0, effective_cap_gbps=15.8)
# BlueField-2: PCIe Gen4 x16
GEN4_X16 = PcieLinkConfig(lanes=16, per_lane_gbps=2.0, effective_cap_gbps=31.5)

BRAM_1M = MemoryEndpointConfig(MemoryKind.BRAM, 1 * MiB, 16.0, access_latency_ns=2.0, burst_bytes=64)
BRAM_2M = replace(BRAM_1M, capacity_bytes=2 * MiB)
DDR4_16G = MemoryEndpointConfig(MemoryKind.DDR4, 16 * GiB, 19.2, access_latency_ns=80.0, burst_bytes=512)
BF2_DDR4 = MemoryEndpointConfig(MemoryKind.DDR4, 16 * GiB, 25.6, access_latency_ns=90.0, burst_bytes=64)

XDMA_DDR = DmaEngineConfig(
    per_channel_cap_h2c_gbps=11.0,
    per_channel_cap_c2h_gbps=12.5,
    interleaved_cap_h2c_gbps=9.5,
    interleaved_cap_c2h_gbps=13.5,
)
MICROBLAZE = AxiFabricConfig(contending_master=True, contention_factor_h2c=0.88, contention_factor_c2h=0.78)


def base_scenarios() -> dict[str, ScenarioConfig]:
    """Uncalibrated presets (the starting point of the fit)."""
    return {
        "bram-xdma": ScenarioConfig(
            "bram-xdma", EngineKind.XDMA, GEN3_X16, AxiFabricConfig(), BRAM_1M,
            dma=DmaEngineConfig(per_channel_cap_h2c_gbps=8.0, per_channel_cap_c2h_gbps=8.0),
            description="XDMA to 1 MiB on-chip block RAM",
        ),
        "ddr-xdma": ScenarioConfig(
            "ddr-xdma", EngineKind.XDMA, GEN3_X16, AxiFabricConfig(), DDR4_16G, dma=XDMA_DDR,
            description="XDMA to one 16 GiB DDR4 DIMM through the MIG controller",
        ),
        "ddr-microblaze": ScenarioConfig(
            "ddr-microblaze", EngineKind.XDMA, GEN3_X16, MICROBLAZE, DDR4_16G, dma=XDMA_DDR,
            description="ddr-xdma plus an idle bare-metal MicroBlaze sharing the AXI interconnect",
        ),
        "ddr-petalinux": ScenarioConfig(
            "ddr-petalinux", EngineKind.XDMA, GEN3_X16,
            replace(MICROBLAZE, contention_factor_h2c=0.85, contention_factor_c2h=0.47),
            DDR4_16G,
            dma=replace(XDMA_DDR, setup_msix_us=14.0, setup_polled_us=12.0,
                        interleaved_cap_h2c_gbps=9.0, interleaved_cap_c2h_gbps=12.5),
            description="MicroBlaze running a Linux kernel that actively uses the shared DDR4",
        ),
        "rdma-bf2-read": ScenarioConfig(
            "rdma-bf2-read", EngineKind.RDMA_READ, GEN4_X16, AxiFabricConfig(), BF2_DDR4, rdma=RdmaConfig(),
            description="BlueField-2 RDMA READ over a 100 Gb/s port",
        ),
        "rdma-bf2-write": ScenarioConfig(
            "rdma-bf2-write", EngineKind.RDMA_WRITE, GEN4_X16, AxiFabricConfig(), BF2_DDR4, rdma=RdmaConfig(),
            description="BlueField-2 RDMA WRITE over a 100 Gb/s port",
        ),
    }


def standard_sizes(cfg: ScenarioConfig) -> list[int]:
    """Power-of-two sweep from 64 B up to 1 MiB (block RAM) or 4 MiB (everything else)."""
    top = min(cfg.endpoint.capacity_bytes, 4 * MiB)
    sizes, s = [], 64
    while s <= top:
        sizes.append(s)
        s *= 2
    return sizes


def load_calibration(text: Optional[str] = None) -> dict:
    if text is None:
        try:
            text = resources.files("nicmemsim").joinpath("data/calibration.toml").read_text("utf-8")
        except FileNotFoundError:
            return {}
    return tomli.loads(text).get("scenarios", {})


def calibrated(base: dict[str, ScenarioConfig], calibration: dict) -> dict[str, ScenarioConfig]:
    out = {}
    for name, cfg in base.items():
        entry = calibration.get(name, {})
        params = {**entry.get("inherited", {}), **entry.get("params", {})}
        out[name] = validate_scenario(apply_params(cfg, params)) if params else validate_scenario(cfg)
    return out


@lru_cache(maxsize=1)
def _builtin() -> tuple[ScenarioConfig, ...]:
    return tuple(calibrated(base_scenarios(), load_calibration()).values())


def builtin_scenarios() -> list[ScenarioConfig]:
    return list(_builtin())


def get_scenario(name: str) -> ScenarioConfig:
    for cfg in _builtin():
        if cfg.name == name:
            return cfg
    raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}")


def without_contention(cfg: ScenarioConfig) -> ScenarioConfig:
    fabric = replace(cfg.fabric, contending_master=False, contention_factor_h2c=1.0, contention_factor_c2h=1.0)
    return validate_scenario(replace(cfg, fabric=fabric))
