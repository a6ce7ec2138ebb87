"""Domain types shared by every part of the simulator.

Units follow one convention throughout: bandwidths are decimal GB/s, sizes
are integer bytes, and durations are nanoseconds unless a field name says
``_us``.  Because 1 GB/s is exactly 1 byte/ns, ``bytes / gbps`` is a time
in nanoseconds with no conversion factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import CapExceeded, ConfigError, IncompatibleEngine, NonPositiveRate

KiB = 1024
MiB = 1024 * KiB
GiB = 1024 * MiB

REL_TOL = 1e-9

PCIE_LANE_WIDTHS = (1, 2, 4, 8, 16, 32)


def bw_close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=REL_TOL)


def bw_le(a: float, b: float) -> bool:
    """``a <= b`` up to the relative bandwidth tolerance."""
    return a <= b or bw_close(a, b)


class Direction(str, Enum):
    H2C = "h2c"
    C2H = "c2h"


class OperatingMode(str, Enum):
    POLLED = "polled"
    MSIX = "msix"


class EngineKind(str, Enum):
    XDMA = "xdma"
    QDMA = "qdma"
    RDMA_READ = "rdma-read"
    RDMA_WRITE = "rdma-write"

    @property
    def is_rdma(self) -> bool:
        return self in (EngineKind.RDMA_READ, EngineKind.RDMA_WRITE)


class MemoryKind(str, Enum):
    BRAM = "bram"
    DDR4 = "ddr4"
    HOST_DRAM = "host-dram"


@dataclass(frozen=True)
class PcieLinkConfig:
    lanes: int = 16
    per_lane_gbps: float = 1.0
    effective_cap_gbps: float = 15.8
    max_payload_bytes: int = 256
    tlp_header_bytes: int = 12
    tlp_framing_bytes: int = 12

    @property
    def raw_gbps(self) -> float:
        return self.lanes * self.per_lane_gbps

    @property
    def tlp_overhead_bytes(self) -> int:
        return self.tlp_header_bytes + self.tlp_framing_bytes


@dataclass(frozen=True)
class MemoryEndpointConfig:
    kind: MemoryKind = MemoryKind.DDR4
    capacity_bytes: int = 16 * GiB
    peak_gbps: float = 19.2
    # informational; the timing models treat the endpoint as a pure rate server
    access_latency_ns: float = 80.0
    burst_bytes: int = 512


@dataclass(frozen=True)
class AxiFabricConfig:
    cap_gbps: float = 16.0
    contending_master: bool = False
    contention_factor_h2c: float = 1.0
    contention_factor_c2h: float = 1.0

    def contention_factor(self, direction: Direction) -> float:
        if direction is Direction.H2C:
            return self.contention_factor_h2c
        return self.contention_factor_c2h


@dataclass(frozen=True)
class DmaEngineConfig:
    max_channels: int = 4
    per_channel_cap_h2c_gbps: float = 11.0
    per_channel_cap_c2h_gbps: float = 12.5
    # Aggregate ceiling for two or more interleaved channels; None = unbounded.
    interleaved_cap_h2c_gbps: Optional[float] = None
    interleaved_cap_c2h_gbps: Optional[float] = None
    descriptor_granularity: int = 4096
    descriptor_overhead_ns: float = 4.0
    setup_polled_us: float = 8.0
    setup_msix_us: float = 10.0
    # extra queue/doorbell handling charged to QDMA transfers only
    queue_overhead_us: float = 2.0

    def per_channel_cap(self, direction: Direction) -> float:
        if direction is Direction.H2C:
            return self.per_channel_cap_h2c_gbps
        return self.per_channel_cap_c2h_gbps

    def interleaved_cap(self, direction: Direction) -> Optional[float]:
        if direction is Direction.H2C:
            return self.interleaved_cap_h2c_gbps
        return self.interleaved_cap_c2h_gbps

    def setup_overhead_us(self, mode: OperatingMode) -> float:
        if mode is OperatingMode.POLLED:
            return self.setup_polled_us
        return self.setup_msix_us


@dataclass(frozen=True)
class RdmaConfig:
    link_gbps: float = 100.0
    read_setup_us: float = 3.0
    write_setup_us: float = 2.0
    round_trip_us: float = 2.5
    mtu_bytes: int = 4096
    # RoCEv2 per-packet wire overhead: preamble+IFG, Ethernet, IPv4, UDP, BTH, ICRC, FCS
    packet_overhead_bytes: int = 82

    def verb_setup_us(self, verb: str) -> float:
        return self.read_setup_us if verb == "read" else self.write_setup_us


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    engine: EngineKind
    link: PcieLinkConfig = field(default_factory=PcieLinkConfig)
    fabric: AxiFabricConfig = field(default_factory=AxiFabricConfig)
    endpoint: MemoryEndpointConfig = field(default_factory=MemoryEndpointConfig)
    dma: Optional[DmaEngineConfig] = None
    rdma: Optional[RdmaConfig] = None
    mode: OperatingMode = OperatingMode.MSIX
    description: str = ""

    @property
    def max_channels(self) -> int:
        return self.dma.max_channels if self.dma is not None else 1


@dataclass(frozen=True)
class TransferRequest:
    direction: Direction
    size: int
    channels: int = 1
    offset: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ConfigError(f"transfer size must be >= 1 byte, got {self.size}")
        if self.channels < 1:
            raise ConfigError(f"channel count must be >= 1, got {self.channels}")
        if self.offset < 0:
            raise ConfigError("offset must be non-negative")


@dataclass(frozen=True)
class ReferencePoint:
    """A measured value (bw_low == bw_high) or quoted range to reproduce.

    ``size`` of None means the value is the peak over the scenario's sweep.
    """

    scenario: str
    direction: Direction
    channels: int
    bw_low: float
    bw_high: float
    size: Optional[int] = None
    label: str = ""

    def __post_init__(self):
        if self.bw_low > self.bw_high:
            raise ConfigError(f"reference interval is inverted: {self.bw_low} > {self.bw_high}")

    @property
    def is_interval(self) -> bool:
        return not bw_close(self.bw_low, self.bw_high)


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise NonPositiveRate(f"{name} must be positive and finite, got {value!r}")


def validate_scenario(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every cross-field invariant and return the (immutable) scenario."""
    link = cfg.link
    if link.lanes not in PCIE_LANE_WIDTHS:
        raise ConfigError(f"unsupported lane count x{link.lanes}")
    _positive("link.per_lane_gbps", link.per_lane_gbps)
    _positive("link.effective_cap_gbps", link.effective_cap_gbps)
    if not bw_le(link.effective_cap_gbps, link.raw_gbps):
        raise CapExceeded(
            f"effective cap {link.effective_cap_gbps} GB/s exceeds "
            f"x{link.lanes} x {link.per_lane_gbps} GB/s = {link.raw_gbps} GB/s"
        )
    if not 64 <= link.max_payload_bytes <= 4096:
        raise ConfigError(f"max payload must be in [64, 4096], got {link.max_payload_bytes}")
    if not 12 <= link.tlp_header_bytes <= 16:
        raise ConfigError(f"TLP header must be 3-4 DW (12-16 B), got {link.tlp_header_bytes}")
    if link.tlp_framing_bytes < 0:
        raise ConfigError("TLP framing bytes must be non-negative")

    fab = cfg.fabric
    _positive("fabric.cap_gbps", fab.cap_gbps)
    for d in Direction:
        f = fab.contention_factor(d)
        if not 0 < f <= 1:
            raise ConfigError(f"contention factor ({d.value}) must be in (0, 1], got {f}")
        if not fab.contending_master and f != 1.0:
            raise ConfigError("contention factors must be 1.0 without a contending master")

    ep = cfg.endpoint
    _positive("endpoint.peak_gbps", ep.peak_gbps)
    if ep.capacity_bytes < 1:
        raise ConfigError("endpoint capacity must be at least one byte")
    if ep.burst_bytes < 1:
        raise ConfigError("endpoint burst must be at least one byte")

    if cfg.engine.is_rdma:
        if cfg.rdma is None or cfg.dma is not None:
            raise IncompatibleEngine(f"{cfg.engine.value} requires an RDMA (SoC) configuration")
        if ep.kind is MemoryKind.BRAM:
            raise IncompatibleEngine(f"{cfg.engine.value} cannot target FPGA block RAM")
        _positive("rdma.link_gbps", cfg.rdma.link_gbps)
        if cfg.rdma.mtu_bytes < 1:
            raise ConfigError("RDMA MTU must be positive")
        for name in ("read_setup_us", "write_setup_us", "round_trip_us"):
            if getattr(cfg.rdma, name) < 0:
                raise ConfigError(f"rdma.{name} must be non-negative")
    else:
        if cfg.dma is None or cfg.rdma is not None:
            raise IncompatibleEngine(f"{cfg.engine.value} requires a DMA (FPGA) configuration")
        if ep.kind is MemoryKind.HOST_DRAM:
            raise IncompatibleEngine(f"{cfg.engine.value} targets card memory, not host DRAM")
        dma = cfg.dma
        if not 1 <= dma.max_channels <= 4:
            raise ConfigError(f"DMA engines expose 1-4 channels per direction, got {dma.max_channels}")
        for d in Direction:
            _positive(f"dma.per_channel_cap_{d.value}", dma.per_channel_cap(d))
            cap = dma.interleaved_cap(d)
            if cap is not None:
                _positive(f"dma.interleaved_cap_{d.value}", cap)
        if dma.descriptor_granularity < 4096:
            raise ConfigError("descriptor granularity must be at least one 4 KiB page")
        for name in ("descriptor_overhead_ns", "setup_polled_us", "setup_msix_us", "queue_overhead_us"):
            if getattr(dma, name) < 0:
                raise ConfigError(f"dma.{name} must be non-negative")
    return cfg


def check_request(cfg: ScenarioConfig, req: TransferRequest) -> None:
    if req.channels > cfg.max_channels:
        raise ConfigError(
            f"{cfg.name}: {req.channels} channels requested, engine supports {cfg.max_channels}"
        )
