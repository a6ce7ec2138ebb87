"""DMA and RDMA engine behavior and the analytic transfer-time model.

The analytic model is a latency-plus-bandwidth pipeline: a fixed per-transfer
overhead followed by streaming at the rate of the slowest stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import IncompatibleEngine, UnknownGeneration
from .fabric import capacity_check, fabric_share
from .link import link_payload_cap
from .model import (
    Direction,
    EngineKind,
    RdmaConfig,
    ScenarioConfig,
    TransferRequest,
    check_request,
)

GENERATIONS = {
    "SDR": 10.0,
    "DDR": 20.0,
    "QDR": 40.0,
    "FDR": 56.0,
    "EDR": 100.0,
    "HDR": 200.0,
    "NDR": 400.0,
}

# Per-port Ethernet speeds (Gb/s) selectable on the SoC card.
PORT_SPEEDS = (10.0, 25.0, 50.0, 100.0)


def generation_preset(name: str) -> float:
    """Signalling rate in Gb/s for an InfiniBand generation name."""
    try:
        return GENERATIONS[name.upper()]
    except KeyError:
        raise UnknownGeneration(f"unknown RDMA generation {name!r}; expected one of {', '.join(GENERATIONS)}") from None


class Descriptor(NamedTuple):
    source_offset: int
    dest_offset: int
    length: int


@dataclass(frozen=True)
class ChannelPlan:
    per_channel_sizes: tuple[int, ...]

    @property
    def channels(self) -> int:
        return len(self.per_channel_sizes)

    def starts(self) -> list[int]:
        out, pos = [], 0
        for s in self.per_channel_sizes:
            out.append(pos)
            pos += s
        return out


def build_descriptors(req: TransferRequest, granularity: int, host_base: int = 0) -> list[Descriptor]:
    """Scatter-gather list covering ``req`` in pages of ``granularity`` bytes.

    For H2C the source is host memory and the destination is card memory at
    ``req.offset``; C2H swaps the two address spaces.
    """
    if granularity < 1:
        raise ValueError("granularity must be positive")
    entries = []
    pos = 0
    while pos < req.size:
        length = min(granularity, req.size - pos)
        host, card = host_base + pos, req.offset + pos
        if req.direction is Direction.H2C:
            entries.append(Descriptor(host, card, length))
        else:
            entries.append(Descriptor(card, host, length))
        pos += length
    return entries


def channel_split(size: int, channels: int) -> ChannelPlan:
    if not 1 <= channels <= 4:
        raise ValueError(f"channel count must be 1-4, got {channels}")
    base, rem = divmod(size, channels)
    return ChannelPlan(tuple(base + (1 if i < rem else 0) for i in range(channels)))


def channel_descriptors(req: TransferRequest, granularity: int) -> list[list[Descriptor]]:
    """One descriptor ring per channel, each covering its slice of the request."""
    plan = channel_split(req.size, req.channels)
    rings = []
    for start, size in zip(plan.starts(), plan.per_channel_sizes):
        if size == 0:
            rings.append([])
            continue
        sub = TransferRequest(req.direction, size, 1, req.offset + start)
        rings.append(build_descriptors(sub, granularity, host_base=start))
    return rings


def descriptor_count(req: TransferRequest, granularity: int) -> int:
    plan = channel_split(req.size, req.channels)
    return sum(-(-s // granularity) for s in plan.per_channel_sizes)


def rdma_verb(engine: EngineKind) -> str:
    if engine is EngineKind.RDMA_READ:
        return "read"
    if engine is EngineKind.RDMA_WRITE:
        return "write"
    raise IncompatibleEngine(f"{engine.value} is not an RDMA verb engine")


def engine_overheads(cfg: ScenarioConfig, req: TransferRequest) -> float:
    """Fixed per-transfer cost in ns (setup, descriptor fetch, completion)."""
    if cfg.engine.is_rdma:
        return rdma_overhead(cfg.rdma, rdma_verb(cfg.engine))
    dma = cfg.dma
    t = dma.setup_overhead_us(cfg.mode) * 1000.0
    t += dma.descriptor_overhead_ns * descriptor_count(req, dma.descriptor_granularity)
    if cfg.engine is EngineKind.QDMA:
        t += dma.queue_overhead_us * 1000.0
    return t


def engine_rate(cfg: ScenarioConfig, direction: Direction, channels: int) -> float:
    """Aggregate rate of the DMA channels themselves, after contention."""
    dma = cfg.dma
    _, factor = fabric_share(cfg.fabric, direction)
    rate = channels * dma.per_channel_cap(direction) * factor
    cap = dma.interleaved_cap(direction)
    if channels > 1 and cap is not None:
        rate = min(rate, cap)
    return rate


def per_channel_link_chunk(req: TransferRequest) -> int:
    return -(-req.size // req.channels)


def steady_rate(cfg: ScenarioConfig, req: TransferRequest) -> float:
    """Streaming rate (GB/s) of the bottleneck stage for this request."""
    if cfg.engine.is_rdma:
        return rdma_rate(cfg, req.size)
    cap, _ = fabric_share(cfg.fabric, req.direction)
    return min(
        engine_rate(cfg, req.direction, req.channels),
        link_payload_cap(cfg.link, per_channel_link_chunk(req)),
        cap,
        cfg.endpoint.peak_gbps,
    )


def analytic_transfer_time(cfg: ScenarioConfig, req: TransferRequest) -> tuple[float, float]:
    """Return (total time in ns, achieved GB/s)."""
    check_request(cfg, req)
    capacity_check(cfg.endpoint, req)
    if cfg.engine.is_rdma:
        return rdma_transfer_time(cfg, rdma_verb(cfg.engine), req.size)
    t = engine_overheads(cfg, req) + req.size / steady_rate(cfg, req)
    return t, req.size / t


def rdma_packets(size: int, rdma: RdmaConfig) -> int:
    return -(-size // rdma.mtu_bytes)


def rdma_port_payload_rate(rdma: RdmaConfig, size: int) -> float:
    """Port line rate in GB/s scaled by the payload fraction of the wire bytes."""
    wire = size + rdma_packets(size, rdma) * rdma.packet_overhead_bytes
    return rdma.link_gbps / 8.0 * size / wire


def rdma_rate(cfg: ScenarioConfig, size: int) -> float:
    return min(
        rdma_port_payload_rate(cfg.rdma, size),
        link_payload_cap(cfg.link, size),
        cfg.endpoint.peak_gbps,
    )


def rdma_overhead(rdma: RdmaConfig, verb: str) -> float:
    t = rdma.verb_setup_us(verb) * 1000.0
    if verb == "read":
        t += rdma.round_trip_us * 1000.0
    return t


def rdma_transfer_time(cfg: ScenarioConfig, verb: str, size: int) -> tuple[float, float]:
    """(ns, GB/s) for one RDMA verb; reads pay an extra request round trip."""
    if not cfg.engine.is_rdma or cfg.rdma is None:
        raise IncompatibleEngine(f"{cfg.name} is not an RDMA scenario")
    if verb not in ("read", "write"):
        raise ValueError(f"verb must be 'read' or 'write', got {verb!r}")
    t = rdma_overhead(cfg.rdma, verb) + size / rdma_rate(cfg, size)
    return t, size / t
