"""PCIe transaction-layer packetization and wire-time accounting."""

from __future__ import annotations

from dataclasses import dataclass

from .model import PcieLinkConfig


@dataclass(frozen=True)
class TlpBreakdown:
    tlp_count: int
    payload_bytes: int
    wire_bytes: int

    @property
    def efficiency(self) -> float:
        return self.payload_bytes / self.wire_bytes


def packetize(size: int, link: PcieLinkConfig) -> TlpBreakdown:
    """Split ``size`` payload bytes into max-payload TLPs; the last one carries the remainder."""
    count = -(-size // link.max_payload_bytes)
    return TlpBreakdown(count, size, size + count * link.tlp_overhead_bytes)


def tlp_sizes(size: int, link: PcieLinkConfig) -> list[int]:
    mps = link.max_payload_bytes
    full, rem = divmod(size, mps)
    return [mps] * full + ([rem] if rem else [])


def efficiency_bound(link: PcieLinkConfig) -> float:
    """Best-case payload efficiency, reached by full max-payload TLPs."""
    return link.max_payload_bytes / (link.max_payload_bytes + link.tlp_overhead_bytes)


def link_payload_cap(link: PcieLinkConfig, size: int) -> float:
    """Payload-visible link ceiling (GB/s) for a transfer of ``size`` bytes."""
    return link.effective_cap_gbps * packetize(size, link).efficiency


def serialize_time(wire_bytes: int, link: PcieLinkConfig) -> float:
    """Time in ns to clock ``wire_bytes`` through the lane group."""
    return wire_bytes / link.effective_cap_gbps
