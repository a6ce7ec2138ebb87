"""AXI fabric sharing and memory endpoint service model."""

from __future__ import annotations

from enum import Enum

from .errors import CapacityExceeded
from .model import AxiFabricConfig, Direction, MemoryEndpointConfig, TransferRequest


class Policy(str, Enum):
    FCFS = "fcfs"
    ROUND_ROBIN = "round-robin"


class StageServer:
    """One rate-limited pipeline stage, owned by a single simulation run.

    FCFS servers keep one queue; round-robin servers keep a queue per
    channel and rotate a pointer across the non-empty ones.
    """

    def __init__(self, name: str, rate_gbps: float, policy: Policy = Policy.FCFS, channels: int = 1):
        if not rate_gbps > 0:
            raise ValueError(f"stage {name}: rate must be positive")
        self.name = name
        self.rate = rate_gbps
        self.policy = policy
        self.busy_until = 0.0
        self.busy_time = 0.0
        self.busy = False
        nq = channels if policy is Policy.ROUND_ROBIN else 1
        self._queues = [[] for _ in range(nq)]
        self._heads = [0] * nq
        self._next = 0
        self._waiting = 0

    def enqueue(self, channel: int, item) -> None:
        q = channel if self.policy is Policy.ROUND_ROBIN else 0
        self._queues[q].append(item)
        self._waiting += 1

    def has_waiting(self) -> bool:
        return self._waiting > 0

    def dequeue(self):
        """Next item to serve, or None when idle."""
        if not self._waiting:
            return None
        n = len(self._queues)
        for i in range(n):
            q = (self._next + i) % n
            head = self._heads[q]
            if head < len(self._queues[q]):
                item = self._queues[q][head]
                self._heads[q] = head + 1
                self._next = (q + 1) % n
                self._waiting -= 1
                return item
        return None

    def start(self, now: float, duration: float) -> float:
        if now < self.busy_until:
            raise RuntimeError(f"stage {self.name} started while busy")
        self.busy = True
        self.busy_until = now + duration
        self.busy_time += duration
        return self.busy_until


def capacity_check(endpoint: MemoryEndpointConfig, req: TransferRequest) -> None:
    end = req.offset + req.size
    if end > endpoint.capacity_bytes:
        raise CapacityExceeded(end - endpoint.capacity_bytes, endpoint.capacity_bytes)


def memory_service_rate(endpoint: MemoryEndpointConfig, chunk: int) -> float:
    """Endpoint rate for accesses of ``chunk`` bytes; sub-burst accesses pay a linear penalty."""
    if chunk >= endpoint.burst_bytes:
        return endpoint.peak_gbps
    return endpoint.peak_gbps * chunk / endpoint.burst_bytes


def fabric_share(fabric: AxiFabricConfig, direction: Direction) -> tuple[float, float]:
    """(aggregate cap, per-channel contention factor) seen by one DMA direction."""
    return fabric.cap_gbps, fabric.contention_factor(direction)
