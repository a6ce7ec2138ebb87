"""Deterministic discrete-event replay of a single transfer.

A transfer is cut into TLPs (RDMA packets are segmented the same way).  Each DMA channel
emits its TLPs at the channel's engine rate; the TLPs then traverse the
shared stages (optional interleave core, PCIe link, AXI fabric, memory) in
the order the data moves for the chosen direction.  The result is an
independent cross-check of the closed-form model in :mod:`engine`.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Optional, Sequence

from .engine import Descriptor, channel_descriptors, channel_split, rdma_overhead, rdma_verb
from .errors import EmptyPlan, InvariantViolation, ModelError
from .fabric import Policy, StageServer, capacity_check, fabric_share, memory_service_rate
from .link import tlp_sizes
from .model import Direction, EngineKind, ScenarioConfig, TransferRequest, check_request


class EventKind(IntEnum):
    # value doubles as the tie-break rank for simultaneous events
    TRANSFER_START = 0
    DESCRIPTOR_FETCHED = 1
    TLP_INJECTED = 2
    STAGE_DONE = 3
    COMPLETION = 4


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    channel: int
    payload: int
    stage: str = ""


class EventQueue:
    """Min-heap of events keyed by (time, kind, channel, insertion order)."""

    def __init__(self):
        self._heap = []
        self._seq = 0
        self.last_time = 0.0

    def __len__(self):
        return len(self._heap)

    def push(self, time: float, kind: EventKind, channel: int, data=None) -> None:
        if time < self.last_time:
            raise InvariantViolation(f"event scheduled in the past: {time} < {self.last_time}")
        heapq.heappush(self._heap, (time, kind, channel, self._seq, data))
        self._seq += 1

    def pop(self):
        item = heapq.heappop(self._heap)
        if item[0] < self.last_time:
            raise InvariantViolation(f"event time regressed: {item[0]} < {self.last_time}")
        self.last_time = item[0]
        return item


@dataclass
class SimResult:
    scenario: str
    model: str
    direction: Direction
    channels: int
    size_bytes: int
    total_time_ns: float = float("nan")
    bandwidth_gbps: float = float("nan")
    stage_busy_ns: dict = field(default_factory=dict)
    channel_bytes: tuple = ()
    event_count: int = 0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class _Tlp:
    __slots__ = ("channel", "payload", "service")

    def __init__(self, channel, payload, service):
        self.channel = channel
        self.payload = payload
        self.service = service


def _build_stages(cfg: ScenarioConfig, req: TransferRequest):
    """Shared stage servers plus per-TLP service-time functions, in data-flow order."""
    link = cfg.link
    ovh = link.tlp_overhead_bytes
    n = req.channels
    link_stage = (
        StageServer("pcie-link", link.effective_cap_gbps, Policy.ROUND_ROBIN, n),
        lambda payload, chunk: (-(-payload // link.max_payload_bytes) * ovh + payload) / link.effective_cap_gbps,
    )
    ep = cfg.endpoint
    mem_stage = (
        StageServer("memory", ep.peak_gbps, Policy.FCFS, n),
        lambda payload, chunk: payload / memory_service_rate(ep, abs(chunk)),
    )
    if cfg.engine.is_rdma:
        rdma = cfg.rdma
        port_rate = rdma.link_gbps / 8.0
        port_stage = (
            StageServer("rdma-port", port_rate, Policy.FCFS, n),
            lambda payload, chunk: (payload + (rdma.packet_overhead_bytes if chunk < 0 else 0)) / port_rate,
        )
        order = [port_stage, link_stage, mem_stage]
    else:
        cap, _ = fabric_share(cfg.fabric, req.direction)
        fabric_stage = (
            StageServer("axi-fabric", cap, Policy.FCFS, n),
            lambda payload, chunk: payload / cap,
        )
        order = [link_stage, fabric_stage, mem_stage]
    if req.direction is Direction.C2H:
        order.reverse()
    if not cfg.engine.is_rdma and n > 1:
        icap = cfg.dma.interleaved_cap(req.direction)
        if icap is not None:
            core = StageServer("dma-core", icap, Policy.ROUND_ROBIN, n)
            order.insert(0, (core, lambda payload, chunk: payload / icap))
    return order


def _channel_tlps(cfg: ScenarioConfig, req: TransferRequest, stages) -> tuple[list, list[list[_Tlp]]]:
    """(descriptor rings, TLP lists) per channel with precomputed stage service times."""
    fns = [fn for _, fn in stages]
    if cfg.engine.is_rdma:
        rings = [[Descriptor(0, req.offset, req.size)]]
        mtu = cfg.rdma.mtu_bytes
        packets = [mtu] * (req.size // mtu) + ([req.size % mtu] if req.size % mtu else [])
        # packets cut through the pipeline in max-payload segments; the
        # packet header rides on the first segment (chunk < 0 marks it)
        tlps = []
        for p in packets:
            for i, seg in enumerate(tlp_sizes(p, cfg.link)):
                chunk = -req.size if i == 0 else req.size
                tlps.append(_Tlp(0, seg, tuple(fn(seg, chunk) for fn in fns)))
        return rings, [tlps]
    rings = channel_descriptors(req, cfg.dma.descriptor_granularity)
    per_channel = []
    cache = {}
    for c, ring in enumerate(rings):
        tlps = []
        for desc in ring:
            for p in tlp_sizes(desc.length, cfg.link):
                key = (p, desc.length)
                svc = cache.get(key)
                if svc is None:
                    svc = cache[key] = tuple(fn(p, desc.length) for fn in fns)
                tlps.append(_Tlp(c, p, svc))
        per_channel.append(tlps)
    return rings, per_channel


def completion_overhead(cfg: ScenarioConfig) -> float:
    if cfg.engine.is_rdma:
        return rdma_overhead(cfg.rdma, rdma_verb(cfg.engine))
    dma = cfg.dma
    t = dma.setup_overhead_us(cfg.mode) * 1000.0
    if cfg.engine is EngineKind.QDMA:
        t += dma.queue_overhead_us * 1000.0
    return t


def run_transfer(
    cfg: ScenarioConfig,
    req: TransferRequest,
    seed: int = 0,
    jitter: float = 0.0,
    trace: Optional[list] = None,
) -> SimResult:
    """Replay one transfer event by event.

    ``jitter`` is a relative uniform perturbation of each shared-stage
    service time (0 disables it).  Pass a list as ``trace`` to collect every
    processed :class:`Event`.
    """
    check_request(cfg, req)
    capacity_check(cfg.endpoint, req)
    if not 0.0 <= jitter < 1.0:
        raise ValueError("jitter must be in [0, 1)")
    rng = random.Random(seed)

    stages = _build_stages(cfg, req)
    servers = [s for s, _ in stages]
    nstages = len(servers)
    rings, channel_tlps = _channel_tlps(cfg, req, stages)
    n = req.channels

    if cfg.engine.is_rdma:
        chan_rates = [None]
        desc_cost = 0.0
    else:
        _, factor = fabric_share(cfg.fabric, req.direction)
        chan_rates = [cfg.dma.per_channel_cap(req.direction) * factor] * n
        desc_cost = cfg.dma.descriptor_overhead_ns
    done_overhead = completion_overhead(cfg)

    # descriptor fetch order: ring by ring, one fetch unit shared by all channels
    fetch_order = [(c, d.length) for c, ring in enumerate(rings) for d in ring]
    total_tlps = sum(len(t) for t in channel_tlps)
    completed = [0] * n
    engine_busy = [0.0] * n
    next_tlp = [0] * n

    q = EventQueue()
    T_START, T_DESC, T_INJ, T_DONE, T_COMP = (
        EventKind.TRANSFER_START,
        EventKind.DESCRIPTOR_FETCHED,
        EventKind.TLP_INJECTED,
        EventKind.STAGE_DONE,
        EventKind.COMPLETION,
    )
    q.push(0.0, T_START, 0)
    events = 0
    finished = 0
    end_time = None
    record = trace.append if trace is not None else None

    def start_service(now, si, tlp):
        svc = tlp.service[si]
        if jitter:
            svc *= 1.0 + rng.uniform(-jitter, jitter)
        q.push(servers[si].start(now, svc), T_DONE, tlp.channel, (si, tlp))

    def arrive(now, si, tlp):
        server = servers[si]
        if server.busy:
            server.enqueue(tlp.channel, tlp)
        else:
            start_service(now, si, tlp)

    def inject_next(now, c):
        i = next_tlp[c]
        tlps = channel_tlps[c]
        if i >= len(tlps):
            return
        rate = chan_rates[c]
        dt = 0.0 if rate is None else tlps[i].payload / rate
        engine_busy[c] += dt
        q.push(now + dt, T_INJ, c, tlps[i])

    def begin_data(now):
        for c in range(n):
            inject_next(now, c)

    while q:
        now, kind, channel, _, data = q.pop()
        events += 1
        if kind == T_DONE:
            si, tlp = data
            server = servers[si]
            server.busy = False
            if record:
                record(Event(now, kind, channel, tlp.payload, server.name))
            if si + 1 < nstages:
                arrive(now, si + 1, tlp)
            else:
                completed[tlp.channel] += tlp.payload
                finished += 1
                if finished == total_tlps:
                    q.push(now + done_overhead, T_COMP, 0)
            nxt = server.dequeue()
            if nxt is not None:
                start_service(now, si, nxt)
        elif kind == T_INJ:
            if record:
                record(Event(now, kind, channel, data.payload))
            next_tlp[channel] += 1
            arrive(now, 0, data)
            inject_next(now, channel)
        elif kind == T_DESC:
            idx = data
            c, length = fetch_order[idx]
            if record:
                record(Event(now, kind, c, length))
            if idx + 1 < len(fetch_order):
                q.push(now + desc_cost, T_DESC, fetch_order[idx + 1][0], idx + 1)
            else:
                begin_data(now)
        elif kind == T_START:
            if record:
                record(Event(now, kind, 0, req.size))
            if fetch_order:
                q.push(now + desc_cost, T_DESC, fetch_order[0][0], 0)
            else:
                begin_data(now)
        else:
            if record:
                record(Event(now, kind, 0, sum(completed)))
            end_time = now

    if end_time is None:
        raise InvariantViolation("simulation drained without a completion event")
    expected = channel_split(req.size, n).per_channel_sizes if not cfg.engine.is_rdma else (req.size,)
    if tuple(completed) != tuple(expected):
        raise InvariantViolation(f"byte conservation failed: {completed} != {expected}")
    busy = {s.name: s.busy_time for s in servers}
    for c in range(n):
        busy[f"engine{c}"] = engine_busy[c]
    for name, b in busy.items():
        if b > end_time * (1 + 1e-12):
            raise InvariantViolation(f"stage {name} busy {b} ns beyond run length {end_time} ns")
    return SimResult(
        scenario=cfg.name,
        model="des",
        direction=req.direction,
        channels=n,
        size_bytes=req.size,
        total_time_ns=end_time,
        bandwidth_gbps=req.size / end_time,
        stage_busy_ns=busy,
        channel_bytes=tuple(completed),
        event_count=events,
    )


def analytic_result(cfg: ScenarioConfig, req: TransferRequest) -> SimResult:
    from .engine import analytic_transfer_time

    t, bw = analytic_transfer_time(cfg, req)
    return SimResult(cfg.name, "analytic", req.direction, req.channels, req.size, t, bw)


def _run_point(args) -> SimResult:
    cfg, direction, channels, size, seed, model, jitter = args
    try:
        req = TransferRequest(direction, size, channels)
        if model == "analytic":
            return analytic_result(cfg, req)
        return run_transfer(cfg, req, seed=seed, jitter=jitter)
    except ModelError as exc:
        return SimResult(cfg.name, model, direction, channels, size, error=f"{type(exc).__name__}: {exc}")


def run_sweep(
    cfg: ScenarioConfig,
    directions: Iterable[Direction],
    channel_counts: Iterable[int],
    sizes: Sequence[int],
    seed: int = 0,
    model: str = "des",
    jitter: float = 0.0,
    workers: int = 1,
) -> list[SimResult]:
    """One result per (direction, channels, size), in that nesting order.

    Points that fail (e.g. a size beyond the endpoint capacity) are returned
    with ``error`` set instead of aborting the sweep.
    """
    directions = list(directions)
    channel_counts = list(channel_counts)
    sizes = list(sizes)
    if not directions or not channel_counts or not sizes:
        raise EmptyPlan("sweep needs at least one direction, channel count and size")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sweep sizes must be strictly ascending")
    if model not in ("des", "analytic"):
        raise ValueError(f"unknown model {model!r}")
    points = [
        (cfg, d, ch, s, seed, model, jitter)
        for d in directions
        for ch in channel_counts
        for s in sizes
    ]
    if workers > 1 and model == "des":
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_point, points, chunksize=4))
    return [_run_point(p) for p in points]


def write_trace(events: Iterable[Event], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(f"{ev.time:.3f}\t{ev.kind.name}\t{ev.channel}\t{ev.payload}\n")
