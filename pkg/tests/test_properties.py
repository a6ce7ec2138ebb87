"""Model-level properties of the analytic path, checked with hypothesis."""

from dataclasses import replace

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from nicmemsim.engine import analytic_transfer_time, build_descriptors, engine_rate, steady_rate
from nicmemsim.errors import CapacityExceeded
from nicmemsim.fabric import capacity_check, memory_service_rate
from nicmemsim.link import link_payload_cap, packetize
from nicmemsim.model import Direction, MiB, PcieLinkConfig, TransferRequest
from nicmemsim.scenarios import SCENARIO_NAMES, get_scenario, without_contention

DMA_NAMES = [n for n in SCENARIO_NAMES if not n.startswith("rdma")]

scenarios = st.sampled_from(SCENARIO_NAMES).map(get_scenario)
directions = st.sampled_from(list(Direction))
mps = st.sampled_from([64, 128, 256, 512, 1024, 2048, 4096])


def _bw(cfg, d, size, n=1):
    return analytic_transfer_time(cfg, TransferRequest(d, size, n))[1]


@given(cfg=scenarios, d=directions, n=st.integers(1, 4), pages=st.integers(1, 255), step=st.integers(1, 64))
def test_bandwidth_increases_with_page_aligned_size(cfg, d, n, pages, step):
    n = min(n, cfg.max_channels)
    # whole pages on every channel keeps descriptor and TLP overheads proportional
    unit = 4096 * n
    a, b = pages * unit, (pages + step) * unit
    assume(b <= min(cfg.endpoint.capacity_bytes, 16 * MiB))
    assert _bw(cfg, d, b, n) > _bw(cfg, d, a, n)


@given(cfg=scenarios, d=directions, n=st.integers(1, 4), size=st.integers(1, 1 * MiB))
def test_below_steady_rate_and_ceilings(cfg, d, n, size):
    n = min(n, cfg.max_channels)
    req = TransferRequest(d, size, n)
    _, bw = analytic_transfer_time(cfg, req)
    assert bw < steady_rate(cfg, req)
    assert bw < cfg.fabric.cap_gbps and bw < cfg.endpoint.peak_gbps
    if not cfg.engine.is_rdma:
        assert bw < link_payload_cap(cfg.link, -(-size // n))


@given(
    name=st.sampled_from(["ddr-microblaze", "ddr-petalinux"]),
    d=directions,
    n=st.integers(1, 4),
    size=st.integers(1, 16 * MiB),
)
def test_contention_never_helps(name, d, n, size):
    cfg = get_scenario(name)
    assert _bw(cfg, d, size, n) <= _bw(without_contention(cfg), d, size, n)


def test_more_channels_help_while_engine_bound():
    # Interleaving caps below one channel's rate (DDR H2C) are a measured
    # exception, so the property is checked only where the aggregate allows it.
    checked = 0
    for name in DMA_NAMES:
        cfg = get_scenario(name)
        sizes = [s for s in range(64, 4 * MiB + 1, 4093 * 7) if s <= cfg.endpoint.capacity_bytes]
        for d in Direction:
            for n in range(2, cfg.max_channels + 1):
                if engine_rate(cfg, d, n) < engine_rate(cfg, d, 1):
                    continue
                for size in sizes:
                    one, many = TransferRequest(d, size, 1), TransferRequest(d, size, n)
                    if steady_rate(cfg, one) != engine_rate(cfg, d, 1):
                        continue
                    if steady_rate(cfg, many) != engine_rate(cfg, d, n):
                        continue
                    assert _bw(cfg, d, size, n) >= _bw(cfg, d, size, 1), (name, d, n, size)
                    checked += 1
    assert checked > 100


@given(cfg=st.sampled_from(DMA_NAMES).map(get_scenario), d=directions, n=st.integers(1, 4), size=st.integers(1, 1 * MiB))
def test_unit_contention_is_bit_identical(cfg, d, n, size):
    base = without_contention(cfg)
    pinned = replace(cfg, fabric=replace(base.fabric, contending_master=True))
    n = min(n, cfg.max_channels)
    req = TransferRequest(d, size, n)
    assert analytic_transfer_time(pinned, req) == analytic_transfer_time(base, req)


@given(size=st.integers(1, 1 << 24), gran=st.sampled_from([4096, 8192, 1 << 16]), d=directions)
def test_descriptors_conserve_bytes(size, gran, d):
    descs = build_descriptors(TransferRequest(d, size), gran)
    assert sum(x.length for x in descs) == size
    for a, b in zip(descs, descs[1:]):
        assert a.source_offset + a.length == b.source_offset
        assert a.dest_offset + a.length == b.dest_offset


@given(size=st.integers(1, 1 << 24), m=mps)
def test_wire_bytes_strictly_increasing(size, m):
    link = PcieLinkConfig(max_payload_bytes=m)
    assert packetize(size + 1, link).wire_bytes > packetize(size, link).wire_bytes
    assert link_payload_cap(link, size) <= link.effective_cap_gbps


@given(name=st.sampled_from(SCENARIO_NAMES), chunk=st.integers(1, 1 << 20))
def test_memory_rate_never_above_peak(name, chunk):
    ep = get_scenario(name).endpoint
    rate = memory_service_rate(ep, chunk)
    assert 0 < rate <= ep.peak_gbps
    assert (rate == ep.peak_gbps) == (chunk >= ep.burst_bytes)


@given(size=st.integers(1, 2 * MiB), offset=st.integers(0, MiB))
def test_capacity_check_ignores_direction(size, offset):
    ep = get_scenario("bram-xdma").endpoint
    outcomes = []
    for d in Direction:
        try:
            capacity_check(ep, TransferRequest(d, size, offset=offset))
            outcomes.append(True)
        except CapacityExceeded:
            outcomes.append(False)
    assert outcomes[0] == outcomes[1] == (size + offset <= MiB)


def test_bram_rejects_more_than_one_mib():
    cfg = get_scenario("bram-xdma")
    with pytest.raises(CapacityExceeded):
        analytic_transfer_time(cfg, TransferRequest(Direction.H2C, MiB + 1))
