import pytest

from nicmemsim.errors import CapacityExceeded
from nicmemsim.fabric import Policy, StageServer, capacity_check, fabric_share, memory_service_rate
from nicmemsim.model import AxiFabricConfig, Direction, GiB, MiB, TransferRequest
from nicmemsim.scenarios import BRAM_1M, DDR4_16G, get_scenario


def test_capacity_boundaries():
    capacity_check(BRAM_1M, TransferRequest(Direction.H2C, 1 * MiB))
    with pytest.raises(CapacityExceeded) as info:
        capacity_check(BRAM_1M, TransferRequest(Direction.H2C, 1 * MiB + 1))
    assert info.value.overflow == 1
    capacity_check(DDR4_16G, TransferRequest(Direction.C2H, 256 * MiB))
    assert DDR4_16G.capacity_bytes == 16 * GiB
    with pytest.raises(CapacityExceeded):
        capacity_check(BRAM_1M, TransferRequest(Direction.H2C, 4096, offset=1 * MiB - 4095))


def test_memory_rate():
    assert memory_service_rate(DDR4_16G, DDR4_16G.burst_bytes) == 19.2
    assert memory_service_rate(DDR4_16G, 1 * MiB) == 19.2
    assert memory_service_rate(DDR4_16G, DDR4_16G.burst_bytes // 2) == pytest.approx(9.6)
    assert BRAM_1M.burst_bytes == 64
    assert memory_service_rate(BRAM_1M, 64) == BRAM_1M.peak_gbps


def test_fabric_share():
    assert fabric_share(AxiFabricConfig(), Direction.C2H) == (16.0, 1.0)
    mb = get_scenario("ddr-microblaze").fabric
    assert fabric_share(mb, Direction.C2H)[1] == pytest.approx(0.783, rel=0.02)
    assert fabric_share(mb, Direction.H2C)[1] == pytest.approx(0.88, rel=0.02)


def test_round_robin_alternates_channels():
    s = StageServer("link", 10.0, Policy.ROUND_ROBIN, channels=3)
    for item in range(3):
        s.enqueue(0, ("a", item))
    s.enqueue(2, ("c", 0))
    s.enqueue(1, ("b", 0))
    order = [s.dequeue() for _ in range(5)]
    assert order == [("a", 0), ("b", 0), ("c", 0), ("a", 1), ("a", 2)]
    assert s.dequeue() is None


def test_fcfs_keeps_arrival_order():
    s = StageServer("mem", 10.0, Policy.FCFS, channels=2)
    s.enqueue(1, "x")
    s.enqueue(0, "y")
    assert [s.dequeue(), s.dequeue()] == ["x", "y"]


def test_server_busy_accounting():
    s = StageServer("fab", 16.0)
    assert s.start(0.0, 5.0) == 5.0
    with pytest.raises(RuntimeError):
        s.start(4.0, 1.0)
    s.start(7.0, 2.0)
    assert s.busy_time == 7.0
