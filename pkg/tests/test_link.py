import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nicmemsim.link import efficiency_bound, link_payload_cap, packetize, serialize_time, tlp_sizes
from nicmemsim.model import PcieLinkConfig

MPS = st.sampled_from([64, 128, 256, 512, 1024, 2048, 4096])


def test_single_max_payload_tlp():
    assert packetize(4096, PcieLinkConfig(max_payload_bytes=4096)).tlp_count == 1


def test_256_byte_tlp():
    t = packetize(256, PcieLinkConfig(max_payload_bytes=256))
    assert (t.tlp_count, t.wire_bytes) == (1, 280)
    assert t.efficiency == pytest.approx(256 / 280)
    assert round(t.efficiency, 3) == 0.914


def test_four_tlps():
    t = packetize(1024, PcieLinkConfig(max_payload_bytes=256))
    assert (t.tlp_count, t.wire_bytes) == (4, 1120)


def test_tlp_sizes_remainder_last():
    assert tlp_sizes(600, PcieLinkConfig()) == [256, 256, 88]
    assert tlp_sizes(512, PcieLinkConfig()) == [256, 256]


def test_large_transfer_cap_approaches_bound():
    link = PcieLinkConfig(max_payload_bytes=4096)
    cap = link_payload_cap(link, 1 << 30)
    assert cap == pytest.approx(15.8 * 4096 / 4120, rel=1e-6)
    assert round(cap, 2) == 15.71
    assert efficiency_bound(link) == pytest.approx(0.994, abs=5e-4)


def test_raw_x16():
    assert PcieLinkConfig().raw_gbps == 16.0


def test_small_tlp_cap():
    assert link_payload_cap(PcieLinkConfig(), 64) == pytest.approx(15.8 * 64 / 88)
    assert round(link_payload_cap(PcieLinkConfig(), 64), 2) == 11.49


def test_serialize_time():
    link = PcieLinkConfig()
    assert serialize_time(0, link) == 0
    assert serialize_time(15.8e9, link) == pytest.approx(1e9)
    assert serialize_time(1120, link) == pytest.approx(70.886, abs=1e-3)


@given(size=st.integers(1, 1 << 26), mps=MPS, header=st.sampled_from([12, 16]))
def test_efficiency_bounds(size, mps, header):
    link = PcieLinkConfig(max_payload_bytes=mps, tlp_header_bytes=header)
    t = packetize(size, link)
    assert 0 < t.efficiency <= efficiency_bound(link) + 1e-15
    assert t.tlp_count == math.ceil(size / mps)
    assert sum(tlp_sizes(size, link)) == size
    assert len(tlp_sizes(size, link)) == t.tlp_count


@given(mps=MPS, k=st.integers(1, 4096))
def test_whole_tlps_reach_bound(mps, k):
    link = PcieLinkConfig(max_payload_bytes=mps)
    assert packetize(k * mps, link).efficiency == pytest.approx(efficiency_bound(link))
