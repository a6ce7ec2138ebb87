from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nicmemsim.config_io import dumps_scenario, load_scenario, loads_scenario, save_scenario, scenario_from_dict, scenario_to_dict
from nicmemsim.errors import ConfigError, IncompatibleEngine
from nicmemsim.model import OperatingMode
from nicmemsim.scenarios import SCENARIO_NAMES, get_scenario
from nicmemsim.sizes import parse_size, parse_sizes


@st.composite
def scenarios(draw):
    cfg = get_scenario(draw(st.sampled_from(SCENARIO_NAMES)))
    link = replace(
        cfg.link,
        max_payload_bytes=draw(st.sampled_from([128, 256, 512, 4096])),
        tlp_header_bytes=draw(st.integers(12, 16)),
    )
    cfg = replace(cfg, link=link, mode=draw(st.sampled_from(list(OperatingMode))))
    if cfg.dma is not None:
        dma = replace(
            cfg.dma,
            per_channel_cap_c2h_gbps=draw(st.floats(0.5, 30, allow_nan=False)),
            interleaved_cap_h2c_gbps=draw(st.none() | st.floats(1, 30)),
            max_channels=draw(st.integers(1, 4)),
        )
        cfg = replace(cfg, dma=dma)
    else:
        cfg = replace(cfg, rdma=replace(cfg.rdma, link_gbps=draw(st.sampled_from([10.0, 25.0, 100.0, 200.0]))))
    return cfg


@given(cfg=scenarios())
def test_round_trip(cfg):
    assert loads_scenario(dumps_scenario(cfg)) == cfg


def test_file_round_trip(tmp_path):
    for name in SCENARIO_NAMES:
        path = tmp_path / f"{name}.toml"
        save_scenario(get_scenario(name), path)
        assert load_scenario(path) == get_scenario(name)


def test_unknown_keys_rejected():
    doc = scenario_to_dict(get_scenario("ddr-xdma"))
    doc["dma"]["warp_factor"] = 9
    with pytest.raises(ConfigError, match="warp_factor"):
        scenario_from_dict(doc)
    doc = scenario_to_dict(get_scenario("ddr-xdma"))
    doc["extra"] = 1
    with pytest.raises(ConfigError):
        scenario_from_dict(doc)


def test_minimal_file_uses_defaults():
    cfg = loads_scenario('name = "mini"\nengine = "xdma"\n[dma]\n[fabric]\ncap_gbps = 16\n')
    assert cfg.fabric.cap_gbps == 16.0 and isinstance(cfg.fabric.cap_gbps, float)
    assert cfg.mode is OperatingMode.MSIX


def test_bad_files():
    with pytest.raises(ConfigError):
        loads_scenario("name = ")
    with pytest.raises(ConfigError):
        loads_scenario('engine = "xdma"\n[dma]\n')
    with pytest.raises(ConfigError):
        loads_scenario('name = "x"\nengine = "warp"\n[dma]\n')
    with pytest.raises(IncompatibleEngine):
        loads_scenario('name = "x"\nengine = "rdma-read"\n[dma]\n')


@pytest.mark.parametrize(
    "text,expected",
    [("64", 64), ("4K", 4096), ("4KiB", 4096), ("1M", 1 << 20), ("1 MiB", 1 << 20), ("2g", 2 << 30), ("512b", 512)],
)
def test_parse_size(text, expected):
    assert parse_size(text) == expected


def test_parse_sizes():
    assert parse_sizes("64,4K,1M") == [64, 4096, 1 << 20]
    assert parse_sizes("64..1MiB:x2") == [64 << k for k in range(15)]
    assert parse_sizes("4K..1M:x4,64") == [64, 4096, 16384, 65536, 262144, 1 << 20]
    assert parse_sizes("1K, 1K") == [1024]
    for bad in ("", "0", "4Q", "1M..64", "64..1M:x1"):
        with pytest.raises(ValueError):
            parse_sizes(bad)
