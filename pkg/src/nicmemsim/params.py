"""Named tunable parameters and how they map onto a scenario."""

from __future__ import annotations

from dataclasses import replace

from .errors import ConfigError
from .model import ScenarioConfig

# name -> (component attribute, field)
PARAMS = {
    "setup_overhead_msix_us": ("dma", "setup_msix_us"),
    "setup_overhead_polled_us": ("dma", "setup_polled_us"),
    "descriptor_overhead_ns": ("dma", "descriptor_overhead_ns"),
    "per_channel_cap_h2c": ("dma", "per_channel_cap_h2c_gbps"),
    "per_channel_cap_c2h": ("dma", "per_channel_cap_c2h_gbps"),
    "interleaved_cap_h2c": ("dma", "interleaved_cap_h2c_gbps"),
    "interleaved_cap_c2h": ("dma", "interleaved_cap_c2h_gbps"),
    "contention_factor_h2c": ("fabric", "contention_factor_h2c"),
    "contention_factor_c2h": ("fabric", "contention_factor_c2h"),
}


def get_param(cfg: ScenarioConfig, name: str):
    try:
        part, attr = PARAMS[name]
    except KeyError:
        raise ConfigError(f"unknown parameter {name!r}") from None
    section = getattr(cfg, part)
    if section is None:
        raise ConfigError(f"scenario {cfg.name} has no [{part}] section for {name}")
    return getattr(section, attr)


def apply_params(cfg: ScenarioConfig, params: dict) -> ScenarioConfig:
    """Return a copy of ``cfg`` with the named parameters replaced (no validation)."""
    updates: dict[str, dict] = {}
    for name, value in params.items():
        get_param(cfg, name)
        part, attr = PARAMS[name]
        updates.setdefault(part, {})[attr] = value
    return replace(cfg, **{part: replace(getattr(cfg, part), **kw) for part, kw in updates.items()})
