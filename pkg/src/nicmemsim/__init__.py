"""Calibrated bandwidth simulator for host <-> SmartNIC memory access.

Models PCIe/XDMA/QDMA data paths into FPGA block RAM and DDR4 (with and
without a competing soft-processor master) and RDMA verbs on a SoC card,
with a closed-form model and a discrete-event replay that cross-check each
other.
"""

__version__ = "0.1.0"

from .engine import (
    analytic_transfer_time,
    build_descriptors,
    channel_split,
    engine_overheads,
    generation_preset,
    rdma_transfer_time,
    steady_rate,
)
from .fabric import capacity_check, fabric_share, memory_service_rate
from .link import link_payload_cap, packetize, serialize_time
from .model import (
    AxiFabricConfig,
    Direction,
    DmaEngineConfig,
    EngineKind,
    MemoryEndpointConfig,
    MemoryKind,
    OperatingMode,
    PcieLinkConfig,
    RdmaConfig,
    ReferencePoint,
    ScenarioConfig,
    TransferRequest,
    validate_scenario,
)
from .scenarios import builtin_scenarios, get_scenario
from .sim import SimResult, run_sweep, run_transfer
