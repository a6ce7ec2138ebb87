"""Measured reference values and the pass/fail comparison against them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import MissingCoverage
from .model import Direction, MiB, ReferencePoint

H2C, C2H = Direction.H2C, Direction.C2H


def _ref(scenario, direction, channels, low, high=None, size=None, label=""):
    return ReferencePoint(scenario, direction, channels, low, low if high is None else high, size, label)


# Peaks of the DDR designs are taken over the sweep; block RAM at its 1 MiB capacity.
REFERENCE_SET: tuple[ReferencePoint, ...] = (
    _ref("bram-xdma", H2C, 1, 7.54, size=1 * MiB, label="BRAM H2C 1ch @1MiB"),
    _ref("bram-xdma", C2H, 1, 7.77, size=1 * MiB, label="BRAM C2H 1ch @1MiB"),
    _ref("ddr-xdma", H2C, 1, 10.8, label="DDR H2C 1ch peak"),
    _ref("ddr-xdma", C2H, 1, 12.0, label="DDR C2H 1ch peak"),
    _ref("ddr-xdma", C2H, 4, 13.0, 14.0, label="DDR C2H 4ch peak"),
    _ref("ddr-xdma", H2C, 4, 9.0, 10.0, label="DDR H2C multi-channel saturation"),
    _ref("ddr-microblaze", H2C, 1, 9.5, label="MicroBlaze H2C 1ch peak"),
    _ref("ddr-microblaze", C2H, 1, 9.4, label="MicroBlaze C2H 1ch peak"),
    _ref("ddr-microblaze", C2H, 4, 13.0, 14.0, label="MicroBlaze C2H 4ch peak"),
    _ref("ddr-petalinux", H2C, 1, 9.2, label="PetaLinux H2C 1ch peak"),
    _ref("ddr-petalinux", C2H, 3, 12.0, 13.0, label="PetaLinux C2H 3ch roofline"),
    _ref("ddr-petalinux", C2H, 4, 12.0, 13.0, label="PetaLinux C2H 4ch roofline"),
    _ref("ddr-petalinux", C2H, 2, 10.5, 12.0, label="PetaLinux C2H 2ch"),
)


def refs_for(scenario: str, refs: Iterable[ReferencePoint] = REFERENCE_SET) -> list[ReferencePoint]:
    return [r for r in refs if r.scenario == scenario]


def interval_distance(value: float, ref: ReferencePoint) -> float:
    """Relative distance from ``value`` to the reference interval (0 inside it)."""
    if value < ref.bw_low:
        return (ref.bw_low - value) / ref.bw_low
    if value > ref.bw_high:
        return (value - ref.bw_high) / ref.bw_high
    return 0.0


def within(value: float, ref: ReferencePoint, tolerance: float) -> bool:
    if ref.is_interval:
        return ref.bw_low * (1 - tolerance) <= value <= ref.bw_high * (1 + tolerance)
    return abs(value - ref.bw_low) / ref.bw_low <= tolerance


def reference_value(rows, ref: ReferencePoint) -> Optional[float]:
    """Bandwidth the rows report for ``ref``: at its size, or the peak over sizes."""
    values = [
        r.bandwidth_gbps
        for r in rows
        if r.scenario == ref.scenario
        and r.direction is ref.direction
        and r.channels == ref.channels
        and (ref.size is None or r.size_bytes == ref.size)
    ]
    return max(values) if values else None


@dataclass(frozen=True)
class Outcome:
    ref: ReferencePoint
    model: str
    value: float
    error: float
    passed: bool

    def line(self) -> str:
        r = self.ref
        target = f"[{r.bw_low:g}, {r.bw_high:g}]" if r.is_interval else f"{r.bw_low:g}"
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.model:8s} {r.scenario:15s} {r.direction.value} {r.channels}ch "
            f"value={self.value:.4f} ref={target} err={self.error:.2%}  {r.label}"
        )


@dataclass(frozen=True)
class ComparisonReport:
    outcomes: tuple[Outcome, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def render(self) -> str:
        lines = [o.line() for o in self.outcomes]
        n_fail = sum(not o.passed for o in self.outcomes)
        lines.append(f"{len(self.outcomes) - n_fail}/{len(self.outcomes)} reference points within tolerance {self.tolerance:g}")
        return "\n".join(lines)


def compare_to_reference(rows, refs: Iterable[ReferencePoint], tolerance: float) -> ComparisonReport:
    """Check sweep rows against references; each model present in the rows is judged separately."""
    rows = list(rows)
    refs = list(refs)
    models = sorted({r.model for r in rows}) or ["analytic"]
    outcomes, missing = [], []
    for model in models:
        subset = [r for r in rows if r.model == model]
        for ref in refs:
            value = reference_value(subset, ref)
            if value is None:
                size = "peak" if ref.size is None else f"{ref.size} B"
                missing.append(f"{model}:{ref.scenario} {ref.direction.value} {ref.channels}ch {size}")
                continue
            outcomes.append(Outcome(ref, model, value, interval_distance(value, ref), within(value, ref, tolerance)))
    if missing:
        raise MissingCoverage(missing)
    return ComparisonReport(tuple(outcomes), tolerance)
