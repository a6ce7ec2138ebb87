"""Sweep reports: CSV rows and matplotlib bandwidth-vs-size figures."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import matplotlib
from matplotlib.figure import Figure
from matplotlib.ticker import FixedLocator, FuncFormatter

from .errors import EmptyReport
from .model import Direction

CSV_HEADER = ("scenario", "model", "direction", "channels", "size_bytes", "bandwidth_gbps", "total_time_ns")

# PCIe link, AXI4 interconnect, DDR4 interface
CEILINGS = ((15.8, "PCIe Gen3 x16 15.8 GB/s"), (16.0, "AXI4 16 GB/s"), (19.2, "DDR4 19.2 GB/s"))

STYLE = {
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "svg.hashsalt": "nicmemsim",
    "svg.fonttype": "path",
}


@dataclass(frozen=True)
class ReportRow:
    scenario: str
    model: str
    direction: Direction
    channels: int
    size_bytes: int
    bandwidth_gbps: float
    total_time_ns: float

    def cells(self) -> list[str]:
        return [
            self.scenario,
            self.model,
            self.direction.value,
            str(self.channels),
            str(self.size_bytes),
            f"{self.bandwidth_gbps:.4f}",
            f"{self.total_time_ns:.3f}",
        ]


class SweepReport(list):
    """Ordered list of :class:`ReportRow`."""

    @classmethod
    def from_results(cls, results: Iterable) -> "SweepReport":
        return cls(
            ReportRow(r.scenario, r.model, r.direction, r.channels, r.size_bytes, r.bandwidth_gbps, r.total_time_ns)
            for r in results
            if r.error is None
        )


def emit_csv(report: Iterable[ReportRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in report:
            writer.writerow(row.cells())


def read_csv(path) -> SweepReport:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return SweepReport(
            ReportRow(
                r["scenario"],
                r["model"],
                Direction(r["direction"]),
                int(r["channels"]),
                int(r["size_bytes"]),
                float(r["bandwidth_gbps"]),
                float(r["total_time_ns"]),
            )
            for r in reader
        )


def size_label(nbytes: float) -> str:
    """64 -> '64', 4096 -> '4K', 1048576 -> '1M'."""
    n = int(nbytes)
    for unit, scale in (("G", 1 << 30), ("M", 1 << 20), ("K", 1 << 10)):
        if n >= scale and n % scale == 0:
            return f"{n // scale}{unit}"
    return str(n)


def _series_key(row: ReportRow, multi_scenario: bool):
    key = (row.direction.value, row.channels, row.model)
    return (row.scenario,) + key if multi_scenario else key


def _series_label(key) -> str:
    *scen, direction, channels, model = key
    head = f"{scen[0]} " if scen else ""
    return f"{head}{direction.upper()} {channels}ch ({model})"


def build_figure(report: Iterable[ReportRow], title: str = "") -> Figure:
    rows = list(report)
    if not rows:
        raise EmptyReport("nothing to plot")
    multi = len({r.scenario for r in rows}) > 1
    series: dict[tuple, list[ReportRow]] = {}
    for r in rows:
        series.setdefault(_series_key(r, multi), []).append(r)

    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(7.0, 4.5))
        ax = fig.add_subplot(1, 1, 1)
        for key, pts in series.items():
            pts = sorted(pts, key=lambda r: r.size_bytes)
            dashed = key[-1] == "des"
            ax.plot(
                [p.size_bytes for p in pts],
                [p.bandwidth_gbps for p in pts],
                marker="o",
                markersize=3,
                linestyle="--" if dashed else "-",
                label=_series_label(key),
                gid="series",
            )
        for y, label in CEILINGS:
            ax.axhline(y, color="0.4", linewidth=0.8, linestyle=":", gid=f"ceiling-{y:g}")
            ax.annotate(label, xy=(0.01, y), xycoords=("axes fraction", "data"),
                        xytext=(0, 2), textcoords="offset points", fontsize=7, color="0.3")

        ax.set_xscale("log", base=2)
        lo, hi = min(r.size_bytes for r in rows), max(r.size_bytes for r in rows)
        ticks = [2**k for k in range(int(math.floor(math.log2(lo))), int(math.ceil(math.log2(hi))) + 1)]
        ax.xaxis.set_major_locator(FixedLocator(ticks))
        ax.xaxis.set_major_formatter(FuncFormatter(lambda x, _: size_label(x)))
        ax.xaxis.set_minor_locator(FixedLocator([]))
        ax.set_ylim(0, 20.5)
        ax.set_xlabel("transfer size (bytes)")
        ax.set_ylabel("bandwidth (GB/s)")
        if title:
            ax.set_title(title)
        ax.legend(loc="lower right")
        for label in ax.get_xticklabels():
            label.set_rotation(45)
        fig.tight_layout()
    return fig


def emit_plot(report: Iterable[ReportRow], path, title: str = "") -> None:
    fig = build_figure(report, title)
    with matplotlib.rc_context(STYLE):
        fig.savefig(Path(path), format="svg", metadata={"Date": None})
