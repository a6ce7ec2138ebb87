import pytest

from nicmemsim.errors import EmptyReport
from nicmemsim.model import Direction
from nicmemsim.report import (
    CSV_HEADER,
    ReportRow,
    SweepReport,
    build_figure,
    emit_csv,
    emit_plot,
    read_csv,
    size_label,
)
from nicmemsim.scenarios import get_scenario, standard_sizes
from nicmemsim.sim import SimResult, run_sweep

ROW = ReportRow("ddr-xdma", "analytic", Direction.C2H, 1, 1 << 20, 11.8123456, 88765.4321)


def test_empty_report_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv(SweepReport(), path)
    assert path.read_text() == ",".join(CSV_HEADER) + "\n"
    assert read_csv(path) == []


def test_one_row(tmp_path):
    path = tmp_path / "one.csv"
    emit_csv([ROW], path)
    lines = path.read_text().splitlines()
    assert lines == [",".join(CSV_HEADER), "ddr-xdma,analytic,c2h,1,1048576,11.8123,88765.432"]
    back = read_csv(path)[0]
    assert back.bandwidth_gbps == 11.8123 and back.direction is Direction.C2H


def test_full_sweep_row_count(tmp_path):
    cfg = get_scenario("ddr-xdma")
    sizes = standard_sizes(cfg)
    results = []
    for model in ("analytic", "des"):
        results += run_sweep(cfg, list(Direction), range(1, 5), sizes, model=model)
    report = SweepReport.from_results(results)
    assert len(report) == 2 * 4 * len(sizes) * 2 == 272
    path = tmp_path / "full.csv"
    emit_csv(report, path)
    assert len(path.read_text().splitlines()) == 273


def test_errored_points_dropped():
    bad = SimResult("bram-xdma", "des", Direction.H2C, 1, 1 << 21, error="CapacityExceeded: ...")
    assert SweepReport.from_results([bad]) == []


def test_read_rejects_foreign_csv(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_size_labels():
    assert [size_label(s) for s in (64, 512, 4096, 6144, 1 << 20, 3 << 30)] == ["64", "512", "4K", "6K", "1M", "3G"]
    assert size_label(1000) == "1000"


def _lines(fig):
    ax = fig.axes[0]
    return ax, [l for l in ax.get_lines() if l.get_gid() == "series"]


def test_single_series_figure():
    small = ReportRow("ddr-xdma", "analytic", Direction.C2H, 1, 4096, 0.4, 10000.0)
    fig = build_figure([ROW, small])
    ax, series = _lines(fig)
    assert len(series) == 1
    legend = ax.get_legend()
    assert [t.get_text() for t in legend.get_texts()] == ["C2H 1ch (analytic)"]
    ceilings = sorted(l.get_ydata()[0] for l in ax.get_lines() if (l.get_gid() or "").startswith("ceiling"))
    assert ceilings == [15.8, 16.0, 19.2]


def test_sweep_figure_axes():
    cfg = get_scenario("bram-xdma")
    report = SweepReport.from_results(
        run_sweep(cfg, list(Direction), [1, 2], standard_sizes(cfg), model="analytic")
        + run_sweep(cfg, [Direction.H2C], [1], standard_sizes(cfg), model="des")
    )
    fig = build_figure(report, "bram")
    ax, series = _lines(fig)
    assert len(series) == 5
    assert [l.get_linestyle() for l in series].count("--") == 1
    assert ax.get_xscale() == "log"
    fig.canvas.draw()
    labels = [t.get_text() for t in ax.get_xticklabels()]
    assert labels[0] == "64" and labels[-1] == "1M" and "4K" in labels
    assert ax.get_title() == "bram"


def test_emit_plot(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot([ROW], a, title="t")
    emit_plot([ROW], b, title="t")
    text = a.read_text()
    assert text.lstrip().startswith("<?xml") and "<svg" in text
    assert a.read_bytes() == b.read_bytes()


def test_empty_plot_rejected(tmp_path):
    with pytest.raises(EmptyReport):
        emit_plot([], tmp_path / "x.svg")
