"""Command-line harness.

    nicmemsim scenarios [--out DIR]
    nicmemsim sweep     --scenario ddr-xdma --model both --out results/
    nicmemsim calibrate [--write src/nicmemsim/data/calibration.toml]
    nicmemsim compare   [--model des] [--tolerance 0.07] [--csv sweep.csv]
    nicmemsim plot      --csv sweep.csv --out sweep.svg

Exit status: 0 success, 1 reference comparison failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .calibrate import SHIPPING_SPECS, calibrate_builtin, write_calibration
from .config_io import load_scenario, save_scenario
from .errors import ModelError
from .model import Direction
from .reference import REFERENCE_SET, compare_to_reference
from .report import SweepReport, emit_csv, emit_plot, read_csv
from .scenarios import SCENARIO_NAMES, builtin_scenarios, get_scenario, standard_sizes
from .sim import run_sweep
from .sizes import parse_sizes

log = logging.getLogger("nicmemsim")

DEFAULT_TOLERANCE = {"analytic": 0.05, "des": 0.07}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", action="append", default=None,
                   help="preset name (repeatable, or comma separated)")
    p.add_argument("--config", action="append", default=None, type=Path,
                   help="scenario TOML file (repeatable)")
    p.add_argument("--model", choices=("analytic", "des", "both"), default=None)
    p.add_argument("--channels", default=None, help="comma list, e.g. 1,4 (default: all)")
    p.add_argument("--direction", choices=("h2c", "c2h", "both"), default="both")
    p.add_argument("--sizes", default=None, help="e.g. 64,4K,1M or 64..1MiB:x2 (default: preset sweep)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jitter", type=float, default=0.0, help="relative DES service-time jitter (default off)")
    p.add_argument("--workers", type=int, default=1, help="parallel DES processes")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nicmemsim", description="Host/SmartNIC memory-access bandwidth simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("scenarios", "list the built-in presets (write them as TOML with --out DIR)"),
        ("sweep", "sweep transfer sizes and write CSV plus an SVG figure"),
        ("calibrate", "fit preset parameters to the reference measurements"),
        ("compare", "check model output against the reference measurements"),
        ("plot", "render an SVG figure from a sweep CSV"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if name == "calibrate":
            p.add_argument("--write", type=Path, default=None, help="write the fitted defaults file here")
        if name in ("compare", "plot"):
            p.add_argument("--csv", type=Path, default=None, help="existing sweep CSV to read")
        if name == "compare":
            p.add_argument("--tolerance", type=float, default=None)
        if name == "plot":
            p.add_argument("--title", default="")
    return parser


def _scenarios(args, default_all=True):
    cfgs = []
    for item in args.scenario or []:
        for name in item.split(","):
            if name.strip():
                cfgs.append(get_scenario(name.strip()))
    for path in args.config or []:
        cfgs.append(load_scenario(path))
    if not cfgs and default_all:
        cfgs = builtin_scenarios()
    return cfgs


def _models(args, default="analytic"):
    model = args.model or default
    return ["analytic", "des"] if model == "both" else [model]


def _directions(args):
    return list(Direction) if args.direction == "both" else [Direction(args.direction)]


def _channels(args, cfg):
    if args.channels is None:
        return list(range(1, cfg.max_channels + 1))
    chans = sorted({int(c) for c in args.channels.split(",") if c.strip()})
    return [c for c in chans if c <= cfg.max_channels]


def _sweep(args, cfgs, models) -> SweepReport:
    results = []
    for cfg in cfgs:
        sizes = parse_sizes(args.sizes) if args.sizes else standard_sizes(cfg)
        chans = _channels(args, cfg)
        for model in models:
            res = run_sweep(cfg, _directions(args), chans, sizes, seed=args.seed, model=model,
                            jitter=args.jitter if model == "des" else 0.0, workers=args.workers)
            for r in res:
                if r.error:
                    log.warning("%s %s %s %dch %d B: %s", cfg.name, model, r.direction.value,
                                r.channels, r.size_bytes, r.error)
            results.extend(res)
    return SweepReport.from_results(results)


def _output_paths(out: Path | None, stem: str) -> tuple[Path, Path]:
    if out is None:
        out = Path(".")
    if out.suffix.lower() == ".csv":
        out.parent.mkdir(parents=True, exist_ok=True)
        return out, out.with_suffix(".svg")
    out.mkdir(parents=True, exist_ok=True)
    return out / f"{stem}.csv", out / f"{stem}.svg"


def cmd_scenarios(args) -> int:
    cfgs = _scenarios(args)
    for cfg in cfgs:
        if cfg.dma is not None:
            detail = (f"h2c/ch {cfg.dma.per_channel_cap_h2c_gbps:.3f}  c2h/ch {cfg.dma.per_channel_cap_c2h_gbps:.3f}  "
                      f"contention {cfg.fabric.contention_factor_h2c:.3f}/{cfg.fabric.contention_factor_c2h:.3f}")
        else:
            detail = f"port {cfg.rdma.link_gbps:g} Gb/s"
        print(f"{cfg.name:16s} {cfg.engine.value:10s} {cfg.endpoint.kind.value:6s} "
              f"{cfg.endpoint.peak_gbps:5.1f} GB/s  {detail}")
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            save_scenario(cfg, args.out / f"{cfg.name}.toml")
    return 0


def cmd_sweep(args) -> int:
    cfgs = _scenarios(args, default_all=False) or [get_scenario("ddr-xdma")]
    report = _sweep(args, cfgs, _models(args))
    stem = cfgs[0].name if len(cfgs) == 1 else "sweep"
    csv_path, svg_path = _output_paths(args.out, stem)
    emit_csv(report, csv_path)
    if report:
        emit_plot(report, svg_path, title=", ".join(c.name for c in cfgs))
    print(f"wrote {len(report)} rows to {csv_path}" + (f" and {svg_path}" if report else ""))
    return 0


def cmd_calibrate(args) -> int:
    only = None
    if args.scenario:
        only = [n.strip() for item in args.scenario for n in item.split(",") if n.strip()]
        unknown = [n for n in only if n not in SHIPPING_SPECS]
        if unknown:
            raise ModelError(f"no calibration spec for {', '.join(unknown)}")
    run = calibrate_builtin(REFERENCE_SET, only=only)
    for fit in run.fits.values():
        print(fit.render())
    if args.write is not None:
        write_calibration(run, args.write)
        print(f"wrote {args.write}")
    return 0


def cmd_compare(args) -> int:
    if args.csv is not None:
        report = read_csv(args.csv)
        if args.model in ("analytic", "des"):
            report = SweepReport(r for r in report if r.model == args.model)
    else:
        names = list(dict.fromkeys(r.scenario for r in REFERENCE_SET))
        if args.scenario:
            wanted = {n.strip() for item in args.scenario for n in item.split(",")}
            names = [n for n in names if n in wanted]
        report = _sweep(args, [get_scenario(n) for n in names], _models(args))
    scenarios = {r.scenario for r in report}
    refs = [r for r in REFERENCE_SET if r.scenario in scenarios]
    status = 0
    for model in sorted({r.model for r in report}) or ["analytic"]:
        tol = args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCE[model]
        result = compare_to_reference([r for r in report if r.model == model], refs, tol)
        print(result.render())
        status = max(status, result.exit_code)
    if args.out is not None:
        csv_path, svg_path = _output_paths(args.out, "compare")
        emit_csv(report, csv_path)
        if report:
            emit_plot(report, svg_path)
    return status


def cmd_plot(args) -> int:
    if args.csv is None:
        raise ModelError("plot needs --csv")
    report = read_csv(args.csv)
    out = args.out or args.csv.with_suffix(".svg")
    emit_plot(report, out, title=args.title)
    print(f"wrote {out}")
    return 0


COMMANDS = {
    "scenarios": cmd_scenarios,
    "sweep": cmd_sweep,
    "calibrate": cmd_calibrate,
    "compare": cmd_compare,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ModelError, ValueError, OSError) as exc:
        print(f"nicmemsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
