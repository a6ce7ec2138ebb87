"""Fit free scenario parameters to the reference measurements.

Search is a full grid over the parameter bounds followed by coordinate
descent with a shrinking step.  Candidates are ranked by the worst relative
distance of any reference point from its interval; ties (typically several
candidates all inside their intervals) are broken by the summed distance to
the interval midpoints, which keeps fitted curves away from interval edges.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import analytic_transfer_time, descriptor_count, engine_rate, per_channel_link_chunk
from .errors import ConfigError, ModelError, NoReferencePoints, Unidentifiable
from .link import link_payload_cap
from .model import EngineKind, ReferencePoint, ScenarioConfig, TransferRequest, validate_scenario
from .params import PARAMS, apply_params, get_param
from .reference import interval_distance, refs_for

INF_SCORE = (math.inf, math.inf)


@dataclass(frozen=True)
class CalibrationSpec:
    scenario: str
    bounds: dict  # name -> (low, high), searched in insertion order
    grid_points: int = 16
    passes: int = 12
    shrink: float = 0.5

    def check(self, cfg: ScenarioConfig) -> None:
        if not self.bounds:
            raise ConfigError("calibration needs at least one free parameter")
        if self.grid_points < 16:
            raise ConfigError("grid search needs at least 16 points per axis")
        if self.passes < 3 or not 0 < self.shrink < 1:
            raise ConfigError("descent needs >= 3 passes and a shrink factor in (0, 1)")
        for name, (lo, hi) in self.bounds.items():
            if name not in PARAMS:
                raise ConfigError(f"unknown free parameter {name!r}")
            get_param(cfg, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo < hi):
                raise ConfigError(f"bounds for {name} must be finite, positive and increasing")


@dataclass(frozen=True)
class Residual:
    ref: ReferencePoint
    value: float
    rel_error: float


@dataclass
class FitResult:
    config: ScenarioConfig
    params: dict
    objective: float
    residuals: list = field(default_factory=list)
    evaluations: int = 0
    grid_best: float = math.inf

    def render(self) -> str:
        lines = [f"{self.config.name}: objective {self.objective:.4%} after {self.evaluations} evaluations"]
        for name, value in self.params.items():
            lines.append(f"  {name:24s} = {value:.6g}")
        for r in self.residuals:
            lines.append(f"  {r.ref.label:34s} model {r.value:8.4f}  ref [{r.ref.bw_low:g}, {r.ref.bw_high:g}]  err {r.rel_error:.2%}")
        return "\n".join(lines)


class CurveEvaluator:
    """Reference-point values of the analytic model for many candidate configs.

    Size-dependent terms that no tunable parameter touches (descriptor
    counts, link efficiency) are computed once per (direction, channels).
    """

    def __init__(self, template: ScenarioConfig, refs: Sequence[ReferencePoint], sizes: Sequence[int]):
        self.refs = list(refs)
        self.sizes = list(sizes)
        self._combos = {}
        for ref in self.refs:
            key = (ref.direction, ref.channels)
            if key in self._combos:
                continue
            reqs = [TransferRequest(ref.direction, s, ref.channels) for s in self.sizes]
            self._combos[key] = (
                np.array(self.sizes, dtype=float),
                np.array([descriptor_count(r, template.dma.descriptor_granularity) for r in reqs], dtype=float)
                if template.dma is not None
                else None,
                np.array([link_payload_cap(template.link, per_channel_link_chunk(r)) for r in reqs]),
            )

    def curve(self, cfg: ScenarioConfig, direction, channels) -> np.ndarray:
        if cfg.engine.is_rdma:
            return np.array([analytic_transfer_time(cfg, TransferRequest(direction, s, channels))[1] for s in self.sizes])
        sizes, ndesc, link_cap = self._combos[(direction, channels)]
        dma = cfg.dma
        overhead = dma.setup_overhead_us(cfg.mode) * 1000.0 + dma.descriptor_overhead_ns * ndesc
        if cfg.engine is EngineKind.QDMA:
            overhead = overhead + dma.queue_overhead_us * 1000.0
        scalar = min(engine_rate(cfg, direction, channels), cfg.fabric.cap_gbps, cfg.endpoint.peak_gbps)
        rate = np.minimum(link_cap, scalar)
        return sizes / (overhead + sizes / rate)

    def values(self, cfg: ScenarioConfig) -> list[float]:
        out = []
        for ref in self.refs:
            bw = self.curve(cfg, ref.direction, ref.channels)
            if ref.size is None:
                out.append(float(bw.max()))
            else:
                out.append(float(bw[self.sizes.index(ref.size)]))
        return out


def score_values(values, refs) -> tuple[float, float]:
    dists = [interval_distance(v, r) for v, r in zip(values, refs)]
    mids = [abs(v - (r.bw_low + r.bw_high) / 2) / ((r.bw_low + r.bw_high) / 2) for v, r in zip(values, refs)]
    return max(dists), sum(mids)


def fit_parameters(
    cfg: ScenarioConfig,
    spec: CalibrationSpec,
    refs: Sequence[ReferencePoint],
    sizes: Optional[Sequence[int]] = None,
) -> FitResult:
    """Fit ``spec.bounds`` parameters of ``cfg`` to the scenario's reference points."""
    from .scenarios import standard_sizes

    refs = refs_for(cfg.name, refs)
    if not refs:
        raise NoReferencePoints(f"no reference points for scenario {cfg.name}")
    spec.check(cfg)
    sizes = list(sizes) if sizes is not None else standard_sizes(cfg)
    missing = [r.label or str(r) for r in refs if r.size is not None and r.size not in sizes]
    if missing:
        raise ConfigError(f"reference sizes are not in the sweep: {missing}")

    names = list(spec.bounds)
    lows = [spec.bounds[n][0] for n in names]
    highs = [spec.bounds[n][1] for n in names]
    evaluator = CurveEvaluator(cfg, refs, sizes)
    cache: dict[tuple, tuple[float, float]] = {}

    def score(point) -> tuple[float, float]:
        key = tuple(point)
        hit = cache.get(key)
        if hit is not None:
            return hit
        try:
            cand = validate_scenario(apply_params(cfg, dict(zip(names, point))))
            result = score_values(evaluator.values(cand), refs)
        except ModelError:
            result = INF_SCORE
        cache[key] = result
        return result

    axes = [np.linspace(lo, hi, spec.grid_points).tolist() for lo, hi in zip(lows, highs)]
    best_point, best = None, INF_SCORE
    for point in itertools.product(*axes):
        s = score(point)
        if s < best:
            best_point, best = list(point), s
    if best_point is None:
        raise Unidentifiable(names)
    grid_best = best[0]

    steps = [(hi - lo) / (spec.grid_points - 1) for lo, hi in zip(lows, highs)]
    for _ in range(spec.passes):
        for i in range(len(names)):
            for _ in range(64):
                moved = False
                for sign in (1.0, -1.0):
                    cand = list(best_point)
                    cand[i] = min(highs[i], max(lows[i], best_point[i] + sign * steps[i]))
                    if cand[i] == best_point[i]:
                        continue
                    s = score(cand)
                    if s < best:
                        best_point, best, moved = cand, s, True
                        break
                if not moved:
                    break
        steps = [s * spec.shrink for s in steps]

    flat = []
    for i, name in enumerate(names):
        seen = set()
        for v in axes[i]:
            cand = list(best_point)
            cand[i] = v
            seen.add(score(cand))
        if len(seen) == 1:
            flat.append(name)
    if flat:
        raise Unidentifiable(flat)

    params = dict(zip(names, best_point))
    fitted = validate_scenario(apply_params(cfg, params))
    values = evaluator.values(fitted)
    residuals = [Residual(r, v, interval_distance(v, r)) for r, v in zip(refs, values)]
    return FitResult(fitted, params, best[0], residuals, len(cache), grid_best)


# Shipping calibration: which parameters each preset fits, and what it inherits.
SHIPPING_SPECS = {
    "bram-xdma": CalibrationSpec(
        "bram-xdma", {"per_channel_cap_h2c": (4.0, 16.0), "per_channel_cap_c2h": (4.0, 16.0)}
    ),
    "ddr-xdma": CalibrationSpec(
        "ddr-xdma",
        {
            "per_channel_cap_h2c": (6.0, 16.0),
            "per_channel_cap_c2h": (6.0, 16.0),
            "interleaved_cap_h2c": (6.0, 16.0),
            "interleaved_cap_c2h": (6.0, 16.0),
        },
    ),
    "ddr-microblaze": CalibrationSpec(
        "ddr-microblaze", {"contention_factor_h2c": (0.5, 1.0), "contention_factor_c2h": (0.5, 1.0)}
    ),
    "ddr-petalinux": CalibrationSpec(
        "ddr-petalinux",
        {
            "contention_factor_h2c": (0.3, 1.0),
            "contention_factor_c2h": (0.3, 1.0),
            "interleaved_cap_c2h": (6.0, 16.0),
        },
    ),
}

# derived presets share the fitted engine of ddr-xdma
INHERITS = {
    "ddr-microblaze": (
        "ddr-xdma",
        ("per_channel_cap_h2c", "per_channel_cap_c2h", "interleaved_cap_h2c", "interleaved_cap_c2h"),
    ),
    "ddr-petalinux": ("ddr-xdma", ("per_channel_cap_h2c", "per_channel_cap_c2h")),
}


@dataclass
class CalibrationRun:
    fits: dict  # scenario -> FitResult
    inherited: dict  # scenario -> {param: value}


def calibrate_builtin(refs: Sequence[ReferencePoint], only: Optional[Sequence[str]] = None) -> CalibrationRun:
    """Fit every shipping preset in dependency order."""
    from .scenarios import base_scenarios

    base = base_scenarios()
    fits, inherited = {}, {}
    for name, spec in SHIPPING_SPECS.items():
        if only is not None and name not in only and not any(INHERITS.get(o, ("",))[0] == name for o in only):
            continue
        cfg = base[name]
        if name in INHERITS:
            parent, keys = INHERITS[name]
            if parent not in fits:
                raise ConfigError(f"{name} inherits from {parent}, which was not fitted")
            inherited[name] = {k: fits[parent].params[k] for k in keys}
            cfg = validate_scenario(apply_params(cfg, inherited[name]))
        fits[name] = fit_parameters(cfg, spec, refs)
    return CalibrationRun(fits, inherited)


def calibration_document(run: CalibrationRun) -> dict:
    doc = {}
    for name, fit in run.fits.items():
        entry = {"objective": fit.objective, "params": dict(fit.params)}
        if name in run.inherited:
            entry["inherited"] = dict(run.inherited[name])
        entry["residuals"] = [
            {
                "label": r.ref.label,
                "direction": r.ref.direction.value,
                "channels": r.ref.channels,
                "low": r.ref.bw_low,
                "high": r.ref.bw_high,
                "value": r.value,
                "rel_error": r.rel_error,
            }
            for r in fit.residuals
        ]
        doc[name] = entry
    return {"scenarios": doc}


def write_calibration(run: CalibrationRun, path) -> None:
    import tomli_w

    header = "# Generated by `nicmemsim calibrate --write`; do not edit by hand.\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + tomli_w.dumps(calibration_document(run)))
