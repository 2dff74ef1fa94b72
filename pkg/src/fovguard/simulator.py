"""Per-segment proactive streaming: observe, predict, camouflage, stream, score.

Timeline for segment ``l`` (1-based, ``l >= l0``): playback starts at
``t_b + (l - 1) * T_seg``. The observation window of ``n_obw_samples``
samples ends ``t_cc`` before that instant, the predictor looks ``t_cc``
ahead of the window, and the prediction covers the whole segment. The first
``l0 - 1`` segments are streamed passively and not scored.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import TileGrid, TileSet, Viewpoint, fov_masks
from .optimizer import (
    DurationPlan,
    InfeasibleError,
    NoObservationWarning,
    StreamClock,
    optimize_durations,
    rates_for_resources_rate,
)
from .prediction import (
    ObservationWindow,
    PredictionRequest,
    min_samples,
    predicted_tile_sets,
    resolve_predictor,
)
from .privacy import PrivacySpec, generate_camouflage
from .resources import Rates, VideoConfig, capability_tiles, cc_capability, tile_bits
from .trace_io import Trace, wrap_yaw_array

DEFAULT_FOV_DIAMETER = 100.0

SWEEP_HEADER = ("rho_s", "rcc", "avg_qoe", "avg_doo", "cc_capability", "feasible")


class InsufficientObservationError(ValueError):
    """The plan's observation window is too short for the chosen predictor."""


@dataclass(frozen=True)
class SegmentRecord:
    segment_index: int
    real_set: TileSet
    predicted_set: TileSet
    streamed_set: TileSet
    doo_term: float
    qoe_term: float
    leaked: bool
    fallback_triggered: bool

    def to_dict(self, with_tiles: bool = False) -> dict:
        out = {
            "segment_index": self.segment_index,
            "doo_term": self.doo_term,
            "qoe_term": self.qoe_term,
            "leaked": self.leaked,
            "fallback_triggered": self.fallback_triggered,
        }
        if with_tiles:
            out["real_set"] = self.real_set.indices()
            out["predicted_set"] = self.predicted_set.indices()
            out["streamed_set"] = self.streamed_set.indices()
        return out


@dataclass(frozen=True)
class SimReport:
    trace_id: str
    records: tuple[SegmentRecord, ...]
    average_doo: float
    average_qoe: float
    cc_capability: float
    plan: DurationPlan
    rho_s: float

    @property
    def fallback_segments(self) -> int:
        return sum(r.fallback_triggered for r in self.records)

    @property
    def leaked_segments(self) -> int:
        return sum(r.leaked for r in self.records)

    def to_dict(self, with_tiles: bool = False) -> dict:
        return {
            "trace_id": self.trace_id,
            "rho_s": float(self.rho_s),
            "average_doo": self.average_doo,
            "average_qoe": self.average_qoe,
            "cc_capability": self.cc_capability,
            "plan": plan_to_dict(self.plan),
            "leaked_segments": self.leaked_segments,
            "fallback_segments": self.fallback_segments,
            "records": [r.to_dict(with_tiles) for r in self.records],
        }


def plan_to_dict(plan: DurationPlan) -> dict:
    return {
        "T_ps": plan.T_ps,
        "tau": plan.tau,
        "t_obw": plan.t_obw,
        "t_com": plan.t_com,
        "t_cpt": plan.t_cpt,
        "t_cc": plan.t_cc,
        "slack": plan.slack,
        "n_obw_samples": plan.n_obw_samples,
        "n_p": plan.n_p,
    }


def _segment_bounds(trace: Trace, segment_index: int, T_seg: float) -> tuple[float, float]:
    start = trace.start + (segment_index - 1) * T_seg
    return start, start + T_seg


def real_request_set(trace: Trace, segment_index: int, grid: TileGrid, fov_diameter: float, T_seg: float = 1.0) -> TileSet:
    """Union of the FoV tiles of every trace sample played during the segment."""
    lo, hi = _segment_bounds(trace, segment_index, T_seg)
    t, yaw, pitch = trace.arrays()
    sel = (t >= lo - 1e-9) & (t < hi - 1e-9)
    if not sel.any():
        raise ValueError(f"trace {trace.trace_id!r} has no samples in segment {segment_index} [{lo}, {hi})")
    return TileSet.from_mask(grid, fov_masks(grid, yaw[sel], pitch[sel], fov_diameter).any(axis=0))


def segment_real_sets(trace: Trace, clock: StreamClock, grid: TileGrid, fov_diameter: float) -> dict[int, TileSet]:
    """:func:`real_request_set` for every proactively streamed segment, in one pass."""
    t, yaw, pitch = trace.arrays()
    masks = fov_masks(grid, yaw, pitch, fov_diameter)
    seg_of = np.floor((t - trace.start) / clock.T_seg + 1e-9).astype(int) + 1
    out = {}
    for l in clock.segments:
        sel = seg_of == l
        if not sel.any():
            raise ValueError(f"trace {trace.trace_id!r} has no samples in segment {l}")
        out[l] = TileSet.from_mask(grid, masks[sel].any(axis=0))
    return out


def decide_streamed_set(
    predicted: TileSet, camouflage: TileSet, capability_tiles: int, n_fov: int
) -> tuple[TileSet, bool]:
    """Stream predicted plus camouflage if it fits; otherwise fall back to predicted only.

    Under fallback the predicted tiles are kept in ascending index order up
    to the capability, and the camouflage is dropped.
    """
    if capability_tiles < 0:
        raise ValueError("capability_tiles must be non-negative")
    if len(predicted) != n_fov:
        raise ValueError(f"predicted set has {len(predicted)} tiles, expected n_fov={n_fov}")
    union = predicted | camouflage
    if capability_tiles >= len(union):
        return union, False
    return predicted.lowest(capability_tiles), True


def qoe_of_records(records: Sequence[SegmentRecord]) -> float:
    if not records:
        raise ValueError("no segment records")
    return sum(r.real_set.overlap(r.streamed_set) / len(r.real_set) for r in records) / len(records)


class _TraceView:
    """Interpolation helper over one trace's arrays."""

    def __init__(self, trace: Trace):
        t, yaw, pitch = trace.arrays()
        self.t = t
        self.yaw = np.unwrap(yaw)
        self.pitch = pitch

    def viewpoints(self, times: np.ndarray) -> list[Viewpoint]:
        tq = np.clip(times, self.t[0], self.t[-1])
        y = wrap_yaw_array(np.interp(tq, self.t, self.yaw))
        p = np.clip(np.interp(tq, self.t, self.pitch), -np.pi / 2, np.pi / 2)
        return [Viewpoint(float(a), float(b), float(c)) for a, b, c in zip(y, p, times)]


def simulate_trace(
    trace: Trace,
    predictor_kind,
    spec: PrivacySpec,
    plan: DurationPlan,
    clock: StreamClock,
    video: VideoConfig,
    rates: Rates,
    fov_diameter: float = DEFAULT_FOV_DIAMETER,
    real_sets: Optional[dict[int, TileSet]] = None,
) -> SimReport:
    """Stream segments l0..L of one trace under ``plan`` and score them."""
    if trace.duration < clock.L * clock.T_seg - 1e-9:
        raise ValueError(
            f"trace {trace.trace_id!r} covers {trace.duration:.6g} s, needs L*T_seg = {clock.L * clock.T_seg:.6g} s"
        )
    if plan.t_cc > clock.T_ps + 1e-9:
        raise InfeasibleError(f"plan needs t_cc={plan.t_cc:.6g} s > T_ps={clock.T_ps:.6g} s")
    predictor = resolve_predictor(predictor_kind)
    needed = max(1, min_samples(predictor))
    if plan.n_obw_samples < needed:
        raise InsufficientObservationError(
            f"plan observes {plan.n_obw_samples} samples, the predictor needs at least {needed}"
        )
    grid, n_fov, M = video.grid, video.n_fov, video.M
    if real_sets is None:
        real_sets = segment_real_sets(trace, clock, grid, fov_diameter)
    s_com, s_cpt = tile_bits(video)
    c_cc = cc_capability(plan.t_com, plan.t_cpt, rates, s_com, s_cpt, M)
    cap = capability_tiles(c_cc, M)
    view = _TraceView(trace)
    tau, n = plan.tau, plan.n_obw_samples
    offsets = tau * np.arange(n - 1, -1, -1)

    records = []
    for l in clock.segments:
        playback = trace.start + (l - 1) * clock.T_seg
        window_end = playback - plan.t_cc
        window = ObservationWindow(tuple(view.viewpoints(window_end - offsets)), tau)
        req = PredictionRequest(window, plan.t_cc, clock.T_seg, tau, trace.trace_id, l)
        e_l = predicted_tile_sets(predictor(req), grid, n_fov)
        camouflage = generate_camouflage(grid, e_l, spec, n_fov)
        s_l, fallback = decide_streamed_set(e_l, camouflage, cap, n_fov)
        q_l = real_sets[l]
        records.append(
            SegmentRecord(
                segment_index=l,
                real_set=q_l,
                predicted_set=e_l,
                streamed_set=s_l,
                doo_term=q_l.overlap(e_l) / len(q_l),
                qoe_term=q_l.overlap(s_l) / len(q_l),
                leaked=fallback or not camouflage,
                fallback_triggered=fallback,
            )
        )
    return SimReport(
        trace_id=trace.trace_id,
        records=tuple(records),
        average_doo=sum(r.doo_term for r in records) / len(records),
        average_qoe=qoe_of_records(records),
        cc_capability=c_cc,
        plan=plan,
        rho_s=spec.rho_s,
    )


@dataclass(frozen=True)
class Aggregate:
    n_traces: int
    avg_qoe: float
    avg_doo: float
    cc_capability: float

    @classmethod
    def of(cls, reports: Sequence[SimReport]) -> "Aggregate":
        if not reports:
            raise ValueError("no reports to aggregate")
        k = len(reports)
        return cls(
            n_traces=k,
            avg_qoe=sum(r.average_qoe for r in reports) / k,
            avg_doo=sum(r.average_doo for r in reports) / k,
            cc_capability=sum(r.cc_capability for r in reports) / k,
        )


@dataclass(frozen=True)
class SweepCell:
    rho_s: float
    rcc: float
    feasible: bool
    aggregate: Optional[Aggregate] = None
    reason: str = ""
    plan: Optional[DurationPlan] = None
    reports: tuple[SimReport, ...] = ()

    def csv_row(self) -> list[str]:
        if not self.feasible:
            return [repr(float(self.rho_s)), repr(float(self.rcc)), "", "", "", "false"]
        a = self.aggregate
        return [
            repr(float(self.rho_s)),
            repr(float(self.rcc)),
            repr(a.avg_qoe),
            repr(a.avg_doo),
            repr(a.cc_capability),
            "true",
        ]


@dataclass(frozen=True)
class SweepResult:
    """Cells in row-major order: rho_s varies slowest, rcc fastest."""

    rho_grid: tuple[float, ...]
    rcc_grid: tuple[float, ...]
    cells: tuple[SweepCell, ...]
    metadata: dict = field(default_factory=dict)

    def cell(self, rho_s: float, rcc: float) -> SweepCell:
        i = self.rho_grid.index(rho_s)
        j = self.rcc_grid.index(rcc)
        return self.cells[i * len(self.rcc_grid) + j]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for c in self.cells:
            writer.writerow(c.csv_row())
        return buf.getvalue()


def sweep(
    traces: Sequence[Trace],
    predictor_kind,
    rho_grid: Sequence[float],
    rcc_grid: Sequence[float],
    clock: StreamClock,
    video: VideoConfig,
    tau: float,
    base_rates: Rates,
    fov_diameter: float = DEFAULT_FOV_DIAMETER,
    keep_reports: bool = False,
) -> SweepResult:
    """Mean aggregates over ``traces`` for every (rho_s, R_cc*) pair.

    For each cell both rates are scaled by a common factor so the maximised
    resources rate equals the requested R_cc*, and the durations are
    re-optimised. Cells that cannot be planned are flagged, not dropped.
    """
    if not rho_grid or not rcc_grid:
        raise ValueError("rho_grid and rcc_grid must be non-empty")
    if not traces:
        raise ValueError("no traces to simulate")
    predictor = resolve_predictor(predictor_kind)
    real = [segment_real_sets(tr, clock, video.grid, fov_diameter) for tr in traces]
    cells = []
    for rho in rho_grid:
        spec = PrivacySpec(rho)
        for rcc in rcc_grid:
            rates = rates_for_resources_rate(video, base_rates, rcc)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", NoObservationWarning)
                    plan = optimize_durations(clock, tau, spec, video, rates)
                reports = tuple(
                    simulate_trace(tr, predictor, spec, plan, clock, video, rates, fov_diameter, rs)
                    for tr, rs in zip(traces, real)
                )
            except (InfeasibleError, InsufficientObservationError) as exc:
                cells.append(SweepCell(rho, rcc, False, reason=str(exc)))
                continue
            cells.append(
                SweepCell(rho, rcc, True, Aggregate.of(reports), plan=plan, reports=reports if keep_reports else ())
            )
    meta = {
        "rho_grid": [float(r) for r in rho_grid],
        "rcc_grid": [float(r) for r in rcc_grid],
        "tau": tau,
        "T_ps": clock.T_ps,
        "l0": clock.l0,
        "L": clock.L,
        "n_traces": len(traces),
        "fov_diameter": fov_diameter,
        "base_rates": {"C_com": base_rates.C_com, "C_cpt": base_rates.C_cpt},
    }
    return SweepResult(tuple(rho_grid), tuple(rcc_grid), tuple(cells), meta)
