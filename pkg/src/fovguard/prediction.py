"""Viewpoint predictors over an observation window, and the average-DoO metric."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

from .geometry import TileGrid, TileSet, Viewpoint, clamp_pitch, top_n_tiles, wrap_yaw

_SPACING_TOL = 1e-9


@dataclass(frozen=True)
class ObservationWindow:
    samples: tuple[Viewpoint, ...]
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise ValueError("observation window is empty")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        for a, b in zip(self.samples, self.samples[1:]):
            if abs((b.t - a.t) - self.tau) > _SPACING_TOL:
                raise ValueError(f"samples at t={a.t} and t={b.t} are not spaced by tau={self.tau}")

    @property
    def t_obw(self) -> float:
        return len(self.samples) * self.tau

    @property
    def end(self) -> float:
        return self.samples[-1].t


@dataclass(frozen=True)
class PredictionRequest:
    """Predict ``horizon`` seconds of viewpoints starting ``gap`` seconds after the window.

    ``trace_id`` and ``segment_index`` only identify the request; predictors
    that replay precomputed output use them as the lookup key.
    """

    window: ObservationWindow
    gap: float
    horizon: float
    sample_interval: float
    trace_id: str | None = None
    segment_index: int | None = None

    def __post_init__(self):
        if self.gap < 0:
            raise ValueError(f"gap must be non-negative, got {self.gap}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.sample_interval <= 0:
            raise ValueError(f"sample_interval must be positive, got {self.sample_interval}")

    def target_times(self) -> list[float]:
        n = math.ceil(self.horizon / self.sample_interval - 1e-9)
        start = self.window.end + self.gap
        return [start + k * self.sample_interval for k in range(1, n + 1)]


class PredictorKind(enum.Enum):
    TRIVIAL_MOTION = "trivial_motion"
    LINEAR_EXTRAPOLATION = "linear_extrapolation"


Predictor = Callable[[PredictionRequest], list[Viewpoint]]


def trivial_motion(req: PredictionRequest) -> list[Viewpoint]:
    """Repeat the last observed viewpoint over the whole prediction window."""
    last = req.window.samples[-1]
    return [Viewpoint(last.yaw, last.pitch, t) for t in req.target_times()]


def shortest_arc(from_yaw: float, to_yaw: float) -> float:
    """Signed yaw change along the shorter way round."""
    return wrap_yaw(to_yaw - from_yaw)


def linear_extrapolation(req: PredictionRequest) -> list[Viewpoint]:
    """Constant angular velocity fitted to the last two samples."""
    samples = req.window.samples
    if len(samples) < 2:
        raise ValueError("linear extrapolation needs at least 2 observed samples")
    prev, last = samples[-2], samples[-1]
    dt = last.t - prev.t
    yaw_rate = shortest_arc(prev.yaw, last.yaw) / dt
    pitch_rate = (last.pitch - prev.pitch) / dt
    return [
        Viewpoint(wrap_yaw(last.yaw + yaw_rate * (t - last.t)), clamp_pitch(last.pitch + pitch_rate * (t - last.t)), t)
        for t in req.target_times()
    ]


trivial_motion.min_samples = 1
linear_extrapolation.min_samples = 2

PREDICTORS: dict[PredictorKind, Predictor] = {
    PredictorKind.TRIVIAL_MOTION: trivial_motion,
    PredictorKind.LINEAR_EXTRAPOLATION: linear_extrapolation,
}


def resolve_predictor(kind: Union[PredictorKind, str, Predictor]) -> Predictor:
    if callable(kind):
        return kind
    return PREDICTORS[PredictorKind(kind)]


def min_samples(predictor: Predictor) -> int:
    return getattr(predictor, "min_samples", 1)


def predict(kind: Union[PredictorKind, str, Predictor], req: PredictionRequest) -> list[Viewpoint]:
    return resolve_predictor(kind)(req)


class PrecomputedPredictor:
    """Replays externally produced predictions, one viewpoint per (trace, segment).

    The file is a CSV with header ``trace_id,segment_index,yaw_rad,pitch_rad``.
    """

    min_samples = 0

    def __init__(self, table: dict[tuple[str, int], tuple[float, float]]):
        self.table = dict(table)

    @classmethod
    def load(cls, path) -> "PrecomputedPredictor":
        table = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = {"trace_id", "segment_index", "yaw_rad", "pitch_rad"} - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"{path}: missing columns {sorted(missing)}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    key = (row["trace_id"], int(row["segment_index"]))
                    table[key] = (float(row["yaw_rad"]), float(row["pitch_rad"]))
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: malformed row ({exc})") from None
        return cls(table)

    def save(self, path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["trace_id", "segment_index", "yaw_rad", "pitch_rad"])
            for (trace_id, seg), (yaw, pitch) in sorted(self.table.items()):
                writer.writerow([trace_id, seg, repr(yaw), repr(pitch)])

    def __call__(self, req: PredictionRequest) -> list[Viewpoint]:
        key = (req.trace_id, req.segment_index)
        if key not in self.table:
            raise KeyError(f"no precomputed prediction for trace {key[0]!r}, segment {key[1]}")
        yaw, pitch = self.table[key]
        t = req.window.end + req.gap + req.horizon / 2
        return [Viewpoint(wrap_yaw(yaw), clamp_pitch(pitch), t)]


def anchor_viewpoint(predicted: Sequence[Viewpoint]) -> Viewpoint:
    """The predicted viewpoint at the middle of the prediction window."""
    if not predicted:
        raise ValueError("prediction is empty")
    return predicted[(len(predicted) - 1) // 2]


def predicted_tile_sets(predicted: Sequence[Viewpoint], grid: TileGrid, n_fov: int) -> TileSet:
    """Predicted tile requests: the ``n_fov`` tiles nearest the mid-window viewpoint."""
    return top_n_tiles(grid, anchor_viewpoint(predicted), n_fov)


def segment_doo(real: TileSet, predicted: TileSet) -> float:
    if not real:
        raise ValueError("real tile request set is empty")
    return real.overlap(predicted) / len(real)


def average_doo(real: Sequence[TileSet], predicted: Sequence[TileSet]) -> float:
    """Mean per-segment overlap of predicted and real requests, normalised by the real count."""
    if len(real) != len(predicted):
        raise ValueError(f"length mismatch: {len(real)} real vs {len(predicted)} predicted segments")
    if not real:
        raise ValueError("need at least one segment")
    return sum(segment_doo(q, e) for q, e in zip(real, predicted)) / len(real)
