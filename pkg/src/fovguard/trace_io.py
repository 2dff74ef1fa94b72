"""Head-movement traces: CSV ingestion, resampling and synthetic generation.

Two CSV schemas are accepted, both with a mandatory header row:

* ``t_s,yaw_rad,pitch_rad``
* ``t_s,qw,qx,qy,qz`` (unit quaternions; roll is discarded)

Directories follow ``<dataset>/<video_id>/<user_id>.csv``.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .geometry import HALF_PI, TWO_PI, Viewpoint, clamp_pitch, wrap_yaw

YAW_PITCH_HEADER = ("t_s", "yaw_rad", "pitch_rad")
QUATERNION_HEADER = ("t_s", "qw", "qx", "qy", "qz")
FORMATS = ("yaw_pitch_csv", "quaternion_csv")
QUAT_NORM_TOL = 1e-3


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Trace:
    trace_id: str
    user_id: str
    video_id: str
    samples: tuple[Viewpoint, ...]
    native_interval: float

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise ValueError(f"trace {self.trace_id!r} has no samples")
        if self.native_interval <= 0:
            raise ValueError("native_interval must be positive")
        for a, b in zip(self.samples, self.samples[1:]):
            if not b.t > a.t:
                raise ValueError(f"trace {self.trace_id!r}: timestamps not strictly increasing at t={b.t}")

    @property
    def start(self) -> float:
        return self.samples[0].t

    @property
    def duration(self) -> float:
        """Covered playback time: the last sample holds for one native interval."""
        return self.samples[-1].t + self.native_interval - self.start

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = np.array([s.t for s in self.samples])
        yaw = np.array([s.yaw for s in self.samples])
        pitch = np.array([s.pitch for s in self.samples])
        return t, yaw, pitch


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    duration: float = 60.0
    interval: float = 0.2
    yaw_rate_std: float = math.radians(35.0)
    pitch_rate_std: float = math.radians(12.0)
    persistence: float = 0.9

    def __post_init__(self):
        if self.duration <= 0 or self.interval <= 0:
            raise ValueError("duration and interval must be positive")
        if self.yaw_rate_std < 0 or self.pitch_rate_std < 0:
            raise ValueError("rate standard deviations must be non-negative")
        if not 0 <= self.persistence < 1:
            raise ValueError(f"persistence must lie in [0, 1), got {self.persistence}")


def quaternion_to_yaw_pitch(qw: float, qx: float, qy: float, qz: float) -> tuple[float, float]:
    """Yaw and pitch of the Z-Y-X intrinsic decomposition; roll is dropped."""
    yaw = math.atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz))
    s = 2.0 * (qw * qy - qz * qx)
    pitch = math.asin(max(-1.0, min(1.0, s)))
    return wrap_yaw(yaw), clamp_pitch(pitch)


def _sniff_format(header: Sequence[str]) -> str:
    cols = tuple(h.strip() for h in header)
    if cols == YAW_PITCH_HEADER:
        return "yaw_pitch_csv"
    if cols == QUATERNION_HEADER:
        return "quaternion_csv"
    raise TraceFormatError(f"unrecognised header {','.join(cols)!r}")


def read_trace(path, fmt: Optional[str] = None, trace_id: str = "", user_id: str = "", video_id: str = "") -> Trace:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(f"{path}: empty file, header row required")
        found = _sniff_format(header) if fmt is None else fmt
        expected = YAW_PITCH_HEADER if found == "yaw_pitch_csv" else QUATERNION_HEADER
        if tuple(h.strip() for h in header) != expected:
            raise TraceFormatError(f"{path}:1: header {','.join(header)!r} does not match {found}")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise TraceFormatError(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}")
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise TraceFormatError(f"{path}:{lineno}: non-numeric field in {row!r}") from None
            t = values[0]
            if found == "quaternion_csv":
                norm = math.sqrt(sum(q * q for q in values[1:]))
                if abs(norm - 1.0) > QUAT_NORM_TOL:
                    raise TraceFormatError(f"{path}:{lineno}: quaternion norm {norm:.6f} is not 1")
                yaw, pitch = quaternion_to_yaw_pitch(*(q / norm for q in values[1:]))
            else:
                yaw, pitch = values[1], values[2]
            if samples and not t > samples[-1].t:
                raise TraceFormatError(f"{path}:{lineno}: timestamp {t} does not increase")
            try:
                samples.append(Viewpoint(yaw, pitch, t))
            except ValueError as exc:
                raise TraceFormatError(f"{path}:{lineno}: {exc}") from None
    if not samples:
        raise TraceFormatError(f"{path}: no samples")
    if len(samples) > 1:
        interval = float(np.median(np.diff([s.t for s in samples])))
    else:
        interval = 1.0
    return Trace(trace_id or path.stem, user_id or path.stem, video_id, samples, interval)


def load_traces(path, fmt: Optional[str] = None) -> list[Trace]:
    """Load every ``*.csv`` trace below ``path`` (or the single file ``path``).

    ``fmt`` is one of ``yaw_pitch_csv``/``quaternion_csv``; None sniffs the
    header of each file. Traces come back sorted by trace id.
    """
    if fmt is not None and fmt not in FORMATS:
        raise ValueError(f"unknown trace format {fmt!r}; expected one of {FORMATS}")
    root = Path(path)
    if root.is_file():
        return [read_trace(root, fmt, video_id=root.parent.name)]
    if not root.is_dir():
        raise FileNotFoundError(f"no such trace file or directory: {root}")
    traces = []
    for file in sorted(root.rglob("*.csv")):
        rel = file.relative_to(root)
        video_id = rel.parent.as_posix() if rel.parent != Path(".") else ""
        trace_id = rel.with_suffix("").as_posix()
        traces.append(read_trace(file, fmt, trace_id=trace_id, user_id=file.stem, video_id=video_id))
    return sorted(traces, key=lambda tr: tr.trace_id)


def save_trace(trace: Trace, path) -> None:
    """Write ``trace`` in the yaw/pitch schema with round-trip-exact floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(YAW_PITCH_HEADER)
        for s in trace.samples:
            writer.writerow([repr(float(s.t)), repr(float(s.yaw)), repr(float(s.pitch))])


def trace_path(root, trace: Trace) -> Path:
    return Path(root) / (trace.video_id or ".") / f"{trace.user_id}.csv"


def interpolate(t_src: np.ndarray, yaw: np.ndarray, pitch: np.ndarray, t_new) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-linear yaw/pitch at ``t_new``, taking the short way round in yaw."""
    unwrapped = np.unwrap(yaw)
    y = np.interp(t_new, t_src, unwrapped)
    p = np.interp(t_new, t_src, pitch)
    return wrap_yaw_array(y), np.clip(p, -HALF_PI, HALF_PI)


def wrap_yaw_array(y: np.ndarray) -> np.ndarray:
    """Vectorised :func:`wrap_yaw`; in-range values pass through unchanged."""
    wrapped = (y + np.pi) % TWO_PI - np.pi
    wrapped = np.where(wrapped >= np.pi, -np.pi, wrapped)
    return np.where((y >= -np.pi) & (y < np.pi), y, wrapped)


def resample(trace: Trace, tau: float) -> Trace:
    """Samples at every multiple k * tau inside the trace's time span."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    t, yaw, pitch = trace.arrays()
    span = t[-1] - t[0]
    if span < tau - 1e-12:
        raise ValueError(f"trace {trace.trace_id!r} spans {span} s, shorter than tau={tau}")
    k0 = math.ceil(t[0] / tau - 1e-9)
    k1 = math.floor(t[-1] / tau + 1e-9)
    times = np.array([k * tau for k in range(k0, k1 + 1)])
    y, p = interpolate(t, yaw, pitch, np.clip(times, t[0], t[-1]))
    samples = tuple(Viewpoint(float(a), float(b), float(c)) for a, b, c in zip(y, p, times))
    return Trace(trace.trace_id, trace.user_id, trace.video_id, samples, tau)


def synth_traces(params: SynthParams, count: int, video_id: str = "synthetic") -> list[Trace]:
    """Random-walk head traces with AR(1) angular velocity.

    Each angular rate follows ``w[k+1] = a * w[k] + sqrt(1 - a^2) * std * z``
    so its stationary spread is ``std`` and its lag-1 autocorrelation is the
    persistence ``a``. Pitch reflects off the poles; yaw wraps.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    n = int(round(params.duration / params.interval))
    a = params.persistence
    innov = math.sqrt(1.0 - a * a)
    children = np.random.SeedSequence(params.seed).spawn(count)
    traces = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        yaw0 = rng.uniform(-np.pi, np.pi)
        pitch0 = float(np.clip(rng.normal(0.0, 0.15), -HALF_PI, HALF_PI))
        w_yaw = params.yaw_rate_std * rng.standard_normal()
        w_pitch = params.pitch_rate_std * rng.standard_normal()
        z = rng.standard_normal((n, 2))
        yaw, pitch = yaw0, pitch0
        samples = []
        for k in range(n):
            samples.append(Viewpoint(float(wrap_yaw(yaw)), float(pitch), k * params.interval))
            w_yaw = a * w_yaw + innov * params.yaw_rate_std * z[k, 0]
            w_pitch = a * w_pitch + innov * params.pitch_rate_std * z[k, 1]
            yaw += w_yaw * params.interval
            pitch += w_pitch * params.interval
            if pitch > HALF_PI:
                pitch, w_pitch = math.pi - pitch, -w_pitch
            elif pitch < -HALF_PI:
                pitch, w_pitch = -math.pi - pitch, -w_pitch
            pitch = clamp_pitch(pitch)
        user_id = f"user{i:03d}"
        traces.append(Trace(f"{video_id}/{user_id}", user_id, video_id, samples, params.interval))
    return traces


def train_test_split(traces: Sequence[Trace], ratio: float = 0.8, seed: int = 0) -> tuple[list[str], list[str]]:
    """Seeded shuffle of trace ids split ``ratio : 1 - ratio``."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    ids = sorted(tr.trace_id for tr in traces)
    random.Random(seed).shuffle(ids)
    cut = int(round(ratio * len(ids)))
    return sorted(ids[:cut]), sorted(ids[cut:])
