"""Optimal split of the proactive streaming time into observation, computing and transmission."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .privacy import PrivacySpec, overall_tile_count
from .resources import Rates, VideoConfig, cc_capability, tile_bits

_SUM_TOL = 1e-9
_FLOOR_EPS = 1e-9


class InfeasibleError(ValueError):
    """The required tiles cannot be computed and delivered within the proactive streaming time."""


class NoObservationWarning(UserWarning):
    """The optimal plan leaves less than one sample interval for observation."""


@dataclass(frozen=True)
class StreamClock:
    """Segment timing. ``T_ps`` defaults to (l0 - 1) * T_seg.

    Passing ``T_ps`` explicitly overrides the proactive budget, for
    what-if studies that decouple it from the segment length.
    """

    l0: int = 3
    T_seg: float = 1.0
    L: int = 60
    T_ps_override: Optional[float] = None

    def __post_init__(self):
        if self.T_seg <= 0:
            raise ValueError(f"T_seg must be positive, got {self.T_seg}")
        if not 2 <= self.l0 <= self.L:
            raise ValueError(f"need 2 <= l0 <= L, got l0={self.l0}, L={self.L}")
        if self.T_ps_override is not None and self.T_ps_override <= 0:
            raise ValueError(f"T_ps must be positive, got {self.T_ps_override}")

    @property
    def T_ps(self) -> float:
        if self.T_ps_override is not None:
            return self.T_ps_override
        return (self.l0 - 1) * self.T_seg

    @property
    def segments(self) -> range:
        """1-based indices of the proactively streamed segments."""
        return range(self.l0, self.L + 1)


@dataclass(frozen=True)
class DurationPlan:
    """Durations within one proactive streaming period.

    ``slack`` is the idle remainder left when the observation budget is
    floored to whole samples; it precedes the observation window so that the
    window ends exactly ``t_cc`` before playback.
    """

    t_obw: float
    t_com: float
    t_cpt: float
    T_ps: float
    tau: float
    n_obw_samples: int
    slack: float = 0.0
    n_p: Optional[int] = None

    def __post_init__(self):
        for name in ("t_obw", "t_com", "t_cpt", "slack"):
            if getattr(self, name) < -_SUM_TOL:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.n_obw_samples < 0:
            raise ValueError("n_obw_samples must be non-negative")
        if abs(self.t_obw - self.n_obw_samples * self.tau) > _SUM_TOL:
            raise ValueError("t_obw must equal n_obw_samples * tau")
        total = self.t_obw + self.slack + self.t_com + self.t_cpt
        if abs(total - self.T_ps) > _SUM_TOL:
            raise ValueError(f"durations sum to {total}, not T_ps={self.T_ps}")

    @property
    def t_cc(self) -> float:
        return self.t_com + self.t_cpt

    @property
    def observation_budget(self) -> float:
        """Time available for observation before flooring to whole samples."""
        return self.T_ps - self.t_cc

    @property
    def observable(self) -> bool:
        return self.n_obw_samples > 0


def _plan_from_cc(T_ps: float, tau: float, t_com: float, t_cpt: float, n_p: Optional[int]) -> DurationPlan:
    budget = T_ps - (t_com + t_cpt)
    n = max(0, int(math.floor(budget / tau + _FLOOR_EPS)))
    t_obw = n * tau
    slack = max(0.0, T_ps - t_obw - t_com - t_cpt)
    return DurationPlan(t_obw, t_com, t_cpt, T_ps, tau, n, slack, n_p)


def optimize_durations(
    clock: StreamClock, tau: float, spec: PrivacySpec, video: VideoConfig, rates: Rates
) -> DurationPlan:
    """Longest observation window that still renders and delivers N_p tiles in time.

    Raises
    ------
    InfeasibleError
        If computing plus transmitting the N_p tiles takes longer than T_ps.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    s_com, s_cpt = tile_bits(video)
    n_p = overall_tile_count(spec, video.M, video.n_fov)
    t_com = s_com * n_p / rates.C_com
    t_cpt = s_cpt * n_p / rates.C_cpt
    t_cc = t_com + t_cpt
    if t_cc > clock.T_ps:
        raise InfeasibleError(
            f"N_p={n_p} tiles need t_cc={t_cc:.6g} s but only T_ps={clock.T_ps:.6g} s is available"
        )
    plan = _plan_from_cc(clock.T_ps, tau, t_com, t_cpt, n_p)
    if not plan.observable:
        warnings.warn(
            f"t_cc={t_cc:.6g} s leaves {plan.observation_budget:.6g} s < tau={tau} for observation",
            NoObservationWarning,
            stacklevel=2,
        )
    return plan


def manual_plan(
    clock: StreamClock, tau: float, t_com: float, t_cpt: float, n_p: Optional[int] = None
) -> DurationPlan:
    """A plan with hand-picked durations; the optimizer is bypassed."""
    if t_com < 0 or t_cpt < 0:
        raise ValueError("durations must be non-negative")
    if t_com + t_cpt > clock.T_ps:
        raise InfeasibleError(f"t_com + t_cpt = {t_com + t_cpt:.6g} s exceeds T_ps={clock.T_ps:.6g} s")
    return _plan_from_cc(clock.T_ps, tau, t_com, t_cpt, n_p)


def max_resources_rate(video: VideoConfig, rates: Rates) -> float:
    """Capability per second of CC time at the optimum; does not depend on the SDoP."""
    s_com, s_cpt = tile_bits(video)
    return 1.0 / (s_com * video.M / rates.C_com + s_cpt * video.M / rates.C_cpt)


def rates_for_resources_rate(video: VideoConfig, base: Rates, target: float) -> Rates:
    """Scale both rates uniformly so that :func:`max_resources_rate` equals ``target``."""
    if target <= 0:
        raise ValueError(f"target resources rate must be positive, got {target}")
    return base.scaled(target / max_resources_rate(video, base))


def _min_time_for(reach, n_p: int, hi: float) -> Optional[float]:
    """Smallest t in [0, hi] with reach(t) >= n_p, by bisection; None if unreachable."""
    if reach(hi) < n_p:
        return None
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if reach(mid) >= n_p:
            hi = mid
        else:
            lo = mid
    return hi


def brute_force_plan(
    clock: StreamClock,
    tau: float,
    spec: PrivacySpec,
    video: VideoConfig,
    rates: Rates,
    duration_grid_step: float,
) -> DurationPlan:
    """Verification oracle: search the duration space without the closed form.

    The transmission time is enumerated on a grid of ``duration_grid_step``.
    For each grid value the shortest computing time meeting the capability
    requirement is located by bisection on :func:`cc_capability`; the plan
    with the largest remaining observation budget wins.
    """
    if duration_grid_step <= 0:
        raise ValueError("grid step must be positive")
    s_com, s_cpt = tile_bits(video)
    M = video.M
    n_p = overall_tile_count(spec, M, video.n_fov)
    T_ps = clock.T_ps

    def tiles(t_com, t_cpt):
        return cc_capability(t_com, t_cpt, rates, s_com, s_cpt, M) * M

    best = None
    for t_com in np.arange(0.0, T_ps + duration_grid_step / 2, duration_grid_step):
        t_com = float(min(t_com, T_ps))
        t_cpt = _min_time_for(lambda t: tiles(t_com, t), n_p, T_ps - t_com)
        if t_cpt is None:
            continue
        budget = T_ps - t_com - t_cpt
        if best is None or budget > best[0]:
            best = (budget, t_com, t_cpt)
    if best is None:
        raise InfeasibleError(f"no grid point delivers N_p={n_p} tiles within T_ps={T_ps}")
    _, t_com, t_cpt = best
    return _plan_from_cc(T_ps, tau, t_com, t_cpt, n_p)
