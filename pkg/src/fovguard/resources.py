"""Per-tile bit sizes, communication/computing rates and the CC capability.

Tile sizes quoted in "Mbit" are mebibits (2**20 bits): the
pixel arithmetic 192 x 216 x 12 x 30 gives 14,929,920 bits, which is 14.2
only in binary units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import TileGrid

MEBIBIT = 2**20
DEFAULT_MC_DRAWS = 100_000
DEFAULT_MC_SEED = 20240101
_MC_BATCH = 100_000


@dataclass(frozen=True)
class VideoConfig:
    px_w: int = 192
    px_h: int = 216
    b: int = 12
    r_f: float = 30.0
    T_seg: float = 1.0
    gamma_c: float = 2.41
    grid: TileGrid = field(default_factory=lambda: TileGrid(10, 20))
    n_fov: int = 33

    def __post_init__(self):
        for name in ("px_w", "px_h", "b", "r_f", "T_seg", "gamma_c", "n_fov"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.n_fov > self.grid.M:
            raise ValueError(f"n_fov={self.n_fov} exceeds the {self.grid.M} tiles of the grid")

    @property
    def M(self) -> int:
        return self.grid.M


@dataclass(frozen=True)
class ChannelConfig:
    """Downlink of a zero-forcing base station serving K equidistant users."""

    B: float
    P_total: float
    N_t: int
    K: int
    d: float
    alpha: float
    sigma2: float
    slot: float = 1e-3

    def __post_init__(self):
        if not self.N_t >= self.K >= 1:
            raise ValueError(f"need N_t >= K >= 1, got N_t={self.N_t}, K={self.K}")
        for name in ("P_total", "d", "alpha", "sigma2", "slot"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.B < 0:
            raise ValueError(f"B must be non-negative, got {self.B!r}")


@dataclass(frozen=True)
class ComputeConfig:
    F_cpt: float
    mu_r: float
    K: int = 1

    def __post_init__(self):
        if self.F_cpt <= 0 or self.mu_r <= 0 or self.K < 1:
            raise ValueError("F_cpt, mu_r and K must be positive")


@dataclass(frozen=True)
class Rates:
    C_com: float
    C_cpt: float

    def __post_init__(self):
        if not (self.C_com > 0 and self.C_cpt > 0):
            raise ValueError(f"rates must be positive, got C_com={self.C_com!r}, C_cpt={self.C_cpt!r}")

    def scaled(self, factor: float) -> "Rates":
        return replace(self, C_com=self.C_com * factor, C_cpt=self.C_cpt * factor)


DEFAULT_RATES = Rates(C_com=2.85e9, C_cpt=2.2e9)


def dbm_to_watts(dbm: float) -> float:
    return 10 ** (dbm / 10) / 1000


def tile_bits(cfg: VideoConfig) -> tuple[float, float]:
    """(s_com, s_cpt): bits per tile after compression and before it."""
    s_cpt = float(cfg.px_w * cfg.px_h * cfg.b) * cfg.r_f * cfg.T_seg
    return s_cpt / cfg.gamma_c, s_cpt


def computing_rate(cfg: ComputeConfig) -> float:
    """Bits per second one user gets from the shared rendering hardware."""
    return cfg.F_cpt / (cfg.K * cfg.mu_r)


def ensemble_average_rate(cfg: ChannelConfig, seed: int = DEFAULT_MC_SEED, draws: int = DEFAULT_MC_DRAWS) -> float:
    """Monte-Carlo ergodic rate of one user behind a zero-forcing precoder.

    The effective gain after zero forcing is Gamma(N_t - K + 1, 1) under
    Rayleigh fading; power is split equally across the K users. Draws are
    generated in fixed-size batches from spawned seeds and summed in batch
    order, so the estimate depends only on ``(cfg, seed, draws)``.
    """
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    if cfg.B == 0:
        return 0.0
    snr_scale = (cfg.P_total / cfg.K) * cfg.d ** (-cfg.alpha) / cfg.sigma2
    shape = cfg.N_t - cfg.K + 1
    n_batches = math.ceil(draws / _MC_BATCH)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    total = 0.0
    for k, child in enumerate(children):
        size = min(_MC_BATCH, draws - k * _MC_BATCH)
        gain = np.random.default_rng(child).gamma(shape, 1.0, size=size)
        total += float(np.log2(1.0 + snr_scale * gain).sum())
    return cfg.B * total / draws


def cc_capability(t_com: float, t_cpt: float, rates: Rates, s_com: float, s_cpt: float, M: int) -> float:
    """Fraction of a segment's M tiles that fit in the given durations."""
    if t_com < 0 or t_cpt < 0:
        raise ValueError("durations must be non-negative")
    return min(rates.C_com * t_com / s_com, rates.C_cpt * t_cpt / s_cpt, M) / M


def capability_tiles(c_cc: float, M: int) -> int:
    """Whole tiles covered by a capability; tolerant of round-off just below an integer."""
    return int(math.floor(c_cc * M + 1e-9))


def resources_rate(c_cc: float, t_cc: float) -> float:
    if t_cc <= 0:
        raise ValueError(f"t_cc must be positive, got {t_cc}")
    return c_cc / t_cc
