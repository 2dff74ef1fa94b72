"""Equirectangular tile grid, viewpoint-to-tile mapping and ring expansion.

Tiles are numbered 1..M row-major, starting at the top-left corner of the
panorama (yaw = -pi, pitch = +pi/2). A :class:`TileSet` stores its members as
a Python integer bit mask where bit ``i - 1`` stands for tile ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# Centre closeness is rounded before comparing so that mirror-symmetric tiles tie
# exactly and fall back to index order.
_DIST_DECIMALS = 12


def wrap_yaw(yaw: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    if -math.pi <= yaw < math.pi:
        return yaw
    wrapped = (yaw + math.pi) % TWO_PI - math.pi
    # fmod rounding can land exactly on +pi for inputs just below -pi
    return -math.pi if wrapped >= math.pi else wrapped


def clamp_pitch(pitch: float) -> float:
    return min(HALF_PI, max(-HALF_PI, pitch))


@dataclass(frozen=True)
class Viewpoint:
    """Head orientation (centre of the FoV) at time ``t``."""

    yaw: float
    pitch: float
    t: float = 0.0

    def __post_init__(self):
        if not -math.pi <= self.yaw < math.pi:
            raise ValueError(f"yaw must lie in [-pi, pi), got {self.yaw!r}")
        if not -HALF_PI <= self.pitch <= HALF_PI:
            raise ValueError(f"pitch must lie in [-pi/2, pi/2], got {self.pitch!r}")
        if self.t < 0:
            raise ValueError(f"timestamp must be non-negative, got {self.t!r}")

    @classmethod
    def from_degrees(cls, yaw_deg: float, pitch_deg: float, t: float = 0.0) -> "Viewpoint":
        return cls(wrap_yaw(math.radians(yaw_deg)), clamp_pitch(math.radians(pitch_deg)), t)

    def unit_vector(self) -> np.ndarray:
        return _unit(self.yaw, self.pitch)


def _unit(yaw, pitch):
    cp = np.cos(pitch)
    return np.stack([cp * np.cos(yaw), cp * np.sin(yaw), np.sin(pitch)], axis=-1)


@dataclass(frozen=True)
class TileGrid:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid needs at least one row and column, got {self.rows}x{self.cols}")

    @property
    def M(self) -> int:
        return self.rows * self.cols

    def row_col(self, index: int) -> tuple[int, int]:
        """1-based (row, col) of a 1-based tile index."""
        self._check_index(index)
        return (index - 1) // self.cols + 1, (index - 1) % self.cols + 1

    def index_of(self, row: int, col: int) -> int:
        if not (1 <= row <= self.rows and 1 <= col <= self.cols):
            raise IndexError(f"(row, col) = ({row}, {col}) outside {self.rows}x{self.cols} grid")
        return (row - 1) * self.cols + col

    def _check_index(self, index: int) -> None:
        if not 1 <= index <= self.M:
            raise IndexError(f"tile index {index} outside 1..{self.M}")

    def containing_tile(self, vp: Viewpoint) -> int:
        col = int((vp.yaw + math.pi) // (TWO_PI / self.cols)) + 1
        row = int((HALF_PI - vp.pitch) // (math.pi / self.rows)) + 1
        return self.index_of(min(max(row, 1), self.rows), min(max(col, 1), self.cols))

    def full(self) -> "TileSet":
        return TileSet(self, (1 << self.M) - 1)

    def empty(self) -> "TileSet":
        return TileSet(self, 0)


class TileSet:
    """Immutable subset of the tiles of one grid, stored as a bit mask."""

    __slots__ = ("grid", "bits")

    def __init__(self, grid: TileGrid, bits: int = 0):
        if bits < 0 or bits >> grid.M:
            raise ValueError(f"bit mask has bits outside the {grid.M}-tile grid")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("TileSet is immutable")

    @classmethod
    def from_indices(cls, grid: TileGrid, indices: Iterable[int]) -> "TileSet":
        bits = 0
        for i in indices:
            grid._check_index(i)
            bits |= 1 << (i - 1)
        return cls(grid, bits)

    @classmethod
    def from_mask(cls, grid: TileGrid, mask: np.ndarray) -> "TileSet":
        """Build from a boolean array of length M (position 0 is tile 1)."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (grid.M,):
            raise ValueError(f"mask must have shape ({grid.M},), got {mask.shape}")
        packed = np.packbits(mask, bitorder="little").tobytes()
        return cls(grid, int.from_bytes(packed, "little"))

    def to_mask(self) -> np.ndarray:
        nbytes = (self.grid.M + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.grid.M].astype(bool)

    def indices(self) -> list[int]:
        return list(self)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length()
            bits ^= low

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, index: object) -> bool:
        return isinstance(index, int) and 1 <= index <= self.grid.M and bool(self.bits >> (index - 1) & 1)

    def _same_grid(self, other: "TileSet") -> None:
        if not isinstance(other, TileSet):
            raise TypeError(f"expected TileSet, got {type(other).__name__}")
        if other.grid != self.grid:
            raise ValueError("tile sets belong to different grids")

    def __or__(self, other: "TileSet") -> "TileSet":
        self._same_grid(other)
        return TileSet(self.grid, self.bits | other.bits)

    def __and__(self, other: "TileSet") -> "TileSet":
        self._same_grid(other)
        return TileSet(self.grid, self.bits & other.bits)

    def __sub__(self, other: "TileSet") -> "TileSet":
        self._same_grid(other)
        return TileSet(self.grid, self.bits & ~other.bits)

    def complement(self) -> "TileSet":
        return TileSet(self.grid, ~self.bits & ((1 << self.grid.M) - 1))

    def overlap(self, other: "TileSet") -> int:
        """Inner product of the two indicator vectors."""
        self._same_grid(other)
        return (self.bits & other.bits).bit_count()

    def issubset(self, other: "TileSet") -> bool:
        self._same_grid(other)
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "TileSet") -> bool:
        self._same_grid(other)
        return self.bits & other.bits == 0

    def lowest(self, n: int) -> "TileSet":
        """The ``n`` members with the smallest tile indices."""
        bits, out = self.bits, 0
        for _ in range(n):
            if not bits:
                break
            low = bits & -bits
            out |= low
            bits ^= low
        return TileSet(self.grid, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TileSet):
            return NotImplemented
        return self.grid == other.grid and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.grid, self.bits))

    def __repr__(self) -> str:
        return f"TileSet({self.grid.rows}x{self.grid.cols}, {_ranges(list(self))})"


def _ranges(idx: list[int]) -> str:
    parts, start = [], None
    for k, i in enumerate(idx):
        if start is None:
            start = i
        if k + 1 == len(idx) or idx[k + 1] != i + 1:
            parts.append(str(start) if start == i else f"{start}-{i}")
            start = None
    return "{" + ", ".join(parts) + "}"


def tile_center(grid: TileGrid, index: int) -> Viewpoint:
    row, col = grid.row_col(index)
    yaw = -math.pi + (col - 0.5) * (TWO_PI / grid.cols)
    pitch = HALF_PI - (row - 0.5) * (math.pi / grid.rows)
    return Viewpoint(yaw, pitch)


@lru_cache(maxsize=None)
def _center_vectors(grid: TileGrid) -> np.ndarray:
    cols = np.arange(grid.M) % grid.cols + 1
    rows = np.arange(grid.M) // grid.cols + 1
    yaw = -np.pi + (cols - 0.5) * (TWO_PI / grid.cols)
    pitch = HALF_PI - (rows - 0.5) * (np.pi / grid.rows)
    vecs = _unit(yaw, pitch)
    vecs.setflags(write=False)
    return vecs


def _central_angle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # atan2 form stays accurate for both tiny and near-antipodal separations
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    dot = np.sum(u * v, axis=-1)
    return np.arctan2(cross, dot)


def angular_distance(a: Viewpoint, b: Viewpoint) -> float:
    """Great-circle angle between two viewing directions, in [0, pi]."""
    return float(_central_angle(a.unit_vector(), b.unit_vector()))


def center_distances(grid: TileGrid, vp: Viewpoint) -> np.ndarray:
    """Angular distance from ``vp`` to every tile centre (position 0 is tile 1)."""
    return _central_angle(_center_vectors(grid), vp.unit_vector())


def _center_closeness(grid: TileGrid, vp: Viewpoint) -> np.ndarray:
    # cosine of the centre distance, rounded so mirror-image tiles tie exactly
    return np.round(_center_vectors(grid) @ vp.unit_vector(), _DIST_DECIMALS)


def top_n_tiles(grid: TileGrid, vp: Viewpoint, n: int) -> TileSet:
    """The ``n`` tiles whose centres are nearest to ``vp``.

    Ties are broken by ascending tile index so the result is deterministic.
    """
    if not 1 <= n <= grid.M:
        raise ValueError(f"n must lie in 1..{grid.M}, got {n}")
    order = np.lexsort((np.arange(grid.M), -_center_closeness(grid, vp)))[:n]
    mask = np.zeros(grid.M, dtype=bool)
    mask[order] = True
    return TileSet.from_mask(grid, mask)


def _cos_radius(fov_diameter: float) -> float:
    if fov_diameter >= 360:
        return -math.inf
    return round(math.cos(math.radians(fov_diameter) / 2), _DIST_DECIMALS)


def fov_tiles(grid: TileGrid, vp: Viewpoint, fov_diameter: float) -> TileSet:
    """Tiles whose centre lies inside a circular FoV of ``fov_diameter`` degrees.

    The tile containing the viewpoint is always included.
    """
    if not 0 <= fov_diameter <= 360:
        raise ValueError(f"fov_diameter must lie in [0, 360] degrees, got {fov_diameter}")
    inside = TileSet.from_mask(grid, _center_closeness(grid, vp) >= _cos_radius(fov_diameter))
    return inside | TileSet(grid, 1 << (grid.containing_tile(vp) - 1))


def fov_masks(grid: TileGrid, yaw: np.ndarray, pitch: np.ndarray, fov_diameter: float) -> np.ndarray:
    """Vectorised :func:`fov_tiles` for many viewpoints; returns an (N, M) bool array."""
    if not 0 <= fov_diameter <= 360:
        raise ValueError(f"fov_diameter must lie in [0, 360] degrees, got {fov_diameter}")
    yaw = np.asarray(yaw, dtype=float)
    pitch = np.asarray(pitch, dtype=float)
    closeness = np.round(_unit(yaw, pitch) @ _center_vectors(grid).T, _DIST_DECIMALS)
    masks = closeness >= _cos_radius(fov_diameter)
    col = np.clip(np.floor((yaw + np.pi) / (TWO_PI / grid.cols)).astype(int), 0, grid.cols - 1)
    row = np.clip(np.floor((HALF_PI - pitch) / (np.pi / grid.rows)).astype(int), 0, grid.rows - 1)
    masks[np.arange(len(yaw)), row * grid.cols + col] = True
    return masks


@lru_cache(maxsize=None)
def _column_masks(grid: TileGrid) -> tuple[int, int, int]:
    first = sum(1 << (r * grid.cols) for r in range(grid.rows))
    last = first << (grid.cols - 1)
    return first, last, (1 << grid.M) - 1


def dilate(region: TileSet) -> TileSet:
    """``region`` plus its 8-neighbour ring.

    Columns wrap around in yaw; rows are clamped at the poles.
    """
    grid = region.grid
    first, last, full = _column_masks(grid)
    bits = region.bits
    if grid.cols == 1:
        horiz = bits
    else:
        right = ((bits & ~last) << 1) | ((bits & last) >> (grid.cols - 1))
        left = ((bits & ~first) >> 1) | ((bits & first) << (grid.cols - 1))
        horiz = bits | right | left
    out = (horiz | (horiz << grid.cols) | (horiz >> grid.cols)) & full
    return TileSet(grid, out)


def ring_expand(grid: TileGrid, seed: TileSet, count: int) -> TileSet:
    """Grow ``count`` tiles around ``seed`` ring by ring.

    Whole 8-neighbour rings are taken while they fit; the last, partial ring
    is filled in ascending tile-index order. The result excludes ``seed``.
    """
    if seed.grid != grid:
        raise ValueError("seed belongs to a different grid")
    available = grid.M - len(seed)
    if not 0 <= count <= available:
        raise ValueError(f"cannot place {count} tiles around the seed, only {available} free")
    region = seed
    taken = grid.empty()
    remaining = count
    while remaining:
        ring = dilate(region) - region
        if not ring:
            # seed was empty: start from the lowest free tiles
            ring = region.complement()
        if len(ring) <= remaining:
            step = ring
        else:
            step = ring.lowest(remaining)
        taken = taken | step
        region = region | step
        remaining -= len(step)
    return taken
