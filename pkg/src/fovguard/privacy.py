"""Spatial degree of privacy (SDoP), camouflage generation and FoV-leakage rules."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .geometry import TileGrid, TileSet, ring_expand

# Absorbs float noise in rho_s * (M - n_fov) so that e.g. 16/52 * 52 never
# ceils to 17.
_CEIL_EPS = 1e-9


@dataclass(frozen=True)
class PrivacySpec:
    rho_s: float

    def __post_init__(self):
        if not 0 <= self.rho_s <= 1:
            raise ValueError(f"rho_s must lie in [0, 1], got {self.rho_s!r}")


def _check_counts(M: int, n_fov: int) -> None:
    if not 1 <= n_fov <= M:
        raise ValueError(f"n_fov must lie in 1..M={M}, got {n_fov}")


def camouflage_count(spec: PrivacySpec, M: int, n_fov: int) -> int:
    """Number of camouflaged tiles, ceil(rho_s * (M - n_fov))."""
    _check_counts(M, n_fov)
    free = M - n_fov
    if isinstance(spec.rho_s, Fraction):
        return math.ceil(spec.rho_s * free)
    return max(0, math.ceil(spec.rho_s * free - _CEIL_EPS))


def overall_tile_count(spec: PrivacySpec, M: int, n_fov: int) -> int:
    """Tiles to render and deliver per segment: predicted FoV plus camouflage."""
    return n_fov + camouflage_count(spec, M, n_fov)


def sdop_of(n_cf: int, M: int, n_fov: int) -> float:
    """Normalised number of camouflaged tiles."""
    _check_counts(M, n_fov)
    if M == n_fov:
        raise ValueError("SDoP is undefined when the FoV covers the whole panorama (M == n_fov)")
    if not 0 <= n_cf <= M - n_fov:
        raise ValueError(f"n_cf must lie in 0..{M - n_fov}, got {n_cf}")
    return n_cf / (M - n_fov)


class CamouflageStrategy(enum.Enum):
    RING = "ring"


def generate_camouflage(
    grid: TileGrid,
    predicted: TileSet,
    spec: PrivacySpec,
    n_fov: int,
    strategy: CamouflageStrategy = CamouflageStrategy.RING,
) -> TileSet:
    """Camouflaged tile requests hiding ``predicted`` at the required SDoP."""
    if len(predicted) != n_fov:
        raise ValueError(f"predicted set has {len(predicted)} tiles, expected n_fov={n_fov}")
    if grid.M == n_fov:
        raise ValueError("SDoP is undefined when the FoV covers the whole panorama (M == n_fov)")
    count = camouflage_count(spec, grid.M, n_fov)
    if strategy is CamouflageStrategy.RING:
        return ring_expand(grid, predicted, count)
    raise ValueError(f"unknown camouflage strategy {strategy!r}")


# --------------------------------------------------------------------------
# Deployment classification
# --------------------------------------------------------------------------


class PredictionStyle(enum.Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"


class Site(enum.Enum):
    MEC = "mec"
    HMD = "hmd"
    NONE = "none"


class Upload(enum.Enum):
    REAL_TILES = "real_tiles"
    PREDICTED_TILES = "predicted_tiles"
    REAL_VIEWPOINTS = "real_viewpoints"
    PREDICTED_VIEWPOINTS = "predicted_viewpoints"
    MODEL_PARAMS = "model_params"
    NONE = "none"


class Verdict(enum.Enum):
    PROTECTED = "protected"
    LEAKED = "leaked"


_VIEWPOINTS = {Upload.REAL_VIEWPOINTS, Upload.PREDICTED_VIEWPOINTS}
_TILES = {Upload.REAL_TILES, Upload.PREDICTED_TILES}


class InconsistentCaseError(ValueError):
    pass


@dataclass(frozen=True)
class DeploymentCase:
    """Where a predictor is trained and run, and what the HMD uploads for each stage."""

    prediction_style: PredictionStyle
    train_site: Site
    predict_site: Site
    training_upload: Upload
    prediction_upload: Upload
    camouflage_enabled: bool

    def __post_init__(self):
        real = Upload.REAL_TILES if self.prediction_style is PredictionStyle.DIRECT else Upload.REAL_VIEWPOINTS
        expected_training = {
            Site.MEC: {real},
            Site.HMD: {Upload.MODEL_PARAMS},
            Site.NONE: {Upload.NONE},
        }[self.train_site]
        if self.training_upload not in expected_training:
            raise InconsistentCaseError(
                f"training at {self.train_site.value} with {self.prediction_style.value} prediction "
                f"uploads {_names(expected_training)}, not {self.training_upload.value}"
            )
        if self.predict_site is Site.NONE:
            raise InconsistentCaseError("predict_site must be mec or hmd")
        if self.predict_site is Site.MEC:
            expected_prediction = {real}
        elif self.prediction_style is PredictionStyle.DIRECT:
            expected_prediction = {Upload.PREDICTED_TILES}
        else:
            expected_prediction = {Upload.PREDICTED_TILES, Upload.PREDICTED_VIEWPOINTS}
        if self.prediction_upload not in expected_prediction:
            raise InconsistentCaseError(
                f"predicting at {self.predict_site.value} with {self.prediction_style.value} prediction "
                f"uploads {_names(expected_prediction)}, not {self.prediction_upload.value}"
            )

    @classmethod
    def standard(cls, style: PredictionStyle, train_site: Site, predict_site: Site, camouflage: bool) -> "DeploymentCase":
        """The case with the uploads implied by the sites.

        An indirect HMD predictor uploads predicted tile requests when
        camouflage is enabled (viewpoints cannot be camouflaged) and
        predicted viewpoints otherwise.
        """
        direct = style is PredictionStyle.DIRECT
        real = Upload.REAL_TILES if direct else Upload.REAL_VIEWPOINTS
        training = {Site.MEC: real, Site.HMD: Upload.MODEL_PARAMS, Site.NONE: Upload.NONE}[train_site]
        if predict_site is Site.MEC:
            prediction = real
        elif direct or camouflage:
            prediction = Upload.PREDICTED_TILES
        else:
            prediction = Upload.PREDICTED_VIEWPOINTS
        return cls(style, train_site, predict_site, training, prediction, camouflage)


def _names(uploads) -> str:
    return " or ".join(sorted(u.value for u in uploads))


def classify_deployment(case: DeploymentCase) -> tuple[Verdict, Verdict]:
    """(training, prediction) verdicts for a deployment.

    Viewpoints can never be hidden by camouflage; tile requests are hidden
    exactly when camouflage is enabled. A stage that uploads nothing, or
    only model parameters, is protected.
    """
    return _stage_verdict(case.training_upload, case.camouflage_enabled), _stage_verdict(
        case.prediction_upload, case.camouflage_enabled
    )


def _stage_verdict(upload: Upload, camouflage: bool) -> Verdict:
    if upload in _VIEWPOINTS:
        return Verdict.LEAKED
    if upload in _TILES and not camouflage:
        return Verdict.LEAKED
    return Verdict.PROTECTED


# The twelve deployments, in table order: (row, style, train site, predict site).
REFERENCE_CASES: tuple[tuple[int, PredictionStyle, Site, Site], ...] = tuple(
    (6 * s + k + 1, style, train, predict)
    for s, style in enumerate((PredictionStyle.DIRECT, PredictionStyle.INDIRECT))
    for k, (train, predict) in enumerate(
        [
            (Site.MEC, Site.MEC),
            (Site.MEC, Site.HMD),
            (Site.HMD, Site.HMD),
            (Site.HMD, Site.MEC),
            (Site.NONE, Site.MEC),
            (Site.NONE, Site.HMD),
        ]
    )
)


def reference_case(row: int, camouflage: bool) -> DeploymentCase:
    for r, style, train, predict in REFERENCE_CASES:
        if r == row:
            return DeploymentCase.standard(style, train, predict, camouflage)
    raise ValueError(f"case number must lie in 1..12, got {row}")
