"""Multi-branch scale/orientation normalization.

A branch pairs one scale unit (identity, half or quarter resolution via
stride-2 max pooling) with one orientation unit (identity, quarter-turn
rotation, vertical-coordinate flip, or rotation followed by flip). Each
branch owns a feasible geometry range; applying the branch transform maps
boxes inside that range into a shared canonical range where a single
detector can operate. Box transforms are exact and exactly invertible;
grid transforms apply the same geometry to feature-map tensors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import RotatedBox, normalize_angle

__all__ = [
    "ScaleKind",
    "OrientKind",
    "GeometryRange",
    "BranchConfig",
    "NormalizerConfig",
    "FeatureGrid",
    "CoverageError",
    "scale_grid",
    "orient_grid",
    "forward_box",
    "backward_box",
    "in_feasible",
    "canonical_range_of",
    "branch_image_range",
    "transformed_canvas",
    "check_coverage",
]

_HALF_PI = math.pi / 2.0
ANGLE_TOL = 1e-12


class ScaleKind(enum.Enum):
    """Resolution branch: identity, half or quarter downsampling."""

    FULL = "s"
    HALF = "s1/2"
    QUARTER = "s1/4"

    @property
    def factor(self) -> float:
        return _SCALE_FACTORS[self]


_SCALE_FACTORS = {ScaleKind.FULL: 1.0, ScaleKind.HALF: 0.5, ScaleKind.QUARTER: 0.25}


class OrientKind(enum.Enum):
    """Orientation branch: identity, quarter turn, flip, or turn+flip."""

    NONE = "o"
    ROT = "o_r"
    FLIP = "o_f"
    ROT_FLIP = "o_rf"


@dataclass(frozen=True)
class GeometryRange:
    """Scale bounds on the short side plus a union of closed angle intervals.

    Angle intervals live in [-pi/2, pi/2], must be ordered and must not
    overlap (touching endpoints are fine). Membership tests treat interval
    endpoints as closed with a 1e-12 tolerance and identify -pi/2 with
    pi/2 (boxes are symmetric under half turns).
    """

    scale_min: float
    scale_max: float
    angle_intervals: tuple[tuple[float, float], ...] = ((-_HALF_PI, _HALF_PI),)

    def __post_init__(self) -> None:
        smin = float(self.scale_min)
        smax = float(self.scale_max)
        if not (math.isfinite(smin) and math.isfinite(smax)):
            raise ValueError("scale bounds must be finite")
        if not 0.0 < smin <= smax:
            raise ValueError(f"need 0 < scale_min <= scale_max, got [{smin}, {smax}]")
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.angle_intervals)
        if not ivs:
            raise ValueError("at least one angle interval is required")
        for lo, hi in ivs:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("angle bounds must be finite")
            if lo > hi:
                raise ValueError(f"angle interval out of order: [{lo}, {hi}]")
            if lo < -_HALF_PI - ANGLE_TOL or hi > _HALF_PI + ANGLE_TOL:
                raise ValueError(f"angle interval outside [-pi/2, pi/2]: [{lo}, {hi}]")
        ordered = tuple(sorted(ivs))
        for (_, hi0), (lo1, _) in zip(ordered, ordered[1:]):
            if lo1 < hi0 - ANGLE_TOL:
                raise ValueError("angle intervals must not overlap")
        object.__setattr__(self, "scale_min", smin)
        object.__setattr__(self, "scale_max", smax)
        object.__setattr__(self, "angle_intervals", ordered)

    def contains_scale(self, h: float, tol: float = ANGLE_TOL) -> bool:
        return self.scale_min - tol <= h <= self.scale_max + tol

    def contains_angle(self, theta: float, tol: float = ANGLE_TOL) -> bool:
        for cand in (theta, theta + math.pi, theta - math.pi):
            for lo, hi in self.angle_intervals:
                if lo - tol <= cand <= hi + tol:
                    return True
        return False

    def angle_span(self) -> float:
        return sum(hi - lo for lo, hi in self.angle_intervals)


def in_feasible(r: GeometryRange, box: RotatedBox) -> bool:
    """True iff the box's short side and orientation are inside the range."""
    return r.contains_scale(box.h) and r.contains_angle(box.theta)


@dataclass(frozen=True)
class BranchConfig:
    """One normalization branch and the geometry range it is in charge of."""

    scale: ScaleKind
    orient: OrientKind
    feasible: GeometryRange

    @property
    def name(self) -> str:
        return f"{self.scale.value},{self.orient.value}"


class CoverageError(ValueError):
    """The branches do not cover the configured global geometry domain."""


@dataclass(frozen=True)
class NormalizerConfig:
    """A set of branches expected to cover a global geometry domain.

    Construction does not verify coverage (partial configurations are
    useful in experiments); ``check_coverage`` performs the lattice check
    and config loading always runs it.
    """

    branches: tuple[BranchConfig, ...]
    global_domain: GeometryRange = field(default_factory=lambda: GeometryRange(1.0, 1e4))

    def __post_init__(self) -> None:
        branches = tuple(self.branches)
        if not branches:
            raise ValueError("at least one branch is required")
        object.__setattr__(self, "branches", branches)


def check_coverage(cfg: NormalizerConfig, samples: int = 100) -> None:
    """Verify every (scale, angle) lattice point of the domain is feasible
    for at least one branch; raises CoverageError on the first gap."""
    dom = cfg.global_domain
    for i in range(samples):
        f = i / (samples - 1) if samples > 1 else 0.0
        h = dom.scale_min + f * (dom.scale_max - dom.scale_min)
        for lo, hi in dom.angle_intervals:
            for j in range(samples):
                g = j / (samples - 1) if samples > 1 else 0.0
                theta = lo + g * (hi - lo)
                if any(
                    b.feasible.contains_scale(h) and b.feasible.contains_angle(theta)
                    for b in cfg.branches
                ):
                    continue
                raise CoverageError(
                    f"no branch covers scale={h:.6g}, angle={theta:.6g}; "
                    "the union of feasible ranges must contain the global domain"
                )


# ------------------------------------------------------------------ grids


@dataclass(frozen=True)
class FeatureGrid:
    """Channels x height x width value grid standing in for feature maps."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3:
            raise ValueError(f"grid must be C x H x W, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


def _half_pool(v: np.ndarray) -> np.ndarray:
    c, h, w = v.shape
    if h < 2 or w < 2:
        raise ValueError(f"grid too small to pool: {h}x{w}")
    h2, w2 = h // 2, w // 2
    # stride-2 2x2 max pool; a trailing odd row/column is dropped
    return v[:, : h2 * 2, : w2 * 2].reshape(c, h2, 2, w2, 2).max(axis=(2, 4))


def scale_grid(kind: ScaleKind, g: FeatureGrid) -> FeatureGrid:
    """Downsample a grid per the scale unit (max pooling, per channel)."""
    if kind is ScaleKind.FULL:
        return g
    v = _half_pool(g.values)
    if kind is ScaleKind.QUARTER:
        v = _half_pool(v)
    return FeatureGrid(v)


def orient_grid(kind: OrientKind, g: FeatureGrid) -> FeatureGrid:
    """Rotate/flip a grid per the orientation unit.

    ROT is a quarter turn clockwise on screen: out[c, i, j] = in[c, H-1-j, i]
    with the output transposed to W x H. FLIP mirrors the vertical
    coordinate: out[c, i, j] = in[c, H-1-i, j]. ROT_FLIP applies ROT then
    FLIP.
    """
    if kind is OrientKind.NONE:
        return g
    v = g.values
    if kind in (OrientKind.ROT, OrientKind.ROT_FLIP):
        v = np.rot90(v, k=-1, axes=(1, 2))
    if kind in (OrientKind.FLIP, OrientKind.ROT_FLIP):
        v = v[:, ::-1, :]
    return FeatureGrid(v)


# ------------------------------------------------------------------ boxes


def forward_box(branch: BranchConfig, box: RotatedBox, height: float, width: float) -> RotatedBox:
    """Map a box annotation into a branch's transformed frame.

    ``height``/``width`` are the canvas dimensions of the input frame.
    Coordinates and sides scale by the branch's resolution factor, then the
    orientation unit remaps position and angle on the scaled canvas.
    """
    f = branch.scale.factor
    x = box.cx * f
    y = box.cy * f
    h = box.h * f
    w = box.w * f
    hf = height * f
    wf = width * f
    o = branch.orient
    if o is OrientKind.NONE:
        nx, ny, nt = x, y, box.theta
    elif o is OrientKind.ROT:
        nx, ny, nt = hf - y, x, box.theta + _HALF_PI
    elif o is OrientKind.FLIP:
        nx, ny, nt = x, hf - y, -box.theta
    else:
        nx, ny, nt = hf - y, wf - x, -box.theta + _HALF_PI
    return RotatedBox(nx, ny, h, w, nt)


def backward_box(branch: BranchConfig, box: RotatedBox, height: float, width: float) -> RotatedBox:
    """Exact inverse of ``forward_box``; ``height``/``width`` are the
    dimensions of the ORIGINAL canvas."""
    f = branch.scale.factor
    hf = height * f
    wf = width * f
    o = branch.orient
    if o is OrientKind.NONE:
        x, y, t = box.cx, box.cy, box.theta
    elif o is OrientKind.ROT:
        x, y, t = box.cy, hf - box.cx, box.theta - _HALF_PI
    elif o is OrientKind.FLIP:
        x, y, t = box.cx, hf - box.cy, -box.theta
    else:
        x, y, t = wf - box.cy, hf - box.cx, _HALF_PI - box.theta
    return RotatedBox(x / f, y / f, box.h / f, box.w / f, t)


def transformed_canvas(branch: BranchConfig, height: float, width: float) -> tuple[float, float]:
    """(height, width) of the branch frame for an input canvas."""
    f = branch.scale.factor
    if branch.orient in (OrientKind.ROT, OrientKind.ROT_FLIP):
        return width * f, height * f
    return height * f, width * f


def _map_angle_interval(o: OrientKind, lo: float, hi: float) -> list[tuple[float, float]]:
    """Image of a closed angle interval under an orientation unit, split
    into pieces that stay inside [-pi/2, pi/2]."""
    if o is OrientKind.NONE:
        return [(lo, hi)]
    if o is OrientKind.FLIP:
        return [(-hi, -lo)]
    if o is OrientKind.ROT:
        # theta + pi/2, wrapped
        if hi <= 0.0:
            return [(lo + _HALF_PI, hi + _HALF_PI)]
        if lo >= 0.0:
            return [(lo - _HALF_PI, hi - _HALF_PI)]
        return [(lo + _HALF_PI, _HALF_PI), (-_HALF_PI, hi - _HALF_PI)]
    # ROT_FLIP: pi/2 - theta lands in [0, pi]; fold anything past pi/2
    a = _HALF_PI - hi
    b = _HALF_PI - lo
    pieces = []
    if a < _HALF_PI:
        pieces.append((a, min(b, _HALF_PI)))
    if b > _HALF_PI:
        pieces.append((max(a, _HALF_PI) - math.pi, b - math.pi))
    return pieces


def branch_image_range(branch: BranchConfig) -> GeometryRange:
    """Image of a branch's feasible range under its own transform."""
    f = branch.scale.factor
    pieces: list[tuple[float, float]] = []
    for lo, hi in branch.feasible.angle_intervals:
        pieces.extend(_map_angle_interval(branch.orient, lo, hi))
    pieces.sort()
    merged: list[tuple[float, float]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1] + ANGLE_TOL:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return GeometryRange(
        branch.feasible.scale_min * f,
        branch.feasible.scale_max * f,
        tuple(merged),
    )


def canonical_range_of(cfg: NormalizerConfig) -> GeometryRange:
    """Range the shared detector sees: the union of every branch's image,
    collapsed to a single [min, max] interval per axis."""
    smin = math.inf
    smax = -math.inf
    amin = math.inf
    amax = -math.inf
    for b in cfg.branches:
        img = branch_image_range(b)
        smin = min(smin, img.scale_min)
        smax = max(smax, img.scale_max)
        for lo, hi in img.angle_intervals:
            amin = min(amin, lo)
            amax = max(amax, hi)
    return GeometryRange(smin, smax, ((amin, amax),))
