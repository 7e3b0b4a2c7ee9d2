"""Geometry-aware dataset sampling and synthetic corpus generation.

Everything here is a pure function of its inputs and an explicit
``numpy.random.Generator``; identical seeds give identical outputs. When
images are processed independently each one gets its own spawned stream,
so per-image work can be parallelized without changing results.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import AffineTransform, RotatedBox, apply_affine_box
from .normalize import GeometryRange, in_feasible

__all__ = [
    "Rng",
    "make_rng",
    "LabeledInstance",
    "AnnotatedImage",
    "SampleTarget",
    "DEFAULT_EVAL_RANGE",
    "DEFAULT_WIDE_RANGE",
    "SAMPLE_MODES",
    "target_geometry",
    "fit_transform",
    "fit_canvas",
    "apply_to_image",
    "geometry_aware_augment",
    "sample_dataset",
    "gen_rotated_benchmark",
    "gen_synthetic",
]

log = logging.getLogger(__name__)

Rng = np.random.Generator

_HALF_PI = math.pi / 2.0

# benchmark ranges for the capacity experiments: a narrow near-horizontal
# band, and a wide band covering most geometries (scale floor clamped to 1
# pixel to keep boxes valid)
DEFAULT_EVAL_RANGE = GeometryRange(20.0, 40.0, ((-math.pi / 12, math.pi / 12),))
DEFAULT_WIDE_RANGE = GeometryRange(1.0, 90.0, ((-_HALF_PI, _HALF_PI),))

SAMPLE_MODES = ("gss", "gvs", "lgss")


def make_rng(seed: int) -> Rng:
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class LabeledInstance:
    """One annotated text box; ``ignore`` marks don't-care regions."""

    box: RotatedBox
    text: str = ""
    ignore: bool = False


@dataclass(frozen=True)
class AnnotatedImage:
    id: str
    width: int
    height: int
    instances: tuple[LabeledInstance, ...] = ()

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"image dims must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "instances", tuple(self.instances))

    def live_indices(self) -> list[int]:
        return [i for i, inst in enumerate(self.instances) if not inst.ignore]


@dataclass(frozen=True)
class SampleTarget:
    """Desired short side and orientation for one transformed instance."""

    scale: float
    angle: float


def target_geometry(rng: Rng, domain: GeometryRange) -> SampleTarget:
    """Draw a target uniformly over the domain.

    The scale is uniform on [scale_min, scale_max]; the angle is uniform
    over the union of the angle intervals (intervals weighted by length).
    """
    scale = float(rng.uniform(domain.scale_min, domain.scale_max))
    total = domain.angle_span()
    u = float(rng.uniform(0.0, total)) if total > 0.0 else 0.0
    angle = domain.angle_intervals[0][0]
    for lo, hi in domain.angle_intervals:
        if u <= hi - lo:
            angle = lo + u
            break
        u -= hi - lo
    else:
        angle = domain.angle_intervals[-1][1]
    return SampleTarget(scale, angle)


def fit_canvas(core: AffineTransform, width: float, height: float) -> tuple[AffineTransform, int, int]:
    """Recenter a transform so the image of the canvas keeps positive
    coordinates; returns (final transform, new width, new height)."""
    corners = [core.apply(x, y) for x, y in ((0, 0), (width, 0), (width, height), (0, height))]
    xs = [p[0] for p in corners]
    ys = [p[1] for p in corners]
    minx, maxx = min(xs), max(xs)
    miny, maxy = min(ys), max(ys)
    full = AffineTransform.translation(-minx, -miny).compose(core)
    new_w = max(1, int(math.ceil(maxx - minx - 1e-6)))
    new_h = max(1, int(math.ceil(maxy - miny - 1e-6)))
    return full, new_w, new_h


def fit_transform(inst: LabeledInstance, target: SampleTarget, img: AnnotatedImage) -> AffineTransform:
    """Similarity that puts ``inst`` at the target geometry.

    Scales by target.scale / box.h and rotates by the angle difference
    about the image center, then translates so the transformed canvas sits
    at the origin. Aspect ratios of all instances are preserved.
    """
    s = target.scale / inst.box.h
    phi = target.angle - inst.box.theta
    core = AffineTransform.similarity(s, phi, (img.width / 2.0, img.height / 2.0))
    full, _, _ = fit_canvas(core, img.width, img.height)
    return full


def apply_to_image(img: AnnotatedImage, core: AffineTransform, new_id: str | None = None) -> AnnotatedImage:
    """Transform every instance and expand the canvas to the image extent."""
    full, new_w, new_h = fit_canvas(core, img.width, img.height)
    instances = tuple(
        replace(inst, box=apply_affine_box(full, inst.box)) for inst in img.instances
    )
    return AnnotatedImage(new_id or img.id, new_w, new_h, instances)


def _retarget(img: AnnotatedImage, rng: Rng, domain: GeometryRange, new_id: str | None = None) -> AnnotatedImage | None:
    """Pick one live instance and transform the whole image so it lands on
    a fresh target drawn from ``domain``; None if nothing can be picked."""
    live = img.live_indices()
    if not live:
        return None
    inst = img.instances[live[int(rng.integers(len(live)))]]
    target = target_geometry(rng, domain)
    s = target.scale / inst.box.h
    phi = target.angle - inst.box.theta
    core = AffineTransform.similarity(s, phi, (img.width / 2.0, img.height / 2.0))
    return apply_to_image(img, core, new_id)


def geometry_aware_augment(
    img: AnnotatedImage,
    rng: Rng,
    domain: GeometryRange,
    k: int = 7,
    branch_ranges: tuple[GeometryRange, ...] | None = None,
) -> list[AnnotatedImage]:
    """Produce k rotated/resized variants of an image.

    Each variant picks one random non-ignore instance and retargets it to a
    fresh uniform draw from ``domain``; together with the original this
    feeds every normalization branch in expectation. When ``branch_ranges``
    is given the variants cycle through those ranges instead (targeted
    mode, off by default). Images with only ignore instances yield [].
    """
    if not img.live_indices():
        return []
    out = []
    for n in range(k):
        dom = domain if branch_ranges is None else branch_ranges[n % len(branch_ranges)]
        variant = _retarget(img, rng, dom, new_id=f"{img.id}_g{n + 1}")
        if variant is not None:
            out.append(variant)
    return out


def sample_dataset(
    mode: str,
    data: list[AnnotatedImage],
    eval_range: GeometryRange = DEFAULT_EVAL_RANGE,
    wide_range: GeometryRange = DEFAULT_WIDE_RANGE,
    rng: Rng | None = None,
) -> list[AnnotatedImage]:
    """Build a training corpus under one of three sampling strategies.

    gss   every image is transformed so one randomly chosen instance lands
          uniformly inside ``eval_range`` (all instances reused);
    gvs   like gss but targets are drawn from the much wider
          ``wide_range``;
    lgss  no transform: keeps only images that already contain an instance
          inside ``eval_range`` and marks their out-of-range instances as
          ignore.

    Images without a selectable instance are dropped under gss/gvs.
    """
    if mode not in SAMPLE_MODES:
        raise ValueError(f"unknown sampling mode {mode!r}, expected one of {SAMPLE_MODES}")
    if mode == "lgss":
        out = []
        for img in data:
            in_range = [
                not inst.ignore and in_feasible(eval_range, inst.box) for inst in img.instances
            ]
            if not any(in_range):
                continue
            instances = tuple(
                inst if ok else replace(inst, ignore=True)
                for inst, ok in zip(img.instances, in_range)
            )
            out.append(replace(img, instances=instances))
        return out

    if rng is None:
        raise ValueError("gss/gvs sampling needs an rng")
    domain = eval_range if mode == "gss" else wide_range
    out = []
    for img, child in zip(data, rng.spawn(len(data))):
        variant = _retarget(img, child, domain)
        if variant is not None:
            out.append(variant)
    return out


def gen_rotated_benchmark(data: list[AnnotatedImage], rng: Rng) -> list[AnnotatedImage]:
    """Rotate every image by an independent uniform angle in [-pi/2, pi/2).

    The canvas expands to the rotated extent, box sides are untouched
    (pure rotation) and ignore flags are preserved; the resulting corpus
    has a flat orientation distribution.
    """
    out = []
    for img, child in zip(data, rng.spawn(len(data))):
        phi = float(child.uniform(-_HALF_PI, _HALF_PI))
        core = AffineTransform.similarity(1.0, phi, (img.width / 2.0, img.height / 2.0))
        out.append(apply_to_image(img, core))
    return out


def _box_fits(h: float, w: float, theta: float, width: int, height: int) -> tuple[float, float] | None:
    """Half extents of the rotated box, or None if it cannot fit."""
    c = abs(math.cos(theta))
    s = abs(math.sin(theta))
    ex = (w * c + h * s) / 2.0
    ey = (w * s + h * c) / 2.0
    if 2.0 * ex >= width or 2.0 * ey >= height:
        return None
    return ex, ey


def gen_synthetic(
    rng: Rng,
    n_images: int,
    per_image: int,
    domain: GeometryRange,
    canvas: tuple[int, int] = (1280, 960),
    max_tries: int = 60,
    max_overlap: float = 0.05,
) -> list[AnnotatedImage]:
    """Generate a corpus of non-overlapping boxes uniform over ``domain``.

    Every box's short side and angle are drawn by ``target_geometry``;
    aspect ratios are uniform in [1.2, 5]. Boxes are placed fully inside
    the canvas with pairwise IoU below ``max_overlap``; if a placement
    cannot be found within ``max_tries`` attempts the image simply gets
    fewer boxes and a warning is logged.
    """
    if n_images <= 0 or per_image <= 0:
        raise ValueError("n_images and per_image must be positive")
    width, height = canvas
    out = []
    from .geometry import rotated_iou

    for i in range(n_images):
        placed: list[RotatedBox] = []
        for j in range(per_image):
            box = None
            for _ in range(max_tries):
                t = target_geometry(rng, domain)
                ratio = float(rng.uniform(1.2, 5.0))
                h = t.scale
                w = min(h * ratio, 0.8 * min(width, height))
                if w < h:
                    w = h
                ext = _box_fits(h, w, t.angle, width, height)
                if ext is None:
                    continue
                ex, ey = ext
                cx = float(rng.uniform(ex, width - ex))
                cy = float(rng.uniform(ey, height - ey))
                cand = RotatedBox(cx, cy, h, w, t.angle)
                if all(rotated_iou(cand, other) < max_overlap for other in placed):
                    box = cand
                    break
            if box is None:
                log.warning("image %d: placed %d of %d boxes", i, len(placed), per_image)
                break
            placed.append(box)
        instances = tuple(
            LabeledInstance(b, text=f"t{k:02d}") for k, b in enumerate(placed)
        )
        out.append(AnnotatedImage(f"img_{i + 1:04d}", width, height, instances))
    return out
