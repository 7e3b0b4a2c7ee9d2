"""Geometry normalization toolkit for oriented-box text detection.

Subpackages cover rotated-box geometry, multi-branch scale/orientation
normalization with exact back-projection, geometry-aware dataset sampling,
a capacity-limited detector simulator with rotated NMS, an ICDAR-style
evaluator, and file/CLI plumbing.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .geometry import (
    AffineTransform,
    Quad,
    RotatedBox,
    apply_affine_box,
    normalize_angle,
    quad_to_rbox,
    rbox_to_quad,
    rotated_iou,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "AffineTransform",
    "Quad",
    "RotatedBox",
    "apply_affine_box",
    "normalize_angle",
    "quad_to_rbox",
    "rbox_to_quad",
    "rotated_iou",
    "__version__",
]
