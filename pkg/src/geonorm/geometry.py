"""Rotated-rectangle primitives in image coordinates.

Conventions used throughout the package:

* image coordinates: x grows rightward, y grows downward (pixel space);
* ``RotatedBox.w`` runs along the edge at angle ``theta`` from the x axis
  and is always the long side, ``h`` is the short side;
* ``theta`` is measured with ``atan2(dy, dx)``, so positive angles turn
  from +x toward +y (clockwise on screen), canonical domain [-pi/2, pi/2);
* quads are stored clockwise on screen, which makes the shoelace sum
  positive in this coordinate system.

All types are immutable values and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._kernels import rbox_iou as _rbox_iou

__all__ = [
    "RotatedBox",
    "Quad",
    "AffineTransform",
    "normalize_angle",
    "angle_distance",
    "quad_to_rbox",
    "rbox_to_quad",
    "rotated_iou",
    "apply_affine_box",
]

_HALF_PI = math.pi / 2.0


def normalize_angle(theta: float) -> float:
    """Reduce an orientation to the canonical interval [-pi/2, pi/2).

    Rectangles are symmetric under half turns, so orientations live modulo
    pi; the open endpoint pi/2 wraps to -pi/2. Idempotent.
    """
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    t = math.remainder(theta, math.pi)
    if t >= _HALF_PI:
        t -= math.pi
    return t


def angle_distance(a: float, b: float) -> float:
    """Distance between two orientations modulo pi, in [0, pi/2]."""
    return abs(math.remainder(a - b, math.pi))


@dataclass(frozen=True)
class RotatedBox:
    """Center, side lengths and orientation of a rotated rectangle.

    Construction canonicalizes: ``theta`` is reduced to [-pi/2, pi/2) and
    if ``h > w`` the sides are swapped while ``theta`` turns by pi/2.
    Squares keep the angle they were given (ties never swap).
    """

    cx: float
    cy: float
    h: float
    w: float
    theta: float

    def __post_init__(self) -> None:
        cx = float(self.cx)
        cy = float(self.cy)
        h = float(self.h)
        w = float(self.w)
        t = float(self.theta)
        for name, v in (("cx", cx), ("cy", cy), ("h", h), ("w", w), ("theta", t)):
            if not math.isfinite(v):
                raise ValueError(f"RotatedBox.{name} must be finite, got {v!r}")
        if h <= 0.0 or w <= 0.0:
            raise ValueError(f"box sides must be positive, got h={h}, w={w}")
        if h > w:
            h, w = w, h
            t = t + _HALF_PI
        object.__setattr__(self, "cx", cx)
        object.__setattr__(self, "cy", cy)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "theta", normalize_angle(t))

    @property
    def area(self) -> float:
        return self.h * self.w

    def corners(self) -> tuple[tuple[float, float], ...]:
        """Corner coordinates, clockwise on screen.

        The first corner is center - w/2*u - h/2*v where u points along
        the w edge and v is u turned by +pi/2.
        """
        c = math.cos(self.theta)
        s = math.sin(self.theta)
        ux = c * (self.w * 0.5)
        uy = s * (self.w * 0.5)
        vx = -s * (self.h * 0.5)
        vy = c * (self.h * 0.5)
        return (
            (self.cx - ux - vx, self.cy - uy - vy),
            (self.cx + ux - vx, self.cy + uy - vy),
            (self.cx + ux + vx, self.cy + uy + vy),
            (self.cx - ux + vx, self.cy - uy + vy),
        )


def _signed_area2(vertices) -> float:
    acc = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return acc


def _segments_cross(p, q, r, s) -> bool:
    """True if open segments pq and rs properly intersect."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p, q, r)
    d2 = orient(p, q, s)
    d3 = orient(r, s, p)
    d4 = orient(r, s, q)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != d2 and d3 != d4


@dataclass(frozen=True)
class Quad:
    """Four-corner polygon stored clockwise on screen, positive area."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        vs = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(vs) != 4:
            raise ValueError(f"quad needs exactly 4 vertices, got {len(vs)}")
        for x, y in vs:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("quad vertices must be finite")
        if _signed_area2(vs) <= 0.0:
            raise ValueError("quad must be clockwise in image coordinates with positive area")
        if _segments_cross(vs[0], vs[1], vs[2], vs[3]) or _segments_cross(vs[1], vs[2], vs[3], vs[0]):
            raise ValueError("quad must not self-intersect")
        object.__setattr__(self, "vertices", vs)

    @property
    def area(self) -> float:
        return 0.5 * _signed_area2(self.vertices)


def _convex_hull(points):
    """Monotone-chain convex hull; returns vertices without duplicates."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                ox, oy = out[-2]
                ax, ay = out[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def quad_to_rbox(q: Quad) -> RotatedBox:
    """Minimum-area enclosing rotated rectangle of a quad.

    Rotating calipers over the convex hull: the optimum is aligned with one
    of the hull edges. Square results snap their orientation to the input
    quad's first edge so exact rectangles round-trip through
    ``rbox_to_quad``/``quad_to_rbox`` regardless of aspect ratio.
    """
    hull = _convex_hull(q.vertices)
    if len(hull) < 3:
        raise ValueError("degenerate quad has no enclosing rectangle")
    # project relative to the hull centroid: extents are translation
    # invariant and small boxes far from the origin would otherwise lose
    # their area comparisons to cancellation noise
    mx = sum(p[0] for p in hull) / len(hull)
    my = sum(p[1] for p in hull) / len(hull)
    best = None
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        ex = bx - ax
        ey = by - ay
        ln = math.sqrt(ex * ex + ey * ey)
        ux = ex / ln
        uy = ey / ln
        smin = smax = tmin = tmax = 0.0
        started = False
        for px, py in hull:
            rx = px - mx
            ry = py - my
            sp = rx * ux + ry * uy
            tp = -rx * uy + ry * ux
            if not started:
                smin = smax = sp
                tmin = tmax = tp
                started = True
                continue
            if sp < smin:
                smin = sp
            elif sp > smax:
                smax = sp
            if tp < tmin:
                tmin = tp
            elif tp > tmax:
                tmax = tp
        area = (smax - smin) * (tmax - tmin)
        if best is None or area < best[0]:
            best = (area, ux, uy, smin, smax, tmin, tmax)

    _, ux, uy, smin, smax, tmin, tmax = best
    along = smax - smin
    across = tmax - tmin
    sc = 0.5 * (smin + smax)
    tc = 0.5 * (tmin + tmax)
    cx = mx + sc * ux - tc * uy
    cy = my + sc * uy + tc * ux
    theta = math.atan2(uy, ux)
    # corner coordinates carry noise on the order of ulp(center), so the
    # square test must tolerate that in addition to relative extent noise
    snap_tol = 1e-12 * max(along, across) + 1e-13 * (abs(mx) + abs(my))
    if abs(along - across) <= snap_tol:
        # square: orientation is ambiguous by a quarter turn; follow the
        # quad's own first edge, and equalize the sides so the constructor
        # cannot swap them back
        (x0, y0), (x1, y1) = q.vertices[0], q.vertices[1]
        first = math.atan2(y1 - y0, x1 - x0)
        if angle_distance(theta + _HALF_PI, first) < angle_distance(theta, first):
            theta += _HALF_PI
        along = across = 0.5 * (along + across)
    return RotatedBox(cx, cy, across, along, theta)


def rbox_to_quad(b: RotatedBox) -> Quad:
    """Corner quad of a box, clockwise from the corner at -w/2,-h/2."""
    return Quad(b.corners())


def rotated_iou(a: RotatedBox, b: RotatedBox) -> float:
    """Exact intersection-over-union via convex polygon clipping."""
    return _rbox_iou(a.cx, a.cy, a.h, a.w, a.theta, b.cx, b.cy, b.h, b.w, b.theta)


@dataclass(frozen=True)
class AffineTransform:
    """2x3 affine map from source to destination pixel coordinates.

    Stored row-major as (m00, m01, m02, m10, m11, m12):

        x' = m00*x + m01*y + m02
        y' = m10*x + m11*y + m12

    Boxes only stay boxes under isotropic similarities (uniform scale plus
    rotation plus translation), which is what the constructors produce.
    """

    m: tuple[float, float, float, float, float, float]

    def __post_init__(self) -> None:
        m = tuple(float(v) for v in self.m)
        if len(m) != 6:
            raise ValueError("affine matrix needs 6 entries")
        for v in m:
            if not math.isfinite(v):
                raise ValueError("affine matrix entries must be finite")
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls((1.0, 0.0, 0.0, 0.0, 1.0, 0.0))

    @classmethod
    def translation(cls, tx: float, ty: float) -> "AffineTransform":
        return cls((1.0, 0.0, tx, 0.0, 1.0, ty))

    @classmethod
    def similarity(cls, scale: float, angle: float, center: tuple[float, float] = (0.0, 0.0)) -> "AffineTransform":
        """Rotate by ``angle`` and scale by ``scale`` about ``center``."""
        if scale <= 0.0:
            raise ValueError(f"scale must be positive, got {scale}")
        c = scale * math.cos(angle)
        s = scale * math.sin(angle)
        px, py = center
        return cls((c, -s, px - c * px + s * py, s, c, py - s * px - c * py))

    def apply(self, x: float, y: float) -> tuple[float, float]:
        m = self.m
        return (m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5])

    def compose(self, other: "AffineTransform") -> "AffineTransform":
        """self after other: (self @ other)(p) == self(other(p))."""
        a = self.m
        b = other.m
        return AffineTransform(
            (
                a[0] * b[0] + a[1] * b[3],
                a[0] * b[1] + a[1] * b[4],
                a[0] * b[2] + a[1] * b[5] + a[2],
                a[3] * b[0] + a[4] * b[3],
                a[3] * b[1] + a[4] * b[4],
                a[3] * b[2] + a[4] * b[5] + a[5],
            )
        )

    def scale_rotation(self) -> tuple[float, float]:
        """(isotropic scale factor, rotation angle) of the linear part.

        Raises if the linear part is not a positive similarity.
        """
        m00, m01, _, m10, m11, _ = self.m
        s = math.sqrt(m00 * m00 + m10 * m10)
        if s == 0.0:
            raise ValueError("singular transform")
        tol = 1e-9 * s
        if abs(m00 - m11) > tol or abs(m01 + m10) > tol:
            raise ValueError("transform is not an isotropic similarity")
        if m00 * m11 - m01 * m10 <= 0.0:
            raise ValueError("transform must preserve orientation (det > 0)")
        return s, math.atan2(m10, m00)


def apply_affine_box(t: AffineTransform, b: RotatedBox) -> RotatedBox:
    """Image of a box under an isotropic similarity.

    Equivalent to transforming the four corners and refitting, but exact:
    sides scale by the isotropic factor and theta shifts by the rotation.
    """
    s, phi = t.scale_rotation()
    cx, cy = t.apply(b.cx, b.cy)
    return RotatedBox(cx, cy, b.h * s, b.w * s, b.theta + phi)
