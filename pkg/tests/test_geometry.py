import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geonorm.geometry import (
    AffineTransform,
    Quad,
    RotatedBox,
    angle_distance,
    normalize_angle,
    quad_to_rbox,
    rbox_to_quad,
    rotated_iou,
    apply_affine_box,
)

PI = math.pi


# ---------------------------------------------------------------- oracles


def mc_iou(a: RotatedBox, b: RotatedBox, n: int, seed: int) -> float:
    """Monte-Carlo IoU estimate by uniform point sampling over a shared bbox."""
    rng = np.random.default_rng(seed)
    pts = np.array([p for box in (a, b) for p in box.corners()])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    xs = rng.uniform(lo[0], hi[0], n)
    ys = rng.uniform(lo[1], hi[1], n)

    def inside(box):
        dx = xs - box.cx
        dy = ys - box.cy
        c, s = math.cos(box.theta), math.sin(box.theta)
        u = dx * c + dy * s
        v = -dx * s + dy * c
        return (np.abs(u) <= box.w / 2) & (np.abs(v) <= box.h / 2)

    in_a = inside(a)
    in_b = inside(b)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union


def aligned_rect_area(points, angle: float) -> float:
    """Area of the enclosing rectangle aligned with ``angle``."""
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    c, s = math.cos(angle), math.sin(angle)
    u = xs * c + ys * s
    v = -xs * s + ys * c
    return float((u.max() - u.min()) * (v.max() - v.min()))


def sweep_min_rect_area(points, n_angles: int = 3600) -> float:
    """Brute-force minimum over a dense angle sweep plus all pairwise edges."""
    angles = [i * PI / n_angles for i in range(n_angles)]
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dx = pts[j][0] - pts[i][0]
            dy = pts[j][1] - pts[i][1]
            if dx or dy:
                angles.append(math.atan2(dy, dx))
    return min(aligned_rect_area(points, a) for a in angles)


def random_box(rng, span=200.0, hmin=1.0, hmax=60.0) -> RotatedBox:
    h = rng.uniform(hmin, hmax)
    w = h * rng.uniform(1.0 + 1e-9, 6.0)
    return RotatedBox(
        rng.uniform(-span, span),
        rng.uniform(-span, span),
        h,
        w,
        rng.uniform(-PI / 2, PI / 2),
    )


# ---------------------------------------------------------- normalize_angle


def test_normalize_angle_fixed_points():
    assert normalize_angle(0.0) == 0.0
    assert normalize_angle(PI / 2) == -PI / 2
    assert normalize_angle(5 * PI / 4) == pytest.approx(PI / 4, abs=1e-15)


def test_normalize_angle_rejects_non_finite():
    with pytest.raises(ValueError):
        normalize_angle(math.nan)
    with pytest.raises(ValueError):
        normalize_angle(math.inf)


@given(st.floats(-50.0, 50.0))
def test_normalize_angle_idempotent_and_congruent(theta):
    t = normalize_angle(theta)
    assert -PI / 2 <= t < PI / 2
    assert normalize_angle(t) == t
    # congruent to the input modulo pi
    assert abs(math.remainder(t - theta, PI)) < 1e-9


# ------------------------------------------------------------- RotatedBox


def test_box_swaps_long_side():
    b = RotatedBox(0, 0, 10, 4, 0.0)
    assert (b.h, b.w) == (4.0, 10.0)
    assert b.theta == pytest.approx(-PI / 2)


def test_box_square_keeps_theta():
    b = RotatedBox(0, 0, 5, 5, 0.3)
    assert b.theta == 0.3
    assert b.h == b.w == 5.0


def test_box_rejects_bad_values():
    with pytest.raises(ValueError):
        RotatedBox(0, 0, 0, 4, 0)
    with pytest.raises(ValueError):
        RotatedBox(0, 0, -1, 4, 0)
    with pytest.raises(ValueError):
        RotatedBox(math.nan, 0, 1, 4, 0)


# ------------------------------------------------------------ quad <-> box


def test_quad_rejects_degenerate_and_self_intersecting():
    with pytest.raises(ValueError):
        Quad(((0, 0), (4, 0), (8, 0), (2, 0)))  # zero area
    with pytest.raises(ValueError):
        Quad(((0, 1), (2, 0), (2, 2), (0, 0)))  # bow tie
    with pytest.raises(ValueError):
        Quad(((0, 0), (0, 2), (4, 2), (4, 0)))  # counter-clockwise


def test_quad_to_rbox_axis_aligned():
    b = quad_to_rbox(Quad(((0, 0), (4, 0), (4, 2), (0, 2))))
    assert (b.cx, b.cy, b.h, b.w, b.theta) == (2.0, 1.0, 2.0, 4.0, 0.0)


def test_quad_to_rbox_rotated_rectangle():
    t = AffineTransform.similarity(1.0, PI / 6, (2.0, 1.0))
    corners = tuple(t.apply(x, y) for x, y in ((0, 0), (4, 0), (4, 2), (0, 2)))
    b = quad_to_rbox(Quad(corners))
    assert b.cx == pytest.approx(2.0, abs=1e-9)
    assert b.cy == pytest.approx(1.0, abs=1e-9)
    assert b.h == pytest.approx(2.0, abs=1e-9)
    assert b.w == pytest.approx(4.0, abs=1e-9)
    assert b.theta == pytest.approx(PI / 6, abs=1e-9)


def test_quad_to_rbox_trapezoid_matches_sweep_oracle():
    q = Quad(((0, 0), (10, 1), (8, 6), (1, 5)))
    fitted = quad_to_rbox(q)
    oracle = sweep_min_rect_area(q.vertices)
    assert fitted.area == pytest.approx(oracle, rel=1e-5)
    # fitted rectangle still encloses the quad
    for x, y in q.vertices:
        dx, dy = x - fitted.cx, y - fitted.cy
        c, s = math.cos(fitted.theta), math.sin(fitted.theta)
        assert abs(dx * c + dy * s) <= fitted.w / 2 + 1e-9
        assert abs(-dx * s + dy * c) <= fitted.h / 2 + 1e-9


def test_min_area_not_above_any_aligned_rect():
    rng = np.random.default_rng(7)
    for _ in range(50):
        pts = [(rng.uniform(0, 20), rng.uniform(0, 20)) for _ in range(4)]
        try:
            q = Quad(tuple(pts))
        except ValueError:
            continue
        area = quad_to_rbox(q).area
        for _ in range(40):
            assert area <= aligned_rect_area(q.vertices, rng.uniform(0, PI)) + 1e-9


def test_rbox_to_quad_axis_aligned():
    q = rbox_to_quad(RotatedBox(2, 1, 2, 4, 0))
    assert q.vertices == ((0.0, 0.0), (4.0, 0.0), (4.0, 2.0), (0.0, 2.0))


def test_rbox_to_quad_rotated_by_matrix():
    b = RotatedBox(0, 0, 2, 4, PI / 4)
    c, s = math.cos(PI / 4), math.sin(PI / 4)
    expected = [
        (c * dx - s * dy, s * dx + c * dy) for dx, dy in ((-2, -1), (2, -1), (2, 1), (-2, 1))
    ]
    for (gx, gy), (ex, ey) in zip(rbox_to_quad(b).vertices, expected):
        assert gx == pytest.approx(ex, abs=1e-12)
        assert gy == pytest.approx(ey, abs=1e-12)


def test_round_trip_10k_random_boxes():
    rng = np.random.default_rng(42)
    for _ in range(10_000):
        b = random_box(rng)
        r = quad_to_rbox(rbox_to_quad(b))
        assert abs(r.cx - b.cx) < 1e-9
        assert abs(r.cy - b.cy) < 1e-9
        assert abs(r.h - b.h) < 1e-9
        assert abs(r.w - b.w) < 1e-9
        assert angle_distance(r.theta, b.theta) < 1e-9


@settings(max_examples=200)
@given(
    st.floats(-1e3, 1e3),
    st.floats(-1e3, 1e3),
    st.floats(0.01, 500.0),
    st.floats(1.0, 8.0),
    st.floats(-PI / 2, PI / 2, exclude_max=True),
)
def test_round_trip_property(cx, cy, h, ratio, theta):
    b = RotatedBox(cx, cy, h, h * ratio, theta)
    r = quad_to_rbox(rbox_to_quad(b))
    scale = max(1.0, abs(cx), abs(cy), b.w)
    assert abs(r.cx - b.cx) < 1e-9 * scale
    assert abs(r.cy - b.cy) < 1e-9 * scale
    assert abs(r.h - b.h) < 1e-9 * scale
    assert abs(r.w - b.w) < 1e-9 * scale
    assert angle_distance(r.theta, b.theta) < 1e-7


# -------------------------------------------------------------- rotated_iou


def test_iou_self_is_one():
    boxes = [
        RotatedBox(0, 0, 2, 4, 0),
        RotatedBox(3, -2, 5, 9, 0.7),
        RotatedBox(-10, 4, 1, 1, -1.2),
    ]
    for b in boxes:
        assert rotated_iou(b, b) == pytest.approx(1.0, abs=1e-12)


def test_iou_disjoint_is_zero():
    a = RotatedBox(0, 0, 2, 4, 0.3)
    b = RotatedBox(100, 100, 2, 4, -0.8)
    assert rotated_iou(a, b) == 0.0


def test_iou_axis_aligned_closed_form():
    a = RotatedBox(0, 0, 2, 4, 0)
    b = RotatedBox(1, 0, 2, 4, 0)
    # intersection 3 x 2 = 6, union 8 + 8 - 6 = 10
    assert rotated_iou(a, b) == pytest.approx(0.6, abs=1e-12)


def test_iou_symmetric_and_bounded():
    rng = np.random.default_rng(3)
    for _ in range(300):
        a = random_box(rng, span=30.0)
        b = random_box(rng, span=30.0)
        ab = rotated_iou(a, b)
        assert 0.0 <= ab <= 1.0
        assert ab == pytest.approx(rotated_iou(b, a), abs=1e-12)


def test_iou_against_monte_carlo():
    rng = np.random.default_rng(11)
    for i in range(25):
        a = random_box(rng, span=15.0, hmin=4.0, hmax=20.0)
        b = RotatedBox(
            a.cx + rng.uniform(-a.w, a.w),
            a.cy + rng.uniform(-a.w, a.w),
            rng.uniform(4.0, 20.0),
            rng.uniform(20.0, 60.0),
            rng.uniform(-PI / 2, PI / 2),
        )
        exact = rotated_iou(a, b)
        approx = mc_iou(a, b, 1_000_000, seed=1000 + i)
        assert abs(exact - approx) <= 0.005


def test_iou_invariant_under_shared_similarity():
    rng = np.random.default_rng(5)
    t = AffineTransform.similarity(1.7, 0.9, (4.0, -2.0))
    for _ in range(100):
        a = random_box(rng, span=20.0)
        b = random_box(rng, span=20.0)
        before = rotated_iou(a, b)
        after = rotated_iou(apply_affine_box(t, a), apply_affine_box(t, b))
        assert after == pytest.approx(before, abs=1e-9)


# --------------------------------------------------------- apply_affine_box


def test_apply_affine_identity():
    b = RotatedBox(3, 4, 2, 5, 0.4)
    r = apply_affine_box(AffineTransform.identity(), b)
    assert r == b


def test_apply_affine_pure_scale():
    b = RotatedBox(100, 50, 20, 60, PI / 3)
    r = apply_affine_box(AffineTransform.similarity(0.5, 0.0), b)
    assert (r.cx, r.cy, r.h, r.w) == (50.0, 25.0, 10.0, 30.0)
    assert r.theta == pytest.approx(PI / 3)


def test_apply_affine_matches_corner_refit():
    rng = np.random.default_rng(9)
    t = AffineTransform.translation(5.0, -3.0).compose(
        AffineTransform.similarity(2.0, PI / 6, (10.0, 20.0))
    )
    for _ in range(200):
        b = random_box(rng, span=50.0)
        direct = apply_affine_box(t, b)
        refit = quad_to_rbox(Quad(tuple(t.apply(x, y) for x, y in b.corners())))
        assert direct.cx == pytest.approx(refit.cx, abs=1e-6)
        assert direct.cy == pytest.approx(refit.cy, abs=1e-6)
        assert direct.h == pytest.approx(refit.h, abs=1e-6)
        assert direct.w == pytest.approx(refit.w, abs=1e-6)
        assert angle_distance(direct.theta, refit.theta) < 1e-6


def test_apply_affine_rejects_non_isotropic():
    stretch = AffineTransform((2.0, 0.0, 0.0, 0.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        apply_affine_box(stretch, RotatedBox(0, 0, 1, 2, 0))
    mirror = AffineTransform((1.0, 0.0, 0.0, 0.0, -1.0, 0.0))
    with pytest.raises(ValueError):
        apply_affine_box(mirror, RotatedBox(0, 0, 1, 2, 0))
