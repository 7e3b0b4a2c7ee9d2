"""Pure-Python IoU kernel for rotated rectangles.

Mirror of the compiled kernel in ``_iou_cy.pyx``; both evaluate the same
operations in the same order so the backends agree to floating-point noise.
Intersection is computed by clipping one rectangle against the other
(Sutherland-Hodgman) and taking the shoelace area of the result.
"""

import math

BACKEND = "python"


def _corners(cx, cy, h, w, theta):
    c = math.cos(theta)
    s = math.sin(theta)
    ux = c * (w * 0.5)
    uy = s * (w * 0.5)
    vx = -s * (h * 0.5)
    vy = c * (h * 0.5)
    # clockwise in image coordinates (positive shoelace sum)
    return (
        [cx - ux - vx, cx + ux - vx, cx + ux + vx, cx - ux + vx],
        [cy - uy - vy, cy + uy - vy, cy + uy + vy, cy - uy + vy],
    )


def _clip_area(sx, sy, cx, cy):
    """Area of the subject polygon (sx, sy) clipped to the convex clipper."""
    px = list(sx)
    py = list(sy)
    for i in range(4):
        if not px:
            return 0.0
        ex0 = cx[i]
        ey0 = cy[i]
        ex1 = cx[(i + 1) % 4]
        ey1 = cy[(i + 1) % 4]
        dx = ex1 - ex0
        dy = ey1 - ey0
        qx = []
        qy = []
        n = len(px)
        wx = px[n - 1]
        wy = py[n - 1]
        wside = dx * (wy - ey0) - dy * (wx - ex0)
        for k in range(n):
            zx = px[k]
            zy = py[k]
            zside = dx * (zy - ey0) - dy * (zx - ex0)
            if zside >= 0.0:
                if wside < 0.0:
                    t = wside / (wside - zside)
                    qx.append(wx + t * (zx - wx))
                    qy.append(wy + t * (zy - wy))
                qx.append(zx)
                qy.append(zy)
            elif wside >= 0.0:
                t = wside / (wside - zside)
                qx.append(wx + t * (zx - wx))
                qy.append(wy + t * (zy - wy))
            wx = zx
            wy = zy
            wside = zside
        px = qx
        py = qy
    n = len(px)
    if n < 3:
        return 0.0
    acc = 0.0
    for k in range(n):
        j = (k + 1) % n
        acc += px[k] * py[j] - px[j] * py[k]
    return 0.5 * acc


def rbox_iou(acx, acy, ah, aw, at, bcx, bcy, bh, bw, bt):
    """Intersection-over-union of two center/size/angle rectangles."""
    dx = acx - bcx
    dy = acy - bcy
    ra = 0.5 * math.sqrt(ah * ah + aw * aw)
    rb = 0.5 * math.sqrt(bh * bh + bw * bw)
    if math.sqrt(dx * dx + dy * dy) > ra + rb:
        return 0.0
    ax, ay = _corners(acx, acy, ah, aw, at)
    bx, by = _corners(bcx, bcy, bh, bw, bt)
    inter = _clip_area(ax, ay, bx, by)
    if inter <= 0.0:
        return 0.0
    union = ah * aw + bh * bw - inter
    if union <= 0.0:
        return 0.0
    iou = inter / union
    if iou > 1.0:
        return 1.0
    return iou
