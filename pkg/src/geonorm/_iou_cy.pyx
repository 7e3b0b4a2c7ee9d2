# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled IoU kernel for rotated rectangles.

Same clipping algorithm and operation order as ``_iou_py.py``; kept in
lockstep so the two backends are interchangeable.
"""

from libc.math cimport cos, sin, sqrt

BACKEND = "cython"


cdef void _corners(double cx, double cy, double h, double w, double theta,
                   double* xs, double* ys) noexcept nogil:
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef double ux = c * (w * 0.5)
    cdef double uy = s * (w * 0.5)
    cdef double vx = -s * (h * 0.5)
    cdef double vy = c * (h * 0.5)
    xs[0] = cx - ux - vx
    xs[1] = cx + ux - vx
    xs[2] = cx + ux + vx
    xs[3] = cx - ux + vx
    ys[0] = cy - uy - vy
    ys[1] = cy + uy - vy
    ys[2] = cy + uy + vy
    ys[3] = cy - uy + vy


cdef double _clip_area(double* sx, double* sy, double* cx, double* cy) noexcept nogil:
    # clipping a quad by 4 half-planes yields at most 8 vertices
    cdef double px[16]
    cdef double py[16]
    cdef double qx[16]
    cdef double qy[16]
    cdef int n = 4, m, i, k, j
    cdef double ex0, ey0, ex1, ey1, dx, dy
    cdef double wx, wy, wside, zx, zy, zside, t, acc

    for k in range(4):
        px[k] = sx[k]
        py[k] = sy[k]

    for i in range(4):
        if n == 0:
            return 0.0
        ex0 = cx[i]
        ey0 = cy[i]
        ex1 = cx[(i + 1) % 4]
        ey1 = cy[(i + 1) % 4]
        dx = ex1 - ex0
        dy = ey1 - ey0
        m = 0
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
                    qx[m] = wx + t * (zx - wx)
                    qy[m] = wy + t * (zy - wy)
                    m += 1
                qx[m] = zx
                qy[m] = zy
                m += 1
            elif wside >= 0.0:
                t = wside / (wside - zside)
                qx[m] = wx + t * (zx - wx)
                qy[m] = wy + t * (zy - wy)
                m += 1
            wx = zx
            wy = zy
            wside = zside
        n = m
        for k in range(n):
            px[k] = qx[k]
            py[k] = qy[k]

    if n < 3:
        return 0.0
    acc = 0.0
    for k in range(n):
        j = (k + 1) % n
        acc += px[k] * py[j] - px[j] * py[k]
    return 0.5 * acc


cpdef double rbox_iou(double acx, double acy, double ah, double aw, double at,
                      double bcx, double bcy, double bh, double bw, double bt):
    """Intersection-over-union of two center/size/angle rectangles."""
    cdef double dx = acx - bcx
    cdef double dy = acy - bcy
    cdef double ra = 0.5 * sqrt(ah * ah + aw * aw)
    cdef double rb = 0.5 * sqrt(bh * bh + bw * bw)
    cdef double ax[4]
    cdef double ay[4]
    cdef double bx[4]
    cdef double by[4]
    cdef double inter, union_, iou

    if sqrt(dx * dx + dy * dy) > ra + rb:
        return 0.0
    _corners(acx, acy, ah, aw, at, ax, ay)
    _corners(bcx, bcy, bh, bw, bt, bx, by)
    inter = _clip_area(ax, ay, bx, by)
    if inter <= 0.0:
        return 0.0
    union_ = ah * aw + bh * bw - inter
    if union_ <= 0.0:
        return 0.0
    iou = inter / union_
    if iou > 1.0:
        return 1.0
    return iou
