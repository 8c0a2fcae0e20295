"""Compiled inner loops for pair classification.

Each kernel mirrors a readable numpy routine elsewhere in the package; the
tests cross-check the two.
"""

import math

import numba
import numpy as np

FLAG_PLAIN = 1
FLAG_SPH = 2
FLAG_VIS = 4
FLAG_TOP = 8


@numba.njit(cache=True)
def segment_clear(px, py, qx, qy, ax, ay, bx, by, excl, tol):
    """True when segment pq meets the polyline edges only within ``excl`` of p or q."""
    dx = qx - px
    dy = qy - py
    L = math.sqrt(dx * dx + dy * dy)
    if L == 0.0:
        return True
    lo_ok = excl
    hi_ok = L - excl
    if hi_ok <= lo_ok:
        return True
    minx = min(px, qx) - tol
    maxx = max(px, qx) + tol
    miny = min(py, qy) - tol
    maxy = max(py, qy) + tol
    for k in range(ax.shape[0]):
        x0 = ax[k]
        y0 = ay[k]
        x1 = bx[k]
        y1 = by[k]
        if max(x0, x1) < minx or min(x0, x1) > maxx or max(y0, y1) < miny or min(y0, y1) > maxy:
            continue
        da = (dx * (y0 - py) - dy * (x0 - px)) / L
        db = (dx * (y1 - py) - dy * (x1 - px)) / L
        if abs(da) <= tol and abs(db) <= tol:
            ta = ((x0 - px) * dx + (y0 - py) * dy) / L
            tb = ((x1 - px) * dx + (y1 - py) * dy) / L
            lo = max(min(ta, tb), 0.0)
            hi = min(max(ta, tb), L)
            if lo <= hi and hi > lo_ok and lo < hi_ok:
                return False
            continue
        if min(da, db) > tol or max(da, db) < -tol:
            continue
        ex = x1 - x0
        ey = y1 - y0
        den = dx * ey - dy * ex
        if den == 0.0:
            continue
        wx = x0 - px
        wy = y0 - py
        lam = (wx * ey - wy * ex) / den
        mu = (wx * dy - wy * dx) / den
        elen = math.sqrt(ex * ex + ey * ey)
        etol = tol / elen if elen > 0 else 0.0
        if mu < -etol or mu > 1.0 + etol:
            continue
        along = min(max(lam, 0.0), 1.0) * L
        if lam < -tol / L or lam > 1.0 + tol / L:
            continue
        if along > lo_ok and along < hi_ok:
            return False
    return True


@numba.njit(cache=True)
def _half_interval(px, py, qx, qy, ox, oy, excl, depth, side):
    """Feasible centres ``t`` with ``side * t >= 0``.

    An obstacle x is interior to the disk centred at c(t) when
    ``|x-c|^2 - |p-c|^2 < -2*depth*(r0 + |t|)``.  On one side of t = 0 both
    terms are affine in t, so every obstacle forbids a half-line.
    """
    mx = 0.5 * (px + qx)
    my = 0.5 * (py + qy)
    vx = qx - px
    vy = qy - py
    L = math.sqrt(vx * vx + vy * vy)
    ux = -vy / L
    uy = vx / L
    r0 = 0.5 * L
    r02 = r0 * r0
    s0 = 2.0 * r0 * depth
    bt = 1e-14 * L
    if side > 0:
        t_lo = 0.0
        t_hi = np.inf
    else:
        t_lo = -np.inf
        t_hi = 0.0
    ex2 = excl * excl
    for k in range(ox.shape[0]):
        x = ox[k]
        y = oy[k]
        if (x - px) ** 2 + (y - py) ** 2 <= ex2 or (x - qx) ** 2 + (y - qy) ** 2 <= ex2:
            continue
        dxm = x - mx
        dym = y - my
        a = dxm * dxm + dym * dym - r02 + s0
        # violation: a - 2*b*t < 0 with the slack slope folded into b
        b = ux * dxm + uy * dym - side * depth
        if abs(b) <= bt:
            if a < 0.0:
                return False, t_lo, t_hi
            continue
        thr = a / (2.0 * b)
        if b > 0.0:
            if thr < t_hi:
                t_hi = thr
        else:
            if thr > t_lo:
                t_lo = thr
        if t_lo > t_hi:
            return False, t_lo, t_hi
    return True, t_lo, t_hi


@numba.njit(cache=True)
def chord_blocked(px, py, qx, qy, ox, oy, excl, depth):
    """True when an obstacle lies on the open chord pq, away from its ends.

    Such a point is interior to every disk through p and q, whatever the
    depth slack allows for large radii.
    """
    vx = qx - px
    vy = qy - py
    L = math.sqrt(vx * vx + vy * vy)
    ex2 = excl * excl
    for k in range(ox.shape[0]):
        x = ox[k]
        y = oy[k]
        if (x - px) ** 2 + (y - py) ** 2 <= ex2 or (x - qx) ** 2 + (y - qy) ** 2 <= ex2:
            continue
        s = ((x - px) * vx + (y - py) * vy) / L
        if s <= 0.0 or s >= L:
            continue
        if abs((x - px) * vy - (y - py) * vx) / L <= depth:
            return True
    return False


@numba.njit(cache=True)
def bisector_interval(px, py, qx, qy, ox, oy, excl, depth):
    """Feasible centre range ``m + t*u`` of disks through p, q with an empty interior.

    Returns ``(feasible, t_lo, t_hi)``.  The two half-axes are solved
    separately; when both are feasible and meet at t = 0 the union is
    returned, otherwise the longer piece.
    """
    if chord_blocked(px, py, qx, qy, ox, oy, excl, depth):
        return False, 0.0, 0.0
    ok_p, lo_p, hi_p = _half_interval(px, py, qx, qy, ox, oy, excl, depth, 1.0)
    ok_n, lo_n, hi_n = _half_interval(px, py, qx, qy, ox, oy, excl, depth, -1.0)
    if ok_p and ok_n:
        if lo_p <= 0.0 and hi_n >= 0.0:
            return True, lo_n, hi_p
        if hi_p - lo_p >= hi_n - lo_n:
            return True, lo_p, hi_p
        return True, lo_n, hi_n
    if ok_p:
        return True, lo_p, hi_p
    return ok_n, lo_n, hi_n


@numba.njit(cache=True)
def oracle_any_empty(px, py, qx, qy, ox, oy, excl, depth, centers, cap):
    """Brute force: does any sampled centre on the bisector give an empty disk?

    Centres are ``centers`` evenly spaced values of t in ``[-cap, cap]``
    followed by the chord midpoint itself (t = 0).
    """
    mx = 0.5 * (px + qx)
    my = 0.5 * (py + qy)
    vx = qx - px
    vy = qy - py
    L = math.sqrt(vx * vx + vy * vy)
    ux = -vy / L
    uy = vx / L
    r0 = 0.5 * L
    ex2 = excl * excl
    if chord_blocked(px, py, qx, qy, ox, oy, excl, depth):
        return False
    for i in range(centers + 1):
        if i == centers:
            t = 0.0
        else:
            t = -cap + 2.0 * cap * i / (centers - 1) if centers > 1 else 0.0
        cx = mx + t * ux
        cy = my + t * uy
        r2 = (px - cx) ** 2 + (py - cy) ** 2
        slack = 2.0 * depth * (r0 + abs(t))
        ok = True
        for k in range(ox.shape[0]):
            x = ox[k]
            y = oy[k]
            if (x - px) ** 2 + (y - py) ** 2 <= ex2 or (x - qx) ** 2 + (y - qy) ** 2 <= ex2:
                continue
            if (x - cx) ** 2 + (y - cy) ** 2 - r2 < -slack:
                ok = False
                break
        if ok:
            return True
    return False


@numba.njit(cache=True, parallel=True)
def classify_grid(gx, gy, ax, ay, bx, by, ox, oy, eps_img, excl, depth, tol):
    """Raw plain/spherical/visual flags for all unordered pairs of grid points.

    Row ``i`` holds pairs ``(i, j)`` with ``j > i``; the lower triangle is left
    zero and mirrored by the caller.
    """
    n = gx.shape[0]
    flags = np.zeros((n, n), dtype=np.uint8)
    e2 = eps_img * eps_img
    for i in numba.prange(n):
        for j in range(i + 1, n):
            d2 = (gx[i] - gx[j]) ** 2 + (gy[i] - gy[j]) ** 2
            f = 0
            if d2 <= e2:
                f = FLAG_PLAIN
            else:
                # a curve point on the open chord is interior to every disk
                if segment_clear(gx[i], gy[i], gx[j], gy[j], ax, ay, bx, by, excl, tol):
                    f |= FLAG_VIS
                    ok, _, _ = bisector_interval(gx[i], gy[i], gx[j], gy[j], ox, oy, excl, depth)
                    if ok:
                        f |= FLAG_SPH
            flags[i, j] = f
    return flags


@numba.njit(cache=True, parallel=True)
def ray_adjacency(zx, zy, ax, ay, bx, by, excl, grid, x0, y0, cell, n_rays, n_labels):
    """Components reachable from each point by a ray that is clear of the curve.

    A ray from z in direction d counts until its first crossing with a polyline
    edge farther than ``excl`` from z; every labelled cell sampled on the clear
    part marks its component as adjacent to z.
    """
    n = zx.shape[0]
    r = grid.shape[0]
    out = np.zeros((n, n_labels), dtype=np.bool_)
    far = 2.0 * r * cell
    step = 0.5 * cell
    for p in numba.prange(n):
        px = zx[p]
        py = zy[p]
        for k in range(n_rays):
            th = 2.0 * math.pi * (k + 0.5) / n_rays
            dx = math.cos(th)
            dy = math.sin(th)
            s_hit = far
            for e in range(ax.shape[0]):
                ex = bx[e] - ax[e]
                ey = by[e] - ay[e]
                den = dx * ey - dy * ex
                if den == 0.0:
                    continue
                wx = ax[e] - px
                wy = ay[e] - py
                s = (wx * ey - wy * ex) / den
                if s <= excl or s >= s_hit:
                    continue
                mu = (wx * dy - wy * dx) / den
                if mu < 0.0 or mu > 1.0:
                    continue
                s_hit = s
            m = int(s_hit / step)
            for t in range(1, m):
                s = t * step
                j = int(math.floor((px + s * dx - x0) / cell))
                i = int(math.floor((py + s * dy - y0) / cell))
                if i < 0 or j < 0 or i >= r or j >= r:
                    break
                lab = grid[i, j]
                if lab > 0:
                    out[p, lab] = True
    return out
