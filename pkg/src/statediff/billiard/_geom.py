"""Exact geometry kernels: disc-box clipped areas and ray-disc hit times."""

import math

import numpy as np
from numba import njit

#: guard time after a reflection; earlier events are same-surface artifacts
EPS_GUARD = 1e-12
#: discriminants below this are grazing contacts, treated as misses
EPS_GRAZE = 1e-14
INF = math.inf


@njit(cache=True, inline="always")
def _halfchord_anti(cy, r, y):
    # antiderivative of sqrt(r^2 - (y-cy)^2); the factored radicand and atan2
    # keep it well-conditioned at the segment edges |y - cy| -> r
    t = min(max(y - cy, -r), r)
    s = math.sqrt(max(0.0, (r - t) * (r + t)))
    return 0.5 * (t * s + r * r * math.atan2(t, s))


@njit(cache=True)
def _int_halfchord(cy, r, ya, yb):
    """Integral of sqrt(r^2 - (y-cy)^2) dy over [ya, yb] (chord half-width)."""
    return _halfchord_anti(cy, r, yb) - _halfchord_anti(cy, r, ya)


@njit(cache=True)
def disc_area_in_box(cx, cy, r, x0, y0, x1, y1):
    """Exact area of the disc (cx, cy, r) inside the rectangle [x0,x1]x[y0,y1].

    Integrates the clipped chord width over y; the integrand changes form only
    where a chord endpoint meets a vertical box edge, so each sub-segment is a
    constant plus a circular-segment term with closed-form antiderivative.
    """
    ylo = max(y0, cy - r)
    yhi = min(y1, cy + r)
    if yhi <= ylo:
        return 0.0
    pts = np.empty(6)
    n = 0
    pts[n] = ylo
    n += 1
    pts[n] = yhi
    n += 1
    for d in (x0 - cx, x1 - cx):
        if abs(d) < r:
            h = math.sqrt(r * r - d * d)
            if ylo < cy - h < yhi:
                pts[n] = cy - h
                n += 1
            if ylo < cy + h < yhi:
                pts[n] = cy + h
                n += 1
    sub = np.sort(pts[:n])
    area = 0.0
    for i in range(n - 1):
        ya = sub[i]
        yb = sub[i + 1]
        if yb <= ya:
            continue
        ym = 0.5 * (ya + yb)
        s = math.sqrt(max(0.0, r * r - (ym - cy) * (ym - cy)))
        lo = max(x0, cx - s)
        hi = min(x1, cx + s)
        if hi <= lo:
            continue
        left_clip = (cx - s) < x0
        right_clip = (cx + s) > x1
        if left_clip and right_clip:
            area += (x1 - x0) * (yb - ya)
        elif left_clip:
            area += (cx - x0) * (yb - ya) + _int_halfchord(cy, r, ya, yb)
        elif right_clip:
            area += (x1 - cx) * (yb - ya) + _int_halfchord(cy, r, ya, yb)
        else:
            area += 2.0 * _int_halfchord(cy, r, ya, yb)
    return area


@njit(cache=True)
def total_clipped_area(cxs, cys, rads, x0, y0, x1, y1):
    """Sum of per-disc areas inside the rectangle (discs assumed disjoint)."""
    s = 0.0
    for i in range(cxs.size):
        s += disc_area_in_box(cxs[i], cys[i], rads[i], x0, y0, x1, y1)
    return s


@njit(cache=True, inline="always")
def disc_hit_time(px, py, vx, vy, cx, cy, r, lx, ly, periodic):
    """Time to first contact of ray p + t v with the disc, or inf.

    Uses the cancellation-free quadratic root; grazing contacts (discriminant
    below EPS_GRAZE) count as misses.  |v| must be 1.
    """
    dx = cx - px
    dy = cy - py
    if periodic:
        dx -= lx * round(dx / lx)
        dy -= ly * round(dy / ly)
    s = dx * vx + dy * vy  # approach speed toward the center
    if s <= 0.0:
        return INF
    c2 = dx * dx + dy * dy - r * r
    disc = s * s - c2
    if disc <= EPS_GRAZE:
        return INF
    return c2 / (s + math.sqrt(disc))


@njit(cache=True)
def brute_disc_event(px, py, vx, vy, cxs, cys, rads, lx, ly, periodic, t_guard):
    """Earliest disc hit by scanning every disc: the grid oracle."""
    best_t = INF
    best_i = -1
    for i in range(cxs.size):
        t = disc_hit_time(px, py, vx, vy, cxs[i], cys[i], rads[i], lx, ly, periodic)
        if t > t_guard and t < best_t:
            best_t = t
            best_i = i
    return best_t, best_i


@njit(cache=True)
def grid_disc_event(px, py, vx, vy, cxs, cys, rads,
                    bx0, by0, cellx, celly, ncx, ncy, cell_start, cell_items,
                    lx, ly, periodic, t_guard, t_cap):
    """Earliest disc hit using uniform-grid ray traversal (Amanatides-Woo).

    Visits cells in crossing order and stops once the best hit precedes the
    next cell entry (every disc intersecting a visited cell is registered
    there, so no earlier hit can remain undiscovered).  ``t_cap`` bounds the
    search (wall / line / horizon time).
    """
    best_t = INF
    best_i = -1
    ix = int((px - bx0) / cellx)
    iy = int((py - by0) / celly)
    if ix < 0:
        ix = 0
    if ix > ncx - 1:
        ix = ncx - 1
    if iy < 0:
        iy = 0
    if iy > ncy - 1:
        iy = ncy - 1

    if vx > 0.0:
        step_x = 1
        tmax_x = (bx0 + (ix + 1) * cellx - px) / vx
        tdel_x = cellx / vx
    elif vx < 0.0:
        step_x = -1
        tmax_x = (bx0 + ix * cellx - px) / vx
        tdel_x = -cellx / vx
    else:
        step_x = 0
        tmax_x = INF
        tdel_x = INF
    if vy > 0.0:
        step_y = 1
        tmax_y = (by0 + (iy + 1) * celly - py) / vy
        tdel_y = celly / vy
    elif vy < 0.0:
        step_y = -1
        tmax_y = (by0 + iy * celly - py) / vy
        tdel_y = -celly / vy
    else:
        step_y = 0
        tmax_y = INF
        tdel_y = INF

    while True:
        c = ix * ncy + iy
        for k in range(cell_start[c], cell_start[c + 1]):
            i = cell_items[k]
            t = disc_hit_time(px, py, vx, vy, cxs[i], cys[i], rads[i], lx, ly, periodic)
            if t > t_guard and t < best_t:
                best_t = t
                best_i = i
        t_exit = tmax_x if tmax_x < tmax_y else tmax_y
        if best_t <= t_exit or t_exit > t_cap:
            return best_t, best_i
        if tmax_x < tmax_y:
            ix += step_x
            tmax_x += tdel_x
            if ix < 0 or ix >= ncx:
                if periodic:
                    ix = (ix + ncx) % ncx
                else:
                    return best_t, best_i
        else:
            iy += step_y
            tmax_y += tdel_y
            if iy < 0 or iy >= ncy:
                if periodic:
                    iy = (iy + ncy) % ncy
                else:
                    return best_t, best_i
