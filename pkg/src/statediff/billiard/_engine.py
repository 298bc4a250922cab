"""Event-loop kernels for the billiard engine.

All kernels share :func:`advance_one`, which finds and applies the next
event; higher-level loops differ only in what they accumulate.  Event kinds:

    0 horizon (advanced to the requested time, no reflection)
    1 disc hit (specular reflection, position snapped to the surface)
    2 wall hit (component flip) / periodic wrap (position re-mapped)
    3 dividing-line crossing

Walls are numbered 0 (x low), 1 (x high), 2 (y low), 3 (y high).
"""

import math

import numpy as np
from numba import njit

from ._geom import EPS_GUARD, INF, grid_disc_event, brute_disc_event

KIND_HORIZON = 0
KIND_DISC = 1
KIND_WALL = 2
KIND_LINE = 3


@njit(cache=True)
def find_next_event(px, py, vx, vy,
                    cxs, cys, rads, cell_start, cell_items,
                    bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
                    periodic, xm, has_line, t_cap, brute):
    """Next event as (kind, dt, idx); idx is a disc index or wall id.

    Tie order: disc hit, then horizon, then line, then wall — any fixed order
    is valid since exact ties have measure zero.
    """
    if vx > 0.0:
        t_wx = (bx1 - px) / vx
        wx_id = 1
    elif vx < 0.0:
        t_wx = (bx0 - px) / vx
        wx_id = 0
    else:
        t_wx = INF
        wx_id = -1
    if vy > 0.0:
        t_wy = (by1 - py) / vy
        wy_id = 3
    elif vy < 0.0:
        t_wy = (by0 - py) / vy
        wy_id = 2
    else:
        t_wy = INF
        wy_id = -1
    if t_wx < t_wy:
        t_wall, wall_id = t_wx, wx_id
    else:
        t_wall, wall_id = t_wy, wy_id

    t_line = INF
    if has_line and vx != 0.0:
        tl = (xm - px) / vx
        if tl > EPS_GUARD:
            t_line = tl

    cap = min(min(t_wall, t_line), t_cap)
    lx = bx1 - bx0
    ly = by1 - by0
    if brute:
        t_disc, di = brute_disc_event(px, py, vx, vy, cxs, cys, rads, lx, ly,
                                      periodic, EPS_GUARD)
    else:
        t_disc, di = grid_disc_event(px, py, vx, vy, cxs, cys, rads,
                                     bx0, by0, cellx, celly, ncx, ncy,
                                     cell_start, cell_items,
                                     lx, ly, periodic, EPS_GUARD, cap)
    if t_disc <= cap:
        return KIND_DISC, t_disc, di
    if t_cap <= min(t_wall, t_line):
        return KIND_HORIZON, t_cap, -1
    if t_line <= t_wall:
        return KIND_LINE, t_line, -1
    return KIND_WALL, t_wall, wall_id


@njit(cache=True)
def advance_one(px, py, vx, vy,
                cxs, cys, rads, cell_start, cell_items,
                bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
                periodic, xm, has_line, t_cap, brute):
    """Find and apply one event.

    Returns (px, py, vx, vy, dt, kind, idx, wind_dx, wind_dy, pen) where
    ``pen`` is the (signed) surface penetration observed at a disc hit before
    snapping, and wind_d* are winding increments from periodic wraps.
    """
    kind, dt, idx = find_next_event(px, py, vx, vy, cxs, cys, rads,
                                    cell_start, cell_items,
                                    bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
                                    periodic, xm, has_line, t_cap, brute)
    px += vx * dt
    py += vy * dt
    wdx = 0
    wdy = 0
    pen = -INF
    if kind == KIND_DISC:
        cx = cxs[idx]
        cy = cys[idx]
        dx = px - cx
        dy = py - cy
        if periodic:
            dx -= (bx1 - bx0) * round(dx / (bx1 - bx0))
            dy -= (by1 - by0) * round(dy / (by1 - by0))
        d = math.sqrt(dx * dx + dy * dy)
        r = rads[idx]
        pen = r - d
        nx = dx / d
        ny = dy / d
        # snap to the surface to stop penetration drift
        px += (r - d) * nx
        py += (r - d) * ny
        dot = vx * nx + vy * ny
        vx -= 2.0 * dot * nx
        vy -= 2.0 * dot * ny
    elif kind == KIND_WALL:
        if idx == 0 or idx == 1:
            if periodic:
                if idx == 1:
                    px = bx0
                    wdx = 1
                else:
                    px = bx1
                    wdx = -1
            else:
                px = bx1 if idx == 1 else bx0
                vx = -vx
        else:
            if periodic:
                if idx == 3:
                    py = by0
                    wdy = 1
                else:
                    py = by1
                    wdy = -1
            else:
                py = by1 if idx == 3 else by0
                vy = -vy
    elif kind == KIND_LINE:
        px = xm
    return px, py, vx, vy, dt, kind, idx, wdx, wdy, pen


@njit(cache=True)
def run_occupation(cxs, cys, rads, cell_start, cell_items,
                   bx0, by0, bx1, by1, cellx, celly, ncx, ncy, xm,
                   p0x, p0y, v0x, v0y, t_total, n_batches, sample_dt):
    """Advance to ``t_total`` in a two-domain box, accumulating per-side time.

    Side occupation is exact (segment durations between events); an optional
    position-sampling estimator with period ``sample_dt`` runs alongside.
    Returns (t_right_batches, t_left_batches, n_events, n_cross, samp_r,
    samp_l, max_pen, max_speed_err, status); status 1 flags a stuck particle.
    """
    px, py, vx, vy = p0x, p0y, v0x, v0y
    t = 0.0
    batch_w = t_total / n_batches
    tr = np.zeros(n_batches)
    tl = np.zeros(n_batches)
    n_events = 0
    n_cross = 0
    samp_r = 0
    samp_l = 0
    max_pen = -INF
    max_srr = 0.0
    next_samp = sample_dt if sample_dt > 0.0 else INF
    tiny_run = 0
    status = 0
    while t < t_total:
        on_right = px > xm or (px == xm and vx > 0.0)
        px, py, vx, vy, dt, kind, idx, _, _, pen = advance_one(
            px, py, vx, vy, cxs, cys, rads, cell_start, cell_items,
            bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
            False, xm, True, t_total - t, False)
        # split the segment [t, t + dt] over batch windows
        t0 = t
        t1 = t + dt
        b = int(t0 / batch_w)
        if b > n_batches - 1:
            b = n_batches - 1
        while t0 < t1:
            edge = (b + 1) * batch_w
            seg_end = t1 if t1 < edge or b == n_batches - 1 else edge
            if on_right:
                tr[b] += seg_end - t0
            else:
                tl[b] += seg_end - t0
            t0 = seg_end
            if t0 >= edge and b < n_batches - 1:
                b += 1
        while next_samp <= t1:
            if on_right:
                samp_r += 1
            else:
                samp_l += 1
            next_samp += sample_dt
        t = t1
        if kind == KIND_LINE:
            n_cross += 1
        if kind != KIND_HORIZON:
            n_events += 1
            if pen > max_pen:
                max_pen = pen
            if dt <= EPS_GUARD:
                tiny_run += 1
                if tiny_run > 64:
                    status = 1
                    break
            else:
                tiny_run = 0
            if n_events % 10000 == 0:
                spd = math.sqrt(vx * vx + vy * vy)
                err = abs(spd - 1.0)
                if err > max_srr:
                    max_srr = err
                vx /= spd
                vy /= spd
    return tr, tl, n_events, n_cross, samp_r, samp_l, max_pen, max_srr, status


@njit(cache=True)
def run_msd(cxs, cys, rads, cell_start, cell_items,
            bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
            p0x, p0y, v0x, v0y, ck_dt, n_ck):
    """Periodic-cell trajectory; records unfolded positions at k*ck_dt.

    Returns (positions[n_ck, 2], n_events, status).
    """
    px, py, vx, vy = p0x, p0y, v0x, v0y
    t = 0.0
    wx = 0
    wy = 0
    lx = bx1 - bx0
    ly = by1 - by0
    out = np.empty((n_ck, 2))
    n_events = 0
    tiny_run = 0
    status = 0
    for k in range(n_ck):
        t_target = (k + 1) * ck_dt
        while True:
            px, py, vx, vy, dt, kind, idx, wdx, wdy, _ = advance_one(
                px, py, vx, vy, cxs, cys, rads, cell_start, cell_items,
                bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
                True, 0.0, False, t_target - t, False)
            t += dt
            wx += wdx
            wy += wdy
            if kind == KIND_HORIZON:
                break
            n_events += 1
            if dt <= EPS_GUARD:
                tiny_run += 1
                if tiny_run > 64:
                    status = 1
                    return out, n_events, status
            else:
                tiny_run = 0
            if n_events % 10000 == 0:
                spd = math.sqrt(vx * vx + vy * vy)
                vx /= spd
                vy /= spd
        out[k, 0] = px + wx * lx
        out[k, 1] = py + wy * ly
    return out, n_events, status


@njit(cache=True)
def run_events(cxs, cys, rads, cell_start, cell_items,
               bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
               periodic, xm, has_line,
               p0x, p0y, v0x, v0y, n_events_target, renorm_every,
               log_kind, log_idx):
    """Advance exactly ``n_events_target`` non-horizon events.

    Fills the (optional, len >= target) event log arrays and returns
    (px, py, vx, vy, t, max_pen, max_speed_err, status).
    """
    px, py, vx, vy = p0x, p0y, v0x, v0y
    t = 0.0
    max_pen = -INF
    max_srr = 0.0
    n_events = 0
    tiny_run = 0
    status = 0
    log_on = log_kind.size >= n_events_target
    while n_events < n_events_target:
        px, py, vx, vy, dt, kind, idx, _, _, pen = advance_one(
            px, py, vx, vy, cxs, cys, rads, cell_start, cell_items,
            bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
            periodic, xm, has_line, INF if not periodic else 1e18, False)
        t += dt
        if kind == KIND_HORIZON:
            status = 2
            break
        if pen > max_pen:
            max_pen = pen
        if log_on:
            log_kind[n_events] = kind
            log_idx[n_events] = idx
        n_events += 1
        if dt <= EPS_GUARD:
            tiny_run += 1
            if tiny_run > 64:
                status = 1
                break
        else:
            tiny_run = 0
        if renorm_every > 0 and n_events % renorm_every == 0:
            spd = math.sqrt(vx * vx + vy * vy)
            err = abs(spd - 1.0)
            if err > max_srr:
                max_srr = err
            vx /= spd
            vy /= spd
    spd = math.sqrt(vx * vx + vy * vy)
    err = abs(spd - 1.0)
    if err > max_srr:
        max_srr = err
    return px, py, vx, vy, t, max_pen, max_srr, status


@njit(cache=True)
def advance_time(cxs, cys, rads, cell_start, cell_items,
                 bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
                 periodic, xm, has_line,
                 p0x, p0y, v0x, v0y, t_total, renorm_every):
    """Advance by a fixed time; returns (px, py, vx, vy, n_events, status)."""
    px, py, vx, vy = p0x, p0y, v0x, v0y
    t = 0.0
    n_events = 0
    tiny_run = 0
    status = 0
    while t < t_total:
        px, py, vx, vy, dt, kind, idx, _, _, _ = advance_one(
            px, py, vx, vy, cxs, cys, rads, cell_start, cell_items,
            bx0, by0, bx1, by1, cellx, celly, ncx, ncy,
            periodic, xm, has_line, t_total - t, False)
        t += dt
        if kind == KIND_HORIZON:
            break
        n_events += 1
        if dt <= EPS_GUARD:
            tiny_run += 1
            if tiny_run > 64:
                status = 1
                break
        else:
            tiny_run = 0
        if renorm_every > 0 and n_events % renorm_every == 0:
            spd = math.sqrt(vx * vx + vy * vy)
            vx /= spd
            vy /= spd
    return px, py, vx, vy, n_events, status


@njit(cache=True)
def point_is_free(px, py, cxs, cys, rads, cell_start, cell_items,
                  bx0, by0, bx1, by1, cellx, celly, ncx, ncy, periodic):
    """True when the point is outside every disc (its cell holds all coverers)."""
    lx = bx1 - bx0
    ly = by1 - by0
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
    c = ix * ncy + iy
    for k in range(cell_start[c], cell_start[c + 1]):
        i = cell_items[k]
        dx = px - cxs[i]
        dy = py - cys[i]
        if periodic:
            dx -= lx * round(dx / lx)
            dy -= ly * round(dy / ly)
        if dx * dx + dy * dy < rads[i] * rads[i]:
            return False
    return True


@njit(cache=True)
def worst_overlap(cxs, cys, rads, cell_start, cell_items,
                  bx0, by0, bx1, by1, cellx, celly, ncx, ncy, periodic):
    """Most negative pairwise gap |ci-cj| - (ri+rj) over all disc pairs."""
    lx = bx1 - bx0
    ly = by1 - by0
    worst = INF
    for i in range(cxs.size):
        ix = int((cxs[i] - bx0) / cellx)
        iy = int((cys[i] - by0) / celly)
        if ix < 0:
            ix = 0
        if ix > ncx - 1:
            ix = ncx - 1
        if iy < 0:
            iy = 0
        if iy > ncy - 1:
            iy = ncy - 1
        for ox in range(-1, 2):
            jx = ix + ox
            if periodic:
                jx = (jx + ncx) % ncx
            elif jx < 0 or jx >= ncx:
                continue
            for oy in range(-1, 2):
                jy = iy + oy
                if periodic:
                    jy = (jy + ncy) % ncy
                elif jy < 0 or jy >= ncy:
                    continue
                c = jx * ncy + jy
                for k in range(cell_start[c], cell_start[c + 1]):
                    j = cell_items[k]
                    if j <= i:
                        continue
                    dx = cxs[i] - cxs[j]
                    dy = cys[i] - cys[j]
                    if periodic:
                        dx -= lx * round(dx / lx)
                        dy -= ly * round(dy / ly)
                    gap = math.sqrt(dx * dx + dy * dy) - (rads[i] + rads[j])
                    if gap < worst:
                        worst = gap
    return worst
