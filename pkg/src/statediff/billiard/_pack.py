"""Disc-packing kernels: RSA insertion and growth densification.

Both generators keep centers inside an allowed rectangle (which encodes the
dividing-line margin) while discs may protrude through outer walls.  The
growth generator reaches coverages far beyond RSA saturation by inflating
discs from a dilute seed configuration, separating overlapping pairs, and
interleaving hard-disc Monte Carlo sweeps; it finishes with equilibration
sweeps at the final radius.
"""

import math

import numpy as np
from numba import njit

from ._geom import disc_area_in_box

_CAP = 24  # max centers per packing-grid cell (cell side ~ 2 r_target)


@njit(cache=True, inline="always")
def _cell_of(x, y, gx0, gy0, cellx, celly, ncx, ncy):
    ix = int((x - gx0) / cellx)
    iy = int((y - gy0) / celly)
    if ix < 0:
        ix = 0
    if ix > ncx - 1:
        ix = ncx - 1
    if iy < 0:
        iy = 0
    if iy > ncy - 1:
        iy = ncy - 1
    return ix, iy


@njit(cache=True)
def _free_at(x, y, sep, cxs, cys, gix, giy, grid_n, grid_ids,
             gx0, gy0, cellx, celly, ncx, ncy, periodic, lx, ly, skip):
    """True when (x, y) keeps distance >= sep from every disc except ``skip``."""
    ix, iy = _cell_of(x, y, gx0, gy0, cellx, celly, ncx, ncy)
    sep2 = sep * sep
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
            for k in range(grid_n[jx, jy]):
                j = grid_ids[jx, jy, k]
                if j == skip:
                    continue
                dx = x - cxs[j]
                dy = y - cys[j]
                if periodic:
                    dx -= lx * round(dx / lx)
                    dy -= ly * round(dy / ly)
                if dx * dx + dy * dy < sep2:
                    return False
    return True


@njit(cache=True)
def _grid_add(i, x, y, gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy):
    ix, iy = _cell_of(x, y, gx0, gy0, cellx, celly, ncx, ncy)
    grid_ids[ix, iy, grid_n[ix, iy]] = i
    grid_n[ix, iy] += 1
    gix[i] = ix
    giy[i] = iy


@njit(cache=True)
def _grid_move(i, x, y, gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy):
    ix, iy = _cell_of(x, y, gx0, gy0, cellx, celly, ncx, ncy)
    ox, oy = gix[i], giy[i]
    if ix == ox and iy == oy:
        return
    n = grid_n[ox, oy]
    for k in range(n):
        if grid_ids[ox, oy, k] == i:
            grid_ids[ox, oy, k] = grid_ids[ox, oy, n - 1]
            grid_n[ox, oy] = n - 1
            break
    grid_ids[ix, iy, grid_n[ix, iy]] = i
    grid_n[ix, iy] += 1
    gix[i] = ix
    giy[i] = iy


@njit(cache=True)
def rsa_fill_area(seed, rx0, rx1, ry0, ry1, bx0, bx1, by0, by1, r,
                  target_area, periodic, lx, ly, max_attempts):
    """Random sequential adsorption until the clipped covered area reaches target.

    Returns (cxs, cys, n, covered, attempts, status); status 0 = ok,
    1 = attempt budget exhausted before reaching the target area.
    """
    np.random.seed(seed)
    n_max = int(4.2 * target_area / (math.pi * r * r)) + 16
    cxs = np.empty(n_max)
    cys = np.empty(n_max)
    gx0, gy0 = bx0, by0
    dmin = 2.0000001 * r
    ncx = max(1, int((bx1 - bx0) / dmin))
    ncy = max(1, int((by1 - by0) / dmin))
    cellx = (bx1 - bx0) / ncx
    celly = (by1 - by0) / ncy
    grid_n = np.zeros((ncx, ncy), dtype=np.int64)
    grid_ids = np.zeros((ncx, ncy, _CAP), dtype=np.int64)
    gix = np.zeros(n_max, dtype=np.int64)
    giy = np.zeros(n_max, dtype=np.int64)

    n = 0
    covered = 0.0
    last_area = 0.0
    attempts = 0
    while covered < target_area:
        if attempts >= max_attempts or n >= n_max:
            return cxs[:n], cys[:n], n, covered, attempts, 1
        attempts += 1
        x = rx0 + np.random.random() * (rx1 - rx0)
        y = ry0 + np.random.random() * (ry1 - ry0)
        if not _free_at(x, y, 2.0 * r, cxs, cys, gix, giy, grid_n, grid_ids,
                        gx0, gy0, cellx, celly, ncx, ncy, periodic, lx, ly, -1):
            continue
        cxs[n] = x
        cys[n] = y
        _grid_add(n, x, y, gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy)
        if periodic:
            last_area = math.pi * r * r
        else:
            last_area = disc_area_in_box(x, y, r, bx0, by0, bx1, by1)
        covered += last_area
        n += 1
    # drop the last disc if that lands closer to the target
    if n > 0 and (covered - target_area) > (target_area - (covered - last_area)):
        n -= 1
        covered -= last_area
    return cxs[:n], cys[:n], n, covered, attempts, 0


@njit(cache=True)
def _mc_sweeps(n_sweeps, amp, r, cxs, cys, n, rx0, rx1, ry0, ry1,
               gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy,
               periodic, lx, ly):
    """Hard-disc displacement sweeps at separation 2r; returns acceptance count."""
    acc = 0
    for _ in range(n_sweeps):
        for i in range(n):
            x = cxs[i] + (np.random.random() * 2.0 - 1.0) * amp
            y = cys[i] + (np.random.random() * 2.0 - 1.0) * amp
            if periodic:
                x = rx0 + ((x - rx0) % (rx1 - rx0))
                y = ry0 + ((y - ry0) % (ry1 - ry0))
            elif x < rx0 or x > rx1 or y < ry0 or y > ry1:
                continue
            if _free_at(x, y, 2.0 * r, cxs, cys, gix, giy, grid_n, grid_ids,
                        gx0, gy0, cellx, celly, ncx, ncy, periodic, lx, ly, i):
                cxs[i] = x
                cys[i] = y
                _grid_move(i, x, y, gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy)
                acc += 1
    return acc


@njit(cache=True)
def _separate_pairs(r, cxs, cys, n, rx0, rx1, ry0, ry1,
                    gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy,
                    periodic, lx, ly):
    """Push every overlapping pair apart once; returns the overlap count."""
    n_overlap = 0
    sep = 2.0 * r
    for i in range(n):
        ix, iy = gix[i], giy[i]
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
                for k in range(grid_n[jx, jy]):
                    j = grid_ids[jx, jy, k]
                    if j <= i:
                        continue
                    dx = cxs[i] - cxs[j]
                    dy = cys[i] - cys[j]
                    if periodic:
                        dx -= lx * round(dx / lx)
                        dy -= ly * round(dy / ly)
                    d2 = dx * dx + dy * dy
                    if d2 >= sep * sep:
                        continue
                    n_overlap += 1
                    d = math.sqrt(d2)
                    if d < 1e-12:
                        ang = np.random.random() * 2.0 * math.pi
                        dx, dy, d = math.cos(ang), math.sin(ang), 1.0
                    push = 0.5 * (sep - d) * 1.05 + 1e-12
                    ux, uy = dx / d, dy / d
                    for s, m in ((i, 1.0), (j, -1.0)):
                        x = cxs[s] + m * push * ux
                        y = cys[s] + m * push * uy
                        if periodic:
                            x = rx0 + ((x - rx0) % (rx1 - rx0))
                            y = ry0 + ((y - ry0) % (ry1 - ry0))
                        else:
                            # reflect pushes at the region bounds; clamping
                            # would pile discs onto the walls
                            if x < rx0:
                                x = min(2.0 * rx0 - x, rx1)
                            elif x > rx1:
                                x = max(2.0 * rx1 - x, rx0)
                            if y < ry0:
                                y = min(2.0 * ry0 - y, ry1)
                            elif y > ry1:
                                y = max(2.0 * ry1 - y, ry0)
                        cxs[s] = x
                        cys[s] = y
                        _grid_move(s, x, y, gix, giy, grid_n, grid_ids,
                                   gx0, gy0, cellx, celly, ncx, ncy)
    return n_overlap


@njit(cache=True)
def _count_overlaps(r, cxs, cys, n, gix, giy, grid_n, grid_ids,
                    ncx, ncy, periodic, lx, ly):
    cnt = 0
    sep2 = 4.0 * r * r
    for i in range(n):
        ix, iy = gix[i], giy[i]
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
                for k in range(grid_n[jx, jy]):
                    j = grid_ids[jx, jy, k]
                    if j > i:
                        dx = cxs[i] - cxs[j]
                        dy = cys[i] - cys[j]
                        if periodic:
                            dx -= lx * round(dx / lx)
                            dy -= ly * round(dy / ly)
                        if dx * dx + dy * dy < sep2:
                            cnt += 1
    return cnt


@njit(cache=True)
def growth_pack(seed, n, r_target, rx0, rx1, ry0, ry1,
                periodic, lx, ly, eq_sweeps, max_rounds):
    """Pack ``n`` discs of radius ``r_target`` by radius growth.

    Returns (cxs, cys, status); status 0 = ok, 1 = seeding failed,
    2 = growth stalled before reaching the target radius.
    """
    np.random.seed(seed)
    area = (rx1 - rx0) * (ry1 - ry0)
    cov = n * math.pi * r_target * r_target / area
    frac = min(0.75, math.sqrt(0.30 / cov)) if cov > 0.30 else 0.999
    r0 = r_target * frac

    cxs = np.empty(n)
    cys = np.empty(n)
    gx0, gy0 = rx0, ry0
    dmin = 2.0000001 * r_target
    ncx = max(1, int((rx1 - rx0) / dmin))
    ncy = max(1, int((ry1 - ry0) / dmin))
    cellx = (rx1 - rx0) / ncx
    celly = (ry1 - ry0) / ncy
    grid_n = np.zeros((ncx, ncy), dtype=np.int64)
    grid_ids = np.zeros((ncx, ncy, _CAP), dtype=np.int64)
    gix = np.zeros(n, dtype=np.int64)
    giy = np.zeros(n, dtype=np.int64)

    placed = 0
    attempts = 0
    while placed < n:
        if attempts > 2000 * n + 10000:
            return cxs, cys, 1
        attempts += 1
        x = rx0 + np.random.random() * (rx1 - rx0)
        y = ry0 + np.random.random() * (ry1 - ry0)
        if _free_at(x, y, 2.0 * r0, cxs, cys, gix, giy, grid_n, grid_ids,
                    gx0, gy0, cellx, celly, ncx, ncy, periodic, lx, ly, -1):
            cxs[placed] = x
            cys[placed] = y
            _grid_add(placed, x, y, gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy)
            placed += 1

    r = r0
    delta = 0.02
    stall = 0
    amp = 0.3 * r_target
    while r < r_target:
        r_try = min(r_target, r * (1.0 + delta))
        resolved = False
        for round_i in range(max_rounds):
            bad = _separate_pairs(r_try, cxs, cys, n, rx0, rx1, ry0, ry1,
                                  gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly,
                                  ncx, ncy, periodic, lx, ly)
            if bad == 0:
                resolved = True
                break
            if round_i % 10 == 9:
                _mc_sweeps(1, amp, r, cxs, cys, n, rx0, rx1, ry0, ry1,
                           gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly,
                           ncx, ncy, periodic, lx, ly)
        if resolved and _count_overlaps(r_try, cxs, cys, n, gix, giy, grid_n,
                                        grid_ids, ncx, ncy, periodic, lx, ly) == 0:
            r = r_try
            stall = 0
            if delta < 0.02:
                delta *= 1.3
        else:
            stall += 1
            delta *= 0.5
            _mc_sweeps(2, amp, r, cxs, cys, n, rx0, rx1, ry0, ry1,
                       gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly,
                       ncx, ncy, periodic, lx, ly)
            if stall > 60 or delta < 1e-6:
                return cxs, cys, 2
        amp = max(0.02 * r_target, 0.5 * (math.sqrt(area / n) - 2.0 * r))

    acc = _mc_sweeps(eq_sweeps, amp, r_target, cxs, cys, n, rx0, rx1, ry0, ry1,
                     gix, giy, grid_n, grid_ids, gx0, gy0, cellx, celly, ncx, ncy,
                     periodic, lx, ly)
    return cxs, cys, 0
