"""Compiled chain kernels for the 1D samplers and the 2D two-valued box.

1D fields enter as the flat piecewise arrays produced by
ScalarField.kernel_arrays(): interior breakpoints plus per-piece
(kind, coeffs, power, scale) rows, kinds as in statediff.fields.
"""

import math

import numpy as np
from numba import njit

SCHEME_MAEM = 0
SCHEME_EM_FOLD = 1


@njit(cache=True, inline="always")
def _eval_piece(kind, coefs, power, scale, x):
    # Horner on the fixed-width coefficient row
    v = 0.0
    for i in range(coefs.size - 1, -1, -1):
        v = v * x + coefs[i]
    if kind == 0:
        return v
    if kind == 1:
        return scale * v ** power
    return scale * math.exp(coefs[0] + coefs[1] * x + coefs[2] * x * x)


@njit(cache=True, inline="always")
def _field_eval(x, breaks, kinds, coefs, powers, scales):
    j = np.searchsorted(breaks, x, side="right")
    return _eval_piece(kinds[j], coefs[j], powers[j], scales[j], x)


@njit(cache=True, inline="always")
def _bin_of(x, lo, inv_w, nb):
    k = int((x - lo) * inv_w)
    if k < 0:
        k = 0
    if k > nb - 1:
        k = nb - 1
    return k


@njit(cache=True)
def run_chains_1d(x0, n_steps, h, seed, scheme,
                  d_breaks, d_kinds, d_coefs, d_pows, d_scales,
                  r_breaks, r_kinds, r_coefs, r_pows, r_scales,
                  lo, hi, edges):
    """Advance every chain ``n_steps`` with the chosen scheme.

    maem: drift-free proposals, Metropolis-corrected against rho_eq, which
    vanishes outside [lo, hi] (proposals out of range always rejected).
    em-fold: plain drift-free steps, mirror-folded into [lo, hi].

    Accumulates per-bin occupancy of the pre-step points, per-bin sums of
    squared realized displacements (rejected steps contribute zero), and the
    acceptance count.  Returns (finals, occupancy, disp2, step_counts,
    n_accepted, n_proposed).
    """
    np.random.seed(seed)
    nb = edges.size - 1
    inv_w = nb / (edges[nb] - edges[0])
    e0 = edges[0]
    occupancy = np.zeros(nb, dtype=np.int64)
    disp2 = np.zeros(nb)
    steps = np.zeros(nb, dtype=np.int64)
    finals = np.empty(x0.size)
    n_acc = 0
    n_prop = 0
    for c in range(x0.size):
        x = x0[c]
        rho_x = _field_eval(x, r_breaks, r_kinds, r_coefs, r_pows, r_scales) \
            if (lo <= x <= hi) else 0.0
        d_x = _field_eval(x, d_breaks, d_kinds, d_coefs, d_pows, d_scales)
        for n in range(n_steps):
            z = np.random.normal(0.0, 1.0)
            sig = math.sqrt(2.0 * h * d_x)
            y = x + sig * z
            k = _bin_of(x, e0, inv_w, nb)
            occupancy[k] += 1
            steps[k] += 1
            n_prop += 1
            if scheme == SCHEME_MAEM:
                accept = False
                rho_y = 0.0
                d_y = d_x
                if lo <= y <= hi:
                    rho_y = _field_eval(y, r_breaks, r_kinds, r_coefs, r_pows, r_scales)
                    if rho_y > 0.0:
                        d_y = _field_eval(y, d_breaks, d_kinds, d_coefs, d_pows, d_scales)
                        dxy = y - x
                        q_xy = math.exp(-dxy * dxy / (4.0 * h * d_x)) / math.sqrt(4.0 * math.pi * h * d_x)
                        q_yx = math.exp(-dxy * dxy / (4.0 * h * d_y)) / math.sqrt(4.0 * math.pi * h * d_y)
                        ratio = (q_yx * rho_y) / (q_xy * rho_x)
                        accept = np.random.random() < min(1.0, ratio)
                if accept:
                    disp2[k] += (y - x) * (y - x)
                    x = y
                    rho_x = rho_y
                    d_x = d_y
                    n_acc += 1
            else:
                while y < lo or y > hi:
                    y = 2.0 * lo - y if y < lo else 2.0 * hi - y
                disp2[k] += (y - x) * (y - x)
                x = y
                d_x = _field_eval(x, d_breaks, d_kinds, d_coefs, d_pows, d_scales)
                n_acc += 1
        finals[c] = x
    return finals, occupancy, disp2, steps, n_acc, n_prop


@njit(cache=True)
def em_box_2d(n_chains, n_steps, h, seed, d_left, d_right,
              bx0, by0, bx1, by1, xm):
    """Drift-free 2D Euler-Maruyama in a box, two-valued D split at ``xm``.

    Proposals are mirror-folded at the walls.  Chains start from the
    drift-free Ito equilibrium (density 1/D per side).  Counts occupancy of
    the post-burn-in points per side; returns (n_left, n_right).
    """
    np.random.seed(seed)
    n_left = 0
    n_right = 0
    w_left = (1.0 / d_left) / (1.0 / d_left + 1.0 / d_right)
    burn = n_steps // 100
    for c in range(n_chains):
        if np.random.random() < w_left:
            x = bx0 + np.random.random() * (xm - bx0)
        else:
            x = xm + np.random.random() * (bx1 - xm)
        y = by0 + np.random.random() * (by1 - by0)
        for n in range(n_steps):
            d = d_left if x < xm else d_right
            sig = math.sqrt(2.0 * h * d)
            x2 = x + sig * np.random.normal(0.0, 1.0)
            y2 = y + sig * np.random.normal(0.0, 1.0)
            while x2 < bx0 or x2 > bx1:
                x2 = 2.0 * bx0 - x2 if x2 < bx0 else 2.0 * bx1 - x2
            while y2 < by0 or y2 > by1:
                y2 = 2.0 * by0 - y2 if y2 < by0 else 2.0 * by1 - y2
            x = x2
            y = y2
            if n >= burn:
                if x < xm:
                    n_left += 1
                else:
                    n_right += 1
    return n_left, n_right
