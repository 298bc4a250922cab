"""Shared estimators: spatial binning, per-bin effective diffusion, MSD
curves, batch-means errors, and chi-square comparisons.

Every figure- or table-style result flows through here; outputs are plain
arrays ready for CSV emission.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _st

from .errors import LowCount, SampleOutOfRange


@dataclass(frozen=True)
class BinnedStats:
    """Per-bin occupancy and effective-diffusion estimates.

    ``d_eff`` is the mean of (X_{n+1}-X_n)^2 / (2h) over all steps that start
    in the bin, with rejected steps contributing zero displacement.  Density
    integrates to one over the binned range.
    """

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    density_se: np.ndarray
    d_eff: np.ndarray
    d_eff_se: np.ndarray
    n_samples: int
    h: float = float("nan")

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self):
        return np.diff(self.edges)


def batch_means(x, n_batches=20):
    """(mean, stderr) of a correlated series via batch means."""
    x = np.asarray(x, dtype=float)
    n = x.size // n_batches
    if n < 1:
        raise ValueError("series too short for the requested batch count")
    b = x[: n * n_batches].reshape(n_batches, n).mean(axis=1)
    return float(b.mean()), float(b.std(ddof=1) / np.sqrt(n_batches))


def bin_trajectory(positions, edges, h=float("nan"), displacements=None, n_batches=20):
    """Bin a single chain; batch-means standard errors over time blocks.

    ``displacements`` are X_{n+1}-X_n (length len(positions)-1, rejected
    steps included as zeros); when given, per-bin effective diffusion is
    estimated from steps starting in each bin.
    """
    x = np.asarray(positions, dtype=float).reshape(-1)
    edges = np.asarray(edges, dtype=float)
    if x.size and (x.min() < edges[0] or x.max() > edges[-1]):
        raise SampleOutOfRange(
            f"samples span [{x.min()}, {x.max()}] outside [{edges[0]}, {edges[-1]}]")
    nb = edges.size - 1
    widths = np.diff(edges)

    idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, nb - 1)
    counts = np.bincount(idx, minlength=nb).astype(np.int64)
    density = counts / (x.size * widths)

    # batch-means over contiguous time blocks for both density and D_eff
    blk = max(1, x.size // n_batches)
    dens_blocks = np.empty((n_batches, nb))
    for b in range(n_batches):
        sl = idx[b * blk: (b + 1) * blk] if b < n_batches - 1 else idx[b * blk:]
        c = np.bincount(sl, minlength=nb)
        dens_blocks[b] = c / (max(sl.size, 1) * widths)
    density_se = dens_blocks.std(axis=0, ddof=1) / np.sqrt(n_batches)

    d_eff = np.full(nb, np.nan)
    d_eff_se = np.full(nb, np.nan)
    if displacements is not None:
        dx = np.asarray(displacements, dtype=float).reshape(-1)
        key = idx[: dx.size]
        contrib = dx * dx / (2.0 * h)
        tot = np.bincount(key, weights=contrib, minlength=nb)
        n_steps = np.bincount(key, minlength=nb)
        nz = n_steps > 0
        d_eff[nz] = tot[nz] / n_steps[nz]
        blocks = np.full((n_batches, nb), np.nan)
        for b in range(n_batches):
            sl = slice(b * blk, (b + 1) * blk if b < n_batches - 1 else dx.size)
            kb = key[sl]
            cb = contrib[sl]
            tb = np.bincount(kb, weights=cb, minlength=nb)
            nb_ = np.bincount(kb, minlength=nb)
            m = nb_ > 0
            blocks[b, m] = tb[m] / nb_[m]
        with np.errstate(invalid="ignore"):
            d_eff_se = np.nanstd(blocks, axis=0, ddof=1) / np.sqrt(n_batches)
    return BinnedStats(edges, counts, density, density_se, d_eff, d_eff_se,
                       int(x.size), float(h))


def binned_from_accumulators(edges, counts, disp2_sum, step_counts, h,
                             n_chains=None):
    """BinnedStats from kernel accumulators (iid chains pooled).

    ``counts`` are occupancy snapshots; ``disp2_sum``/``step_counts`` hold
    the per-bin sums of squared step displacements and step counts.
    """
    edges = np.asarray(edges, dtype=float)
    counts = np.asarray(counts, dtype=np.int64)
    widths = np.diff(edges)
    n = int(counts.sum())
    density = counts / (n * widths)
    p = counts / max(n, 1)
    density_se = np.sqrt(np.maximum(p * (1 - p), 0.0) / max(n, 1)) / widths
    d_eff = np.full(edges.size - 1, np.nan)
    d_eff_se = np.full(edges.size - 1, np.nan)
    sc = np.asarray(step_counts, dtype=float)
    nz = sc > 0
    mean2 = np.zeros_like(sc)
    mean2[nz] = np.asarray(disp2_sum)[nz] / sc[nz]
    d_eff[nz] = mean2[nz] / (2.0 * h)
    # Gaussian steps: Var((dX)^2) = 2 (2Dh)^2, so SE(D_eff) ~ D_eff sqrt(2/n)
    d_eff_se[nz] = d_eff[nz] * np.sqrt(2.0 / sc[nz])
    return BinnedStats(edges, counts, density, density_se, d_eff, d_eff_se, n, float(h))


def msd_curve(positions, times):
    """Ensemble mean-square displacement at absolute checkpoint times.

    ``positions`` has shape (members, checkpoints, dim), unfolded, with the
    origin at zero displacement.  Returns (times, msd, stderr).
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 3 or pos.shape[0] < 2:
        raise ValueError("need an (M, K, dim) ensemble with M >= 2")
    sq = np.sum(pos ** 2, axis=2)
    msd = sq.mean(axis=0)
    se = sq.std(axis=0, ddof=1) / np.sqrt(pos.shape[0])
    return np.asarray(times, dtype=float), msd, se


def lag_msd(positions, dt, lags):
    """Origin-averaged MSD per member at the given integer checkpoint lags.

    Averaging over sliding time origins within each trajectory sharply
    reduces variance relative to fixed-origin curves.  Returns
    (lag_times, msd[member, lag]).
    """
    pos = np.asarray(positions, dtype=float)
    lags = np.asarray(lags, dtype=int)
    m, k, _ = pos.shape
    out = np.empty((m, lags.size))
    for j, lag in enumerate(lags):
        d = pos[:, lag:, :] - pos[:, :-lag or None, :]
        out[:, j] = np.mean(np.sum(d * d, axis=2), axis=1)
    return lags * dt, out


def fit_diffusion(lag_times, msd, dim=2):
    """Affine least-squares fit msd = intercept + 2*dim*D*t; returns (D, se).

    ``msd`` may be (members, lags); the fit runs per member and the estimate
    pools members (mean and standard error over the ensemble).
    """
    t = np.asarray(lag_times, dtype=float)
    msd = np.atleast_2d(np.asarray(msd, dtype=float))
    A = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(A, msd.T, rcond=None)
    d_members = coef[1] / (2.0 * dim)
    if d_members.size == 1:
        return float(d_members[0]), float("nan")
    return float(d_members.mean()), float(d_members.std(ddof=1) / np.sqrt(d_members.size))


def _expected_bin_probs(expected, edges):
    edges = np.asarray(edges, dtype=float)
    if hasattr(expected, "mass_between"):
        p = np.array([expected.mass_between(a, b) for a, b in zip(edges[:-1], edges[1:])])
    elif hasattr(expected, "integral_on"):
        p = np.array([expected.integral_on(a, b) for a, b in zip(edges[:-1], edges[1:])])
    else:
        p = np.asarray(expected, dtype=float)
        if p.size != edges.size - 1:
            raise ValueError("expected probabilities must match bin count")
    s = p.sum()
    if s <= 0 or np.any(p < 0):
        raise ValueError("expected distribution must be nonnegative with positive mass")
    return p / s


def compare_chi_square(observed, expected):
    """Pearson chi-square of binned counts against an expected distribution.

    ``observed`` is a BinnedStats (or a counts array paired with edges via
    BinnedStats); ``expected`` may be a ScalarField, a DensityProfile, or an
    array of per-bin probabilities.  Returns (statistic, p_value) with
    bins-1 degrees of freedom.  Counts must be iid samples.
    """
    counts = np.asarray(observed.counts, dtype=float)
    p = _expected_bin_probs(expected, observed.edges)
    n = counts.sum()
    exp_counts = n * p
    if np.any(exp_counts < 5.0):
        raise LowCount(f"minimum expected count {exp_counts.min():.2f} < 5")
    stat = float(np.sum((counts - exp_counts) ** 2 / exp_counts))
    dof = counts.size - 1
    return stat, float(_st.chi2.sf(stat, dof))
