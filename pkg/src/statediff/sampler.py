"""Drift-free Euler-Maruyama steps and the Metropolis-adjusted chain.

The Metropolis-adjusted scheme (``maem``) proposes plain diffusive steps
X* = X + sqrt(2 h D(X)) N and accepts with

    alpha_h(x, y) = min(1, q_h(y, x) rho_eq(y) / (q_h(x, y) rho_eq(x))),

which enforces detailed balance with respect to rho_eq exactly, for any
step size, without ever evaluating a drift.  Where D and rho_eq are locally
constant the acceptance is one and the scheme IS plain Euler-Maruyama.
Regions where rho_eq vanishes are never entered, which is how reflecting
boundaries are realized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _sampler_kernels as _sk
from .analysis import BinnedStats, bin_trajectory, binned_from_accumulators
from .errors import DriftUndefined, ZeroDensityAtCurrent

_SCHEMES = ("maem", "em-driftfree", "em-full-drift")


@dataclass(frozen=True)
class SamplerConfig:
    """Single-chain run configuration.

    When ``x0`` is given (so the start is not rho_eq-distributed) the first
    ``burn_in`` fraction of steps is excluded from the binned statistics.
    """

    h: float
    n_steps: int
    seed: int = 0
    scheme: str = "maem"
    stride: int = 1
    x0: object = None  # point, or None to draw from rho_eq
    burn_in: float = 0.01

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step size h must be positive")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}")
        if not 0.0 <= self.burn_in < 1.0:
            raise ValueError("burn_in must be a fraction in [0, 1)")


@dataclass(frozen=True)
class SampledTrajectory:
    """Strided positions and per-bin accumulators from one chain."""

    positions: np.ndarray
    times: np.ndarray
    accepted: np.ndarray
    n_steps: int
    n_accepted: int
    n_proposed: int
    bins: BinnedStats
    scheme: str
    h: float

    @property
    def acceptance_fraction(self):
        return self.n_accepted / max(self.n_proposed, 1)


@dataclass(frozen=True)
class EnsembleResult:
    """Pooled accumulators from many independent chains."""

    final_positions: np.ndarray
    bins: BinnedStats
    n_accepted: int
    n_proposed: int
    scheme: str
    h: float

    @property
    def acceptance_fraction(self):
        return self.n_accepted / max(self.n_proposed, 1)


def em_step(x, h, model, noise):
    """Drift-free trial step x + sqrt(2 h D(x)) * noise (any dimension)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    noise = np.atleast_1d(np.asarray(noise, dtype=float))
    out = x + math.sqrt(2.0 * h * model.d(x if x.size > 1 else x[0])) * noise
    return out if out.size > 1 else float(out[0])


def transition_density(x, y, h, model):
    """Gaussian proposal density q_h(x, y) of the drift-free trial step."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    k = x.size
    d = model.d(x if k > 1 else x[0])
    r2 = float(np.sum((x - y) ** 2))
    return math.exp(-r2 / (4.0 * h * d)) / (4.0 * math.pi * h * d) ** (k / 2.0)


def accept_prob(x, y, h, model):
    """Metropolis acceptance alpha_h(x, y); zero into forbidden regions."""
    xs = x if np.size(x) > 1 else float(np.atleast_1d(x)[0])
    ys = y if np.size(y) > 1 else float(np.atleast_1d(y)[0])
    rho_x = model.rho_eq(xs) if model.box.contains(xs) else 0.0
    if rho_x <= 0.0:
        raise ZeroDensityAtCurrent(f"rho_eq({x}) = {rho_x}; chain state invalid")
    if not model.box.contains(ys):
        return 0.0
    rho_y = model.rho_eq(ys)
    if rho_y <= 0.0:
        return 0.0
    ratio = (transition_density(ys, xs, h, model) * rho_y) / \
        (transition_density(xs, ys, h, model) * rho_x)
    return min(1.0, ratio)


def sample_from_rho(model, rng, n=1):
    """Draw from rho_eq by rejection against its maximum on a probe grid."""
    box = model.box
    if box.dim == 1:
        lo, hi = box.lo[0], box.hi[0]
        xs = np.linspace(lo, hi, 2049)
        cap = float(np.max(model.rho_eq.values(xs))) * 1.05
        out = np.empty(n)
        filled = 0
        while filled < n:
            cand = rng.uniform(lo, hi, size=2 * (n - filled))
            u = rng.uniform(0.0, cap, size=cand.size)
            good = cand[u < model.rho_eq.values(cand)]
            take = min(good.size, n - filled)
            out[filled: filled + take] = good[:take]
            filled += take
        return out if n > 1 else float(out[0])
    raise NotImplementedError("rho_eq sampling is 1D-only")


def _mirror_fold(y, lo, hi):
    width = hi - lo
    y = np.mod(np.asarray(y, dtype=float) - lo, 2.0 * width)
    y = np.where(y > width, 2.0 * width - y, y)
    return y + lo


def _drift_values(model, xs):
    rho = model.rho_eq.values(xs)
    return model.d.gradient_values(xs) + model.d.values(xs) * \
        model.rho_eq.gradient_values(xs) / rho


def run(model, config, edges=None):
    """One chain of the configured scheme; model must be 1D for chains.

    Positions are stored every ``config.stride`` steps; binned statistics
    use every step, with rejected maem steps contributing zero displacement
    to the effective-diffusion estimator.
    """
    if model.dim != 1:
        raise NotImplementedError("single-chain runs are 1D; use em_box_occupation in 2D")
    if config.scheme == "em-full-drift" and not model.smooth():
        raise DriftUndefined("em-full-drift needs smooth D and rho_eq")
    lo, hi = model.box.lo[0], model.box.hi[0]
    if edges is None:
        edges = np.linspace(lo, hi, 21)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    x = float(config.x0) if config.x0 is not None else sample_from_rho(model, rng)

    n = config.n_steps
    kept = np.empty(n // config.stride + 1)
    kept_t = np.empty(kept.size)
    kept_acc = np.ones(kept.size, dtype=bool)
    all_x = np.empty(n + 1)
    disp = np.empty(n)
    n_acc = 0
    kept[0] = x
    kept_t[0] = 0.0
    all_x[0] = x
    ki = 1
    for step in range(n):
        z = rng.standard_normal()
        y = em_step(x, config.h, model, z)
        accepted = True
        if config.scheme == "maem":
            if rng.random() < accept_prob(x, y, config.h, model):
                n_acc += 1
            else:
                y = x
                accepted = False
        else:
            if config.scheme == "em-full-drift":
                y = y + config.h * float(_drift_values(model, np.array([x]))[0])
            y = float(_mirror_fold(y, lo, hi))
            n_acc += 1
        disp[step] = y - x
        x = y
        all_x[step + 1] = x
        if (step + 1) % config.stride == 0 and ki < kept.size:
            kept[ki] = x
            kept_t[ki] = (step + 1) * config.h
            kept_acc[ki] = accepted
            ki += 1
    skip = int(n * config.burn_in) if config.x0 is not None else 0
    bins = bin_trajectory(all_x[skip:], edges, h=config.h,
                          displacements=disp[skip:])
    return SampledTrajectory(kept[:ki], kept_t[:ki], kept_acc[:ki], n, n_acc,
                             n, bins, config.scheme, config.h)


def run_ensemble(model, h, n_steps, n_chains, seed, scheme="maem",
                 edges=None, x0=None):
    """Many independent chains; compiled fast path for 1D exportable fields.

    ``x0`` may be an array of starts (length n_chains); by default chains
    start from rho_eq exactly, so pooled snapshots are stationary draws.
    Returns an EnsembleResult whose final positions are iid across chains.
    """
    if model.dim != 1:
        raise NotImplementedError("ensembles are 1D; use em_box_occupation in 2D")
    if scheme == "em-full-drift":
        return _run_ensemble_python(model, h, n_steps, n_chains, seed, scheme, edges, x0)
    lo, hi = model.box.lo[0], model.box.hi[0]
    if edges is None:
        edges = np.linspace(lo, hi, 21)
    edges = np.asarray(edges, dtype=float)
    ss = np.random.SeedSequence(seed)
    s_init, s_kernel = (int(v) for v in ss.generate_state(2, dtype=np.uint32))
    if x0 is None:
        x0 = sample_from_rho(model, np.random.default_rng(s_init), n_chains)
    x0 = np.asarray(x0, dtype=float).reshape(-1)

    db, dk, dc, dp, dsc = model.d.kernel_arrays()
    rb, rk, rc, rp, rsc = model.rho_eq.kernel_arrays()
    code = _sk.SCHEME_MAEM if scheme == "maem" else _sk.SCHEME_EM_FOLD
    finals, occ, disp2, steps, n_acc, n_prop = _sk.run_chains_1d(
        x0, n_steps, h, s_kernel, code, db, dk, dc, dp, dsc,
        rb, rk, rc, rp, rsc, lo, hi, edges)
    bins = binned_from_accumulators(edges, occ, disp2, steps, h)
    return EnsembleResult(finals, bins, int(n_acc), int(n_prop), scheme, h)


def _run_ensemble_python(model, h, n_steps, n_chains, seed, scheme, edges, x0):
    """Vectorized numpy fallback (full-drift scheme, exotic pieces)."""
    if scheme == "em-full-drift" and not model.smooth():
        raise DriftUndefined("em-full-drift needs smooth D and rho_eq")
    lo, hi = model.box.lo[0], model.box.hi[0]
    if edges is None:
        edges = np.linspace(lo, hi, 21)
    edges = np.asarray(edges, dtype=float)
    nb = edges.size - 1
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x = np.asarray(x0, dtype=float).reshape(-1).copy() if x0 is not None \
        else sample_from_rho(model, rng, n_chains)
    occ = np.zeros(nb, dtype=np.int64)
    disp2 = np.zeros(nb)
    steps = np.zeros(nb, dtype=np.int64)
    for _ in range(n_steps):
        d = model.d.values(x)
        y = x + np.sqrt(2.0 * h * d) * rng.standard_normal(x.size)
        y = y + h * _drift_values(model, x)
        y = _mirror_fold(y, lo, hi)
        k = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, nb - 1)
        np.add.at(occ, k, 1)
        np.add.at(disp2, k, (y - x) ** 2)
        np.add.at(steps, k, 1)
        x = y
    bins = binned_from_accumulators(edges, occ, disp2, steps, h)
    return EnsembleResult(x, bins, int(steps.sum()), int(steps.sum()), scheme, h)


def em_box_occupation(d_left, d_right, box, h, n_steps, n_chains, seed):
    """Fig.-1-style experiment: drift-free EM in a 2D box, D split at midline.

    Returns (time_left, time_right) as step counts after 1% burn-in per
    chain; the drift-free Ito equilibrium makes the expected ratio
    (1/d_right) / (1/d_left).
    """
    bx0, by0, bx1, by1 = (float(v) for v in box)
    xm = 0.5 * (bx0 + bx1)
    s = int(np.random.SeedSequence(seed).generate_state(1, dtype=np.uint32)[0])
    n_l, n_r = _sk.em_box_2d(n_chains, n_steps, h, s, d_left, d_right,
                             bx0, by0, bx1, by1, xm)
    return int(n_l), int(n_r)
