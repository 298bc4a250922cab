import math

import numpy as np
import pytest

from statediff.analysis import (BinnedStats, batch_means, bin_trajectory,
                                binned_from_accumulators, compare_chi_square,
                                fit_diffusion, lag_msd, msd_curve)
from statediff.errors import LowCount, SampleOutOfRange


def test_single_sample_density():
    edges = np.linspace(-1.0, 1.0, 21)
    # one sample in the third bin: density 1/(1 * 0.1) there, zero elsewhere
    b = bin_trajectory([-0.75], edges)
    assert b.density[2] == pytest.approx(10.0)
    assert np.sum(b.density) == pytest.approx(10.0)
    assert b.counts.sum() == 1


def test_density_normalization_invariant(rng):
    edges = np.linspace(-1.0, 1.0, 21)
    x = rng.uniform(-1, 1, size=5000)
    b = bin_trajectory(x, edges)
    assert np.sum(b.density * b.widths) == pytest.approx(1.0, abs=1e-9)


def test_sample_out_of_range():
    with pytest.raises(SampleOutOfRange):
        bin_trajectory([1.5], np.linspace(-1, 1, 21))


def test_deff_unbiased_constant_d(rng):
    # all-accepted chain with constant D: every bin's D_eff within 4 sigma
    h, d = 1e-3, 0.7
    n = 200_000
    x = np.empty(n)
    x[0] = 0.0
    steps = math.sqrt(2 * d * h) * rng.standard_normal(n - 1)
    x[1:] = np.cumsum(steps)
    x = np.mod(x + 1.0, 2.0) - 1.0  # wrap into [-1, 1] to keep samples in range
    disp = np.diff(x)
    big = np.abs(disp) > 1.0  # unwrap the few wrap jumps
    disp[big] -= np.sign(disp[big]) * 2.0
    edges = np.linspace(-1.0, 1.0, 21)
    b = bin_trajectory(x, edges, h=h, displacements=disp)
    pulls = (b.d_eff - d) / b.d_eff_se
    assert np.all(np.abs(pulls[b.counts > 200]) < 4.0)


def test_deff_estimator_repetitions(rng):
    # repeated small chains: |mean - D| <= 4 stderr of the repetition mean
    h, d, reps = 1e-3, 1.3, 100
    means = []
    for _ in range(reps):
        disp = math.sqrt(2 * d * h) * rng.standard_normal(2000)
        means.append(np.mean(disp ** 2) / (2 * h))
    means = np.array(means)
    se = means.std(ddof=1) / math.sqrt(reps)
    assert abs(means.mean() - d) <= 4 * se


def test_batch_means_scaling(rng):
    x = rng.standard_normal(40_000)
    _, se20 = batch_means(x, 20)
    ref = x.std(ddof=1) / math.sqrt(x.size)
    assert se20 == pytest.approx(ref, rel=0.35)


def test_msd_curve_stationary_and_ballistic():
    times = np.array([1.0, 2.0, 3.0])
    still = np.zeros((3, 3, 2))
    t, m, se = msd_curve(still, times)
    assert np.all(m == 0.0)
    # ballistic: x = v t with |v| = 1 for every member
    vels = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
    pos = vels[:, None, :] * times[:, None]
    t, m, se = msd_curve(pos, times)
    assert np.allclose(m, times ** 2)


def test_msd_curve_brownian_slope(rng):
    d, h = 0.9, 0.01
    n_mem, n_ck = 400, 200
    steps = math.sqrt(2 * d * h) * rng.standard_normal((n_mem, n_ck, 2))
    pos = np.cumsum(steps, axis=1)
    times = h * np.arange(1, n_ck + 1)
    t, m, se = msd_curve(pos, times)
    d_hat, _ = fit_diffusion(t, m[None, :], dim=2)
    assert d_hat == pytest.approx(d, rel=0.05)


def test_lag_msd_matches_brownian(rng):
    d, h = 0.5, 0.01
    steps = math.sqrt(2 * d * h) * rng.standard_normal((200, 2000, 2))
    pos = np.cumsum(steps, axis=1)
    lt, msd = lag_msd(pos, h, np.arange(5, 100))
    d_hat, se = fit_diffusion(lt, msd, dim=2)
    assert d_hat == pytest.approx(d, rel=0.04)
    assert abs(d_hat - d) < 4 * se


def test_chi_square_exact_and_power(rng):
    edges = np.linspace(-1, 1, 21)
    n = 100_000
    counts = np.full(20, n // 20)
    b = BinnedStats(edges, counts, None, None, None, None, n)
    stat, p = compare_chi_square(b, np.full(20, 0.05))
    assert stat == pytest.approx(0.0)
    # 2:1 step observed against flat expected at n = 1e5: decisive rejection
    step = np.array([2.0] * 10 + [1.0] * 10)
    step_counts = rng.multinomial(n, step / step.sum())
    b2 = BinnedStats(edges, step_counts, None, None, None, None, n)
    stat2, p2 = compare_chi_square(b2, np.full(20, 0.05))
    assert p2 < 1e-10


def test_chi_square_null_calibration(rng):
    edges = np.linspace(0, 1, 11)
    ps = []
    for _ in range(300):
        counts = rng.multinomial(2000, np.full(10, 0.1))
        b = BinnedStats(edges, counts, None, None, None, None, 2000)
        ps.append(compare_chi_square(b, np.full(10, 0.1))[1])
    ps = np.array(ps)
    # p-values should look uniform: mean near 1/2 and few extremes
    assert abs(ps.mean() - 0.5) < 0.1
    assert (ps < 0.01).sum() <= 12


def test_chi_square_low_count():
    edges = np.linspace(0, 1, 11)
    b = BinnedStats(edges, np.full(10, 3), None, None, None, None, 30)
    with pytest.raises(LowCount):
        compare_chi_square(b, np.full(10, 0.1))


def test_binned_from_accumulators():
    edges = np.linspace(-1, 1, 5)
    counts = np.array([10, 20, 30, 40])
    disp2 = np.array([0.2, 0.4, 0.6, 0.8])
    steps = np.array([10, 20, 30, 40])
    b = binned_from_accumulators(edges, counts, disp2, steps, h=0.01)
    assert b.n_samples == 100
    assert np.sum(b.density * b.widths) == pytest.approx(1.0)
    assert b.d_eff[0] == pytest.approx(0.2 / 10 / 0.02)
