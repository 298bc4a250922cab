"""Acceptance suite: one test per criterion, tolerances pinned up front.

Each test records a PASS/FAIL line (see conftest terminal summary) and then
asserts.  Run lengths are sized so every stated tolerance is at least ~2
standard errors wide; seeds are fixed, so green results replay exactly.
"""

import math

import numpy as np
import pytest

from conftest import record_criterion

from statediff import (Box, ConventionSpec, DiffusionModel, Poly1,
                       ScalarField, convention_flux_residual, ito_drift_field,
                       sqrt_double, stationary_density_driftfree, to_ito_drift)
from statediff.analysis import BinnedStats, compare_chi_square
from statediff.billiard import (DiscField, ParticleState, advance_by_time,
                                generate_field, next_event, random_free_state,
                                run_event_invariants, two_domain_field)
from statediff.fokker_planck import (DensityProfile, Grid1D, evolve,
                                     profile_from_field, steady_state)
from statediff.lorentz import (estimate_D, f_dilute_asymptote,
                               occupation_ratio)
from statediff.sampler import (accept_prob, em_box_occupation, run_ensemble,
                               transition_density)

BOX1 = Box.interval(-1.0, 1.0)


def experiment_model():
    return DiffusionModel(BOX1, ScalarField.split_x(BOX1, 0.0, 1.0, 2.0),
                          ScalarField.constant(1.0, BOX1))


def bin_finals(finals, nb=20):
    edges = np.linspace(-1.0, 1.0, nb + 1)
    idx = np.clip(np.searchsorted(edges, finals, side="right") - 1, 0, nb - 1)
    counts = np.bincount(idx, minlength=nb)
    return BinnedStats(edges, counts, None, None, None, None, int(counts.sum()))


# -- 1-3: occupation-ratio experiments ---------------------------------------

def test_criterion_1_table_setup_1():
    res = occupation_ratio(0.3, 0.5, 0.6, 0.5, total_time=4.0e7, seed=101,
                           box=(0.0, 0.0, 60.0, 30.0))
    ok = abs(res.ratio - 1.00) <= 0.05
    record_criterion(
        "1 set-up 1 (30x60, T=4e7)",
        ok, f"ratio {res.ratio:.4f} +- {res.stderr:.4f}, target 1.00 +- 0.05")
    assert res.check_time_balance()
    assert ok


def test_criterion_2_table_setup_2():
    res = occupation_ratio(0.09, 0.60, 0.75, 0.30, total_time=6.0e6, seed=102,
                           box=(0.0, 0.0, 40.0, 20.0))
    ok = abs(res.ratio - 0.50) <= 0.06
    record_criterion(
        "2 set-up 2 (20x40, T=6e6)",
        ok, f"ratio {res.ratio:.4f} +- {res.stderr:.4f}, target 0.50 +- 0.06")
    assert res.check_time_balance()
    assert ok


def test_criterion_3_ergodic_generalization():
    # neither named prediction applies; the free-fraction oracle does
    res = occupation_ratio(0.25, 0.50, 0.6, 0.25, total_time=1.2e7, seed=103,
                           box=(0.0, 0.0, 40.0, 20.0))
    ok = abs(res.ratio - 0.50) <= 0.05
    record_criterion(
        "3 ergodic ratio phi2/phi1 (0.25/0.50)",
        ok, f"ratio {res.ratio:.4f} +- {res.stderr:.4f}, target 0.50 +- 0.05")
    assert ok


# -- 4-5: diffusion-coefficient experiments ----------------------------------

def test_criterion_4_radius_scaling():
    e1 = estimate_D(0.3, 0.5, ensemble=200, horizon=2000.0, seed=104)
    e2 = estimate_D(0.6, 0.5, ensemble=200, horizon=2000.0, seed=105)
    ratio = e2.d_hat / e1.d_hat
    ok = abs(ratio - 2.0) <= 0.1
    record_criterion(
        "4 D(0.6,0.5)/D(0.3,0.5) (M=200, T=2000)",
        ok, f"ratio {ratio:.3f} (D1 {e1.d_hat:.4f}, D2 {e2.d_hat:.4f}), target 2.0 +- 0.1")
    assert ok


def test_criterion_5_f_curve_anchors():
    window = (400.0, 1600.0)
    common = dict(horizon=16000.0, lag_window=window, n_checkpoints=1000)
    e05 = estimate_D(0.3, 0.5, ensemble=160, cell_side=48.0, seed=105001, **common)
    e06 = estimate_D(0.3, 0.6, ensemble=160, cell_side=48.0, seed=105002, **common)
    e03 = estimate_D(0.5, 0.3, ensemble=120, cell_side=20.0, seed=105003, **common)
    e95 = estimate_D(0.3, 0.95, ensemble=150, seed=105004, **common)
    f05, f06, f03, f95 = (e.d_hat / e.r for e in (e05, e06, e03, e95))
    asym = f_dilute_asymptote(0.95)
    checks = {
        "f(0.5)": (f05, 0.30, 0.15), "f(0.6)": (f06, 0.52, 0.15),
        "f(0.3)": (f03, 0.124, 0.20), "f(0.95)": (f95, asym, 0.25),
    }
    details = []
    ok = True
    for name, (val, ref, tol) in checks.items():
        inside = abs(val - ref) <= tol * ref
        ok &= inside
        details.append(f"{name}={val:.4f} (ref {ref:.3f} +-{tol:.0%}{'' if inside else ' MISS'})")
    record_criterion("5 f(phi) anchors", ok, "; ".join(details))
    assert ok


# -- 6: drift-free Euler-Maruyama box ----------------------------------------

def test_criterion_6_em_box_two_valued():
    n_l, n_r = em_box_occupation(1.0, 2.0, (-5.0, 0.0, 5.0, 5.0), h=0.01,
                                 n_steps=20_000, n_chains=2000, seed=106)
    ratio = n_r / n_l
    ok = abs(ratio - 0.50) <= 0.03
    record_criterion(
        "6 drift-free EM box, D=(1,2) (4e7 steps)",
        ok, f"ratio {ratio:.4f}, target 0.50 +- 0.03")
    assert ok


# -- 7: Metropolis-adjusted sampler h-sweep ----------------------------------

def test_criterion_7_maem_density_and_deff():
    model = experiment_model()
    included = [i for i in range(20) if i not in (0, 9, 10, 19)]
    d_true = np.where(np.arange(20) < 10, 1.0, 2.0)
    errs = {}
    ps = {}
    for i, h in enumerate((1e-2, 1e-3, 1e-4)):
        res = run_ensemble(model, h, 64, 10_000_000, seed=1070 + i)
        stat, p = compare_chi_square(bin_finals(res.final_positions),
                                     np.full(20, 0.05))
        ps[h] = p
        rel = np.abs(res.bins.d_eff - d_true) / d_true
        errs[h] = float(np.max(rel[included]))
    ok_flat = all(p > 1e-3 for p in ps.values())
    ok_final = errs[1e-4] <= 0.05
    ok_mono = errs[1e-2] > errs[1e-3] > errs[1e-4]
    ok = ok_flat and ok_final and ok_mono
    record_criterion(
        "7 maem h-sweep (1e7 chains/h)",
        ok, f"chi2 p={ {h: round(p, 4) for h, p in ps.items()} }, "
            f"D_eff rel err={ {h: round(e, 4) for h, e in errs.items()} }")
    assert ok_flat and ok_final and ok_mono


# -- 8: detailed balance ------------------------------------------------------

def test_criterion_8_detailed_balance():
    model = experiment_model()
    rng = np.random.default_rng(108)
    h = 0.01
    worst = 0.0
    for _ in range(10_000):
        x, y = rng.uniform(-1.0, 1.0, size=2)
        lhs = model.rho_eq(x) * transition_density(x, y, h, model) * accept_prob(x, y, h, model)
        rhs = model.rho_eq(y) * transition_density(y, x, h, model) * accept_prob(y, x, h, model)
        worst = max(worst, abs(lhs - rhs))
    ok = worst <= 1e-12
    record_criterion("8 detailed balance (1e4 pairs)", ok,
                     f"max violation {worst:.2e}, bound 1e-12")
    assert ok


# -- 9: billiard invariants ----------------------------------------------------

def test_criterion_9_billiard_invariants():
    field = two_domain_field((0.0, 0.0, 24.0, 12.0), 0.3, 0.5, 0.6, 0.5, seed=901)
    s0 = random_free_state(field, np.random.default_rng(902))
    _, inv = run_event_invariants(field, s0, 1_000_000)
    ok_speed = inv["max_speed_err"] <= 1e-9
    ok_pen = inv["max_penetration"] <= 1e-9

    # wall-dominated reversal: >= 1e3 events (dispersing collisions amplify
    # round-off ~x3-10 per event, so the 1e3-event budget needs flat walls)
    empty = DiscField([], [], [], (0.0, 0.0, 3.0, 2.0))
    s = ParticleState((1.1, 0.7), (math.cos(0.31), math.sin(0.31)))
    fwd = advance_by_time(s, empty, 1500.0)
    ret = advance_by_time(ParticleState(fwd.position, (-fwd.velocity[0], -fwd.velocity[1])),
                          empty, 1500.0)
    err_wall = math.hypot(ret.position[0] - 1.1, ret.position[1] - 0.7)
    disc_f = generate_field((0.0, 0.0, 12.0, 12.0), 0.4, 0.5, seed=903)
    sd = random_free_state(disc_f, np.random.default_rng(904))
    fwd2 = advance_by_time(sd, disc_f, 6.0)
    ret2 = advance_by_time(ParticleState(fwd2.position,
                                         (-fwd2.velocity[0], -fwd2.velocity[1])),
                           disc_f, 6.0)
    err_disc = math.hypot(ret2.position[0] - sd.position[0],
                          ret2.position[1] - sd.position[1])
    ok_rev = err_wall <= 1e-6 and err_disc <= 1e-6

    rng = np.random.default_rng(905)
    ok_grid = True
    for k in range(1000):
        phi = float(rng.uniform(0.4, 0.9))
        f = generate_field((0.0, 0.0, 10.0, 10.0), 0.35, phi, seed=9000 + k)
        assert f.n <= 200
        st = random_free_state(f, rng)
        for _ in range(3):
            e1 = next_event(st, f, horizon=1e6)
            e2 = next_event(st, f, horizon=1e6, brute=True)
            if (e1.kind != e2.kind or e1.disc_index != e2.disc_index
                    or abs(e1.time - e2.time) > 1e-12):
                ok_grid = False
            if e1.kind != "disc":
                break
            st = ParticleState(
                (st.position[0] + st.velocity[0] * (e1.time - st.time) * 0.5,
                 st.position[1] + st.velocity[1] * (e1.time - st.time) * 0.5),
                st.velocity, 0.0)
    ok = ok_speed and ok_pen and ok_rev and ok_grid
    record_criterion(
        "9 billiard invariants (1e6 events; reversal; 1e3 grid-vs-brute)",
        ok, f"speed err {inv['max_speed_err']:.1e}, pen {inv['max_penetration']:.1e}, "
            f"reversal wall {err_wall:.1e} / disc {err_disc:.1e}, grid exact {ok_grid}")
    assert ok


# -- 10: Fokker-Planck oracle ---------------------------------------------------

def test_criterion_10_fokker_planck_oracle():
    model = experiment_model()
    # (a) discrete stationarity
    ss = steady_state(model, 400)
    drift = np.max(np.abs(evolve(model, ss, t=1.0, dt=1e-2).values - ss.values))
    ok_steady = drift <= 1e-12

    # (b) cosine-mode relaxation against the eigenfunction series
    uni = DiffusionModel(BOX1, ScalarField.constant(1.0, BOX1),
                         ScalarField.constant(1.0, BOX1))
    lam = (math.pi / 2) ** 2
    grid = Grid1D(-1.0, 1.0, 400)
    faces = grid.faces
    anti0 = lambda x: 0.5 * x + 0.25 * (2 / math.pi) * np.sin(math.pi * (x + 1) / 2)
    rho0 = DensityProfile(grid, (anti0(faces[1:]) - anti0(faces[:-1])) / grid.dx)
    t_run = 0.1
    out = evolve(uni, rho0, t=t_run, dt=1e-4, theta=0.5)
    antit = lambda x: 0.5 * x + 0.25 * math.exp(-lam * t_run) * (2 / math.pi) * np.sin(math.pi * (x + 1) / 2)
    oracle = (antit(faces[1:]) - antit(faces[:-1])) / grid.dx
    err_cos = float(np.max(np.abs(out.values - oracle)))
    ok_cos = err_cos <= 1e-6

    # (c) maem histogram at t=0.5 from a left-half start vs evolve, tolerance
    # 3*SE + per-bin Richardson term |maem(h) - maem(h/4)| + FP grid term
    n_chains = 200_000
    rng = np.random.default_rng(1010)
    x0 = rng.uniform(-1.0, 0.0, size=n_chains)
    t_cmp = 0.5
    res_h1 = run_ensemble(model, 1e-3, int(t_cmp / 1e-3), n_chains, seed=1011, x0=x0)
    res_h2 = run_ensemble(model, 2.5e-4, int(t_cmp / 2.5e-4), n_chains, seed=1012, x0=x0)
    edges = np.linspace(-1.0, 1.0, 21)

    def bin_probs(finals):
        idx = np.clip(np.searchsorted(edges, finals, side="right") - 1, 0, 19)
        return np.bincount(idx, minlength=20) / finals.size

    p1 = bin_probs(res_h1.final_positions)
    p2 = bin_probs(res_h2.final_positions)
    se = np.sqrt(p2 * (1 - p2) / n_chains)

    grid400 = Grid1D(-1.0, 1.0, 400)
    v0 = np.where(grid400.centers < 0.0, 1.0, 0.0)
    fp0 = DensityProfile(grid400, v0 / (np.sum(v0) * grid400.dx))
    fp = evolve(model, fp0, t=t_cmp, dt=2.5e-4, theta=0.5)
    grid200 = Grid1D(-1.0, 1.0, 200)
    v0b = np.where(grid200.centers < 0.0, 1.0, 0.0)
    fpb = evolve(model, DensityProfile(grid200, v0b / (np.sum(v0b) * grid200.dx)),
                 t=t_cmp, dt=2.5e-4, theta=0.5)
    q = np.array([fp.mass_between(a, b) for a, b in zip(edges[:-1], edges[1:])])
    qb = np.array([fpb.mass_between(a, b) for a, b in zip(edges[:-1], edges[1:])])
    tol = 3.0 * se + np.abs(p1 - p2) + np.abs(q - qb)
    dev = np.abs(p2 - q)
    ok_cmp = bool(np.all(dev <= tol))
    worst = float(np.max(dev / tol))
    ok = ok_steady and ok_cos and ok_cmp
    record_criterion(
        "10 Fokker-Planck oracle",
        ok, f"stationary drift {drift:.1e}; cosine err {err_cos:.2e}; "
            f"maem-vs-evolve worst dev/tol {worst:.2f}")
    assert ok_steady and ok_cos and ok_cmp


# -- 11: convention algebra ------------------------------------------------------

def test_criterion_11_convention_algebra():
    import sympy as sp
    rng = np.random.default_rng(111)
    xsym = sp.Symbol("x")
    ok_sym = True
    for _ in range(20):
        ac = rng.uniform(-1.0, 1.0, size=3)
        bc = np.array([rng.uniform(2.0, 3.0), rng.uniform(0.1, 0.8)])
        alpha = float(rng.uniform(0.0, 1.0))
        conv = ConventionSpec(alpha,
                              ScalarField.from_pieces_1d(BOX1, [], [Poly1(ac)]),
                              ScalarField.from_pieces_1d(BOX1, [], [Poly1(bc)]))
        field = ito_drift_field(conv)
        ref = sp.expand((ac[0] + ac[1] * xsym + ac[2] * xsym ** 2)
                        + alpha * (bc[0] + bc[1] * xsym) * bc[1])
        for xv in rng.uniform(-0.9, 0.9, size=4):
            expect = float(ref.subs(xsym, xv))
            if abs(field(xv) - expect) > 1e-12 * max(1.0, abs(expect)) or \
               abs(to_ito_drift(conv, xv) - expect) > 1e-12 * max(1.0, abs(expect)):
                ok_sym = False

    d_smooth = ScalarField.from_pieces_1d(BOX1, [], [Poly1([1.0, 0.0, 1.0])])
    b = sqrt_double(d_smooth)  # b = sqrt(2 (1 + x^2))
    worst_res = 0.0
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        rho = stationary_density_driftfree(alpha, b)
        res = convention_flux_residual(alpha, b, rho,
                                       rng.uniform(-0.95, 0.95, size=200))
        worst_res = max(worst_res, float(np.max(np.abs(res))))
    ok_flux = worst_res <= 1e-10

    # drift-free Ito chain with smooth b: stationary density ~ 1/b^2
    model = DiffusionModel(BOX1, d_smooth, ScalarField.constant(1.0, BOX1))
    n_chains = 100_000
    u = np.random.default_rng(112).random(n_chains)
    x0 = np.tan((u - 0.5) * (math.pi / 2))  # inverse CDF of 1/(1+x^2) on [-1,1]
    res = run_ensemble(model, 1e-4, 5000, n_chains, seed=113,
                       scheme="em-driftfree", x0=x0)
    target = stationary_density_driftfree(0.0, b)
    stat, p = compare_chi_square(bin_finals(res.final_positions), target)
    ok_chain = p > 1e-3
    ok = ok_sym and ok_flux and ok_chain
    record_criterion(
        "11 convention algebra",
        ok, f"symbolic ok {ok_sym}; flux residual {worst_res:.1e}; "
            f"1/b^2 chain chi2 p={p:.4f}")
    assert ok_sym and ok_flux and ok_chain
