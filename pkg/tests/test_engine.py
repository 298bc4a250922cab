import math

import numpy as np
import pytest

from statediff.billiard import (DiscField, ParticleState, advance,
                                advance_by_time, generate_field, next_event,
                                random_free_state, run_event_invariants,
                                run_occupation_trajectory,
                                run_unfolded_checkpoints, two_domain_field)
from statediff.errors import StateDiffError


def test_particle_state_speed_invariant():
    with pytest.raises(StateDiffError):
        ParticleState((0.0, 0.0), (1.0, 1.0))
    ParticleState((0.0, 0.0), (math.sqrt(0.5), math.sqrt(0.5)))


def test_empty_box_speed_and_specularity():
    f = DiscField([], [], [], (0, 0, 3, 2))
    s = ParticleState((1.0, 1.0), (math.cos(0.7), math.sin(0.7)))
    out = advance(s, f, 25.0)
    assert math.hypot(*out.velocity) == pytest.approx(1.0, abs=1e-12)
    assert out.time == pytest.approx(25.0)
    assert 0 <= out.position[0] <= 3 and 0 <= out.position[1] <= 2


def test_observer_callbacks_fire_in_order():
    f = DiscField([2.0], [0.0], [0.5], (-5, -5, 5, 5), x_mid=1.0)
    events = []
    advance(ParticleState((0.0, 0.0), (1.0, 0.0)), f, 4.0,
            observers=[lambda ev, st: events.append((ev.kind, ev.time))])
    kinds = [k for k, _ in events]
    assert kinds[0] == "line"       # crosses x=1 at t=1
    assert kinds[1] == "disc"       # hits the disc at t=1.5
    assert kinds[-1] == "horizon"
    times = [t for _, t in events]
    assert times == sorted(times)


def test_speed_and_penetration_over_many_events(rng):
    f = two_domain_field((0, 0, 24, 12), 0.3, 0.5, 0.6, 0.5, seed=4)
    s0 = random_free_state(f, rng)
    _, inv = run_event_invariants(f, s0, 200_000)
    assert inv["max_speed_err"] <= 1e-9
    assert inv["max_penetration"] <= 1e-9


def test_determinism_same_seed_same_event_log():
    f = generate_field((0, 0, 12, 12), 0.35, 0.5, seed=6)
    s0 = random_free_state(f, np.random.default_rng(2))
    _, a = run_event_invariants(f, s0, 5000, log=True)
    _, b = run_event_invariants(f, s0, 5000, log=True)
    assert np.array_equal(a["log_kind"], b["log_kind"])
    assert np.array_equal(a["log_idx"], b["log_idx"])


def test_time_reversal_empty_box():
    f = DiscField([], [], [], (0, 0, 3, 2))
    s = ParticleState((1.1, 0.7), (math.cos(0.31), math.sin(0.31)))
    fwd = advance_by_time(s, f, 1500.0)  # >1e3 wall events
    back = ParticleState(fwd.position, (-fwd.velocity[0], -fwd.velocity[1]))
    ret = advance_by_time(back, f, 1500.0)
    err = math.hypot(ret.position[0] - s.position[0], ret.position[1] - s.position[1])
    assert err <= 1e-6


def test_time_reversal_disc_field_short():
    # a dozen dispersing collisions: round-off grows ~x3-10 per collision,
    # so only short reversals can hold 1e-6
    f = generate_field((0, 0, 12, 12), 0.4, 0.5, seed=9)
    s0 = random_free_state(f, np.random.default_rng(3))
    fwd = advance_by_time(s0, f, 10.0)
    back = ParticleState(fwd.position, (-fwd.velocity[0], -fwd.velocity[1]))
    ret = advance_by_time(back, f, 10.0)
    err = math.hypot(ret.position[0] - s0.position[0], ret.position[1] - s0.position[1])
    assert err <= 1e-6


def test_grid_matches_brute_force(rng):
    for seed in range(12):
        phi = float(rng.uniform(0.35, 0.9))
        f = generate_field((0, 0, 10, 10), 0.35, phi, seed=seed)
        assert f.n <= 200
        r2 = np.random.default_rng(seed + 99)
        for _ in range(8):
            st = random_free_state(f, r2)
            e1 = next_event(st, f, horizon=1e6)
            e2 = next_event(st, f, horizon=1e6, brute=True)
            assert e1.kind == e2.kind
            assert e1.disc_index == e2.disc_index
            assert abs(e1.time - e2.time) <= 1e-12


def test_occupation_time_balance_and_symmetry():
    f = two_domain_field((0, 0, 20, 10), 0.25, 0.5, 0.25, 0.5, seed=21)
    s0 = random_free_state(f, np.random.default_rng(5))
    occ = run_occupation_trajectory(f, s0, 2e5, sample_dt=5.0)
    total = occ["t_right"].sum() + occ["t_left"].sum()
    assert total == pytest.approx(2e5, rel=1e-9)
    ratio = occ["t_right"].sum() / occ["t_left"].sum()
    assert abs(ratio - 1.0) < 0.4  # loose: one short trajectory
    # the periodic-sampling estimator agrees with exact accounting
    srate = occ["samples_right"] / (occ["samples_right"] + occ["samples_left"])
    erate = occ["t_right"].sum() / total
    assert srate == pytest.approx(erate, abs=0.02)


def test_unfolded_checkpoints_free_particle():
    f = DiscField([], [], [], (0, 0, 7, 5), periodic=True)
    st = ParticleState((1.0, 2.0), (math.cos(1.1), math.sin(1.1)))
    pos = run_unfolded_checkpoints(f, st, 3.7, 120)
    t = 3.7 * np.arange(1, 121)
    assert np.max(np.abs(pos[:, 0] - (1.0 + math.cos(1.1) * t))) < 1e-10
    assert np.max(np.abs(pos[:, 1] - (2.0 + math.sin(1.1) * t))) < 1e-10


def test_reversal_at_event_is_degenerate_documented():
    # reversing exactly at a reflection tunnels through the just-hit disc;
    # the engine guards same-surface re-hits, so reversal must be mid-flight
    f = generate_field((0, 0, 12, 12), 0.4, 0.5, seed=9)
    s0 = random_free_state(f, np.random.default_rng(4))
    s1, _ = run_event_invariants(f, s0, 10)
    back = ParticleState(s1.position, (-s1.velocity[0], -s1.velocity[1]))
    ret, _ = run_event_invariants(f, back, 10)
    err = math.hypot(ret.position[0] - s0.position[0], ret.position[1] - s0.position[1])
    assert err > 1e-6  # does NOT return; mid-flight reversal does (test above)
