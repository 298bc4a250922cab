import math

import numpy as np
import pytest
from scipy.integrate import quad

from statediff.billiard import DiscField, ParticleState, next_event, reflect
from statediff.billiard._geom import disc_area_in_box, disc_hit_time


def oracle_area(cx, cy, r, x0, y0, x1, y1):
    """Chord-width quadrature split at the structural breakpoints."""
    ylo, yhi = max(y0, cy - r), min(y1, cy + r)
    if yhi <= ylo:
        return 0.0
    pts = {ylo, yhi}
    for d in (x0 - cx, x1 - cx):
        if abs(d) < r:
            h = math.sqrt(r * r - d * d)
            for yy in (cy - h, cy + h):
                if ylo < yy < yhi:
                    pts.add(yy)
    pts = sorted(pts)

    def w(y):
        s2 = r * r - (y - cy) ** 2
        if s2 <= 0:
            return 0.0
        s = math.sqrt(s2)
        return max(0.0, min(x1, cx + s) - max(x0, cx - s))

    return sum(quad(w, a, b, limit=200, epsabs=1e-13)[0]
               for a, b in zip(pts[:-1], pts[1:]))


def test_disc_area_fully_inside_and_outside():
    assert disc_area_in_box(1.0, 0.75, 0.3, 0, 0, 2, 1.5) == pytest.approx(math.pi * 0.09, abs=1e-15)
    assert disc_area_in_box(10.0, 10.0, 0.3, 0, 0, 2, 1.5) == 0.0


def test_disc_area_half_protruding():
    # center on an edge far from corners: exactly half the disc is inside
    assert disc_area_in_box(1.0, 0.0, 0.4, 0, 0, 2, 1.5) == pytest.approx(math.pi * 0.16 / 2, rel=1e-14)


def test_disc_area_random_against_quadrature(rng):
    worst = 0.0
    for _ in range(150):
        cx, cy = rng.uniform(-1, 3, size=2)
        r = rng.uniform(0.05, 1.4)
        a = disc_area_in_box(cx, cy, r, 0.0, 0.0, 2.0, 1.5)
        ref = oracle_area(cx, cy, r, 0.0, 0.0, 2.0, 1.5)
        worst = max(worst, abs(a - ref))
    assert worst < 5e-9  # quadrature-limited; the closed form itself is exact


def test_reflect_examples_and_unit_norm(rng):
    assert np.allclose(reflect((1, 0), (-1, 0)), (-1, 0))
    assert np.allclose(reflect((1, 0), (0, 1)), (1, 0))
    s = math.sqrt(2) / 2
    assert np.allclose(reflect((s, -s), (0, 1)), (s, s))
    for _ in range(50):
        th, ph = rng.uniform(0, 2 * math.pi, size=2)
        v = (math.cos(th), math.sin(th))
        n = (math.cos(ph), math.sin(ph))
        out = reflect(v, n)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)
        # tangential component preserved, normal component flipped
        vn = np.dot(v, n)
        assert np.dot(out, n) == pytest.approx(-vn, abs=1e-12)


def test_next_event_collinear_hit():
    f = DiscField([2.0], [0.0], [0.5], (-5, -5, 5, 5))
    ev = next_event(ParticleState((0.0, 0.0), (1.0, 0.0)), f, horizon=100.0)
    assert ev.kind == "disc" and ev.time == pytest.approx(1.5)
    assert ev.normal[0] == pytest.approx(-1.0)


def test_next_event_miss_gives_wall():
    f = DiscField([2.0], [1.0], [0.5], (-5, -5, 5, 5))
    ev = next_event(ParticleState((0.0, 0.0), (1.0, 0.0)), f, horizon=100.0)
    assert ev.kind == "wall" and ev.time == pytest.approx(5.0)


def test_next_event_line_cross():
    f = DiscField([], [], [], (-5, -5, 5, 5), x_mid=0.0)
    ev = next_event(ParticleState((-0.3, 0.0), (1.0, 0.0)), f, horizon=100.0)
    assert ev.kind == "line" and ev.time == pytest.approx(0.3)
    assert ev.direction == 1


def test_next_event_horizon():
    f = DiscField([], [], [], (-5, -5, 5, 5))
    ev = next_event(ParticleState((0.0, 0.0), (1.0, 0.0)), f, horizon=2.0)
    assert ev.kind == "horizon" and ev.time == pytest.approx(2.0)


def test_disc_hit_time_stable_quadratic():
    # grazing trajectories with tiny discriminants count as misses
    t = disc_hit_time(0.0, 0.5 + 1e-9, 1.0, 0.0, 2.0, 0.0, 0.5, 10.0, 10.0, False)
    assert t == math.inf or t > 0
    # distant disc: stable root has no cancellation
    t2 = disc_hit_time(0.0, 0.0, 1.0, 0.0, 1e6, 0.0, 0.5, 1e7, 1e7, False)
    assert t2 == pytest.approx(1e6 - 0.5, rel=1e-12)


def test_periodic_min_image_hit():
    # disc protrudes across the periodic seam and is hit through it
    f = DiscField([0.2], [1.0], [0.5], (0, 0, 10, 2), periodic=True)
    ev = next_event(ParticleState((9.5, 1.0), (1.0, 0.0)), f, horizon=100.0)
    assert ev.kind == "disc"
    assert ev.time == pytest.approx(0.2, abs=1e-12)
