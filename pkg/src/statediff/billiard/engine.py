"""Python-facing event-driven dynamics: states, events, and trajectory runs.

The heavy loops live in :mod:`._engine` (compiled); this module provides the
object API used by tests, demos, and the statistics layer, plus seeded
helpers for initial conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import StateDiffError, StuckParticle
from . import _engine as _k
from ._geom import EPS_GUARD
from .field import DiscField

_KIND_NAMES = {_k.KIND_HORIZON: "horizon", _k.KIND_DISC: "disc",
               _k.KIND_WALL: "wall", _k.KIND_LINE: "line"}


@dataclass(frozen=True)
class ParticleState:
    """Unit-speed billiard phase point."""

    position: tuple
    velocity: tuple
    time: float = 0.0

    def __post_init__(self):
        speed = math.hypot(*self.velocity)
        if abs(speed - 1.0) > 1e-9:
            raise StateDiffError(f"speed {speed} is not 1 within 1e-9")


@dataclass(frozen=True)
class Event:
    """Next interaction along the free flight; ``kind`` as in _engine."""

    kind: str
    time: float
    disc_index: int = -1
    wall: int = -1
    normal: tuple = None
    direction: int = 0


def random_free_state(field, rng, time=0.0):
    """Uniform position on free space (by rejection) and uniform direction."""
    lx = field.bx1 - field.bx0
    ly = field.by1 - field.by0
    for _ in range(1_000_000):
        px = field.bx0 + rng.random() * lx
        py = field.by0 + rng.random() * ly
        if _k.point_is_free(px, py, *field.kernel_args, field.periodic):
            theta = rng.random() * 2.0 * math.pi
            return ParticleState((px, py), (math.cos(theta), math.sin(theta)), time)
    raise StateDiffError("free space too small to sample an initial position")


def reflect(v, n):
    """Specular reflection of unit vector v off a surface with unit normal n."""
    v = np.asarray(v, dtype=float)
    n = np.asarray(n, dtype=float)
    out = v - 2.0 * float(v @ n) * n
    return out / np.linalg.norm(out)


def _line_args(field):
    has_line = field.x_mid is not None
    return (field.periodic, field.x_mid if has_line else 0.0, has_line)


def next_event(state, field, horizon, brute=False):
    """Earliest event after ``state.time`` within the horizon.

    ``brute=True`` scans every disc instead of the grid (the oracle path).
    """
    px, py = state.position
    vx, vy = state.velocity
    kind, dt, idx = _k.find_next_event(px, py, vx, vy, *field.kernel_args,
                                       *_line_args(field),
                                       horizon - state.time, brute)
    t_abs = state.time + dt
    if kind == _k.KIND_DISC:
        hx = px + vx * dt - field.cx[idx]
        hy = py + vy * dt - field.cy[idx]
        if field.periodic:
            lx, ly = field.bx1 - field.bx0, field.by1 - field.by0
            hx -= lx * round(hx / lx)
            hy -= ly * round(hy / ly)
        d = math.hypot(hx, hy)
        return Event("disc", t_abs, disc_index=int(idx), normal=(hx / d, hy / d))
    if kind == _k.KIND_WALL:
        normal = {0: (1.0, 0.0), 1: (-1.0, 0.0), 2: (0.0, 1.0), 3: (0.0, -1.0)}[int(idx)]
        return Event("wrap" if field.periodic else "wall", t_abs, wall=int(idx), normal=normal)
    if kind == _k.KIND_LINE:
        return Event("line", t_abs, direction=1 if vx > 0 else -1)
    return Event("horizon", t_abs)


def advance(state, field, t_end, observers=(), renorm_every=10_000):
    """Run the event loop to ``t_end``, notifying observers at each event.

    Observers are callables ``(event, state_after)``; the horizon event that
    ends the run is delivered too.  Velocity is renormalized every
    ``renorm_every`` events.  Raises StuckParticle if the loop stops making
    progress.
    """
    px, py = state.position
    vx, vy = state.velocity
    t = state.time
    n_events = 0
    tiny_run = 0
    while t < t_end:
        ev = next_event(ParticleState((px, py), (vx, vy), t), field, t_end)
        px2, py2, vx2, vy2, dt, kind, idx, _, _, _ = _k.advance_one(
            px, py, vx, vy, *field.kernel_args, *_line_args(field),
            t_end - t, False)
        px, py, vx, vy = px2, py2, vx2, vy2
        t += dt
        if kind != _k.KIND_HORIZON:
            n_events += 1
            tiny_run = tiny_run + 1 if dt <= EPS_GUARD else 0
            if tiny_run > 64:
                raise StuckParticle(f"no progress after event {n_events} at t={t}")
            if n_events % renorm_every == 0:
                spd = math.hypot(vx, vy)
                vx, vy = vx / spd, vy / spd
        out = ParticleState((px, py), (vx, vy), t)
        for obs in observers:
            obs(ev, out)
    return ParticleState((px, py), (vx, vy), t)


def advance_by_time(state, field, duration):
    """Fast path: advance ``duration`` with no observers; returns final state."""
    px, py = state.position
    vx, vy = state.velocity
    px, py, vx, vy, n_ev, status = _k.advance_time(
        *_state_field(px, py, vx, vy, field), duration, 10_000)
    if status == 1:
        raise StuckParticle("event loop stalled")
    spd = math.hypot(vx, vy)
    return ParticleState((px, py), (vx / spd, vy / spd), state.time + duration)


def _state_field(px, py, vx, vy, field):
    return (*field.kernel_args, *_line_args(field), px, py, vx, vy)


def run_occupation_trajectory(field, state, t_total, n_batches=20, sample_dt=0.0):
    """Exact per-side occupation times over ``t_total`` (see lorentz module)."""
    if field.x_mid is None:
        raise StateDiffError("occupation accounting needs a dividing line")
    px, py = state.position
    vx, vy = state.velocity
    tr, tl, n_events, n_cross, samp_r, samp_l, max_pen, max_srr, status = \
        _k.run_occupation(*field.kernel_args, field.x_mid, px, py, vx, vy,
                          t_total, n_batches, sample_dt)
    if status == 1:
        raise StuckParticle("event loop stalled during occupation run")
    return {"t_right": tr, "t_left": tl, "n_events": int(n_events),
            "n_cross": int(n_cross), "samples_right": int(samp_r),
            "samples_left": int(samp_l), "max_penetration": float(max_pen),
            "max_speed_err": float(max_srr)}


def run_unfolded_checkpoints(field, state, ck_dt, n_ck):
    """Winding-corrected positions at times k*ck_dt in a periodic cell."""
    if not field.periodic:
        raise StateDiffError("unfolded checkpoints need a periodic cell")
    px, py = state.position
    vx, vy = state.velocity
    pos, n_events, status = _k.run_msd(*field.kernel_args, px, py, vx, vy,
                                       ck_dt, n_ck)
    if status == 1:
        raise StuckParticle("event loop stalled during MSD run")
    return pos


def run_event_invariants(field, state, n_events, log=False):
    """Advance exactly ``n_events`` events, tracking speed and penetration.

    Returns (final_state, invariants dict); with ``log=True`` the dict also
    carries the (kind, index) event sequence for determinism checks.
    """
    px, py = state.position
    vx, vy = state.velocity
    log_kind = np.empty(n_events if log else 0, dtype=np.int64)
    log_idx = np.empty(n_events if log else 0, dtype=np.int64)
    px, py, vx, vy, t, max_pen, max_srr, status = _k.run_events(
        *field.kernel_args, *_line_args(field), px, py, vx, vy,
        n_events, 10_000, log_kind, log_idx)
    if status == 1:
        raise StuckParticle("event loop stalled")
    out = {"max_penetration": float(max_pen), "max_speed_err": float(max_srr),
           "time": float(t)}
    if log:
        out["log_kind"] = log_kind
        out["log_idx"] = log_idx
    spd = math.hypot(vx, vy)
    return ParticleState((px, py), (vx / spd, vy / spd), state.time + t), out
