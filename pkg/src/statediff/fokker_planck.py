"""Conservative 1D finite-volume solver for the zero-flux diffusion law.

The evolution equation is d(rho)/dt = d/dx [ D rho_eq d/dx (rho/rho_eq) ].
Working in u = rho/rho_eq turns the interface conditions (continuity of u
and of the flux D rho_eq u') into plain flux continuity, handled by
harmonic-mean face coefficients; u = const is then stationary exactly, so
the discrete equilibrium is rho_eq itself on any grid whose faces contain
the discontinuities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import NonconservativeStep, UnalignedDiscontinuity

#: permitted face misalignment of a field discontinuity
ALIGN_TOL = 1e-12
#: total-mass drift budget over a whole evolve() call
MASS_TOL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered grid on [a, b] with M cells."""

    a: float
    b: float
    m: int

    def __post_init__(self):
        if not self.b > self.a or self.m < 2:
            raise ValueError("need b > a and at least 2 cells")

    @property
    def dx(self):
        return (self.b - self.a) / self.m

    @property
    def faces(self):
        return self.a + self.dx * np.arange(self.m + 1)

    @property
    def centers(self):
        return self.a + self.dx * (np.arange(self.m) + 0.5)

    def check_aligned(self, field):
        """Every interior breakpoint of ``field`` must sit on a face."""
        faces = self.faces
        for br in np.atleast_1d(field.breaks[0]):
            if np.min(np.abs(faces - br)) > ALIGN_TOL:
                raise UnalignedDiscontinuity(
                    f"discontinuity at {br} not on a face (dx={self.dx})")


@dataclass(frozen=True)
class DensityProfile:
    """Per-cell density averages at one time; mass = sum(values) * dx."""

    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    @property
    def mass(self):
        return float(np.sum(self.values) * self.grid.dx)

    def mass_between(self, lo, hi):
        """Integral of the piecewise-constant profile over [lo, hi]."""
        faces = self.grid.faces
        left = np.clip(faces[:-1], lo, hi)
        right = np.clip(faces[1:], lo, hi)
        return float(np.sum(self.values * np.maximum(right - left, 0.0)))

    def normalized(self):
        return DensityProfile(self.grid, self.values / self.mass, self.time)


def profile_from_field(field, grid):
    """Sample a 1D field onto the grid and normalize discretely to mass 1."""
    vals = field.values(grid.centers)
    vals = vals / (np.sum(vals) * grid.dx)
    return DensityProfile(grid, vals, 0.0)


def steady_state(model, m=400):
    """The stationary profile: rho_eq itself, discretely normalized."""
    grid = Grid1D(model.box.lo[0], model.box.hi[0], m)
    grid.check_aligned(model.d)
    grid.check_aligned(model.rho_eq)
    return profile_from_field(model.rho_eq, grid)


def driftfree_ito_steady(d_field, interval=None, m=400):
    """Equilibrium of the drift-free Ito SDE: density proportional to 1/D."""
    a, b = interval if interval is not None else (d_field.box.lo[0], d_field.box.hi[0])
    grid = Grid1D(a, b, m)
    grid.check_aligned(d_field)
    inv = 1.0 / d_field.values(grid.centers)
    inv = inv / (np.sum(inv) * grid.dx)
    return DensityProfile(grid, inv, 0.0)


def _face_weights(model, grid):
    c = grid.centers
    w = model.d.values(c) * model.rho_eq.values(c)
    wf = np.zeros(grid.m + 1)
    wl, wr = w[:-1], w[1:]
    wf[1:-1] = 2.0 * wl * wr / (wl + wr)
    return w, wf


def evolve(model, rho0, t, dt, theta=1.0):
    """Advance ``rho0`` by time ``t`` with the theta-scheme (theta=1: backward
    Euler, 1/2: trapezoidal, 0: explicit).

    The grid must align to every discontinuity of D and rho_eq; zero flux is
    imposed at both ends, so total mass is conserved to round-off (checked
    against MASS_TOL).
    """
    grid = rho0.grid
    grid.check_aligned(model.d)
    grid.check_aligned(model.rho_eq)
    if t <= 0:
        return rho0
    n_steps = max(1, int(math.ceil(t / dt)))
    dt = t / n_steps
    dx = grid.dx

    rho_eq = model.rho_eq.values(grid.centers)
    if np.any(rho_eq <= 0):
        raise ValueError("rho_eq must be positive on the grid for the u-form")
    _, wf = _face_weights(model, grid)
    lam = dt / (dx * dx)
    if theta < 0.5:
        stable = (dx * dx) * np.min(rho_eq) / (2.0 * np.max(wf) * (1.0 - theta) + 1e-300)
        if dt > stable:
            raise ValueError(f"explicit step {dt} exceeds stability bound {stable:.3e}")

    # tridiagonal operator L u = d/dx (w du/dx); rows scaled by rho_eq
    low = wf[:-1].copy()
    up = wf[1:].copy()
    diag = -(wf[:-1] + wf[1:])
    m = grid.m
    # implicit matrix A = diag(rho_eq) - theta*lam*L in banded form
    ab = np.zeros((3, m))
    ab[0, 1:] = -theta * lam * up[:-1]
    ab[1, :] = rho_eq - theta * lam * diag
    ab[2, :-1] = -theta * lam * low[1:]

    u = rho0.values / rho_eq
    mass0 = rho0.mass
    expl = (1.0 - theta) * lam
    for _ in range(n_steps):
        lu = np.empty(m)
        lu[0] = up[0] * (u[1] - u[0])
        lu[1:-1] = up[1:-1] * (u[2:] - u[1:-1]) - low[1:-1] * (u[1:-1] - u[:-2])
        lu[-1] = -low[-1] * (u[-1] - u[-2])
        rhs = rho_eq * u + expl * lu
        u = solve_banded((1, 1), ab, rhs)
    rho = rho_eq * u
    out = DensityProfile(grid, rho, rho0.time + t)
    if abs(out.mass - mass0) > MASS_TOL * max(1.0, abs(mass0)):
        raise NonconservativeStep(f"mass drifted by {out.mass - mass0:.3e}")
    return out
