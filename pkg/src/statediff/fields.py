"""Piecewise closed-form scalar fields on axis-aligned domains.

A :class:`ScalarField` is a partition of a 1D interval or 2D box into
axis-aligned cells, each carrying a closed-form expression (constant,
polynomial, real power of a polynomial, or exponential of a quadratic).
Keeping the expressions closed-form gives exact gradients per piece and an
exactly known discontinuity set, which the samplers and the finite-volume
solver both rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate as _sciint
from scipy import special as _sc

from .errors import OnDiscontinuity, ZeroMass

#: tolerance for "point sits on a piece boundary"
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Box:
    """Axis-aligned domain: an interval (k=1) or a rectangle (k=2).

    All faces carry reflecting boundary conditions.
    """

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or len(lo) not in (1, 2):
            raise ValueError("Box must be 1D or 2D")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("Box must have positive extent on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def volume(self):
        return float(np.prod(np.subtract(self.hi, self.lo)))

    @property
    def diameter(self):
        return float(np.linalg.norm(np.subtract(self.hi, self.lo)))

    def contains(self, x, tol=0.0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return bool(np.all(x >= np.array(self.lo) - tol) and np.all(x <= np.array(self.hi) + tol))

    @staticmethod
    def interval(a, b):
        return Box((a,), (b,))


# ---------------------------------------------------------------------------
# expressions (one spatial piece each)
# ---------------------------------------------------------------------------


class Expression:
    """One closed-form piece. Subclasses provide value/gradient/integral."""

    dim = 1

    def value(self, x):
        raise NotImplementedError

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        return np.array([self.value(x) for x in np.atleast_1d(xs)])

    def gradient(self, x, step=1e-6):
        # central-difference fallback keeps gradient total for any subclass
        x = np.atleast_1d(np.asarray(x, dtype=float))
        g = np.empty_like(x)
        for i in range(x.size):
            xp, xm = x.copy(), x.copy()
            xp[i] += step
            xm[i] -= step
            g[i] = (self.value(xp if x.size > 1 else xp[0]) - self.value(xm if x.size > 1 else xm[0])) / (2 * step)
        return g if x.size > 1 else g

    def integral(self, lo, hi):
        raise NotImplementedError

    def scaled(self, c):
        raise NotImplementedError

    def to_text(self):
        raise NotImplementedError


class Const(Expression):
    """Constant value; valid in 1D and 2D."""

    def __init__(self, c, dim=1):
        self.c = float(c)
        self.dim = dim

    def value(self, x):
        return self.c

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        n = xs.shape[0] if xs.ndim else 1
        return np.full(n, self.c)

    def gradient(self, x, step=None):
        return np.zeros(self.dim)

    def derivative(self):
        return Const(0.0, dim=1)

    def gradient_values(self, xs):
        return np.zeros(np.asarray(xs).reshape(-1).size)

    def integral(self, lo, hi):
        lo = np.atleast_1d(lo)
        hi = np.atleast_1d(hi)
        return self.c * float(np.prod(np.subtract(hi, lo)))

    def scaled(self, c):
        return Const(self.c * c, dim=self.dim)

    def to_text(self):
        return repr(self.c)

    def __repr__(self):
        return f"Const({self.c})"


class Poly1(Expression):
    """Polynomial in x with coefficient array in increasing-degree order."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("need a 1D, non-empty coefficient array")

    def value(self, x):
        return float(npoly.polyval(float(np.atleast_1d(x)[0]), self.coeffs))

    def values(self, xs):
        return npoly.polyval(np.asarray(xs, dtype=float).reshape(-1), self.coeffs)

    def gradient(self, x, step=None):
        d = npoly.polyder(self.coeffs)
        return np.array([float(npoly.polyval(float(np.atleast_1d(x)[0]), d))])

    def derivative(self):
        return Poly1(npoly.polyder(self.coeffs) if self.coeffs.size > 1 else [0.0])

    def gradient_values(self, xs):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        if self.coeffs.size < 2:
            return np.zeros(xs.size)
        return npoly.polyval(xs, npoly.polyder(self.coeffs))

    def integral(self, lo, hi):
        anti = npoly.polyint(self.coeffs)
        lo = float(np.atleast_1d(lo)[0])
        hi = float(np.atleast_1d(hi)[0])
        return float(npoly.polyval(hi, anti) - npoly.polyval(lo, anti))

    def scaled(self, c):
        return Poly1(self.coeffs * c)

    def to_text(self):
        terms = []
        for p, a in enumerate(self.coeffs):
            if a == 0 and self.coeffs.size > 1:
                continue
            if p == 0:
                terms.append(repr(float(a)))
            elif p == 1:
                terms.append(f"{a!r}*x")
            else:
                terms.append(f"{a!r}*x**{p}")
        return " + ".join(terms) if terms else "0.0"

    def __repr__(self):
        return f"Poly1({list(self.coeffs)})"


class PolyPower1(Expression):
    """scale * P(x)**power for a polynomial P; covers sqrt(poly), 1/poly, etc.

    The base polynomial must be positive on the piece for non-integer powers.
    """

    def __init__(self, base_coeffs, power, scale=1.0):
        self.base = np.asarray(base_coeffs, dtype=float)
        self.power = float(power)
        self.scale = float(scale)

    def _p(self, x):
        return npoly.polyval(x, self.base)

    def value(self, x):
        x = float(np.atleast_1d(x)[0])
        return self.scale * self._p(x) ** self.power

    def values(self, xs):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        return self.scale * npoly.polyval(xs, self.base) ** self.power

    def gradient(self, x, step=None):
        x = float(np.atleast_1d(x)[0])
        dp = npoly.polyval(x, npoly.polyder(self.base)) if self.base.size > 1 else 0.0
        return np.array([self.scale * self.power * self._p(x) ** (self.power - 1.0) * dp])

    def gradient_values(self, xs):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        dp = npoly.polyval(xs, npoly.polyder(self.base)) if self.base.size > 1 else np.zeros(xs.size)
        return self.scale * self.power * npoly.polyval(xs, self.base) ** (self.power - 1.0) * dp

    def integral(self, lo, hi):
        lo = float(np.atleast_1d(lo)[0])
        hi = float(np.atleast_1d(hi)[0])
        val, _ = _sciint.quad(lambda t: self.values(np.array([t]))[0], lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)
        return val

    def scaled(self, c):
        return PolyPower1(self.base, self.power, self.scale * c)

    def to_text(self):
        base = Poly1(self.base).to_text()
        return f"{self.scale!r}*({base})**{self.power!r}"

    def __repr__(self):
        return f"PolyPower1({list(self.base)}, {self.power}, {self.scale})"


class ExpQuad1(Expression):
    """scale * exp(c0 + c1*x + c2*x**2)."""

    def __init__(self, quad_coeffs, scale=1.0):
        q = np.zeros(3)
        q[: len(np.atleast_1d(quad_coeffs))] = np.atleast_1d(quad_coeffs)
        self.q = q
        self.scale = float(scale)

    def value(self, x):
        x = float(np.atleast_1d(x)[0])
        return self.scale * math.exp(npoly.polyval(x, self.q))

    def values(self, xs):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        return self.scale * np.exp(npoly.polyval(xs, self.q))

    def gradient(self, x, step=None):
        x = float(np.atleast_1d(x)[0])
        return np.array([self.value(x) * (self.q[1] + 2.0 * self.q[2] * x)])

    def gradient_values(self, xs):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        return self.values(xs) * (self.q[1] + 2.0 * self.q[2] * xs)

    def integral(self, lo, hi):
        lo = float(np.atleast_1d(lo)[0])
        hi = float(np.atleast_1d(hi)[0])
        c0, c1, c2 = self.q
        if c2 == 0.0 and c1 == 0.0:
            return self.scale * math.exp(c0) * (hi - lo)
        if c2 == 0.0:
            return self.scale * math.exp(c0) * (math.exp(c1 * hi) - math.exp(c1 * lo)) / c1
        if c2 < 0.0:
            # complete the square: exp(c2 (x - m)^2 + k), c2 < 0
            m = -c1 / (2.0 * c2)
            k = c0 - c2 * m * m
            a = math.sqrt(-c2)
            pref = self.scale * math.exp(k) * math.sqrt(math.pi) / (2.0 * a)
            return pref * float(_sc.erf(a * (hi - m)) - _sc.erf(a * (lo - m)))
        val, _ = _sciint.quad(lambda t: self.values(np.array([t]))[0], lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)
        return val

    def scaled(self, c):
        return ExpQuad1(self.q, self.scale * c)

    def to_text(self):
        return f"{self.scale!r}*exp({Poly1(self.q).to_text()})"

    def __repr__(self):
        return f"ExpQuad1({list(self.q)}, {self.scale})"


class Poly2(Expression):
    """2D polynomial, coeffs[i, j] multiplying x**i * y**j."""

    dim = 2

    def __init__(self, coeffs):
        self.coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(npoly.polyval2d(x[0], x[1], self.coeffs))

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        return npoly.polyval2d(xs[:, 0], xs[:, 1], self.coeffs)

    def gradient(self, x, step=None):
        x = np.asarray(x, dtype=float)
        cx = npoly.polyder(self.coeffs, axis=0) if self.coeffs.shape[0] > 1 else np.zeros((1, 1))
        cy = npoly.polyder(self.coeffs, axis=1) if self.coeffs.shape[1] > 1 else np.zeros((1, 1))
        return np.array([float(npoly.polyval2d(x[0], x[1], cx)), float(npoly.polyval2d(x[0], x[1], cy))])

    def integral(self, lo, hi):
        lo = np.atleast_1d(lo)
        hi = np.atleast_1d(hi)
        cx = npoly.polyint(self.coeffs, axis=0)
        cxy = npoly.polyint(cx, axis=1)

        def corner(a, b):
            return float(npoly.polyval2d(a, b, cxy))

        return corner(hi[0], hi[1]) - corner(lo[0], hi[1]) - corner(hi[0], lo[1]) + corner(lo[0], lo[1])

    def scaled(self, c):
        return Poly2(self.coeffs * c)

    def to_text(self):
        terms = []
        for i in range(self.coeffs.shape[0]):
            for j in range(self.coeffs.shape[1]):
                a = self.coeffs[i, j]
                if a == 0:
                    continue
                mono = "*".join(s for s in (f"x**{i}" if i else "", f"y**{j}" if j else "") if s)
                terms.append(f"{a!r}" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) if terms else "0.0"

    def __repr__(self):
        return f"Poly2({self.coeffs.tolist()})"


class ExpQuad2(Expression):
    """scale * exp(a + b*x + c*y + d*x**2 + e*x*y + f*y**2)."""

    dim = 2

    def __init__(self, coeffs, scale=1.0):
        a = np.zeros(6)
        a[: len(np.atleast_1d(coeffs))] = np.atleast_1d(coeffs)
        self.q = a
        self.scale = float(scale)

    def _quad(self, x, y):
        a, b, c, d, e, f = self.q
        return a + b * x + c * y + d * x * x + e * x * y + f * y * y

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * math.exp(self._quad(x[0], x[1]))

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        return self.scale * np.exp(self._quad(xs[:, 0], xs[:, 1]))

    def gradient(self, x, step=None):
        x = np.asarray(x, dtype=float)
        v = self.value(x)
        a, b, c, d, e, f = self.q
        return np.array([v * (b + 2 * d * x[0] + e * x[1]), v * (c + 2 * f * x[1] + e * x[0])])

    def integral(self, lo, hi):
        lo = np.atleast_1d(lo)
        hi = np.atleast_1d(hi)
        a, b, c, d, e, f = self.q
        if e == 0.0:
            ix = ExpQuad1([a, b, d]).integral(lo[0], hi[0])
            iy = ExpQuad1([0.0, c, f]).integral(lo[1], hi[1])
            return self.scale * ix * iy
        val, _ = _sciint.dblquad(lambda y, x: math.exp(self._quad(x, y)), lo[0], hi[0], lo[1], hi[1], epsabs=1e-12)
        return self.scale * val

    def scaled(self, c):
        return ExpQuad2(self.q, self.scale * c)

    def to_text(self):
        a, b, c, d, e, f = self.q
        body = Poly2([[a, c, f], [b, e, 0.0], [d, 0.0, 0.0]]).to_text()
        return f"{self.scale!r}*exp({body})"

    def __repr__(self):
        return f"ExpQuad2({list(self.q)}, {self.scale})"


# kernel export codes for 1D pieces (see sampler._kernels)
KIND_POLY = 0
KIND_POLYPOW = 1
KIND_EXPQUAD = 2


# ---------------------------------------------------------------------------
# the field itself
# ---------------------------------------------------------------------------


class ScalarField:
    """Piecewise closed-form scalar field over an axis-aligned box.

    Pieces are laid out on the grid induced by per-axis interior breakpoints;
    cell (i, j) spans the half-open slab ``[break[i-1], break[i])`` on each
    axis, so point evaluation is total and deterministic.  Gradient-based
    operations refuse points within :data:`BOUNDARY_TOL` of a breakpoint.
    """

    def __init__(self, box, breaks, pieces):
        self.box = box
        if box.dim == 1:
            bx = np.asarray(breaks[0] if isinstance(breaks, (tuple, list)) and len(breaks) == 1 else breaks, dtype=float)
            self.breaks = (bx,)
            pieces = list(pieces)
            if len(pieces) != bx.size + 1:
                raise ValueError("need len(breaks)+1 pieces")
            self.pieces = pieces
        else:
            bx = np.asarray(breaks[0], dtype=float)
            by = np.asarray(breaks[1], dtype=float)
            self.breaks = (bx, by)
            arr = np.empty((bx.size + 1, by.size + 1), dtype=object)
            rows = list(pieces)
            for i in range(bx.size + 1):
                for j in range(by.size + 1):
                    arr[i, j] = rows[i][j]
            self.pieces = arr
        for b in self.breaks:
            if b.size and not np.all(np.diff(b) > 0):
                raise ValueError("breakpoints must be strictly increasing")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(c, box):
        if box.dim == 1:
            return ScalarField(box, np.array([]), [Const(c)])
        return ScalarField(box, (np.array([]), np.array([])), [[Const(c, dim=2)]])

    @staticmethod
    def from_pieces_1d(box, breaks, exprs):
        return ScalarField(box, np.asarray(breaks, dtype=float), list(exprs))

    @staticmethod
    def split_x(box, x_split, left, right):
        """Two-valued field split at ``x = x_split`` (1D or 2D box)."""
        lx = left if isinstance(left, Expression) else Const(left, dim=box.dim)
        rx = right if isinstance(right, Expression) else Const(right, dim=box.dim)
        if box.dim == 1:
            return ScalarField(box, np.array([x_split]), [lx, rx])
        return ScalarField(box, (np.array([x_split]), np.array([])), [[lx], [rx]])

    # -- lookup -------------------------------------------------------------

    @property
    def dim(self):
        return self.box.dim

    def piece_at(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = tuple(int(np.searchsorted(self.breaks[a], x[a], side="right")) for a in range(self.dim))
        return self.pieces[idx[0]] if self.dim == 1 else self.pieces[idx]

    def on_boundary(self, x, tol=BOUNDARY_TOL):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        for a in range(self.dim):
            b = self.breaks[a]
            if b.size and np.min(np.abs(b - x[a])) <= tol:
                return True
        return False

    def __call__(self, x):
        return self.piece_at(x).value(np.atleast_1d(np.asarray(x, dtype=float)) if self.dim == 2 else float(np.atleast_1d(x)[0]))

    def values(self, xs):
        """Vectorized evaluation at an array of points (n,) or (n, 2)."""
        xs = np.asarray(xs, dtype=float)
        if self.dim == 1:
            xs = xs.reshape(-1)
            out = np.empty(xs.size)
            idx = np.searchsorted(self.breaks[0], xs, side="right")
            for i in range(len(self.pieces)):
                m = idx == i
                if np.any(m):
                    out[m] = self.pieces[i].values(xs[m])
            return out
        xs = xs.reshape(-1, 2)
        out = np.empty(xs.shape[0])
        ix = np.searchsorted(self.breaks[0], xs[:, 0], side="right")
        iy = np.searchsorted(self.breaks[1], xs[:, 1], side="right")
        for i in range(self.pieces.shape[0]):
            for j in range(self.pieces.shape[1]):
                m = (ix == i) & (iy == j)
                if np.any(m):
                    out[m] = self.pieces[i, j].values(xs[m])
        return out

    def gradient(self, x):
        """Analytic per-piece gradient; raises OnDiscontinuity near breaks."""
        if self.on_boundary(x):
            raise OnDiscontinuity(f"point {x} lies on a piece boundary")
        step = 1e-6 * self.box.diameter
        piece = self.piece_at(x)
        g = piece.gradient(np.atleast_1d(np.asarray(x, dtype=float)) if self.dim == 2 else float(np.atleast_1d(x)[0]), step=step)
        return np.atleast_1d(np.asarray(g, dtype=float))

    def gradient_values(self, xs):
        """Vectorized per-piece analytic derivative (1D, smooth use only).

        No boundary policing: points exactly on a break get the right piece's
        derivative.  Intended for samplers on smooth (single-piece) fields.
        """
        if self.dim != 1:
            raise ValueError("gradient_values is 1D-only")
        xs = np.asarray(xs, dtype=float).reshape(-1)
        out = np.empty(xs.size)
        idx = np.searchsorted(self.breaks[0], xs, side="right")
        step = 1e-6 * self.box.diameter
        for i, p in enumerate(self.pieces):
            m = idx == i
            if not np.any(m):
                continue
            if hasattr(p, "gradient_values"):
                out[m] = p.gradient_values(xs[m])
            else:
                out[m] = np.array([p.gradient(float(x), step=step)[0] for x in xs[m]])
        return out

    # -- calculus -----------------------------------------------------------

    def _cells(self):
        """Yield (lo, hi, piece) for every partition cell."""
        if self.dim == 1:
            edges = np.concatenate(([self.box.lo[0]], self.breaks[0], [self.box.hi[0]]))
            for i, p in enumerate(self.pieces):
                yield (edges[i],), (edges[i + 1],), p
        else:
            ex = np.concatenate(([self.box.lo[0]], self.breaks[0], [self.box.hi[0]]))
            ey = np.concatenate(([self.box.lo[1]], self.breaks[1], [self.box.hi[1]]))
            for i in range(self.pieces.shape[0]):
                for j in range(self.pieces.shape[1]):
                    yield (ex[i], ey[j]), (ex[i + 1], ey[j + 1]), self.pieces[i, j]

    def integral(self):
        """Integral over the whole domain, exact per piece where possible."""
        return float(sum(p.integral(lo, hi) for lo, hi, p in self._cells()))

    def integral_on(self, lo, hi):
        """Integral over a sub-interval (1D only), split at piece boundaries."""
        if self.dim != 1:
            raise ValueError("integral_on is 1D-only")
        total = 0.0
        for (clo,), (chi,), p in self._cells():
            a = max(lo, clo)
            b = min(hi, chi)
            if b > a:
                total += p.integral(a, b)
        return float(total)

    def normalized(self):
        """Scale so the field integrates to one over the domain."""
        mass = self.integral()
        if not mass > 0.0:
            raise ZeroMass(f"field mass {mass} is not positive")
        return self.scaled(1.0 / mass)

    def scaled(self, c):
        if self.dim == 1:
            return ScalarField(self.box, self.breaks[0], [p.scaled(c) for p in self.pieces])
        rows = [[self.pieces[i, j].scaled(c) for j in range(self.pieces.shape[1])] for i in range(self.pieces.shape[0])]
        return ScalarField(self.box, self.breaks, rows)

    def map_pieces(self, fn):
        """New field with ``fn`` applied to every piece expression."""
        if self.dim == 1:
            return ScalarField(self.box, self.breaks[0], [fn(p) for p in self.pieces])
        rows = [[fn(self.pieces[i, j]) for j in range(self.pieces.shape[1])] for i in range(self.pieces.shape[0])]
        return ScalarField(self.box, self.breaks, rows)

    def minimum_on_grid(self, n=512):
        """Cheap positivity probe: min over a regular grid of interior points."""
        if self.dim == 1:
            xs = np.linspace(self.box.lo[0], self.box.hi[0], n + 2)[1:-1]
            return float(np.min(self.values(xs)))
        m = int(math.sqrt(n)) + 1
        xs = np.linspace(self.box.lo[0], self.box.hi[0], m + 2)[1:-1]
        ys = np.linspace(self.box.lo[1], self.box.hi[1], m + 2)[1:-1]
        X, Y = np.meshgrid(xs, ys)
        pts = np.column_stack([X.ravel(), Y.ravel()])
        return float(np.min(self.values(pts)))

    # -- kernel export (1D only) -------------------------------------------

    def kernel_arrays(self, max_deg=8):
        """Pack a 1D field into flat arrays consumable by numba kernels.

        Returns (breaks, kinds, coeffs, powers, scales); see
        :mod:`statediff.sampler` for the evaluation convention.
        """
        if self.dim != 1:
            raise ValueError("kernel export is 1D-only")
        n = len(self.pieces)
        kinds = np.zeros(n, dtype=np.int64)
        coeffs = np.zeros((n, max_deg + 1))
        powers = np.zeros(n)
        scales = np.ones(n)
        for i, p in enumerate(self.pieces):
            if isinstance(p, Const):
                kinds[i] = KIND_POLY
                coeffs[i, 0] = p.c
            elif isinstance(p, Poly1):
                if p.coeffs.size > max_deg + 1:
                    raise ValueError("polynomial degree too high for kernel export")
                kinds[i] = KIND_POLY
                coeffs[i, : p.coeffs.size] = p.coeffs
            elif isinstance(p, PolyPower1):
                if p.base.size > max_deg + 1:
                    raise ValueError("polynomial degree too high for kernel export")
                kinds[i] = KIND_POLYPOW
                coeffs[i, : p.base.size] = p.base
                powers[i] = p.power
                scales[i] = p.scale
            elif isinstance(p, ExpQuad1):
                kinds[i] = KIND_EXPQUAD
                coeffs[i, :3] = p.q
                scales[i] = p.scale
            else:
                raise ValueError(f"piece {p!r} has no kernel representation")
        return self.breaks[0].copy(), kinds, coeffs, powers, scales

    def __repr__(self):
        return f"ScalarField(dim={self.dim}, pieces={sum(1 for _ in self._cells())})"


def sqrt_double(field):
    """Return b = sqrt(2 * field), piecewise closed form (for noise fields)."""

    def fn(p):
        if isinstance(p, Const):
            return Const(math.sqrt(2.0 * p.c), dim=p.dim)
        if isinstance(p, Poly1):
            return PolyPower1(2.0 * p.coeffs, 0.5)
        if isinstance(p, PolyPower1):
            return PolyPower1(p.base, p.power / 2.0, math.sqrt(2.0 * p.scale))
        if isinstance(p, ExpQuad1):
            return ExpQuad1(p.q / 2.0, math.sqrt(2.0 * p.scale))
        raise ValueError(f"cannot take sqrt of piece {p!r}")

    return field.map_pieces(fn)
