"""Diffusion models specified by a diffusion coefficient and an equilibrium density.

A :class:`DiffusionModel` pairs D(x) with rho_eq(x) on a reflecting box.  The
zero-equilibrium-flux requirement then fixes the drift of the corresponding
Ito SDE to

    a(x) = grad D(x) + D(x) * grad(ln rho_eq(x))
         = grad(D(x) * rho_eq(x)) / rho_eq(x),

which is what :func:`drift_from_model` evaluates piecewise-analytically.
:class:`ConventionSpec` handles the 1D alpha-convention family (alpha = 0
Ito, 1/2 Stratonovich, 1 isothermal) for a general drift/noise pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import OnDiscontinuity, ZeroDensity
from .fields import Box, Const, Poly1, PolyPower1, ScalarField, sqrt_double


class DiffusionModel:
    """Domain + D(x) + rho_eq(x); all faces reflecting.

    ``rho_eq`` descriptors are treated as unnormalized weights; call
    :meth:`normalized` (or pass ``normalize=True``) to scale the density to
    unit mass.  D must be positive on the domain.
    """

    def __init__(self, box, d_field, rho_field, normalize=True):
        if d_field.dim != box.dim or rho_field.dim != box.dim:
            raise ValueError("field dimensions must match the domain")
        self.box = box
        self.d = d_field
        if d_field.minimum_on_grid() <= 0.0:
            raise ValueError("D(x) must be positive on the domain")
        if rho_field.minimum_on_grid() < 0.0:
            raise ValueError("rho_eq(x) must be nonnegative")
        self.rho_eq = rho_field.normalized() if normalize else rho_field

    @property
    def dim(self):
        return self.box.dim

    def normalized(self):
        return DiffusionModel(self.box, self.d, self.rho_eq, normalize=True)

    def drift(self, x):
        """Ito drift grad(D) + D grad(ln rho_eq) at an interior point."""
        if self.d.on_boundary(x) or self.rho_eq.on_boundary(x):
            raise OnDiscontinuity(f"drift undefined on a discontinuity at {x}")
        rho = self.rho_eq(x)
        if rho <= 0.0:
            raise ZeroDensity(f"rho_eq({x}) = {rho}")
        return np.atleast_1d(self.d.gradient(x) + self.d(x) * self.rho_eq.gradient(x) / rho)

    def smooth(self):
        """True when neither field has interior breakpoints."""
        return all(b.size == 0 for b in self.d.breaks) and all(b.size == 0 for b in self.rho_eq.breaks)

    def noise_field(self):
        """b(x) = sqrt(2 D(x)) as a closed-form field (1D)."""
        return sqrt_double(self.d)

    def __repr__(self):
        return f"DiffusionModel(dim={self.dim}, D={self.d!r}, rho_eq={self.rho_eq!r})"


def drift_from_model(model, x):
    """Drift vector of the zero-flux Ito SDE for ``model`` at point ``x``."""
    return model.drift(x)


def normalize(model):
    """Return a copy of ``model`` whose rho_eq integrates to one."""
    return model.normalized()


# ---------------------------------------------------------------------------
# stochastic-convention algebra (1D)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConventionSpec:
    """A 1D SDE dx = a dt + b dB read under evaluation convention ``alpha``.

    alpha = 0 is Ito, 1/2 Stratonovich, 1 isothermal (anti-Ito).
    """

    alpha: float
    a: ScalarField
    b: ScalarField

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.a.dim != 1 or self.b.dim != 1:
            raise ValueError("convention algebra is 1D-only")
        if self.b.minimum_on_grid() <= 0.0:
            raise ValueError("b(x) must be positive")


def _bbprime_piece(p):
    """b*b' for one piece, exact for polynomials and sqrt-of-polynomial."""
    if isinstance(p, Const):
        return Const(0.0)
    if isinstance(p, Poly1):
        prod = npoly.polymul(p.coeffs, npoly.polyder(p.coeffs)) if p.coeffs.size > 1 else np.array([0.0])
        return Poly1(prod)
    if isinstance(p, PolyPower1):
        # d/dx [s P^p] * s P^p = s^2 p P^(2p-1) P'; polynomial iff 2p-1 is a
        # nonnegative integer (covers the sqrt case p = 1/2).
        two_p_minus_1 = 2.0 * p.power - 1.0
        if abs(two_p_minus_1 - round(two_p_minus_1)) < 1e-12 and round(two_p_minus_1) >= 0:
            k = int(round(two_p_minus_1))
            base_pow = np.array([1.0])
            for _ in range(k):
                base_pow = npoly.polymul(base_pow, p.base)
            dp = npoly.polyder(p.base) if p.base.size > 1 else np.array([0.0])
            return Poly1(p.scale * p.scale * p.power * npoly.polymul(base_pow, dp))
        raise ValueError(f"b*b' not closed-form for {p!r}")
    raise ValueError(f"b*b' not closed-form for {p!r}")


def ito_drift_field(conv):
    """The field a(x) + alpha * b(x) * b'(x), exact piecewise algebra.

    Supported when ``a`` pieces are constants/polynomials and ``b`` pieces are
    polynomials or square roots of polynomials, with matching breakpoints.
    """
    if not np.array_equal(conv.a.breaks[0], conv.b.breaks[0]):
        raise ValueError("a and b must share breakpoints for field-level conversion")

    pieces = []
    for pa, pb in zip(conv.a.pieces, conv.b.pieces):
        corr = _bbprime_piece(pb).scaled(conv.alpha)
        ca = np.atleast_1d(pa.coeffs) if isinstance(pa, Poly1) else np.array([pa.c])
        pieces.append(Poly1(npoly.polyadd(ca, np.atleast_1d(corr.coeffs) if isinstance(corr, Poly1) else np.array([corr.c]))))
    return ScalarField(conv.a.box, conv.a.breaks[0], pieces)


def to_ito_drift(conv, x):
    """Equivalent Ito drift a(x) + alpha*b(x)*b'(x) at a point (1D)."""
    if conv.b.on_boundary(x) or conv.a.on_boundary(x):
        raise OnDiscontinuity(f"conversion undefined on a discontinuity at {x}")
    bprime = conv.b.gradient(x)[0]
    return float(conv.a(x) + conv.alpha * conv.b(x) * bprime)


def stationary_density_driftfree(alpha, b):
    """Unnormalized stationary density of dx = b(x) dB under convention alpha.

    On a reflecting interval the zero-flux solution is proportional to
    b(x)**(2*alpha - 2): 1/b**2 (that is, 1/(2D)) for Ito, constant for the
    isothermal convention.
    """
    if b.dim != 1:
        raise ValueError("1D only")
    expo = 2.0 * alpha - 2.0

    def fn(p):
        if isinstance(p, Const):
            return Const(p.c ** expo)
        if isinstance(p, Poly1):
            if expo == 0.0:
                return Const(1.0)
            return PolyPower1(p.coeffs, expo)
        if isinstance(p, PolyPower1):
            return PolyPower1(p.base, p.power * expo, p.scale ** expo)
        raise ValueError(f"unsupported piece {p!r}")

    return b.map_pieces(fn)


def convention_flux_residual(alpha, b, rho, xs):
    """Pointwise residual of the alpha-convention stationary flux.

    Evaluates alpha*b*b'*rho - (b**2 rho)'/2 at the given points; identically
    zero when ``rho`` is the matching stationary family member.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    res = np.empty(xs.size)
    for i, x in enumerate(xs):
        bb = b(x)
        bp = b.gradient(x)[0]
        r = rho(x)
        rp = rho.gradient(x)[0]
        # (b^2 rho)' = 2 b b' rho + b^2 rho'
        res[i] = alpha * bb * bp * r - 0.5 * (2.0 * bb * bp * r + bb * bb * rp)
    return res
