"""Metropolis-adjusted Euler-Maruyama on a discontinuous (D, rho_eq) pair.

The model: D jumps from 1 to 2 at x = 0 while rho_eq is uniform on [-1, 1]
(zero outside, which is all the boundary handling the chain needs).  Plain
drift-free proposals are accepted against rho_eq with the proposal-density
correction, so the equilibrium histogram is flat at every step size while
the per-bin effective diffusion (mean squared step over 2h, rejections
counting as zero) converges to the true two-valued D as h shrinks.
"""

import numpy as np

from statediff import Box, DiffusionModel, ScalarField
from statediff.sampler import run_ensemble

box = Box.interval(-1.0, 1.0)
model = DiffusionModel(box, ScalarField.split_x(box, 0.0, 1.0, 2.0),
                       ScalarField.constant(1.0, box))

print("h        accept   max|density-0.5|   D_eff(left)  D_eff(right)")
for h in (1e-2, 1e-3, 1e-4):
    res = run_ensemble(model, h, 64, 500_000, seed=42)
    b = res.bins
    dens_dev = float(np.max(np.abs(b.density - 0.5)))
    d_left = float(np.mean(b.d_eff[2:8]))
    d_right = float(np.mean(b.d_eff[12:18]))
    print(f"{h:<8g} {res.acceptance_fraction:.4f}   {dens_dev:<18.4f} "
          f"{d_left:<12.4f} {d_right:.4f}")
print("\nexact: density 0.5 everywhere, D = 1 (left) and 2 (right)")
print("the flat histogram holds at every h; D_eff sharpens as h drops")
