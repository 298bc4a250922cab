"""statediff: state-dependent diffusion, from microscopic billiards to samplers.

An event-driven random Lorentz gas engine (exact hard-disc dynamics in a
two-domain box), a modelling layer that pairs a diffusion coefficient D(x)
with an equilibrium density rho_eq(x), the Metropolis-adjusted Euler-Maruyama
sampler that realizes that pair without a drift term, and a conservative 1D
Fokker-Planck reference solver.
"""

__version__ = "0.1.0"

from .fields import (Box, Const, ExpQuad1, ExpQuad2, Poly1, Poly2, PolyPower1,
                     ScalarField, sqrt_double)
from .model import (ConventionSpec, DiffusionModel, convention_flux_residual,
                    drift_from_model, ito_drift_field, normalize,
                    stationary_density_driftfree, to_ito_drift)

__all__ = [
    "Box", "Const", "ConventionSpec", "DiffusionModel", "ExpQuad1", "ExpQuad2",
    "Poly1", "Poly2", "PolyPower1", "ScalarField", "convention_flux_residual",
    "drift_from_model", "ito_drift_field", "normalize", "sqrt_double",
    "stationary_density_driftfree", "to_ito_drift", "__version__",
]
