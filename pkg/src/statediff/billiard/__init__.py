"""Event-driven random Lorentz gas: disc fields, packing, exact dynamics."""

from .engine import (Event, ParticleState, advance, advance_by_time,
                     next_event, random_free_state, reflect,
                     run_event_invariants, run_occupation_trajectory,
                     run_unfolded_checkpoints)
from .field import DiscField
from .packing import PHI_MIN, PHI_TOL, generate_field, two_domain_field

__all__ = [
    "DiscField", "Event", "ParticleState", "PHI_MIN", "PHI_TOL",
    "advance", "advance_by_time", "generate_field", "next_event",
    "random_free_state", "reflect", "run_event_invariants",
    "run_occupation_trajectory", "run_unfolded_checkpoints",
    "two_domain_field",
]
