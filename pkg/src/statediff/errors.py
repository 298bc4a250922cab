"""Exception hierarchy shared by all statediff modules."""


class StateDiffError(Exception):
    """Base class for all statediff errors."""


class OnDiscontinuity(StateDiffError):
    """Point lies (within tolerance) on a piece boundary of a field."""


class ZeroDensity(StateDiffError):
    """Equilibrium density vanishes where a positive value is required."""


class ZeroDensityAtCurrent(ZeroDensity):
    """Chain is at a state with zero equilibrium density (invalid state)."""


class ZeroMass(StateDiffError):
    """Field integrates to zero; cannot normalize."""


class PhiOutOfRange(StateDiffError):
    """Requested free volume fraction outside the admissible range."""


class PackingFailed(StateDiffError):
    """Disc packing did not reach the target coverage."""


class StuckParticle(StateDiffError):
    """Event loop stopped making progress (corrupted geometry)."""


class WindowTooShort(StateDiffError):
    """Too few checkpoints inside the requested fit window."""


class DriftUndefined(StateDiffError):
    """Full-drift integration requested on a discontinuous model."""


class UnalignedDiscontinuity(StateDiffError):
    """A field discontinuity does not lie on a grid face."""


class NonconservativeStep(StateDiffError):
    """A solver step drifted total mass beyond tolerance."""


class SampleOutOfRange(StateDiffError):
    """A sample falls outside the binning range."""


class LowCount(StateDiffError):
    """Too few expected counts per bin for a chi-square comparison."""


class ConfigError(StateDiffError):
    """Invalid or unknown experiment configuration."""
