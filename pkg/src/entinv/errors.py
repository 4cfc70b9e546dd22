"""Exception types shared across the package."""


class EntinvError(ValueError):
    """Base class for all rejections raised by this package."""


class LabelError(EntinvError):
    """Unknown, missing or colliding subsystem label."""


class NormalizationError(EntinvError):
    """State vector norm too far from one to be silently renormalized."""


class PhysicalityError(EntinvError):
    """A matrix or scalar violates a physical bound (trace, positivity, purity range)."""


class PreconditionError(EntinvError):
    """An operation was applied to a state that does not satisfy its input contract."""


class CapacityError(EntinvError):
    """The requested dense state would exceed the configured dimension cap."""
