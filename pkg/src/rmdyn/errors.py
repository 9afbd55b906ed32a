"""Exception and warning types shared across the package."""


class RmdynError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RmdynError):
    """Invalid grid/packet/config combination (mismatched grids, padding violations, bad keys)."""


class DegenerateStateError(RmdynError):
    """Operation on a zero or otherwise unusable state vector."""


class DomainError(RmdynError):
    """Arguments outside the domain where a relation is defined."""


class CalibrationError(RmdynError):
    """Step-size calibration failed to bracket or converge."""


class DegenerateTargetError(RmdynError):
    """All detector-class overlaps vanish; no outcome distribution exists."""


class BoundaryContaminationWarning(UserWarning):
    """Probability mass reached the edge cells of a periodic grid during propagation."""
