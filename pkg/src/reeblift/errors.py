"""Exception hierarchy shared by every module."""


class ReebLiftError(Exception):
    """Base class for all errors raised by reeblift."""


class DimensionError(ReebLiftError, ValueError):
    pass


class DegreeOverflow(ReebLiftError, ValueError):
    pass


class DegenerateInput(ReebLiftError, ValueError):
    pass


class AmbiguousBoundary(ReebLiftError):
    """A point lies on two boundary hypersurfaces at once."""


class DegeneratePosition(ReebLiftError):
    """Critical values too close together; perturb the domain."""


class TangencyAtLevel(ReebLiftError):
    """A vertical line meets the boundary tangentially."""


class SweepError(ReebLiftError):
    pass


class ClassifyError(ReebLiftError):
    pass


class ClusterInstability(ReebLiftError):
    pass


class SizeLimit(ReebLiftError):
    pass


class GeometryError(ReebLiftError, ValueError):
    pass
