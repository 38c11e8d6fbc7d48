"""Exception hierarchy for vortexstab."""


class VortexStabError(Exception):
    """Base class for all vortexstab errors."""


class DimensionMismatch(VortexStabError):
    """Operands have incompatible matrix/vector dimensions."""


class SingularCoupling(VortexStabError):
    """Circulation coupling matrix could not be inverted reliably."""


class Collision(VortexStabError):
    """Two vortices are closer than the collision tolerance."""


class DomainError(VortexStabError):
    """A logarithm argument is non-positive (collision or infeasible state)."""


class EmptyTrajectory(VortexStabError):
    """Trajectory has no samples."""


class NotInOpenSet(VortexStabError):
    """State has a vanishing entry; constraint machinery is undefined there."""


class UnsupportedScenario(VortexStabError):
    """No closed-form fixture exists for this configuration."""


class Infeasible(VortexStabError):
    """Multiplier system has no solution at the requested point."""


class RankDeficiency(VortexStabError):
    """Computed nullspace dimension differs from the expected one."""


class ExcludedParameter(VortexStabError):
    """Scenario parameter value is outside the admissible set."""


class NoConvergence(VortexStabError):
    """Dense eigensolver failed to converge."""


class NotAFixedPoint(VortexStabError):
    """Certification was requested at a point that is not a fixed point."""


class NotAFixedPointWarning(UserWarning):
    """Linearization was requested at a point that is not a fixed point."""
