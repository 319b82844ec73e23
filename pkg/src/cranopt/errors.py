"""Exception types shared across the package."""


class CranoptError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CranoptError):
    """A scenario/config file is malformed or missing required fields."""


class InvariantViolationError(CranoptError):
    """A loaded or constructed object violates one of its invariants."""


class ModelDomainError(CranoptError):
    """Rate-model evaluation outside its domain (e.g. more served users
    than antennas, or a nonpositive logarithm argument)."""


class DegenerateWeightsError(CranoptError):
    """A monomialization weight group summed to zero."""


class ExpansionPointError(CranoptError):
    """A linearization was requested at an invalid expansion point."""


class InvalidAssociationError(CranoptError):
    """A fixed association fed to the power subproblem violates its
    structural preconditions."""


class StepInfeasibleError(CranoptError):
    """A GP subproblem was infeasible at the first inner iteration."""


class CertifiedInfeasibleError(CranoptError):
    """All repair moves were exhausted without reaching feasibility."""


class InstanceTooLargeError(CranoptError):
    """The brute-force enumeration budget would be exceeded."""


class UndefinedEnergyEfficiencyError(CranoptError):
    """Energy efficiency requested for a zero-utility allocation."""
