"""Exception types shared across the package."""


class TethernetError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(TethernetError, ValueError):
    """A scenario or run parameter is out of its valid range."""


class UndefinedPairError(TethernetError, ValueError):
    """A pairwise WiFi quantity was requested for a node and itself."""


class UndefinedLinkError(TethernetError, ValueError):
    """A WiFi link rate was requested for a pair that is not hotspot->client."""


class InfeasibleAssignmentError(TethernetError, ValueError):
    """No rate allocation can satisfy the constraints for this assignment.

    Carries the feasibility report describing which constraints fail.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StructureError(TethernetError, ValueError):
    """A graph does not have the structure required by a closed-form rule."""


class SizeGuardError(TethernetError, ValueError):
    """An exhaustive-search input exceeds the configured size guard."""
