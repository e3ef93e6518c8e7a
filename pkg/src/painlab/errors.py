"""Error types raised across painlab.

Every numeric failure derives from PainlabError so the CLI can map it to exit
code 1 with the originating module in the message.
"""
from typing import Optional


class PainlabError(Exception):
    """Root of every painlab failure."""

    module = "painlab"

    def __init__(self, message: str, *, detail: Optional[dict] = None):
        super().__init__(message)
        self.detail = detail or {}

    def __str__(self) -> str:
        return f"[{self.module}] {super().__str__()}"


# mp-kernel
class PrecisionError(PainlabError):
    module = "precision"


class GammaPoleError(PrecisionError):
    """Gamma evaluated at a non-positive integer."""


class IncompleteGammaOriginError(PrecisionError):
    """Upper incomplete gamma at z = 0 with Re(a) <= 0."""


# series-engine
class SeriesError(PainlabError):
    module = "series"


class SeriesRangeError(SeriesError):
    """Requested table depth outside what the recurrences support."""


class ResummationPoleError(SeriesError):
    """Closed-form resummation evaluated on its pole."""


# stokes-engine
class StokesInputError(PainlabError):
    module = "stokes"


# asymptotic-evaluator
class AsymptoticError(PainlabError):
    module = "asymptotics"


class SectorError(AsymptoticError):
    """Point outside the sector where the expansion defines the solution."""


class AsymptoticRangeError(AsymptoticError):
    """|z| too small for optimal truncation to make sense."""


# continuation-engine
class ContinuationError(PainlabError):
    module = "continuation"


class BranchPointError(ContinuationError):
    """Taylor expansion requested at (or a path through) the branch point x = 0."""


class PathPlanError(ContinuationError):
    """Invalid waypoints, step counts or Taylor degree."""


class StepTooLargeError(ContinuationError):
    """Step exceeds the radius guard or the tail estimate exceeds tolerance."""


class SingularityProximityError(ContinuationError):
    """Walk aborted because the solution blew past the overflow guard."""


# pade-engine
class PadeError(PainlabError):
    module = "pade"


class SingularPadeError(PadeError):
    """Degenerate block in the Padé table."""


class RootNonConvergenceError(PadeError):
    """Simultaneous root iteration hit its cap."""


# singularity-hunter
class HunterError(PainlabError):
    module = "hunter"


class NonAnalyticError(HunterError):
    """Trapezoid sum failed to stabilise, something non-analytic sits on the contour."""


class FunctionalError(HunterError):
    """Functional not available for this equation instance."""


class NewtonDivergenceError(HunterError):
    """Scalar root solve did not converge."""


class NoRootsInWindowError(HunterError):
    """Prediction equation has no root inside the requested window."""


# borel-engine
class BorelError(PainlabError):
    module = "borel"


class InfeasibleBoundError(BorelError):
    """No sigma satisfies the closing inequalities for this c."""


# cli / configuration
class ConfigError(PainlabError):
    module = "config"
