"""
Error Types
Exceptions raised by the subordination toolkit
"""


class SubordinationError(ValueError):
    """Base class for toolkit errors"""


class ZeroConstantTerm(SubordinationError):
    """Series has no usable constant term for a reciprocal"""


class NotNormalized(SubordinationError):
    """Series violates a normalization (p(0)=1, or a0=0 and a1=1)"""


class MissingBeta3(SubordinationError):
    """Third-order operator requested without beta3"""


class InvalidJanowskiParams(SubordinationError):
    """Janowski parameters outside -1 < D < C <= 1"""


class TooCloseToBoundary(SubordinationError):
    """Point lies within the band of the sampled boundary curve"""


class SingularTheta(SubordinationError):
    """Boundary function is singular at the requested angle"""


class DegenerateS(SubordinationError):
    """Admissibility tuple has s too close to zero"""


class MissingU(SubordinationError):
    """Third-order admissibility requested without u"""


class InvalidMK(SubordinationError):
    """(m, k) does not satisfy k >= m >= 2"""


class InvalidTheorem(SubordinationError):
    """Theorem identifier that no result covers"""


class UsageError(SubordinationError):
    """Command-line flag outside its valid range"""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


# Verdict flag: principal arcsin disagreed with the winding oracle
BRANCH_AMBIGUITY = "branch_ambiguity"
