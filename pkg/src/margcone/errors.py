"""Exception hierarchy shared by all modules."""


class MargconeError(Exception):
    """Base class for every error raised by this package."""


class NotHyperbolic(MargconeError):
    """An element expected to be hyperbolic is parabolic, elliptic or trivial."""


class DegenerateSolve(MargconeError):
    pass


class EmptyWord(MargconeError):
    """The identity has no closed geodesic, so invariants are undefined."""


class BadIndex(MargconeError):
    pass


class NoPingPongCertificate(MargconeError):
    """The arc search failed.

    The search is sound but not complete: the group may still be Schottky.
    """


class NotHyperbolicGenerator(NoPingPongCertificate):
    def __init__(self, index: int, msg: str = ""):
        self.index = index
        super().__init__(msg or f"generator g{index + 1} is not hyperbolic")


class RankDeficient(MargconeError):
    pass


class ZeroScale(MargconeError):
    pass


class SameSign(MargconeError):
    pass


class LPNumericalFailure(MargconeError):
    pass


class DimMismatch(MargconeError):
    pass


class BudgetExceeded(MargconeError):
    pass
