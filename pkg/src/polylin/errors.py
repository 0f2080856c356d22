"""Exception hierarchy shared by all modules."""


class PolyLinError(ValueError):
    """Base class for every error raised by this package."""


class ZeroPolynomialError(PolyLinError):
    pass


class DegreeError(PolyLinError):
    """Degree outside the range an operation supports."""


class ScalingError(PolyLinError):
    pass


class CommonKernelError(PolyLinError):
    """The coefficients share a right kernel vector (col stack rank < n)."""


class InvalidAnnihilatorError(PolyLinError):
    def __init__(self, check, detail=""):
        self.check = check
        super().__init__(f"invalid annihilator W: {check} failed {detail}".rstrip())


class DLConstructionError(PolyLinError):
    pass


class PreconditionError(PolyLinError):
    pass


class RankDeficiencyError(PolyLinError):
    def __init__(self, operand, margin=None):
        self.operand = operand
        self.margin = margin
        msg = f"{operand} is rank deficient"
        if margin is not None:
            msg += f" (smallest singular value {margin:.3e})"
        super().__init__(msg)


class IdentityBlockError(PolyLinError):
    pass


class AnchorError(PolyLinError):
    """No sphere point on the anchor grid makes the required evaluations nonsingular."""


class SingularPencilError(PolyLinError):
    pass


class SolverError(PolyLinError):
    pass


class SingularPolynomialError(PolyLinError):
    pass


class FormatError(PolyLinError):
    """Malformed polynomial / pencil / config file."""
