"""Exception types shared across the package."""


class LoopforgeError(Exception):
    """Base class for every error raised by loopforge."""


class FieldMismatch(LoopforgeError):
    """Operands belong to different fields."""


class DivisionByZero(LoopforgeError):
    """Division by the zero element of a field."""


class DimensionMismatch(LoopforgeError):
    """Matrix/vector dimensions are incompatible."""


class SingularMatrix(LoopforgeError):
    """Inversion of a singular matrix was attempted."""


class ClosureCapExceeded(LoopforgeError):
    """Group closure grew past its cap (group too large or infinite)."""

    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"group closure exceeded cap {cap}")


class ElementNotInClosure(LoopforgeError):
    """A matrix is not a member of the computed group closure."""


class InvalidEndomorphism(LoopforgeError):
    """An endomorphism description does not define a homomorphism."""


class CapExceeded(LoopforgeError):
    """An exhaustive verification was asked to run past its size cap."""


class SingularPsi(LoopforgeError):
    """The multiplication map psi came out singular; eligibility is broken."""


class NotInOrbit(LoopforgeError):
    """A transversal subspace does not lie on the tracked orbit."""


class NonUniqueTau(LoopforgeError):
    """More than one candidate translation maps the base subspace onto X."""


class InvalidParams(LoopforgeError):
    """Family parameters violate the family's validity predicate."""


class EligibilityFailed(LoopforgeError):
    """A family predicate held but enumeration found an eigenvalue-1 element."""


class NumericEligibilityLost(LoopforgeError):
    """A sampled point on the t-curve came too close to an eigenvalue-1 matrix."""

    def __init__(self, t, detail=""):
        self.t = t
        msg = f"numeric eligibility lost at t={t!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SpecFileError(LoopforgeError):
    """A spec file failed schema validation."""
