"""Exception hierarchy shared by all hamsing modules."""


class HamsingError(Exception):
    """Base class for domain errors (CLI maps these to exit status 1)."""


class IndexOutsideClass(HamsingError):
    def __init__(self, offending, M, N):
        self.offending = sorted(offending)
        super().__init__(
            f"indices {self.offending} violate i(N+1) + j(M+1) < (N+1)(M+1) "
            f"for M={M}, N={N}"
        )


class NonpositiveDegrees(HamsingError):
    pass


class ZeroLeadingCoefficient(HamsingError):
    pass


class DegenerateClass(HamsingError):
    """Raised for MN = 1, where the leading-order balance has no solution."""


class NotNormalizable(HamsingError):
    pass


class NonRationalDeterminant(HamsingError):
    pass


class TruncationTooShort(HamsingError):
    pass


class BranchInconsistency(HamsingError):
    pass


class ConditionsViolated(HamsingError):
    def __init__(self, residues):
        self.residues = residues
        super().__init__(f"{len(residues)} resonance condition(s) do not vanish")


class NotInvertible(HamsingError):
    pass


class GammaNonzero(HamsingError):
    def __init__(self, index, residue):
        self.index = index
        self.residue = residue
        super().__init__(f"gamma{index} does not vanish: {residue}")


class NonTermination(HamsingError):
    pass


class StepUnderflow(HamsingError):
    def __init__(self, z, message="step size underflow"):
        self.z = z
        super().__init__(f"{message} at z={z}")


class ClearanceViolation(HamsingError):
    pass


class ChartInconsistency(HamsingError):
    pass


class RootAmbiguity(HamsingError):
    pass


class InsufficientSpan(HamsingError):
    pass


class LoopBlowUp(HamsingError):
    pass


class ZeroCrossing(HamsingError):
    pass
