"""Exception types raised by the library."""


class ParameterError(ValueError):
    """A parameter set violates one or more model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SingularSystemError(ArithmeticError):
    """The drift matrix is singular, so no fixed point exists."""

    def __init__(self, det, threshold):
        self.det = complex(det)
        self.threshold = float(threshold)
        super().__init__(
            f"drift matrix is singular: |det(M)| = {abs(self.det):.3e} "
            f"below threshold {self.threshold:.3e} (det = {self.det:.6g})"
        )


class DriveOffError(ValueError):
    """A dark-phase query needs both drives switched on."""


class InfeasibleDesignError(ValueError):
    """A symmetric design was requested outside its domain."""


class StepSizeError(ValueError):
    """The integration step is too coarse for the drift spectrum."""


class OracleError(RuntimeError):
    """Master-equation oracle could not be set up or solved."""


class DimensionCapError(OracleError):
    pass


class DegenerateGeneratorError(OracleError):
    pass
