"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: configuration and input
problems exit 1, oracle/precondition violations exit 2.  Optimization
non-convergence is never an exception (it is reported as data).
"""


class ParseError(ValueError):
    """Raised when a Pauli-sum document violates the file grammar."""

    def __init__(self, line: int, column: int, reason: str):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class DimensionMismatch(ValueError):
    """Operands act on different qubit counts."""


class ParamCountMismatch(ValueError):
    """Parameter vector length does not match the ansatz layout."""


class HermiticityError(ValueError):
    """An operator expected to be Hermitian has a residual imaginary part."""


class NotCommuting(ValueError):
    """The Hamiltonian and a supposed conserved quantity do not commute."""


class OracleTooLarge(ValueError):
    """Dense diagonalization was requested above the configured qubit cap."""


class EmptySector(LookupError):
    """No eigenstate carries the requested conserved-quantity eigenvalue."""


class SingleEigenvalue(ValueError):
    """A distinct-eigenvalue gap is undefined (observable proportional to I)."""


class InvalidEstimate(ValueError):
    """Energy estimates are inconsistent (target below ground, or bad gap)."""


class InconsistentTarget(ValueError):
    """A state below the target index already carries the target eigenvalue."""


class PenaltyFormError(ValueError):
    """A cost evaluator was invoked on a spec with the other penalty form."""


class TargetNotInCloud(LookupError):
    """The requested (charge, energy) pair is not a spectrum point."""


class NotBoundary(ValueError):
    """Tangent analysis requires the target to lie on the lower envelope."""


class InvalidProbability(ValueError):
    """Depolarizing probability outside [0, 1)."""


class NonFiniteCost(ArithmeticError):
    """The cost function evaluated to NaN or infinity."""
