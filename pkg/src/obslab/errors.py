"""Exception types shared across the package.

Two families exist: ``InvalidInput`` for malformed data (bad matrices,
intervals, states) and ``NumericalFailure`` for computations that ran but
could not be trusted (tolerance clusters, unconverged quadrature).  The CLI
maps them to exit codes 1 and 2.
"""


class ObsLabError(Exception):
    code = "error"


class InvalidInput(ObsLabError, ValueError):
    code = "invalid_input"


class NumericalFailure(ObsLabError, ArithmeticError):
    code = "numerical_failure"


class PhaseMatrixError(InvalidInput):
    """Raised by validation; ``violations`` lists every failed invariant."""

    code = "invalid_phase_matrix"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class BadInterval(InvalidInput):
    code = "bad_interval"


class BadState(InvalidInput):
    code = "bad_state"


class NotRankOne(InvalidInput):
    code = "not_rank_one"


class WitnessInvalid(InvalidInput):
    code = "witness_invalid"


class EpsilonTooLarge(InvalidInput):
    code = "epsilon_too_large"


class GridTooCoarse(InvalidInput):
    code = "grid_too_coarse"


class DegenerateTolerance(NumericalFailure):
    code = "degenerate_tolerance"


class QuadratureNotConverged(NumericalFailure):
    code = "quadrature_not_converged"


class TailTooLarge(NumericalFailure):
    code = "tail_too_large"


class ImaginaryResidue(NumericalFailure):
    code = "imaginary_residue"
