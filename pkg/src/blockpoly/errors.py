"""Exception hierarchy shared by every blockpoly module.

All numerical failures derive from :class:`BlockPolyError` so callers (and the
CLI) can map them to a single exit code while still catching specific modes.
"""


class BlockPolyError(Exception):
    """Base class for all blockpoly errors."""


class DimensionMismatch(BlockPolyError):
    """Operands have incompatible shapes."""


class NotMonic(BlockPolyError):
    """Operation requires a monic matrix polynomial (A_0 = I)."""


class SingularMatrix(BlockPolyError):
    """Pivoted elimination hit a negligible pivot.

    Attributes
    ----------
    pivot_index : int
        Zero-based elimination step at which the pivot fell below threshold.
    pivot_value : float
        Magnitude of the offending pivot.
    """

    def __init__(self, pivot_index, pivot_value, message=None):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            message
            or f"singular matrix: pivot {pivot_index} has magnitude {pivot_value:.3e}"
        )


class NoConvergence(BlockPolyError):
    """Iteration budget exhausted before the stopping criterion was met.

    Carries the trace (and for Q.D. the final tableau) for diagnosis.
    """

    def __init__(self, message, trace=None, tableau=None):
        self.trace = trace
        self.tableau = tableau
        super().__init__(message)


class SingularCoefficient(BlockPolyError):
    """A required interior coefficient A_k is singular (Q.D. initialization)."""

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"coefficient A_{k} is singular")


class SingularPivot(BlockPolyError):
    """A Q-block became singular during a Q.D. sweep.

    Signals dominance-order breakdown or equal-modulus block eigenvalues.
    """

    def __init__(self, block_index, sweep, message=None):
        self.block_index = block_index
        self.sweep = sweep
        super().__init__(
            message or f"Q-block {block_index} singular at sweep {sweep}"
        )


class SingularStep(BlockPolyError):
    """The step matrix (B_{l-1}, C_{l-1} or Delta) is singular."""


class SingularFrechet(BlockPolyError):
    """The Fréchet derivative matrix is singular at the current iterate."""


class SingularALast(BlockPolyError):
    """A_l is singular but the requested method needs its inverse."""


class StagnantWithoutResidual(BlockPolyError):
    """Step sizes collapsed but the residual stayed large: false convergence."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class InputNotSolvent(BlockPolyError):
    """A transform received a matrix that fails the solvent residual gate."""


class RankDeficientTransformer(BlockPolyError):
    """A similarity transformer failed its rank-m check."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"transformer {index} is rank deficient")


class SingularKroneckerSystem(BlockPolyError):
    """The m^2 x m^2 Kronecker system of a transform is singular."""


class DeflationResidualLarge(BlockPolyError):
    """Synthetic division left a remainder above the deflation gate."""

    def __init__(self, index, residual, message=None):
        self.index = index
        self.residual = residual
        super().__init__(
            message
            or f"deflation at factor {index} left residual {residual:.3e}"
        )


class SpectrumOverlap(BlockPolyError):
    """Chain factors share spectrum; the transform requires disjointness."""


class IncompleteSet(BlockPolyError):
    """A solvent set of the wrong cardinality was supplied."""


class ResidualTooLarge(BlockPolyError):
    """An input matrix failed a residual precondition."""


class InsufficientTrace(BlockPolyError):
    """A trace with too few iterates was passed to a diagnostic."""


class SingularLeadingCoefficient(BlockPolyError):
    """The numerator's leading coefficient N_k is singular."""


class NumeratorFactorizationFailed(BlockPolyError):
    """The decoupler could not factorize the numerator into block zeros."""


class SingularAtLambda(BlockPolyError):
    """Evaluation point coincides with a latent root of the denominator."""


class PipelineStageError(BlockPolyError):
    """Wraps a solver error with pipeline stage context."""

    def __init__(self, stage, factor_index, cause):
        self.stage = stage
        self.factor_index = factor_index
        self.cause = cause
        super().__init__(
            f"pipeline failed in stage '{stage}' at factor {factor_index}: {cause}"
        )
