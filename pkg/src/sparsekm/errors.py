"""Exception and warning types shared across the package.

Every error carries an exit_code so the command line can map failure
classes to process exit statuses: 1 usage, 2 data, 3 numerical.
"""


class SparsekmError(Exception):
    exit_code = 3


class UsageError(SparsekmError):
    """Bad flags, malformed grids, out-of-range parameters."""

    exit_code = 1


class DataError(SparsekmError):
    """Input data is unusable (parse failures, NaN, shape mismatch)."""

    exit_code = 2


class NumericalError(SparsekmError):
    """The computation itself broke down."""

    exit_code = 3


class NonFiniteInput(DataError):
    """Input matrix contains NaN or infinity."""


class LengthMismatch(DataError):
    """Two partitions (or a result and its truth) disagree on n."""


class IndexOutOfRange(DataError):
    """A support index refers past the number of features."""


class InvalidSpec(UsageError):
    """Mixture spec fields are inconsistent."""


class UnknownExperiment(UsageError):
    """Experiment id is not one of E1, E2, E3a, E3b, E4."""


class SparsityOutOfRange(UsageError):
    """s outside the valid range for the chosen method."""


class EmptyCluster(NumericalError):
    """A cluster has no members where a non-empty one is required."""


class AllZeroWeights(NumericalError):
    """Every feature weight is zero, so the weighted metric is degenerate."""


class AllNonPositiveBcss(NumericalError):
    """No feature has positive between-cluster dispersion; the soft
    threshold has nothing to keep."""


class DegenerateData(UserWarning):
    """Fewer than k distinct rows under the weighted metric; seeding fell
    back to duplicate-tolerant selection."""


class NonPositiveObjective(UserWarning):
    """A candidate sparsity value produced a non-positive objective and was
    dropped from gap contention."""
