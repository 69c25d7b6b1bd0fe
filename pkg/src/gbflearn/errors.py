"""Exception hierarchy and warning types.

The three error families map onto the CLI exit codes: configuration or
API-contract problems exit with 2, data/file problems with 3, and
numerical failures with 4.
"""


class GbfError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigError(GbfError):
    """Invalid configuration, parameters, or API usage."""

    exit_code = 2


class DataError(GbfError):
    """Problems with input data: files, labels, graphs built from data."""

    exit_code = 3


class NumericalError(GbfError):
    """Numerical failure: no convergence, singular systems, lost definiteness."""

    exit_code = 4


# -- graph construction ------------------------------------------------------

class InvalidEdge(DataError):
    """Edge with out-of-range index, self-loop, nonpositive weight, or duplicate."""


class DegenerateVertex(DataError):
    """Isolated vertex where a positive degree is required."""


class DisconnectedGraph(DataError):
    """Operation requires a connected graph."""


class SizeOverflow(ConfigError):
    """Requested product graph exceeds the configured size limit."""


class EmptyPointCloud(DataError):
    """Point cloud with no points."""


# -- spectral / kernels ------------------------------------------------------

class DimensionMismatch(ConfigError):
    """Operands with incompatible sizes."""


class ConvergenceFailure(NumericalError):
    """Eigensolver did not converge."""


class NonFiniteFilterValue(NumericalError):
    """Spectral filter produced a non-finite multiplier."""


class InvalidCenter(ConfigError):
    """Kernel center index out of range or repeated."""


class NotPositiveDefinite(ConfigError):
    """Positive definite generator required."""


class AlphaOutOfRange(ConfigError):
    """Feature-kernel parameter outside its admissible range."""


# -- solving / diagnostics ---------------------------------------------------

class SingularSystem(NumericalError):
    """Linear system is singular or too ill-conditioned to solve."""


class SingularSubkernel(NumericalError):
    """Kernel submatrix at the centers is singular."""


class NonFinite(NumericalError):
    """Computation produced NaN or infinity."""


class KernelNotPositive(ConfigError):
    """Kernel with nonpositive entries where strict positivity is required."""


class LabelsInconsistent(ConfigError):
    """Given labels contradict the feature prior they must agree with."""


class InvalidParameter(ConfigError):
    """Parameter outside its documented range."""


# -- data / files ------------------------------------------------------------

class ParseError(DataError):
    """Malformed input file; message reports row/column where possible."""


class UnknownLabel(DataError):
    """Label value with no mapping onto {-1, +1}."""


class IoError(DataError):
    """File could not be read or written."""


class DisconnectedGraphWarning(UserWarning):
    """Constructed graph is disconnected; emitted as a flag, not a failure."""
