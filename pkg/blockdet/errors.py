"""Exception hierarchy for blockdet.

Every failure raised by the library derives from :class:`BlockdetError`.
Input-validation failures also derive from :class:`ValueError`.
"""


class BlockdetError(Exception):
    """Base class for all blockdet errors."""


class DimensionMismatch(BlockdetError, ValueError):
    """Operand shapes are incompatible."""


class NotSquare(BlockdetError, ValueError):
    """A square matrix was required."""


class NotHermitian(BlockdetError, ValueError):
    """A Hermitian matrix was required."""


class NotPositiveDefinite(BlockdetError, ValueError):
    """A Cholesky pivot was not strictly positive."""


class DimensionTooLarge(BlockdetError, ValueError):
    """Input exceeds the size an exhaustive routine accepts."""


class IndexOutOfRange(BlockdetError, IndexError):
    """A (block) index lies outside the valid range."""


class BlockGridMismatch(BlockdetError, ValueError):
    """Block matrices do not share the same block-grid order."""


class EmptyFactorList(BlockdetError, ValueError):
    """A product over factors was requested with no factors."""


class NonSquareBlocks(BlockdetError, ValueError):
    """A determinant bound received a block matrix with rectangular blocks."""


class NegativeDiagonal(BlockdetError, ValueError):
    """A diagonal entry is negative, so the input cannot be semidefinite."""


class DomainError(BlockdetError, ValueError):
    """A scalar input lies outside the domain of the inequality."""


class ConfigInvalid(BlockdetError, ValueError):
    """Generator or suite configuration is invalid."""


class ParseError(BlockdetError, ValueError):
    """A JSON or YAML document could not be decoded."""


class ShapeMismatch(BlockdetError, ValueError):
    """Decoded inputs do not fit the shape the bound expects."""


class UnknownBound(BlockdetError, KeyError):
    """No bound is registered under the requested name."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown bound"
