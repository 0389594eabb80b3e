"""Exception hierarchy shared by all modules."""


class BlockFreeError(Exception):
    """Base class for package errors."""


class InvalidArgument(BlockFreeError, ValueError):
    """An argument is malformed or out of range."""


class InvalidConfiguration(BlockFreeError, ValueError):
    """Model parameters violate the hypothesis of the requested formula."""


class ResourceLimitError(BlockFreeError):
    """An enumeration or series would exceed the supported size."""


class TruncationOverflow(BlockFreeError):
    """A Fock-space creation would push a word past the truncation depth."""


class UndefinedTrace(BlockFreeError, ValueError):
    """Partial trace over an empty index block."""


class UndefinedSTransform(BlockFreeError, ValueError):
    """S-transform requested for a sequence with vanishing first moment."""
