"""Limit moments of symmetric blocks of random matrices.

Submodules
----------
partitions
    Noncrossing (pair) partitions and adaptedness to index tuples.
moments
    Exact limit moments as weighted partition sums.
fock
    Truncated matricially free Fock space used as a brute-force oracle.
analytic
    Closed-form sequences, densities and S-transform convolution.
rmt
    Monte Carlo block random matrices.
cli
    Command-line front end.
"""

from ._errors import (
    BlockFreeError,
    InvalidArgument,
    InvalidConfiguration,
    ResourceLimitError,
    TruncationOverflow,
    UndefinedSTransform,
    UndefinedTrace,
)

__version__ = "0.1.0"
