"""Heegner points, class groups and the Kronecker limit formula at desk scale."""
__version__ = "0.1.0"

from ._arith import ConsistencyError, DomainError, PreconditionError

__all__ = ["ConsistencyError", "DomainError", "PreconditionError", "__version__"]
