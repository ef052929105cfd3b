"""Exception hierarchy shared by the numerical modules."""
from __future__ import annotations

from typing import Optional


class LabError(RuntimeError):
    """Base class for every failure raised by the laboratory."""


class DomainError(LabError, ValueError):
    """Raised when a domain, a parameter or an evaluation point is invalid."""


class MeshError(LabError):
    """Raised when a triangulation cannot be produced or is inconsistent."""


class AssemblyError(LabError):
    """Raised when an element is degenerate during matrix assembly."""


class SourceError(LabError, ValueError):
    """Raised when a source takes negative values where nonnegativity is required."""


class SolverError(LabError):
    """Raised when an iterative linear solve does not converge."""

    def __init__(self, message: str, *, iterations: Optional[int] = None) -> None:
        super().__init__(message)
        self.iterations = iterations


class EigenSolverError(SolverError):
    """Raised when inverse iteration stagnates; carries the last residual."""

    def __init__(
        self,
        message: str,
        *,
        residual: float,
        iterations: Optional[int] = None,
    ) -> None:
        super().__init__(f"{message} (residual={residual:.3e})", iterations=iterations)
        self.residual = residual
