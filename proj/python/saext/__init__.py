"""Self-adjoint extensions of Laplace and Dirac type operators."""

from ._saext import (
    BoundaryUnitary,
    Error,
    bound_state,
    compatibility_curve,
    dirichlet,
    inverse_cayley,
    neumann,
    quasi_periodic,
    robin,
    run_config,
    spectrum,
)

__all__ = [
    "BoundaryUnitary",
    "Error",
    "bound_state",
    "compatibility_curve",
    "dirichlet",
    "inverse_cayley",
    "neumann",
    "quasi_periodic",
    "robin",
    "run_config",
    "spectrum",
]
