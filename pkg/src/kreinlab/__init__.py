"""kreinlab: finite-dimensional models of indefinite involutions and Krein-space
representations, with residual checks for every algebraic relation."""

__version__ = "0.1.0"
