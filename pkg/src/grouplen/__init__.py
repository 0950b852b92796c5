"""Length functions on groups: axiom checks, exact computations on
Heisenberg and abelian-by-cyclic groups, and checkable vanishing
certificates."""

__version__ = "0.1.0"
