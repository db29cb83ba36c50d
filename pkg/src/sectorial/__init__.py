"""Desk-scale sectorial form calculus.

Dense-matrix realizations of sesquilinear-form machinery: numerical ranges
and sector fitting, Hilbert riggings and class norms, resolvent and
exponential maps through contour quadrature, lattice Hamiltonian families,
eigenvalue tracking, and a holomorphy verification harness.
"""

from . import (  # noqa: F401
    contour,
    eigenstate,
    errors,
    forms,
    holocheck,
    numcore,
    resolvent,
    rigging,
    schrodinger,
    semigroup,
)

__version__ = "0.1.0"
