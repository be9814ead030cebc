"""Hamiltonian recovery from degenerate steady states."""
from .models import ModelKind, enumerate_terms, random_instance, term_count
from .ose import (
    DegeneracyProfile,
    assemble_equations,
    critical_length,
    predicted_lie_count,
    recovery_error,
    solve_nullspace,
)
from .pipeline import recover, spec_from_profile
from .spectral import build_steady_state, cluster_weights, complement_basis, eigendecompose

__version__ = "0.1.0"
