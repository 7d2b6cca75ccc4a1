"""Triangular finite elements with generalized reference-to-physical transformations."""

from . import assembly, harness, mesh, quadrature, refelem, solver, transform

__all__ = ["assembly", "harness", "mesh", "quadrature", "refelem", "solver",
           "transform"]
