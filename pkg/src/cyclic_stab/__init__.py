"""Workbench for stability conditions on 2-periodic categories of matrix
factorizations: exact-arithmetic hom spaces, degree-weighted morphism
graphs, integer lifts, filtration certificates and charge-path monodromy."""

__version__ = "0.1.0"
