"""Contrastive explanations for MILP solutions via irreducible infeasible subsystems."""

__version__ = "0.1.0"
