"""Pseudospectral wave-Sobolev toolkit: multipliers, restriction norms, the
three-piece solution operator for the inhomogeneous wave equation and a Picard
solver for null-form nonlinearities."""
