"""Component and character groups of Neron models of generalized Jacobians."""

__version__ = "0.1.0"
