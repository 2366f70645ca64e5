"""Schema definitions shared by models, descriptions and reports."""

from .base import ONCE, ExactModel, Multiplicity, Scalar

__all__ = ["ONCE", "ExactModel", "Multiplicity", "Scalar"]
