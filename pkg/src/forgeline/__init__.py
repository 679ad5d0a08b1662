"""Toolkit for synthetic-image artifact annotation, evaluation, and refinement."""

__version__ = "0.1.0"
