"""Moment-method central limit theory for weakly dependent random fields."""

__version__ = "0.1.0"
